"""Network simulation: construction, ordering, validation, lifecycle, replay."""

import pytest

from conftest import make_add_org_envelope
from opsflow.canonical import canonical_json
from opsflow.configtx import Envelope
from opsflow.repository import synthesize_package
from opsflow.simnet.genesis import GenesisSpec, GenesisSpecError
from opsflow.simnet.network import Network
from opsflow.simnet.types import (
    ChaincodeDefinition,
    ChaincodeError,
    ConfigRejectedError,
    NotMemberError,
    SimnetError,
    UnknownChannelError,
    majority,
)

# -- construction -------------------------------------------------------------


def test_minimal_network():
    net = Network.create(GenesisSpec.standard(1, 0, 0, seed=7))
    assert len(net.channels) == 2
    kinds = {c.config.kind for c in net.channels.values()}
    assert kinds == {"system", "ops"}
    for channel in net.channels.values():
        assert channel.config.member_orgs == ("org1",)


def test_standard_network_has_committed_chaincodes(net322):
    assert len(net322.channels) == 4
    for channel_id in ("app-channel-1", "app-channel-2"):
        for name in ("asset-cc-1", "asset-cc-2"):
            state = net322.lifecycle_state(channel_id, name)
            assert state.committed_definition is not None
            assert state.committed_definition.sequence == 1


def test_same_spec_same_seed_identical_digests():
    a = Network.create(GenesisSpec.standard(3, 2, 2, seed=7))
    b = Network.create(GenesisSpec.standard(3, 2, 2, seed=7))
    assert a.state_digest() == b.state_digest()


def test_different_seed_different_digest():
    a = Network.create(GenesisSpec.standard(2, 1, 0, seed=1))
    b = Network.create(GenesisSpec.standard(2, 1, 0, seed=2))
    assert a.state_digest() != b.state_digest()


def test_invalid_specs_rejected():
    with pytest.raises(GenesisSpecError):
        GenesisSpec.standard(0, 0, 0, seed=1)
    with pytest.raises(GenesisSpecError):
        GenesisSpec.standard(2, 0, 1, seed=1)  # chaincodes without app channels
    spec = GenesisSpec.standard(2, 1, 0, seed=1)
    dup = GenesisSpec(
        orgs=(spec.orgs[0], spec.orgs[0]), channels=spec.channels, seed=1
    )
    with pytest.raises(GenesisSpecError):
        dup.validate()


def test_genesis_spec_round_trips():
    spec = GenesisSpec.standard(3, 2, 1, seed=9)
    assert GenesisSpec.from_json(spec.to_json()) == spec


# -- transaction submission and endorsement ------------------------------------


def test_invoke_with_majority_endorsement_is_valid(net322):
    tx = net322.build_invoke(
        "app-channel-1", "asset-cc-1", "put", {"key": "k", "value": "v"},
        creator="org1", endorsers=["org1", "org2"],
    )
    receipt = net322.submit("app-channel-1", tx)
    assert receipt.valid  # 2 >= floor(3/2)+1
    assert net322.query("app-channel-1", "asset-cc-1", "get", {"key": "k"}) == "v"


def test_invoke_below_majority_is_recorded_invalid(net322):
    tx = net322.build_invoke(
        "app-channel-1", "asset-cc-1", "put", {"key": "k", "value": "v"},
        creator="org1", endorsers=["org1"],
    )
    receipt = net322.submit("app-channel-1", tx)
    assert not receipt.valid  # 1 < 2
    assert "endorsement" in receipt.validity
    # the invalid tx is in the ledger but changed nothing
    block = net322.channels["app-channel-1"].blocks[receipt.block_number]
    assert block.transactions[0].validity == receipt.validity
    assert net322.query("app-channel-1", "asset-cc-1", "get", {"key": "k"}) is None


def test_single_org_config_tx_is_trivially_majority():
    net = Network.create(GenesisSpec.standard(1, 1, 0, seed=3))
    new_org = net.synthesize_org("org2")
    envelope = make_add_org_envelope(net, "app-channel-1", new_org, ["org1"])
    version = net.apply_config_envelope("app-channel-1", envelope)
    assert version == 1


def test_unknown_channel_raises(net322):
    with pytest.raises(UnknownChannelError):
        net322.submit("nope", net322.channels["app-channel-1"].blocks[0].transactions[0])
    with pytest.raises(UnknownChannelError):
        net322.fetch_config_block("nope")


def test_tampered_endorsement_invalid(net322):
    tx = net322.build_invoke(
        "app-channel-1", "asset-cc-1", "put", {"key": "k", "value": "v"},
        creator="org1", endorsers=["org1", "org2"],
    )
    tx.payload = {"op": "put", "args": {"key": "k", "value": "evil"}, "creator": "org1"}
    receipt = net322.submit("app-channel-1", tx)
    assert not receipt.valid


# -- config pipeline ------------------------------------------------------------


def test_fetch_config_is_genesis_snapshot(net322):
    config = net322.fetch_config_block("system-channel")
    assert config.config_version == 0
    assert config.member_orgs == ("org1", "org2", "org3")


def test_apply_envelope_majority_of_four(rt422):
    net = rt422.network
    new_org = net.synthesize_org("org9")
    envelope = make_add_org_envelope(net, "app-channel-1", new_org, ["org1", "org2", "org3"])
    version = net.apply_config_envelope("app-channel-1", envelope)
    assert version == 1  # 3 >= floor(4/2)+1
    assert "org9" in net.fetch_config_block("app-channel-1").member_orgs


def test_apply_envelope_insufficient_signatures(rt422):
    net = rt422.network
    before = net.state_digest()
    new_org = net.synthesize_org("org9")
    envelope = make_add_org_envelope(net, "app-channel-1", new_org, ["org1", "org2"])
    with pytest.raises(ConfigRejectedError, match="insufficient"):
        net.apply_config_envelope("app-channel-1", envelope)
    assert net.state_digest() == before  # rejected envelope changes nothing


def test_apply_envelope_stale_version(rt422):
    net = rt422.network
    new_org = net.synthesize_org("org9")
    stale = make_add_org_envelope(net, "app-channel-1", new_org, ["org1", "org2", "org3"])
    net.apply_config_envelope("app-channel-1", stale)
    other = net.synthesize_org("org10")
    with pytest.raises(ConfigRejectedError, match="stale"):
        # recomputing against version 0 while the channel is at version 1
        envelope = Envelope.from_json(
            make_add_org_envelope(net, "app-channel-1", other, ["org1"]).to_json()
        )
        bad = Envelope(update=stale.update, signatures=stale.signatures)
        net.apply_config_envelope("app-channel-1", bad)


def test_apply_envelope_rejects_forged_signature(rt422):
    from opsflow.configtx import ConfigSignature, Envelope

    net = rt422.network
    new_org = net.synthesize_org("org9")
    good = make_add_org_envelope(net, "app-channel-1", new_org, ["org1", "org2", "org3"])
    forged = Envelope(
        update=good.update,
        signatures=tuple(
            ConfigSignature(org_id=s.org_id, signature="00" * 64) for s in good.signatures
        ),
    )
    before = net.state_digest()
    with pytest.raises(ConfigRejectedError, match="verification failed"):
        net.apply_config_envelope("app-channel-1", forged)
    assert net.state_digest() == before


def test_config_version_increments_by_one_per_envelope(rt422):
    net = rt422.network
    for i, org_id in enumerate(("orgA", "orgB"), start=1):
        new_org = net.synthesize_org(org_id)
        envelope = make_add_org_envelope(
            net, "app-channel-2", new_org, ["org1", "org2", "org3"]
        )
        assert net.apply_config_envelope("app-channel-2", envelope) == i


# -- join / install / approve / commit -------------------------------------------


def test_join_is_idempotent_and_member_only(net322):
    net322.join_peer("org1", "app-channel-1")
    ops_before = len(net322.node_ops)
    net322.join_peer("org1", "app-channel-1")
    assert len(net322.node_ops) == ops_before
    with pytest.raises(NotMemberError):
        net322.join_peer("org-unknown", "app-channel-1")


def test_joined_org_sees_all_historical_events(rt422):
    net = rt422.network
    events = net.subscribe_events("ops-channel", from_block=0)
    assert events == net.subscribe_events("ops-channel", from_block=0)


def test_install_content_addressing(net322):
    pkg = synthesize_package("zzz", "9")
    d1 = net322.install_package("org1", "app-channel-1", pkg)
    d2 = net322.install_package("org2", "app-channel-1", pkg)
    assert d1 == d2
    d3 = net322.install_package("org1", "app-channel-1", synthesize_package("zzz", "10"))
    assert d3 != d1


def test_reinstall_no_duplicate(net322):
    pkg = synthesize_package("zzz", "9")
    net322.install_package("org1", "app-channel-1", pkg)
    first = net322.lifecycle_state("app-channel-1", "zzz").installs["org1"]
    net322.install_package("org1", "app-channel-1", pkg)
    assert net322.lifecycle_state("app-channel-1", "zzz").installs["org1"] == first


def test_approve_overwrites_and_requires_membership(net322):
    d1 = ChaincodeDefinition(name="cc0", version="1", sequence=1)
    d2 = ChaincodeDefinition(name="cc0", version="2", sequence=1)
    net322.approve_definition("org1", "app-channel-1", d1)
    assert net322.lifecycle_state("app-channel-1", "cc0").approvals["org1"] == d1
    net322.approve_definition("org1", "app-channel-1", d2)
    assert net322.lifecycle_state("app-channel-1", "cc0").approvals["org1"] == d2
    with pytest.raises(NotMemberError):
        net322.approve_definition("org-unknown", "app-channel-1", d1)


def test_commit_needs_exact_match_majority(net322):
    exact = ChaincodeDefinition(name="cc0", version="1", sequence=1)
    differing = ChaincodeDefinition(name="cc0", version="2", sequence=1)
    net322.approve_definition("org1", "app-channel-1", exact)
    net322.approve_definition("org2", "app-channel-1", differing)
    with pytest.raises(ChaincodeError, match="insufficient"):
        net322.commit_definition("org1", "app-channel-1", exact)  # 1 exact < 2
    net322.approve_definition("org2", "app-channel-1", exact)
    net322.commit_definition("org1", "app-channel-1", exact)  # 2 exact >= 2
    assert net322.lifecycle_state("app-channel-1", "cc0").committed_definition == exact


def test_commit_rejects_sequence_skip(net322):
    skipped = ChaincodeDefinition(name="asset-cc-1", version="3", sequence=3)
    for org in ("org1", "org2"):
        net322.approve_definition(org, "app-channel-1", skipped)
    with pytest.raises(ChaincodeError, match="sequence"):
        net322.commit_definition("org1", "app-channel-1", skipped)


# -- events ----------------------------------------------------------------------


def test_fresh_channel_has_no_events():
    net = Network.create(GenesisSpec.standard(2, 1, 0, seed=5))
    assert net.subscribe_events("app-channel-1", 0) == []


def test_two_subscribers_identical_streams(net322):
    a = net322.subscribe_events("app-channel-1", 0)
    b = net322.subscribe_events("app-channel-1", 0)
    assert canonical_json([(n, e.to_json()) for n, e in a]) == canonical_json(
        [(n, e.to_json()) for n, e in b]
    )
    assert len(a) == 2  # one committed-definition event per genesis chaincode


def test_subscribe_from_height(net322):
    all_events = net322.subscribe_events("app-channel-1", 0)
    assert all_events
    first_block = all_events[0][0]
    later = net322.subscribe_events("app-channel-1", first_block + 1)
    assert later == all_events[1:]
    with pytest.raises(SimnetError):
        net322.subscribe_events("app-channel-1", net322.height("app-channel-1") + 2)


# -- digests and replay ------------------------------------------------------------


def test_digest_changes_after_committed_tx(net322):
    before = net322.state_digest()
    net322.invoke(
        "app-channel-1", "asset-cc-1", "put", {"key": "k", "value": "v"}, creator="org1"
    )
    assert net322.state_digest() != before


def test_block_chain_verifies(net322):
    for channel in net322.channels.values():
        parent = "0" * 64
        for block in channel.blocks:
            assert block.parent_digest == parent
            parent = block.digest()


def test_replay_reproduces_digest(net322):
    net322.invoke(
        "app-channel-1", "asset-cc-1", "put", {"key": "a", "value": 1}, creator="org2"
    )
    bad = net322.build_invoke(
        "app-channel-1", "asset-cc-1", "put", {"key": "b", "value": 2},
        creator="org1", endorsers=["org1"],
    )
    net322.submit("app-channel-1", bad)  # recorded invalid, replay must agree
    lines = list(net322.iter_block_lines())
    replayed = Network.replay(net322.spec, lines)
    assert replayed.state_digest() == net322.state_digest()


def test_channel_isolation(net322):
    digest_other = net322.state_digest(["app-channel-2", "system-channel", "ops-channel"])
    net322.invoke(
        "app-channel-1", "asset-cc-1", "put", {"key": "k", "value": "v"}, creator="org1"
    )
    assert (
        net322.state_digest(["app-channel-2", "system-channel", "ops-channel"])
        == digest_other
    )


def test_endorsement_soundness_brute_force(net322):
    net322.invoke(
        "app-channel-1", "asset-cc-1", "put", {"key": "k", "value": "v"}, creator="org1"
    )
    # every valid invoke in every block carries majority member endorsements
    for channel in net322.channels.values():
        members = channel.config.member_orgs
        for block in channel.blocks:
            for tx in block.transactions:
                if tx.kind != "invoke" or tx.validity != "valid":
                    continue
                endorsing = {e.org_id for e in tx.endorsements if e.org_id in members}
                assert len(endorsing) >= majority(len(members))


def test_concurrent_submission_is_serialized(net322):
    import threading

    def put_many(org, count):
        for i in range(count):
            net322.invoke(
                "app-channel-1",
                "asset-cc-1",
                "put",
                {"key": f"{org}-{i}", "value": i},
                creator=org,
            )

    threads = [
        threading.Thread(target=put_many, args=(org, 20))
        for org in ("org1", "org2", "org3")
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    channel = net322.channels["app-channel-1"]
    assert [b.block_number for b in channel.blocks] == list(range(len(channel.blocks)))
    parent = "0" * 64
    for block in channel.blocks:
        assert block.parent_digest == parent
        parent = block.digest()
    for org in ("org1", "org2", "org3"):
        for i in range(20):
            assert net322.query("app-channel-1", "asset-cc-1", "get", {"key": f"{org}-{i}"}) == i


def test_exact_match_commit_audit(net322):
    # for each committed definition, enough exact-match approvals existed
    for channel_id in ("app-channel-1", "app-channel-2"):
        channel = net322.channels[channel_id]
        members = channel.config.member_orgs
        for name in ("asset-cc-1", "asset-cc-2"):
            state = net322.lifecycle_state(channel_id, name)
            exact = [
                org
                for org, approval in state.approvals.items()
                if approval == state.committed_definition
            ]
            assert len(exact) >= majority(len(members))
