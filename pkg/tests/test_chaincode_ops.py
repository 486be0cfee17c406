"""Chaincode operations workflow contract: propose, vote, deploy, commit."""

import pytest

from opsflow.opssc import chaincode_ops
from opsflow.repository import RepositoryStore, SourceRef, UnknownSourceError, synthesize_package
from opsflow.runtime import OpsRuntime
from opsflow.simnet.genesis import OPS_CHANNEL
from opsflow.simnet.types import ChaincodeDefinition, ChaincodeError

NS = chaincode_ops.NAMESPACE


def _definition(name="newcc", version="1.0", sequence=1, commit="c1"):
    return ChaincodeDefinition(
        name=name,
        version=version,
        sequence=sequence,
        source_ref=SourceRef("https://git.example/r", commit, name),
    ).to_json()


def _stage_source(rt, definition):
    ref = SourceRef.from_json(definition["source_ref"])
    rt.repo.put(ref, synthesize_package(definition["name"], definition["version"]))


@pytest.fixture
def quiet4():
    return OpsRuntime.standard(4, 1, 0, seed=13, with_agents=False)


@pytest.fixture
def live4():
    return OpsRuntime.standard(4, 1, 0, seed=13)


def test_request_new_chaincode(quiet4):
    d = _definition()
    p = quiet4.admin("org1").create_chaincode_proposal("app-channel-1", d)
    assert p["status"] == "proposed"
    assert p["votes"] == {"org1": "for"}
    assert p["electorate"] == ["org1", "org2", "org3", "org4"]


def test_bad_sequence_rejected(quiet4):
    with pytest.raises(ChaincodeError, match="bad sequence"):
        quiet4.admin("org1").create_chaincode_proposal(
            "app-channel-1", _definition(sequence=3)
        )


def test_single_org_auto_approval():
    rt = OpsRuntime.standard(1, 1, 0, seed=13, with_agents=False)
    p = rt.admin("org1").create_chaincode_proposal("app-channel-1", _definition())
    assert p["status"] == "approved"
    kinds = [e.name for _, e in rt.network.subscribe_events(OPS_CHANNEL)]
    assert "deploy" in kinds


def test_vote_for_majority_approves(quiet4):
    pid = quiet4.admin("org1").create_chaincode_proposal("app-channel-1", _definition())[
        "proposal_id"
    ]
    p = quiet4.admin("org2").vote_chaincode_proposal(pid, "for")
    assert p["status"] == "proposed"
    p = quiet4.admin("org3").vote_chaincode_proposal(pid, "for")
    assert p["status"] == "approved"  # 3 >= floor(4/2)+1


def test_vote_against_majority_rejects(quiet4):
    pid = quiet4.admin("org1").create_chaincode_proposal("app-channel-1", _definition())[
        "proposal_id"
    ]
    for org in ("org2", "org3", "org4"):
        p = quiet4.admin(org).vote_chaincode_proposal(pid, "against")
    assert p["status"] == "rejected"  # 3 against >= 3


def test_split_vote_stays_proposed():
    rt = OpsRuntime.standard(2, 1, 0, seed=13, with_agents=False)
    pid = rt.admin("org1").create_chaincode_proposal("app-channel-1", _definition())[
        "proposal_id"
    ]
    p = rt.admin("org2").vote_chaincode_proposal(pid, "against")
    assert p["status"] == "proposed"  # 1 for, 1 against: majority is 2 for both sides


def test_double_vote_rejected(quiet4):
    pid = quiet4.admin("org1").create_chaincode_proposal("app-channel-1", _definition())[
        "proposal_id"
    ]
    quiet4.admin("org2").vote_chaincode_proposal(pid, "for")
    with pytest.raises(ChaincodeError, match="already voted"):
        quiet4.admin("org2").vote_chaincode_proposal(pid, "against")


def test_full_deploy_lifecycle(live4):
    d = _definition()
    _stage_source(live4, d)
    admin = live4.admin("org1")
    pid = admin.create_chaincode_proposal("app-channel-1", d)["proposal_id"]
    live4.admin("org2").vote_chaincode_proposal(pid, "for")
    live4.admin("org3").vote_chaincode_proposal(pid, "for")
    final = admin.get_chaincode_proposal(pid)
    assert final["status"] == "committed"
    # all-orgs availability: every electorate org installed and approved
    state = live4.network.lifecycle_state("app-channel-1", "newcc")
    assert state.committed_definition == ChaincodeDefinition.from_json(d)
    for org in final["electorate"]:
        assert org in state.installs
        assert state.approvals[org] == state.committed_definition
    # 4 orgs x 3 tasks succeeded, one commit
    records = [(r["org_id"], r["task"]) for r in final["history"] if r["ok"]]
    assert sum(1 for _, task in records if task in ("download", "install", "approve")) == 12
    assert sum(1 for _, task in records if task == "commit") == 1


def test_single_commit_in_ledger(live4):
    d = _definition()
    _stage_source(live4, d)
    pid = live4.admin("org1").create_chaincode_proposal("app-channel-1", d)["proposal_id"]
    live4.admin("org2").vote_chaincode_proposal(pid, "for")
    live4.admin("org3").vote_chaincode_proposal(pid, "for")
    commits = [
        tx
        for block in live4.network.channels["app-channel-1"].blocks
        for tx in block.transactions
        if tx.kind == "invoke"
        and tx.validity == "valid"
        and tx.payload["op"] == "commit"
        and tx.payload["args"]["definition"]["name"] == "newcc"
    ]
    assert len(commits) == 1


def test_upgrade_sequence(live4):
    d1 = _definition()
    _stage_source(live4, d1)
    admin = live4.admin("org1")
    pid = admin.create_chaincode_proposal("app-channel-1", d1)["proposal_id"]
    live4.admin("org2").vote_chaincode_proposal(pid, "for")
    live4.admin("org3").vote_chaincode_proposal(pid, "for")
    assert admin.get_chaincode_proposal(pid)["status"] == "committed"
    d2 = _definition(version="2.0", sequence=2, commit="c2")
    _stage_source(live4, d2)
    pid2 = admin.create_chaincode_proposal("app-channel-1", d2)["proposal_id"]
    live4.admin("org2").vote_chaincode_proposal(pid2, "for")
    live4.admin("org3").vote_chaincode_proposal(pid2, "for")
    state = live4.network.lifecycle_state("app-channel-1", "newcc")
    assert state.committed_definition.sequence == 2
    assert state.committed_definition.version == "2.0"


def test_terminal_task_failure_fails_proposal(quiet4):
    d = _definition()
    pid = quiet4.admin("org1").create_chaincode_proposal("app-channel-1", d)["proposal_id"]
    quiet4.admin("org2").vote_chaincode_proposal(pid, "for")
    quiet4.admin("org3").vote_chaincode_proposal(pid, "for")
    p = quiet4.network.invoke(
        OPS_CHANNEL,
        NS,
        "register_deploy_result",
        {"proposal_id": pid, "task": "install", "ok": False, "detail": "x", "terminal": True},
        "org2",
    )
    assert p["status"] == "failed"
    # terminal statuses are absorbing
    with pytest.raises(ChaincodeError, match="status"):
        quiet4.network.invoke(
            OPS_CHANNEL,
            NS,
            "register_deploy_result",
            {"proposal_id": pid, "task": "install", "ok": True},
            "org3",
        )


def test_duplicate_success_report_is_idempotent(quiet4):
    d = _definition()
    pid = quiet4.admin("org1").create_chaincode_proposal("app-channel-1", d)["proposal_id"]
    quiet4.admin("org2").vote_chaincode_proposal(pid, "for")
    quiet4.admin("org3").vote_chaincode_proposal(pid, "for")
    args = {"proposal_id": pid, "task": "download", "ok": True, "detail": ""}
    p1 = quiet4.network.invoke(OPS_CHANNEL, NS, "register_deploy_result", args, "org2")
    p2 = quiet4.network.invoke(OPS_CHANNEL, NS, "register_deploy_result", args, "org2")
    assert p1["history"] == p2["history"]  # second report did not append


def test_non_terminal_failure_keeps_status(quiet4):
    d = _definition()
    pid = quiet4.admin("org1").create_chaincode_proposal("app-channel-1", d)["proposal_id"]
    quiet4.admin("org2").vote_chaincode_proposal(pid, "for")
    quiet4.admin("org3").vote_chaincode_proposal(pid, "for")
    p = quiet4.network.invoke(
        OPS_CHANNEL,
        NS,
        "register_deploy_result",
        {"proposal_id": pid, "task": "install", "ok": False, "detail": "x", "terminal": False},
        "org2",
    )
    assert p["status"] == "approved"  # retry still possible


def test_vote_accounting_invariant(quiet4):
    d = _definition()
    pid = quiet4.admin("org1").create_chaincode_proposal("app-channel-1", d)["proposal_id"]
    quiet4.admin("org2").vote_chaincode_proposal(pid, "against")
    p = quiet4.admin("org3").vote_chaincode_proposal(pid, "for")
    votes_for = sum(1 for v in p["votes"].values() if v == "for")
    votes_against = sum(1 for v in p["votes"].values() if v == "against")
    assert votes_for + votes_against <= len(p["electorate"])


def test_resolve_source_store():
    repo = RepositoryStore()
    ref1 = SourceRef("u", "c1", "p")
    ref2 = SourceRef("u", "c2", "p")
    repo.put(ref1, b"b1")
    repo.put(ref2, b"b2")
    assert repo.resolve(ref1) == b"b1"
    assert repo.resolve(ref2) == b"b2"
    with pytest.raises(UnknownSourceError):
        repo.resolve(SourceRef("u", "c3", "p"))


def test_definition_requires_source(quiet4):
    bare = ChaincodeDefinition(name="x", version="1", sequence=1).to_json()
    with pytest.raises(ChaincodeError, match="source_ref"):
        quiet4.admin("org1").create_chaincode_proposal("app-channel-1", bare)
