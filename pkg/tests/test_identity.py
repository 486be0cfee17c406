"""Org identities: deterministic derivation, signing, verification."""

from opsflow.identity import OrgIdentity, msp_descriptor, verify


def test_derivation_is_deterministic():
    a = OrgIdentity.derive(7, "org1")
    b = OrgIdentity.derive(7, "org1")
    assert a.public_key == b.public_key
    assert a.sign({"x": 1}) == b.sign({"x": 1})


def test_different_orgs_get_different_keys():
    assert OrgIdentity.derive(7, "org1").public_key != OrgIdentity.derive(7, "org2").public_key
    assert OrgIdentity.derive(7, "org1").public_key != OrgIdentity.derive(8, "org1").public_key


def test_sign_verify_round_trip():
    identity = OrgIdentity.derive(1, "org1")
    value = {"op": "vote", "n": 3}
    sig = identity.sign(value)
    assert verify(identity.public_key, value, sig)
    assert not verify(identity.public_key, {"op": "vote", "n": 4}, sig)


def test_verify_rejects_wrong_key():
    signer = OrgIdentity.derive(1, "org1")
    other = OrgIdentity.derive(1, "org2")
    sig = signer.sign("payload")
    assert not verify(other.public_key, "payload", sig)


def test_verify_tolerates_garbage():
    identity = OrgIdentity.derive(1, "org1")
    assert not verify(identity.public_key, "payload", "zz-not-hex")
    assert not verify("00", "payload", identity.sign("payload"))


def test_msp_descriptor_contents():
    identity = OrgIdentity.derive(3, "orgX")
    descriptor = msp_descriptor("orgX", identity.public_key)
    assert descriptor["org_id"] == "orgX"
    assert descriptor["public_key"] == identity.public_key
