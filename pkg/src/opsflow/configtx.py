"""Channel configuration update pipeline.

The four artifacts of a channel update: compute a delta (ConfigUpdate) from a
base configuration and a list of membership operations, collect per-org
signatures over it (ConfigSignature), and bundle delta plus signatures into an
Envelope ready for submission to the channel. ``compute_update`` and
``apply_update`` are pure functions and obey the round-trip law
``apply_update(base, compute_update(base, ops)) == fold(ops, base)`` with the
version bumped by one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .identity import OrgIdentity, verify
from .simnet.types import ChannelConfig

OP_KINDS = (
    "add_org",
    "remove_org",
    "add_consortium_org",
    "remove_consortium_org",
    "add_orderer_org",
    "remove_orderer_org",
)
_ADD_KINDS = ("add_org", "add_consortium_org", "add_orderer_org")


class ConfigOpError(ValueError):
    """An operation is invalid against the configuration it would act on."""


class VersionMismatchError(ValueError):
    """Update computed against a different config version than the base."""


class SignatureInvalidError(ValueError):
    """A signature does not verify against the update it claims to sign."""


@dataclass(frozen=True)
class ConfigOp:
    """One membership change; add_* kinds carry the org's identity material."""

    kind: str
    org_id: str
    msp_descriptor: dict | None = None

    def __post_init__(self) -> None:
        if self.kind not in OP_KINDS:
            raise ConfigOpError(f"unknown op kind {self.kind!r}")
        if self.kind in _ADD_KINDS and not self.msp_descriptor:
            raise ConfigOpError(f"{self.kind} requires msp_descriptor")

    def to_json(self) -> dict:
        return {"kind": self.kind, "org_id": self.org_id, "msp_descriptor": self.msp_descriptor}

    @classmethod
    def from_json(cls, data: dict) -> "ConfigOp":
        return cls(
            kind=data["kind"],
            org_id=data["org_id"],
            msp_descriptor=data.get("msp_descriptor"),
        )


@dataclass(frozen=True)
class ConfigUpdate:
    """Delta between a base configuration and the desired one."""

    channel_id: str
    base_version: int
    ops: tuple[ConfigOp, ...]

    def to_json(self) -> dict:
        return {
            "channel_id": self.channel_id,
            "base_version": self.base_version,
            "ops": [op.to_json() for op in self.ops],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ConfigUpdate":
        return cls(
            channel_id=data["channel_id"],
            base_version=data["base_version"],
            ops=tuple(ConfigOp.from_json(op) for op in data["ops"]),
        )


@dataclass(frozen=True)
class ConfigSignature:
    org_id: str
    signature: str

    def to_json(self) -> dict:
        return {"org_id": self.org_id, "signature": self.signature}

    @classmethod
    def from_json(cls, data: dict) -> "ConfigSignature":
        return cls(org_id=data["org_id"], signature=data["signature"])


@dataclass(frozen=True)
class Envelope:
    """Signed configuration transaction, ready for submission."""

    update: ConfigUpdate
    signatures: tuple[ConfigSignature, ...]

    def to_json(self) -> dict:
        return {
            "update": self.update.to_json(),
            "signatures": [s.to_json() for s in self.signatures],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Envelope":
        return cls(
            update=ConfigUpdate.from_json(data["update"]),
            signatures=tuple(ConfigSignature.from_json(s) for s in data["signatures"]),
        )


def _apply_op(
    op: ConfigOp,
    kind: str,
    members: list[str],
    consortium: list[str],
    orderers: list[str],
) -> None:
    if op.kind == "add_org":
        if op.org_id in members:
            raise ConfigOpError(f"add_org: {op.org_id} is already a member")
        members.append(op.org_id)
    elif op.kind == "remove_org":
        if op.org_id not in members:
            raise ConfigOpError(f"remove_org: {op.org_id} is not a member")
        if len(members) == 1:
            raise ConfigOpError("remove_org: member set must stay non-empty")
        members.remove(op.org_id)
    elif op.kind in ("add_consortium_org", "remove_consortium_org"):
        if kind != "system":
            raise ConfigOpError(f"{op.kind} is only valid on the system channel")
        if op.kind == "add_consortium_org":
            if op.org_id in consortium:
                raise ConfigOpError(f"add_consortium_org: {op.org_id} already present")
            consortium.append(op.org_id)
        else:
            if op.org_id not in consortium:
                raise ConfigOpError(f"remove_consortium_org: {op.org_id} not present")
            if len(consortium) == 1:
                raise ConfigOpError("remove_consortium_org: consortium must stay non-empty")
            consortium.remove(op.org_id)
    elif op.kind == "add_orderer_org":
        if op.org_id in orderers:
            raise ConfigOpError(f"add_orderer_org: {op.org_id} already present")
        orderers.append(op.org_id)
    elif op.kind == "remove_orderer_org":
        if op.org_id not in orderers:
            raise ConfigOpError(f"remove_orderer_org: {op.org_id} not present")
        orderers.remove(op.org_id)


_ASPECT = {
    "add_org": "member",
    "remove_org": "member",
    "add_consortium_org": "consortium",
    "remove_consortium_org": "consortium",
    "add_orderer_org": "orderer",
    "remove_orderer_org": "orderer",
}


def _fold(base: ChannelConfig, ops: Iterable[ConfigOp]) -> ChannelConfig:
    members = list(base.member_orgs)
    consortium = list(base.consortium_orgs)
    orderers = list(base.orderer_orgs)
    touched: set[tuple[str, str]] = set()
    for op in ops:
        # two ops on the same org and aspect conflict (e.g. add then remove)
        mark = (_ASPECT[op.kind], op.org_id)
        if mark in touched:
            raise ConfigOpError(
                f"{op.kind} {op.org_id}: conflicts with a prior op in the update"
            )
        touched.add(mark)
        _apply_op(op, base.kind, members, consortium, orderers)
    return ChannelConfig(
        channel_id=base.channel_id,
        kind=base.kind,
        config_version=base.config_version + 1,
        member_orgs=tuple(members),
        consortium_orgs=tuple(consortium),
        orderer_orgs=tuple(orderers),
        mod_policy=base.mod_policy,
    )


def compute_update(base: ChannelConfig, desired: Iterable[ConfigOp]) -> ConfigUpdate:
    """Turn desired membership operations into a delta against ``base``.

    Each op is validated against the configuration produced by the preceding
    ops, so internally conflicting lists (add then remove the same org) are
    rejected here rather than at submission time.
    """
    ops = tuple(desired)
    if not ops:
        raise ConfigOpError("update must contain at least one operation")
    _fold(base, ops)  # validity check only
    return ConfigUpdate(channel_id=base.channel_id, base_version=base.config_version, ops=ops)


def apply_update(base: ChannelConfig, update: ConfigUpdate) -> ChannelConfig:
    """Apply a delta to the base configuration; bumps config_version by one."""
    if update.channel_id != base.channel_id:
        raise ConfigOpError(
            f"update targets {update.channel_id!r}, base is {base.channel_id!r}"
        )
    if update.base_version != base.config_version:
        raise VersionMismatchError(
            f"update base_version {update.base_version} != config_version {base.config_version}"
        )
    return _fold(base, update.ops)


def sign_update(identity: OrgIdentity, update: ConfigUpdate) -> ConfigSignature:
    """Sign the canonical bytes of the update with the org's key."""
    return ConfigSignature(org_id=identity.org_id, signature=identity.sign(update.to_json()))


def verify_signature(public_key: str, update: ConfigUpdate, sig: ConfigSignature) -> bool:
    return verify(public_key, update.to_json(), sig.signature)


def assemble_envelope(
    update: ConfigUpdate,
    signatures: Iterable[ConfigSignature],
    public_keys: Mapping[str, str],
) -> Envelope:
    """Bundle update and signatures; deduplicates per org, verifies each one."""
    seen: dict[str, ConfigSignature] = {}
    for sig in signatures:
        if sig.org_id in seen:
            continue
        key = public_keys.get(sig.org_id)
        if key is None or not verify_signature(key, update, sig):
            raise SignatureInvalidError(f"signature of {sig.org_id} does not verify")
        seen[sig.org_id] = sig
    ordered = tuple(seen[org] for org in sorted(seen))
    return Envelope(update=update, signatures=ordered)
