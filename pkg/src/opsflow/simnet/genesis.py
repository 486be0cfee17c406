"""Genesis specification: the declarative description a network is built from."""

from __future__ import annotations

from dataclasses import dataclass

SYSTEM_CHANNEL = "system-channel"
OPS_CHANNEL = "ops-channel"


class GenesisSpecError(ValueError):
    pass


@dataclass(frozen=True)
class GenesisOrg:
    id: str
    has_orderer: bool = True


@dataclass(frozen=True)
class GenesisChannel:
    id: str
    kind: str  # system | ops | application
    members: tuple[str, ...]


@dataclass(frozen=True)
class GenesisChaincode:
    name: str
    channel: str
    version: str = "1.0"


@dataclass(frozen=True)
class GenesisSpec:
    orgs: tuple[GenesisOrg, ...]
    channels: tuple[GenesisChannel, ...]
    chaincodes: tuple[GenesisChaincode, ...] = ()
    seed: int = 0

    def validate(self) -> None:
        org_ids = [o.id for o in self.orgs]
        if not org_ids:
            raise GenesisSpecError("at least one org required")
        if len(set(org_ids)) != len(org_ids):
            raise GenesisSpecError("duplicate org ids")
        kinds = [c.kind for c in self.channels]
        if kinds.count("system") != 1 or kinds.count("ops") != 1:
            raise GenesisSpecError("exactly one system and one ops channel required")
        channel_ids = [c.id for c in self.channels]
        if len(set(channel_ids)) != len(channel_ids):
            raise GenesisSpecError("duplicate channel ids")
        app_channels = {c.id for c in self.channels if c.kind == "application"}
        if self.chaincodes and not app_channels:
            raise GenesisSpecError("chaincodes require at least one application channel")
        for ch in self.channels:
            if ch.kind not in ("system", "ops", "application"):
                raise GenesisSpecError(f"unknown channel kind {ch.kind!r}")
            if not ch.members:
                raise GenesisSpecError(f"channel {ch.id} has no members")
            unknown = set(ch.members) - set(org_ids)
            if unknown:
                raise GenesisSpecError(f"channel {ch.id} has unknown members {sorted(unknown)}")
        for cc in self.chaincodes:
            if cc.channel not in app_channels:
                raise GenesisSpecError(
                    f"chaincode {cc.name} targets non-application channel {cc.channel}"
                )
        names = [(cc.channel, cc.name) for cc in self.chaincodes]
        if len(set(names)) != len(names):
            raise GenesisSpecError("duplicate chaincode (channel, name) pairs")

    def to_json(self) -> dict:
        return {
            "orgs": [{"id": o.id, "has_orderer": o.has_orderer} for o in self.orgs],
            "channels": [
                {"id": c.id, "kind": c.kind, "members": list(c.members)} for c in self.channels
            ],
            "chaincodes": [
                {"name": c.name, "channel": c.channel, "version": c.version}
                for c in self.chaincodes
            ],
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "GenesisSpec":
        spec = cls(
            orgs=tuple(GenesisOrg(id=o["id"], has_orderer=o["has_orderer"]) for o in data["orgs"]),
            channels=tuple(
                GenesisChannel(id=c["id"], kind=c["kind"], members=tuple(c["members"]))
                for c in data["channels"]
            ),
            chaincodes=tuple(
                GenesisChaincode(name=c["name"], channel=c["channel"], version=c["version"])
                for c in data["chaincodes"]
            ),
            seed=data["seed"],
        )
        spec.validate()
        return spec

    @classmethod
    def standard(cls, n_orgs: int, n_channels: int, n_chaincodes: int, seed: int) -> "GenesisSpec":
        """Uniform network: N orgs, CH app channels, CC chaincodes per channel.

        Every org is a member of every channel; chaincodes are pre-committed
        on every application channel.
        """
        if n_orgs < 1:
            raise GenesisSpecError("n_orgs must be >= 1")
        if n_channels < 0 or n_chaincodes < 0:
            raise GenesisSpecError("channel and chaincode counts must be >= 0")
        if n_chaincodes > 0 and n_channels == 0:
            raise GenesisSpecError("chaincodes require at least one application channel")
        orgs = tuple(GenesisOrg(id=f"org{i}") for i in range(1, n_orgs + 1))
        members = tuple(o.id for o in orgs)
        channels = [
            GenesisChannel(id=SYSTEM_CHANNEL, kind="system", members=members),
            GenesisChannel(id=OPS_CHANNEL, kind="ops", members=members),
        ]
        channels += [
            GenesisChannel(id=f"app-channel-{i}", kind="application", members=members)
            for i in range(1, n_channels + 1)
        ]
        chaincodes = tuple(
            GenesisChaincode(name=f"asset-cc-{k}", channel=ch.id)
            for ch in channels
            if ch.kind == "application"
            for k in range(1, n_chaincodes + 1)
        )
        spec = cls(orgs=orgs, channels=tuple(channels), chaincodes=chaincodes, seed=seed)
        spec.validate()
        return spec
