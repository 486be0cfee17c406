"""Domain types of the simulated consortium network."""

from __future__ import annotations

from dataclasses import dataclass

from ..canonical import digest
from ..identity import OrgIdentity
from ..repository import SourceRef

CHANNEL_KINDS = ("system", "ops", "application")
MOD_POLICY = "majority-of-members"
ENDORSEMENT_POLICY = "majority-of-members"

VALID = "valid"


def majority(count: int) -> int:
    """Smallest number of distinct orgs that forms a majority of ``count``."""
    return count // 2 + 1


def invalid(reason: str) -> str:
    return f"invalid:{reason}"


class SimnetError(Exception):
    """Base error for network operations."""


class UnknownChannelError(SimnetError):
    pass


class MalformedTransactionError(SimnetError):
    pass


class NotMemberError(SimnetError):
    pass


class ConfigRejectedError(SimnetError):
    """A configuration envelope was rejected; no state changed."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class ChaincodeError(SimnetError):
    """Application-level failure raised by a chaincode handler.

    The transaction is still recorded in the block, marked invalid, so the
    failed attempt stays auditable; no state change is applied.
    """


class InvalidTransactionError(SimnetError):
    """Transaction recorded but marked invalid (e.g. endorsement failure)."""

    def __init__(self, reason: str, block_number: int):
        super().__init__(reason)
        self.reason = reason
        self.block_number = block_number


@dataclass
class Org:
    """One member organization with its nodes and signing identity."""

    org_id: str
    identity: OrgIdentity
    msp_descriptor: dict
    has_orderer: bool = True
    peer_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.peer_ids:
            self.peer_ids = (f"{self.org_id}.peer0", f"{self.org_id}.peer1")


@dataclass(frozen=True)
class ChannelConfig:
    """Configuration of one channel; replaced wholesale on each config tx."""

    channel_id: str
    kind: str
    config_version: int
    member_orgs: tuple[str, ...]
    consortium_orgs: tuple[str, ...] = ()
    orderer_orgs: tuple[str, ...] = ()
    mod_policy: str = MOD_POLICY

    def governing_orgs(self) -> tuple[str, ...]:
        """Org set whose majority authorizes config updates on this channel."""
        if self.kind == "system":
            return self.consortium_orgs
        return self.member_orgs

    def to_json(self) -> dict:
        return {
            "channel_id": self.channel_id,
            "kind": self.kind,
            "config_version": self.config_version,
            "member_orgs": list(self.member_orgs),
            "consortium_orgs": list(self.consortium_orgs),
            "orderer_orgs": list(self.orderer_orgs),
            "mod_policy": self.mod_policy,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ChannelConfig":
        return cls(
            channel_id=data["channel_id"],
            kind=data["kind"],
            config_version=data["config_version"],
            member_orgs=tuple(data["member_orgs"]),
            consortium_orgs=tuple(data["consortium_orgs"]),
            orderer_orgs=tuple(data["orderer_orgs"]),
            mod_policy=data["mod_policy"],
        )


@dataclass(frozen=True)
class Endorsement:
    org_id: str
    signature: str

    def to_json(self) -> dict:
        return {"org_id": self.org_id, "signature": self.signature}

    @classmethod
    def from_json(cls, data: dict) -> "Endorsement":
        return cls(org_id=data["org_id"], signature=data["signature"])


@dataclass
class Transaction:
    """One ordered transaction; ``validity`` is assigned at validation time."""

    tx_id: str
    kind: str  # "invoke" | "config"
    namespace: str | None
    payload: dict
    endorsements: tuple[Endorsement, ...] = ()
    validity: str = VALID

    def to_json(self) -> dict:
        return {
            "tx_id": self.tx_id,
            "kind": self.kind,
            "namespace": self.namespace,
            "payload": self.payload,
            "endorsements": [e.to_json() for e in self.endorsements],
            "validity": self.validity,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Transaction":
        return cls(
            tx_id=data["tx_id"],
            kind=data["kind"],
            namespace=data["namespace"],
            payload=data["payload"],
            endorsements=tuple(Endorsement.from_json(e) for e in data["endorsements"]),
            validity=data["validity"],
        )


@dataclass(frozen=True)
class ChaincodeEvent:
    """Event emitted by a chaincode inside a valid transaction."""

    namespace: str
    name: str
    payload: dict

    def to_json(self) -> dict:
        return {"namespace": self.namespace, "name": self.name, "payload": self.payload}

    @classmethod
    def from_json(cls, data: dict) -> "ChaincodeEvent":
        return cls(namespace=data["namespace"], name=data["name"], payload=data["payload"])


@dataclass
class Block:
    block_number: int
    channel_id: str
    transactions: list[Transaction]
    events: list[ChaincodeEvent]
    parent_digest: str

    def to_json(self) -> dict:
        return {
            "block_number": self.block_number,
            "channel_id": self.channel_id,
            "transactions": [t.to_json() for t in self.transactions],
            "events": [e.to_json() for e in self.events],
            "parent_digest": self.parent_digest,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Block":
        return cls(
            block_number=data["block_number"],
            channel_id=data["channel_id"],
            transactions=[Transaction.from_json(t) for t in data["transactions"]],
            events=[ChaincodeEvent.from_json(e) for e in data["events"]],
            parent_digest=data["parent_digest"],
        )

    def digest(self) -> str:
        return digest(self.to_json())


@dataclass(frozen=True)
class ChaincodeDefinition:
    """The tuple each org approves and one org commits.

    Two definitions are an exact match iff all fields compare equal.
    """

    name: str
    version: str
    sequence: int
    endorsement_policy: str = ENDORSEMENT_POLICY
    source_ref: SourceRef | None = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "version": self.version,
            "sequence": self.sequence,
            "endorsement_policy": self.endorsement_policy,
            "source_ref": self.source_ref.to_json() if self.source_ref else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ChaincodeDefinition":
        ref = data.get("source_ref")
        return cls(
            name=data["name"],
            version=data["version"],
            sequence=data["sequence"],
            endorsement_policy=data["endorsement_policy"],
            source_ref=SourceRef.from_json(ref) if ref else None,
        )


@dataclass
class LifecycleState:
    """Per (channel, chaincode name) view of the deployment lifecycle."""

    committed_definition: ChaincodeDefinition | None
    approvals: dict[str, ChaincodeDefinition]
    installs: dict[str, tuple[str, ...]]  # org -> package digests on the channel


@dataclass
class Receipt:
    """Outcome of a submitted transaction."""

    block_number: int
    validity: str
    result: object = None
    events: tuple[ChaincodeEvent, ...] = ()

    @property
    def valid(self) -> bool:
        return self.validity == VALID


@dataclass
class NodeOperation:
    """Audit record of one node-level action (join/install/...)."""

    actor_org: str
    peer: str
    action: str
    channel_id: str

    def to_json(self) -> dict:
        return {
            "actor_org": self.actor_org,
            "peer": self.peer,
            "action": self.action,
            "channel_id": self.channel_id,
        }
