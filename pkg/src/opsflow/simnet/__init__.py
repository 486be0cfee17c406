"""Deterministic consortium blockchain simulation."""

from .genesis import OPS_CHANNEL, SYSTEM_CHANNEL, GenesisSpec, GenesisSpecError
from .network import LIFECYCLE_NS, Channel, HandlerContext, Network, ReplayError
from .types import (
    Block,
    ChaincodeDefinition,
    ChaincodeError,
    ChaincodeEvent,
    ChannelConfig,
    ConfigRejectedError,
    Endorsement,
    InvalidTransactionError,
    LifecycleState,
    MalformedTransactionError,
    NodeOperation,
    NotMemberError,
    Org,
    Receipt,
    SimnetError,
    Transaction,
    UnknownChannelError,
    majority,
)

__all__ = [
    "Block",
    "Channel",
    "ChaincodeDefinition",
    "ChaincodeError",
    "ChaincodeEvent",
    "ChannelConfig",
    "ConfigRejectedError",
    "Endorsement",
    "GenesisSpec",
    "GenesisSpecError",
    "HandlerContext",
    "InvalidTransactionError",
    "LIFECYCLE_NS",
    "LifecycleState",
    "MalformedTransactionError",
    "Network",
    "NodeOperation",
    "NotMemberError",
    "OPS_CHANNEL",
    "Org",
    "Receipt",
    "ReplayError",
    "SimnetError",
    "SYSTEM_CHANNEL",
    "Transaction",
    "UnknownChannelError",
    "majority",
]
