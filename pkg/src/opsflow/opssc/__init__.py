"""On-chain operations workflow contracts (proposal / vote / execute)."""

from . import chaincode_ops, channel_ops
from .common import (
    ACKNOWLEDGED,
    APPROVED,
    COMMITTED,
    EVENT_KINDS,
    FAILED,
    PROPOSED,
    REJECTED,
    OperationsEvent,
    task_record,
)

__all__ = [
    "ACKNOWLEDGED",
    "APPROVED",
    "COMMITTED",
    "EVENT_KINDS",
    "FAILED",
    "PROPOSED",
    "REJECTED",
    "OperationsEvent",
    "chaincode_ops",
    "channel_ops",
    "task_record",
]
