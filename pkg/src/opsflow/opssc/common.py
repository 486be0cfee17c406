"""Shared vocabulary of the operations workflow contracts."""

from __future__ import annotations

from dataclasses import dataclass

from ..simnet.types import ChaincodeEvent

# Event kinds agents react to. update_channel and commit name a single
# executor; deploy addresses every org; config_updated triggers catch-up.
EVENT_KINDS = ("update_channel", "deploy", "commit", "config_updated")

PROPOSED = "proposed"
APPROVED = "approved"
ACKNOWLEDGED = "acknowledged"
COMMITTED = "committed"
REJECTED = "rejected"
FAILED = "failed"


@dataclass(frozen=True)
class OperationsEvent:
    """Instruction emitted by a workflow contract, consumed by agents."""

    event_kind: str
    proposal_id: str
    executor: str | None = None
    attempt: int = 0
    extra: dict | None = None

    def to_payload(self) -> dict:
        payload = {
            "proposal_id": self.proposal_id,
            "executor": self.executor,
            "attempt": self.attempt,
        }
        if self.extra:
            payload.update(self.extra)
        return payload

    @classmethod
    def from_event(cls, event: ChaincodeEvent) -> "OperationsEvent | None":
        """Parse a chaincode event; None when it is not a workflow instruction."""
        if event.name not in EVENT_KINDS:
            return None
        payload = event.payload
        return cls(
            event_kind=event.name,
            proposal_id=payload.get("proposal_id", ""),
            executor=payload.get("executor"),
            attempt=payload.get("attempt", 0),
            extra={
                k: v
                for k, v in payload.items()
                if k not in ("proposal_id", "executor", "attempt")
            }
            or None,
        )


def task_record(
    proposal_id: str, org_id: str, task: str, ok: bool, detail: str, block_number: int
) -> dict:
    """On-chain history entry for one task execution (append-only)."""
    return {
        "proposal_id": proposal_id,
        "org_id": org_id,
        "task": task,
        "ok": ok,
        "detail": detail,
        "block_number": block_number,
    }
