"""Deterministic executor selection for single-executor workflow steps.

One org out of the voters has to run the final command (channel update or
definition commit). Selection must look random but be reproducible and agreed
on by every party without coordination, so it is a pure function of the
network seed, the proposal id, and the attempt counter. Consecutive attempts
walk a seed-keyed permutation of the voters, so each org is selected at most
once per proposal and v voters tolerate v-1 executor failures.
"""

from __future__ import annotations

import hashlib
from typing import Sequence


class ExecutorsExhaustedError(RuntimeError):
    """Every voter has already been selected (attempt >= number of voters)."""


def select_executor(voters: Sequence[str], seed: int, proposal_id: str, attempt: int) -> str:
    """Pick the executor for ``attempt`` from a seed-keyed permutation of voters."""
    if not voters:
        raise ValueError("voters must be non-empty")
    if attempt < 0:
        raise ValueError("attempt must be >= 0")
    pool = sorted(set(voters))
    if attempt >= len(pool):
        raise ExecutorsExhaustedError(
            f"attempt {attempt} exhausts the {len(pool)} voter(s) of {proposal_id}"
        )

    def rank(org: str) -> str:
        material = f"opsflow-exec:{seed}:{proposal_id}:{org}".encode("utf-8")
        return hashlib.sha256(material).hexdigest()

    return sorted(pool, key=rank)[attempt]
