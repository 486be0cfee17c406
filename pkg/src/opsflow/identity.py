"""Per-organization signing identities.

Each organization holds one Ed25519 keypair derived deterministically from the
network seed and the org id, so two networks built from the same genesis spec
have byte-identical signatures. Signatures are always computed over the
canonical form of a JSON-safe value.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .canonical import canonical_bytes


def _seed_bytes(seed: int, org_id: str) -> bytes:
    return hashlib.sha256(f"opsflow-key:{seed}:{org_id}".encode("utf-8")).digest()


@dataclass
class OrgIdentity:
    """Signing identity of one organization."""

    org_id: str
    _private: Ed25519PrivateKey = field(repr=False)
    public_key: str = ""

    @classmethod
    def derive(cls, seed: int, org_id: str) -> "OrgIdentity":
        """Deterministically derive the org's keypair from the network seed."""
        private = Ed25519PrivateKey.from_private_bytes(_seed_bytes(seed, org_id))
        public = private.public_key().public_bytes_raw().hex()
        return cls(org_id=org_id, _private=private, public_key=public)

    def sign(self, value: Any) -> str:
        """Sign the canonical form of ``value``; returns hex signature."""
        return self._private.sign(canonical_bytes(value)).hex()


def verify(public_key: str, value: Any, signature: str) -> bool:
    """Check a hex signature over the canonical form of ``value``."""
    try:
        key = Ed25519PublicKey.from_public_bytes(bytes.fromhex(public_key))
        key.verify(bytes.fromhex(signature), canonical_bytes(value))
        return True
    except (InvalidSignature, ValueError):
        return False


def msp_descriptor(org_id: str, public_key: str) -> dict:
    """Shareable identity material for an org (no private parts)."""
    return {
        "org_id": org_id,
        "public_key": public_key,
        "display_name": f"{org_id} MSP",
    }
