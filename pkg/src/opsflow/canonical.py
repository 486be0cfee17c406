"""Canonical byte-stable JSON serialization and content digests.

Every signature and every state digest in this package is computed over the
canonical form produced here: UTF-8 JSON with sorted keys, compact separators,
and integers only (floats are rejected because their text form is not stable
enough to hash).
"""

from __future__ import annotations

import base64
import hashlib
import json
from typing import Any


class CanonicalizationError(TypeError):
    """Value cannot be represented in canonical form."""


def _check(value: Any) -> None:
    if value is None or isinstance(value, (str, bool)):
        return
    if isinstance(value, int):
        return
    if isinstance(value, float):
        raise CanonicalizationError("floats are not canonicalizable; use int or str")
    if isinstance(value, (list, tuple)):
        for item in value:
            _check(item)
        return
    if isinstance(value, dict):
        for key, item in value.items():
            if not isinstance(key, str):
                raise CanonicalizationError(f"non-string key {key!r}")
            _check(item)
        return
    raise CanonicalizationError(f"type {type(value).__name__} is not canonicalizable")


def canonical_json(value: Any) -> str:
    """Render a JSON-safe value in the canonical text form."""
    _check(value)
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def canonical_bytes(value: Any) -> bytes:
    return canonical_json(value).encode("utf-8")


def digest(value: Any) -> str:
    """SHA-256 hex digest of the canonical form of ``value``."""
    return hashlib.sha256(canonical_bytes(value)).hexdigest()


def digest_raw(data: bytes) -> str:
    """SHA-256 hex digest of raw bytes (content addressing for packages)."""
    return hashlib.sha256(data).hexdigest()


def encode_bytes(data: bytes) -> str:
    """Base64 text form used to embed raw bytes in canonical JSON."""
    return base64.b64encode(data).decode("ascii")


def decode_bytes(text: str) -> bytes:
    return base64.b64decode(text.encode("ascii"))
