"""Canonical serialization and digest behavior."""

import pytest

from opsflow.canonical import (
    CanonicalizationError,
    canonical_json,
    decode_bytes,
    digest,
    digest_raw,
    encode_bytes,
)


def test_sorted_keys_and_compact():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'


def test_key_order_does_not_matter():
    assert digest({"x": 1, "y": 2}) == digest({"y": 2, "x": 1})


def test_floats_rejected():
    with pytest.raises(CanonicalizationError):
        canonical_json({"a": 1.5})


def test_non_string_keys_rejected():
    with pytest.raises(CanonicalizationError):
        canonical_json({1: "a"})


def test_tuples_serialize_like_lists():
    assert canonical_json((1, 2)) == canonical_json([1, 2])


def test_digest_raw_stable():
    assert digest_raw(b"abc") == digest_raw(b"abc")
    assert digest_raw(b"abc") != digest_raw(b"abd")


def test_bytes_round_trip():
    data = bytes(range(256))
    assert decode_bytes(encode_bytes(data)) == data
