"""Deterministic derivation of child RNG seeds, stable across platforms."""

from __future__ import annotations

import hashlib


def derive_seed(base: int, *parts: int | str) -> int:
    """A child seed for (base, parts); sha256-based, order-sensitive."""
    text = ":".join([str(base)] + [str(p) for p in parts])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
