"""Deterministic sub-seed derivation.

Every record in a corpus gets its own substream seed, mixed from the root
seed, the record index, and a short tag via SHA-256. Unlike Python's hash(),
this is stable across processes and platforms, so corpora generated in
parallel chunks come out identical to a serial run.
"""

from __future__ import annotations

import hashlib


def derive_seed(root: int, *parts: int | str) -> int:
    """Mix (root, *parts) into a 63-bit seed."""
    material = ":".join([str(root), *(str(p) for p in parts)])
    digest = hashlib.sha256(material.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "little") >> 1
