"""Stable seed derivation.

Seeds are derived by hashing a tuple of labels with SHA-256, so every stream
is reproducible across runs, platforms and process boundaries. Python's
built-in hash() is salted per process and must not be used here.
"""
from __future__ import annotations

import hashlib

import numpy as np


def _canon(part) -> str:
    if isinstance(part, bool):
        return f"b:{part}"
    if isinstance(part, int):
        return f"i:{part}"
    if isinstance(part, float):
        # float() strips numpy scalar subclasses so repr stays canonical
        return f"f:{float(part)!r}"
    if isinstance(part, str):
        return f"s:{part}"
    if isinstance(part, (tuple, list)):
        return "t:(" + ",".join(_canon(p) for p in part) + ")"
    if part is None:
        return "n:"
    if isinstance(part, np.integer):
        return f"i:{int(part)}"
    if isinstance(part, np.floating):
        return f"f:{float(part)!r}"
    raise TypeError(f"cannot derive a seed from {type(part).__name__}")


def stable_seed(*parts) -> int:
    """Collapse a label tuple into a deterministic unsigned 64-bit seed."""
    payload = "\x1f".join(_canon(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "little")


def spawn_rng(*parts) -> np.random.Generator:
    """Fresh PCG64 generator seeded from the label tuple."""
    return np.random.default_rng(stable_seed(*parts))
