"""Named random sub-streams derived from one 64-bit seed.

Every experiment draws randomness through ``stream(seed, name, index)`` so
that the instance sampler, the algorithm, the label table and the codec
fallback never share state, and an encoder/decoder pair can rebuild exactly
the same stream from the same (seed, name, index).
"""
from __future__ import annotations

import hashlib
import random

STREAMS = ("instance", "algorithm", "label-table", "codec-fallback")


def derive(seed: int, name: str, index: int | None = None) -> int:
    tag = f"{int(seed) & ((1 << 64) - 1)}/{name}/{'' if index is None else int(index)}"
    return int.from_bytes(hashlib.sha256(tag.encode()).digest()[:8], "big")


def stream(seed: int, name: str, index: int | None = None) -> random.Random:
    return random.Random(derive(seed, name, index))
