"""Deterministic child RNG streams derived from one master seed.

Stream layout during generation: stream 0 drives author choice and the
rhyme plan, streams 1..N drive the N line searches, stream 15 drives
punctuation. Child seeds are hashed so that parallel and serial line
searches consume independent, reproducible state.
"""

from __future__ import annotations

import hashlib
import random

PLAN_STREAM = 0
PUNCT_STREAM = 15


def child_seed(master_seed: int, stream: int) -> int:
    digest = hashlib.sha256(f"{master_seed}:{stream}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def substream(master_seed: int, stream: int) -> random.Random:
    """A fresh random.Random for (master_seed, stream), stable across runs."""
    return random.Random(child_seed(master_seed, stream))
