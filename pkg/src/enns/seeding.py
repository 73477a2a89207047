"""Deterministic derivation of independent random substreams.

Every stochastic component takes an integer seed; nested components get
their own streams through ``derive_seed``, so results never depend on call
order and identical seeds reproduce bit-identical runs.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key_part(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part)
    return zlib.crc32(str(part).encode("utf8"))


def derive_seed(seed: int, *key) -> int:
    """Derive a child seed from ``seed`` and a mixed int/str key path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key_part(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def spawn_rng(seed: int, *key) -> np.random.Generator:
    """Generator seeded by ``derive_seed(seed, *key)``."""
    return np.random.default_rng(derive_seed(seed, *key))
