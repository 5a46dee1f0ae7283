"""Deterministic random-stream derivation.

Every stochastic routine derives its generator from a 64-bit master seed
plus an integer path, so results are reproducible and independent of
evaluation order, batch schedule, or thread count.  Philox is counter
based, which makes the derived streams cheap to construct and statistically
independent of each other.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["stream", "derive_seed"]


def _path_ints(path) -> tuple[int, ...]:
    out = []
    for p in path:
        if isinstance(p, str):
            out.append(zlib.crc32(p.encode("ascii")))
        else:
            out.append(int(p))
    return tuple(out)


def stream(seed: int, *path) -> np.random.Generator:
    """Return a Philox generator for the sub-stream ``(seed, *path)``.

    ``path`` elements may be ints or short ASCII tags; tags are hashed.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=_path_ints(path))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *path) -> int:
    """Derive a child 64-bit seed for code that takes seeds, not generators."""
    ss = np.random.SeedSequence(int(seed), spawn_key=_path_ints(path))
    return int(ss.generate_state(1, np.uint64)[0])
