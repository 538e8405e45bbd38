"""Shared permutation enumeration backend.

All exhaustive sums over the symmetric group in this package draw their
permutations from here.  Permutations are materialised as int8 index arrays
(one row per permutation, entries are 0-based column choices) and consumed
in blocks so that callers never need the full n! x n table in memory for
large n.  Small tables (n <= 8, at most 40320 rows) are cached.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import islice, permutations
from typing import Iterator

import numpy as np

_CACHE_MAX_N = 8
_DEFAULT_BLOCK = 720_720  # lcm-ish block keeping gathers around a few MB


@lru_cache(maxsize=None)
def full_table(n: int) -> np.ndarray:
    """All n! permutations of range(n) as a read-only (n!, n) int8 array."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > _CACHE_MAX_N:
        raise ValueError(f"full_table is limited to n <= {_CACHE_MAX_N}; iterate perm_blocks instead")
    if n == 0:
        table = np.zeros((1, 0), dtype=np.int8)
    else:
        count = math.factorial(n)
        flat = np.fromiter(
            (v for perm in permutations(range(n)) for v in perm),
            dtype=np.int8,
            count=count * n,
        )
        table = flat.reshape(count, n)
    table.setflags(write=False)
    return table


def perm_blocks(n: int, block: int = _DEFAULT_BLOCK) -> Iterator[np.ndarray]:
    """Yield all n! permutations of range(n) in consecutive int8 blocks."""
    if n <= _CACHE_MAX_N:
        yield full_table(n)
        return
    it = permutations(range(n))
    while True:
        chunk = list(islice(it, block))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int8)
