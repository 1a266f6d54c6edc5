"""Combinatorial number system: ranking vertex sets of simplices.

A d-simplex on vertices v_0 < v_1 < ... < v_d (integers below the point
count n) is identified by its colexicographic rank

    cindex = sum_i C(v_i, i + 1),

which enumerates all (d+1)-subsets of {0..n-1} as 0 .. C(n, d+1)-1.  The
rank does not depend on n, so a simplex supported on the first n' < n
vertices has the same cindex in both ambient sizes; the matching stage
relies on that.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidSimplexError


class SimplexKey(NamedTuple):
    dim: int
    cindex: int


def binomial_table(n: int, max_k: int) -> np.ndarray:
    """Pascal table B[v, k] = C(v, k) for 0 <= v <= n, 0 <= k <= max_k."""
    table = np.zeros((n + 1, max_k + 1), dtype=np.int64)
    table[:, 0] = 1
    for v in range(1, n + 1):
        for k in range(1, max_k + 1):
            table[v, k] = table[v - 1, k - 1] + table[v - 1, k]
    return table


def cns_encode(vertices: Sequence[int], n: int) -> SimplexKey:
    """Rank a strictly increasing vertex set among equal-size subsets of {0..n-1}."""
    verts = list(vertices)
    if not verts:
        raise InvalidSimplexError("empty vertex set")
    for a, b in zip(verts, verts[1:]):
        if a >= b:
            raise InvalidSimplexError(f"vertices not strictly increasing: {verts}")
    if verts[0] < 0 or verts[-1] >= n:
        raise InvalidSimplexError(f"vertex out of range for n={n}: {verts}")
    table = binomial_table(max(n, len(verts)), len(verts))
    rank = 0
    for i, v in enumerate(verts):
        rank += int(table[v, i + 1])
    return SimplexKey(dim=len(verts) - 1, cindex=rank)


def cns_decode(key: SimplexKey, n: int) -> tuple[int, ...]:
    """Inverse of :func:`cns_encode`; returns the sorted vertex tuple."""
    dim, rank = key.dim, key.cindex
    if dim < 0 or rank < 0:
        raise InvalidSimplexError(f"invalid key {key}")
    table = binomial_table(n, dim + 1)
    if rank >= table[n, dim + 1]:
        raise InvalidSimplexError(f"cindex {rank} out of range for C({n},{dim + 1})")
    verts = []
    r = rank
    v = n - 1
    for i in range(dim, -1, -1):
        # largest v with C(v, i+1) <= r
        while table[v, i + 1] > r:
            v -= 1
        verts.append(v)
        r -= int(table[v, i + 1])
        v -= 1
    verts.reverse()
    return tuple(verts)


def simplex_count(n: int, dim: int) -> int:
    return int(binomial_table(n, dim + 1)[n, dim + 1])
