"""Dense linear algebra over a prime field, used by the verification oracles.

Everything here is deliberately naive (row reduction on int64 matrices) and
independent of the production reduction kernels.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidFieldError


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def require_prime(p: int) -> int:
    if not is_prime(int(p)):
        raise InvalidFieldError(f"field characteristic must be prime, got {p}")
    return int(p)


def inv_mod(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def row_echelon(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Row echelon form mod p; returns (matrix, pivot column list)."""
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        m[r] = (m[r] * inv_mod(int(m[r, c]), p)) % p
        other = np.nonzero(m[:, c])[0]
        for k in other:
            if k != r:
                m[k] = (m[k] - m[k, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank_mod(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    _, pivots = row_echelon(a, p)
    return len(pivots)


def nullspace_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right null space mod p, as columns of the result."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    m, pivots = row_echelon(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for idx, fc in enumerate(free):
        basis[fc, idx] = 1
        for r, pc in enumerate(pivots):
            basis[pc, idx] = (-m[r, fc]) % p
    return basis


def dim_sum(a: np.ndarray, b: np.ndarray, p: int) -> int:
    """dim(span(cols a) + span(cols b))."""
    if a.size == 0 and b.size == 0:
        return 0
    if a.size == 0:
        return rank_mod(b.T, p)
    if b.size == 0:
        return rank_mod(a.T, p)
    return rank_mod(np.hstack([a, b]).T, p)


def dim_intersection(a: np.ndarray, b: np.ndarray, p: int) -> int:
    """dim(span(cols a) cap span(cols b))."""
    ra = rank_mod(a.T, p) if a.size else 0
    rb = rank_mod(b.T, p) if b.size else 0
    return ra + rb - dim_sum(a, b, p)


def in_span(vec: np.ndarray, basis: np.ndarray, p: int) -> bool:
    """Is ``vec`` in the column span of ``basis`` mod p?"""
    if not np.any(vec % p):
        return True
    if basis.size == 0:
        return False
    r0 = rank_mod(basis.T, p)
    r1 = rank_mod(np.hstack([basis, vec.reshape(-1, 1)]).T, p)
    return r0 == r1
