"""Vietoris-Rips persistence barcodes.

``compute_barcode`` runs the production route: union-find for degree 0, then
one coboundary reduction block per degree with clearing and (optionally) the
apparent-pair shortcut.  ``brute_force_barcode`` is the oracle: a textbook
left-to-right reduction of the full boundary matrix in filtration order.
Both emit identical multisets of simplex-indexed pairs, which is the
acceptance bar for the engine.

Barcodes hold their intervals in columnar numpy arrays; rich
``PersistencePair`` objects are materialized only on access, since filtered
complexes at a few thousand points produce millions of zero-length pairs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from . import _reduction as kern
from .combinat import SimplexKey, binomial_table, cns_decode, cns_encode
from .errors import InvalidSimplexError, ReindexError
from .filtration import (
    DistanceMatrix,
    ReindexMap,
    default_threshold,
    natural_indices,
    simplex_diameter,
    simplexwise_stream,
)
from .modp import inv_mod, require_prime


@dataclass(frozen=True)
class PersistencePair:
    """One interval: birth/death simplices, optional natural indices, and the
    real endpoints obtained from the diameters (death +inf when essential)."""

    dim: int
    birth_simplex: SimplexKey
    death_simplex: SimplexKey | None
    birth_value: float
    death_value: float
    birth_index: int | None = None
    death_index: int | None = None

    @property
    def essential(self) -> bool:
        return self.death_simplex is None

    @property
    def length(self) -> float:
        return self.death_value - self.birth_value


@dataclass
class Barcode:
    """Simplex-indexed barcode.  The arrays retain zero-length intervals; the
    real-valued view drops them (and keeps essential classes).  ``death_ci``
    is -1 for essential intervals and ``death_val`` +inf."""

    dims: np.ndarray
    birth_ci: np.ndarray
    death_ci: np.ndarray
    birth_val: np.ndarray
    death_val: np.ndarray
    n: int
    maxdim: int
    threshold: float
    field_char: int
    birth_idx: np.ndarray | None = None  # natural indices, attached on demand
    death_idx: np.ndarray | None = None  # -1 for essential
    last_index: int | None = None

    def __len__(self) -> int:
        return len(self.dims)

    def _make_pair(self, i: int) -> PersistencePair:
        ess = self.death_ci[i] < 0
        return PersistencePair(
            dim=int(self.dims[i]),
            birth_simplex=SimplexKey(int(self.dims[i]), int(self.birth_ci[i])),
            death_simplex=None
            if ess
            else SimplexKey(int(self.dims[i]) + 1, int(self.death_ci[i])),
            birth_value=float(self.birth_val[i]),
            death_value=float(self.death_val[i]),
            birth_index=None if self.birth_idx is None else int(self.birth_idx[i]),
            death_index=None
            if (self.death_idx is None or ess)
            else int(self.death_idx[i]),
        )

    @property
    def pairs(self) -> tuple[PersistencePair, ...]:
        return tuple(self._make_pair(i) for i in range(len(self)))

    def in_dim(self, dim: int) -> list[PersistencePair]:
        return [self._make_pair(i) for i in np.nonzero(self.dims == dim)[0]]

    def finite(self, dim: int | None = None) -> list[PersistencePair]:
        mask = self.death_ci >= 0
        if dim is not None:
            mask &= self.dims == dim
        return [self._make_pair(i) for i in np.nonzero(mask)[0]]

    def essential(self, dim: int | None = None) -> list[PersistencePair]:
        mask = self.death_ci < 0
        if dim is not None:
            mask &= self.dims == dim
        return [self._make_pair(i) for i in np.nonzero(mask)[0]]

    def _select(self, mask: np.ndarray) -> "Barcode":
        return replace(
            self,
            dims=self.dims[mask],
            birth_ci=self.birth_ci[mask],
            death_ci=self.death_ci[mask],
            birth_val=self.birth_val[mask],
            death_val=self.death_val[mask],
            birth_idx=None if self.birth_idx is None else self.birth_idx[mask],
            death_idx=None if self.death_idx is None else self.death_idx[mask],
        )

    def real_view(self) -> "Barcode":
        """Half-open real intervals: zero-length intervals discarded,
        essential deaths +inf."""
        return self._select((self.death_ci < 0) | (self.death_val > self.birth_val))

    def simplex_multiset(self) -> list[tuple]:
        out = [
            (int(d), int(b), None if dc < 0 else int(dc))
            for d, b, dc in zip(self.dims, self.birth_ci, self.death_ci)
        ]
        return sorted(out, key=lambda t: (t[0], t[1], -1 if t[2] is None else t[2]))


def _sort_barcode_arrays(dims, bci, dci, bval, dval):
    dims = np.asarray(dims, dtype=np.int64)
    bci = np.asarray(bci, dtype=np.int64)
    dci = np.asarray(dci, dtype=np.int64)
    bval = np.asarray(bval, dtype=np.float64)
    dval = np.asarray(dval, dtype=np.float64)
    order = np.lexsort((dci, bci, dval, bval, dims))
    return dims[order], bci[order], dci[order], bval[order], dval[order]


def make_barcode(records: Iterable[tuple], n, maxdim, threshold, field_char) -> Barcode:
    """Build a Barcode from (dim, birth_ci, death_ci(-1), birth_val, death_val)."""
    recs = list(records)
    if recs:
        dims, bci, dci, bval, dval = map(np.array, zip(*recs))
    else:
        dims = bci = dci = np.empty(0, np.int64)
        bval = dval = np.empty(0, np.float64)
    dims, bci, dci, bval, dval = _sort_barcode_arrays(dims, bci, dci, bval, dval)
    return Barcode(dims, bci, dci, bval, dval, n, maxdim, threshold, field_char)


def edge_arrays(dmat: DistanceMatrix, thr: float):
    """Edges with diameter <= thr in filtration order (diam asc, cindex desc).

    Returns (u, v, cindex, diameter) int64/float64 arrays.
    """
    n = dmat.n
    iu, ju = np.triu_indices(n, 1)
    diam = dmat.d[iu, ju]
    keep = diam <= thr
    iu = iu[keep].astype(np.int64)
    ju = ju[keep].astype(np.int64)
    diam = diam[keep].astype(np.float64)
    cidx = ju * (ju - 1) // 2 + iu
    order = np.lexsort((-cidx, diam))
    return iu[order], ju[order], cidx[order], diam[order]


def _enumerate_simplices(dmat: DistanceMatrix, dim: int, thr: float, binom):
    """(cindex, diameter) arrays of all dim-simplices with diameter <= thr."""
    n = dmat.n
    dist = np.ascontiguousarray(dmat.d, dtype=np.float64).ravel()
    if dim == 1:
        _, _, ci, dm = edge_arrays(dmat, thr)
        return ci, dm
    if dim == 2:
        return kern.enumerate_triangles(n, dist, thr, binom)
    # rare path (maxdim >= 3); small n only
    cis, ds = [], []
    d = dmat.d
    for verts in itertools.combinations(range(n), dim + 1):
        dm = max(d[a, b] for a, b in itertools.combinations(verts, 2))
        if dm <= thr:
            cis.append(cns_encode(verts, n).cindex)
            ds.append(dm)
    return np.array(cis, dtype=np.int64), np.array(ds, dtype=np.float64)


def compute_barcode(
    dmat: DistanceMatrix,
    maxdim: int = 1,
    threshold: float | None = None,
    field_char: int = 2,
    use_apparent: bool = True,
) -> Barcode:
    """Absolute-homology barcode of the Vietoris-Rips filtration, degrees
    0..maxdim, with birth/death simplices attached to every interval."""
    p = require_prime(field_char)
    if maxdim < 0:
        raise InvalidSimplexError("maxdim must be >= 0")
    thr = default_threshold(dmat, threshold)
    n = dmat.n
    binom = binomial_table(n, maxdim + 3)
    dist = np.ascontiguousarray(dmat.d, dtype=np.float64).ravel()

    eu, ev, ecidx, ediam = edge_arrays(dmat, thr)
    pv, pe, neg, ess0 = kern.union_find_pairs(n, eu, ev)

    parts = []
    if len(pv):
        parts.append(
            (
                np.zeros(len(pv), np.int64),
                pv,
                ecidx[pe],
                np.zeros(len(pv), np.float64),
                ediam[pe],
            )
        )
    if len(ess0):
        parts.append(
            (
                np.zeros(len(ess0), np.int64),
                ess0,
                np.full(len(ess0), -1, np.int64),
                np.zeros(len(ess0), np.float64),
                np.full(len(ess0), np.inf),
            )
        )

    # clearing: the columns of block d are the d-simplices that did not die
    # in block d-1
    cols_ci = ecidx[~neg]
    cols_f = ediam[~neg]
    for d in range(1, maxdim + 1):
        order = np.lexsort((cols_ci, -cols_f))
        sig, sigf, tau, taug, ess = kern.reduce_block(
            cols_ci[order], cols_f[order], d, n, dist, dist, thr, binom, p, use_apparent
        )
        if len(sig):
            parts.append((np.full(len(sig), d, np.int64), sig, tau, sigf, taug))
        if len(ess):
            essv = np.array(
                [simplex_diameter(SimplexKey(d, int(s)), dmat) for s in ess]
            )
            parts.append(
                (
                    np.full(len(ess), d, np.int64),
                    ess,
                    np.full(len(ess), -1, np.int64),
                    essv,
                    np.full(len(ess), np.inf),
                )
            )
        if d < maxdim:
            nci, ndm = _enumerate_simplices(dmat, d + 1, thr, binom)
            alive = ~np.isin(nci, tau)
            cols_ci = nci[alive]
            cols_f = ndm[alive]

    if parts:
        dims = np.concatenate([q[0] for q in parts])
        bci = np.concatenate([q[1] for q in parts])
        dci = np.concatenate([q[2] for q in parts])
        bval = np.concatenate([q[3] for q in parts])
        dval = np.concatenate([q[4] for q in parts])
    else:
        dims = bci = dci = np.empty(0, np.int64)
        bval = dval = np.empty(0, np.float64)
    dims, bci, dci, bval, dval = _sort_barcode_arrays(dims, bci, dci, bval, dval)
    return Barcode(dims, bci, dci, bval, dval, n, maxdim, thr, p)


def brute_force_barcode(
    dmat: DistanceMatrix,
    maxdim: int = 1,
    threshold: float | None = None,
    field_char: int = 2,
) -> Barcode:
    """Oracle: left-to-right reduction of the full boundary matrix, adding
    columns on the left, in filtration order.  Dense and unoptimized;
    intended for small inputs."""
    p = require_prime(field_char)
    if maxdim < 0:
        raise InvalidSimplexError("maxdim must be >= 0")
    thr = default_threshold(dmat, threshold)
    n = dmat.n
    stream = simplexwise_stream(dmat, maxdim, thr)
    pos = {key: i for i, key in enumerate(stream)}

    columns: list[dict[int, int]] = []
    for key in stream:
        if key.dim == 0:
            columns.append({})
            continue
        verts = cns_decode(key, n)
        col: dict[int, int] = {}
        for drop in range(len(verts)):
            facet = verts[:drop] + verts[drop + 1 :]
            fkey = cns_encode(facet, n)
            col[pos[fkey]] = 1 if drop % 2 == 0 else p - 1
        columns.append(col)

    pivot_of_row: dict[int, int] = {}
    for j, col in enumerate(columns):
        while col:
            i = max(col)
            if i in pivot_of_row:
                j2 = pivot_of_row[i]
                other = columns[j2]
                lam = (p - col[i] * inv_mod(other[i], p)) % p
                for r, v in other.items():
                    nv = (col.get(r, 0) + lam * v) % p
                    if nv:
                        col[r] = nv
                    elif r in col:
                        del col[r]
            else:
                pivot_of_row[i] = j
                break
        columns[j] = col

    records = []
    paired_births = set()
    for i, j in pivot_of_row.items():
        bkey, dkey = stream[i], stream[j]
        paired_births.add(i)
        if bkey.dim > maxdim:
            continue
        records.append(
            (
                bkey.dim,
                bkey.cindex,
                dkey.cindex,
                simplex_diameter(bkey, dmat),
                simplex_diameter(dkey, dmat),
            )
        )
    claimed_cols = set(pivot_of_row.values())
    for j, col in enumerate(columns):
        if col or j in claimed_cols or j in paired_births:
            continue
        bkey = stream[j]
        if bkey.dim > maxdim:
            continue
        records.append(
            (bkey.dim, bkey.cindex, -1, simplex_diameter(bkey, dmat), np.inf)
        )

    return make_barcode(records, n, maxdim, thr, p)


def attach_natural_indices(barcode: Barcode, dmat: DistanceMatrix) -> Barcode:
    """Annotate every pair with natural filtration indices (all vertices share
    index 1; each later simplex advances the index).  Materializes the
    simplex stream, so use at moderate sizes."""
    stream = simplexwise_stream(dmat, barcode.maxdim, barcode.threshold)
    nat = natural_indices(stream)
    last = max(nat.values()) if nat else 1
    bidx = np.empty(len(barcode), np.int64)
    didx = np.full(len(barcode), -1, np.int64)
    for i in range(len(barcode)):
        d = int(barcode.dims[i])
        bkey = SimplexKey(d, int(barcode.birth_ci[i]))
        if bkey not in nat:
            raise ReindexError(f"birth simplex {bkey} not in stream")
        bidx[i] = nat[bkey]
        if barcode.death_ci[i] >= 0:
            dkey = SimplexKey(d + 1, int(barcode.death_ci[i]))
            if dkey not in nat:
                raise ReindexError(f"death simplex {dkey} not in stream")
            # the interval is alive through the step before the death simplex
            didx[i] = nat[dkey] - 1
    return replace(barcode, birth_idx=bidx, death_idx=didx, last_index=last)


def reindex_map_for(
    dmat: DistanceMatrix, maxdim: int, threshold: float | None = None
) -> ReindexMap:
    thr = default_threshold(dmat, threshold)
    return ReindexMap.from_stream(dmat, simplexwise_stream(dmat, maxdim, thr))


def reindex_barcode(barcode: Barcode, rmap: ReindexMap) -> Barcode:
    """Real-valued view via a re-indexing map: half-open intervals
    [t_b, t_{d+1}), zero-length intervals discarded, essential deaths +inf.
    Pairs must carry natural indices."""
    if barcode.birth_idx is None:
        raise ReindexError("pair has no natural index; attach indices first")
    bval = np.empty(len(barcode))
    dval = np.empty(len(barcode))
    for i in range(len(barcode)):
        bval[i] = rmap.value(int(barcode.birth_idx[i]))
        if barcode.death_idx[i] < 0:
            dval[i] = np.inf
        else:
            dval[i] = rmap.value(int(barcode.death_idx[i]) + 1)
    out = replace(barcode, birth_val=bval, death_val=dval)
    return out._select((out.death_ci < 0) | (dval > bval))


def natural_interval_multiset(barcode: Barcode, dim: int) -> list[tuple]:
    """[b, d] natural-index intervals in one degree; essential classes use the
    final index of the filtration as d (so the real view maps them to +inf)."""
    if barcode.last_index is None or barcode.birth_idx is None:
        raise ReindexError("attach natural indices first")
    out = []
    for i in np.nonzero(barcode.dims == dim)[0]:
        b = int(barcode.birth_idx[i])
        d = int(barcode.death_idx[i])
        out.append((b, d if d >= 0 else barcode.last_index))
    return sorted(out)
