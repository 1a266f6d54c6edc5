"""Image-persistence barcodes for one Vietoris-Rips filtration inside another.

The inputs are two metrics on the same ordered point set with
``d_sub >= d_super`` entrywise, so the sub-filtration is included in the
super-filtration at every scale.  Finite intervals come out of the mixed
coboundary reduction (columns ordered by the sub-filtration, rows by the
super-filtration) with clearing against the sub-filtration's own deaths;
essential intervals are the columns that reduce to zero.  Degree 0 needs no
reduction: every vertex is present in both filtrations from scale zero, so
the degree-0 image module coincides with the super-filtration's own
degree-0 module.

``oracle_image_barcode`` recomputes everything from the rank function of the
module by dense linear algebra over the field and recovers the barcode by
inclusion-exclusion on ranks; it shares no code with the production route.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _reduction as kern
from .combinat import SimplexKey, binomial_table, cns_decode, cns_encode
from .errors import InvalidSimplexError, NotNestedError, OracleScaleError
from .filtration import DistanceMatrix, default_threshold
from .modp import dim_intersection, nullspace_mod, rank_mod, require_prime
from .persistence import PersistencePair, _enumerate_simplices, edge_arrays


@dataclass(frozen=True)
class ImageProblem:
    """Nested pair of metrics: VR(d_sub) included in VR(d_super) scalewise."""

    d_sub: DistanceMatrix
    d_super: DistanceMatrix
    maxdim: int = 1
    threshold: float | None = None
    field_char: int = 2

    def __post_init__(self):
        if self.d_sub.n != self.d_super.n:
            raise NotNestedError("metrics have different point counts")
        if np.any(self.d_sub.d < self.d_super.d):
            raise NotNestedError("d_sub must be >= d_super entrywise")
        require_prime(self.field_char)
        if self.maxdim < 0:
            raise InvalidSimplexError("maxdim must be >= 0")

    @property
    def n(self) -> int:
        return self.d_super.n

    def resolved_threshold(self) -> float:
        # the codomain scale dominates: image classes cannot outlive the
        # super-filtration's cone point
        return default_threshold(self.d_super, self.threshold)


@dataclass
class ImageBarcode:
    """Barcode of the image module.  Birth simplices are keyed in the
    sub-filtration's order (birth values are sub-diameters), death simplices
    in the super-filtration's order (death values are super-diameters)."""

    dims: np.ndarray
    birth_ci: np.ndarray
    death_ci: np.ndarray  # -1 = essential
    birth_val: np.ndarray
    death_val: np.ndarray
    n: int
    maxdim: int
    threshold: float
    field_char: int
    kind: str = "image"

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
        )

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

    def simplex_multiset(self) -> list[tuple]:
        out = [
            (int(d), int(b), None if dc < 0 else int(dc))
            for d, b, dc in zip(self.dims, self.birth_ci, self.death_ci)
        ]
        return sorted(out, key=lambda t: (t[0], t[1], -1 if t[2] is None else t[2]))


def _assemble(parts, n, maxdim, thr, p) -> ImageBarcode:
    if parts:
        dims = np.concatenate([q[0] for q in parts]).astype(np.int64)
        bci = np.concatenate([q[1] for q in parts]).astype(np.int64)
        dci = np.concatenate([q[2] for q in parts]).astype(np.int64)
        bval = np.concatenate([q[3] for q in parts]).astype(np.float64)
        dval = np.concatenate([q[4] for q in parts]).astype(np.float64)
    else:
        dims = bci = dci = np.empty(0, np.int64)
        bval = dval = np.empty(0, np.float64)
    order = np.lexsort((dci, bci, dval, bval, dims))
    return ImageBarcode(
        dims[order], bci[order], dci[order], bval[order], dval[order], n, maxdim, thr, p
    )


def _sub_diam(dmat: DistanceMatrix, dim: int, cindex: int) -> float:
    if dim == 0:
        return 0.0
    verts = cns_decode(SimplexKey(dim, cindex), dmat.n)
    return float(max(dmat.d[a, b] for a, b in itertools.combinations(verts, 2)))


def compute_image_barcode(problem: ImageProblem, use_apparent: bool = True) -> ImageBarcode:
    """Barcode of the image of the inclusion-induced maps on homology, degrees
    0..maxdim, with every interval annotated by its birth/death simplices."""
    p = problem.field_char
    n = problem.n
    maxdim = problem.maxdim
    thr = problem.resolved_threshold()
    binom = binomial_table(n, maxdim + 3)
    dist_f = np.ascontiguousarray(problem.d_sub.d, dtype=np.float64).ravel()
    dist_g = np.ascontiguousarray(problem.d_super.d, dtype=np.float64).ravel()

    parts = []

    # degree 0: the image module equals the super-filtration's degree-0
    # module (vertices are present in both from scale 0)
    gu, gv, gcidx, gdiam = edge_arrays(problem.d_super, thr)
    pv, pe, _, ess0 = kern.union_find_pairs(n, gu, gv)
    if len(pv):
        parts.append(
            (
                np.zeros(len(pv), np.int64),
                pv,
                gcidx[pe],
                np.zeros(len(pv), np.float64),
                gdiam[pe],
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

    if maxdim >= 1:
        # the column universe of every block is the full codomain complex:
        # simplices that never enter the domain filtration (sub-diameter
        # beyond the threshold) still own pivots, and skipping them would
        # hand their deaths to genuine columns.  Their own pairs are always
        # ephemeral and never reach the output.  Ties in the sub-diameter
        # (the whole sentinel block of a union problem) are refined by the
        # codomain diameter so the block reduces like an ordinary one.
        cols_ci = gcidx.copy()
        cols_f = problem.d_sub.d[gu, gv].astype(np.float64)
        cols_g = gdiam.copy()
        # degree-0 clearing: deaths of the sub-filtration restricted to the
        # same edge universe, in sub-filtration order
        forder = np.lexsort((-cols_ci, cols_g, cols_f))
        _, _, fneg, _ = kern.union_find_pairs(n, gu[forder], gv[forder])
        alive = np.ones(len(cols_ci), bool)
        alive[forder] = ~fneg
        cols_ci = cols_ci[alive]
        cols_f = cols_f[alive]
        cols_g = cols_g[alive]
        for d in range(1, maxdim + 1):
            # the codomain-diameter tie refinement (and the apparent-pair
            # check that assumes it) applies to the edge block; higher blocks
            # fall back to the plain (sub-diameter, cindex) order so that
            # clearing agrees with the domain run's own refinement
            if d == 1:
                order = np.lexsort((cols_ci, -cols_g, -cols_f))
            else:
                order = np.lexsort((cols_ci, -cols_f))
            sig, sigf, tau, taug, ess = kern.reduce_block(
                cols_ci[order],
                cols_f[order],
                d,
                n,
                dist_f,
                dist_g,
                thr,
                binom,
                p,
                use_apparent and d == 1,
            )
            # a pair whose codomain death precedes its domain birth is
            # ephemeral: the class is dead on arrival and spans no interval
            keep = taug >= sigf
            if keep.any():
                parts.append(
                    (
                        np.full(int(keep.sum()), d, np.int64),
                        sig[keep],
                        tau[keep],
                        sigf[keep],
                        taug[keep],
                    )
                )
            # zero columns born within the threshold are essential image
            # classes; later births never enter the domain filtration
            if len(ess):
                essf = np.array([_sub_diam(problem.d_sub, d, int(s)) for s in ess])
                inside = essf <= thr
                if inside.any():
                    parts.append(
                        (
                            np.full(int(inside.sum()), d, np.int64),
                            ess[inside],
                            np.full(int(inside.sum()), -1, np.int64),
                            essf[inside],
                            np.full(int(inside.sum()), np.inf),
                        )
                    )
            if d < maxdim:
                # clearing of the next block uses the sub-filtration's own
                # deaths over the same column universe; this run's apparent
                # checks assume the plain (sub-diameter, cindex) order, so
                # it gets its own column order
                dorder = np.lexsort((cols_ci, -cols_f))
                _, _, dom_tau, _, _ = kern.reduce_block(
                    cols_ci[dorder],
                    cols_f[dorder],
                    d,
                    n,
                    dist_f,
                    dist_f,
                    thr,
                    binom,
                    p,
                    use_apparent,
                )
                nci, ngd = _enumerate_simplices(problem.d_super, d + 1, thr, binom)
                nfd = np.array(
                    [_sub_diam(problem.d_sub, d + 1, int(c)) for c in nci]
                )
                keep_next = ~np.isin(nci, dom_tau)
                cols_ci = nci[keep_next]
                cols_f = nfd[keep_next]
                cols_g = ngd[keep_next]

    return _assemble(parts, n, maxdim, thr, p)


# ---------------------------------------------------------------------------
# rank oracle
# ---------------------------------------------------------------------------

ORACLE_MAX_POINTS = 12
ORACLE_MAX_SIMPLICES = 4000


def _oracle_complex(problem: ImageProblem, thr: float):
    """All simplices of the super-complex with both diameters, dims 0..maxdim+1."""
    n = problem.n
    ds, dz = problem.d_sub.d, problem.d_super.d
    simplices = []  # (dim, cindex, verts, f, g)
    for dim in range(0, min(problem.maxdim + 1, n - 1) + 1):
        for verts in itertools.combinations(range(n), dim + 1):
            if dim == 0:
                f = g = 0.0
            else:
                pairs = list(itertools.combinations(verts, 2))
                g = max(dz[a, b] for a, b in pairs)
                f = max(ds[a, b] for a, b in pairs)
            if g <= thr:
                simplices.append((dim, cns_encode(verts, n).cindex, verts, f, g))
    return simplices


def _guard_scale(problem: ImageProblem, simplices) -> None:
    if problem.n > ORACLE_MAX_POINTS:
        raise OracleScaleError(
            f"oracle limited to {ORACLE_MAX_POINTS} points, got {problem.n}"
        )
    if len(simplices) > ORACLE_MAX_SIMPLICES:
        raise OracleScaleError("oracle instance too large")


def oracle_image_barcode(problem: ImageProblem) -> ImageBarcode:
    """Rank-function oracle.

    Interleave both filtrations into one event sequence (ties: smaller value,
    then smaller dimension, then larger cindex, then super before sub so the
    inclusion holds stepwise).  For step pair i <= j the rank of the module
    map is dim Z_d(X_i) - dim(Z_d(X_i) cap B_d(Z_j)), computed densely over
    the field; bars follow by inclusion-exclusion on ranks.  Refuses large
    instances.
    """
    thr = problem.resolved_threshold()
    simplices = _oracle_complex(problem, thr)
    _guard_scale(problem, simplices)
    p = problem.field_char

    # event keys mirror the engine's refinements: codomain insertions are
    # ordered (g, dim, cindex desc); domain insertions break sub-diameter
    # ties by codomain diameter in the edge dimension and by cindex above
    events = []
    for idx, (dim, ci, verts, f, g) in enumerate(simplices):
        events.append((g, dim, g, -ci, 0, idx))
        if f <= thr:
            events.append((f, dim, g if dim == 1 else f, -ci, 1, idx))
    events.sort()

    parts = []
    for d in range(0, problem.maxdim + 1):
        parts.extend(_oracle_dim(problem, simplices, events, d, p))
    return _assemble(parts, problem.n, problem.maxdim, thr, p)


def _oracle_dim(problem, simplices, events, d, p):
    """Bars of the image module in one degree, annotated with simplices."""
    n = problem.n
    idx_d = [i for i, s in enumerate(simplices) if s[0] == d]
    idx_d1 = [i for i, s in enumerate(simplices) if s[0] == d + 1]
    idx_dm1 = [i for i, s in enumerate(simplices) if s[0] == d - 1]
    pos_d = {i: k for k, i in enumerate(idx_d)}
    pos_dm1 = {i: k for k, i in enumerate(idx_dm1)}
    pos_d1 = {i: k for k, i in enumerate(idx_d1)}
    ci_to_idx = {(s[0], s[1]): i for i, s in enumerate(simplices)}

    def bmat(cols_idx, to_pos, facet_dim):
        mat = np.zeros((len(to_pos), len(cols_idx)), dtype=np.int64)
        for c, i in enumerate(cols_idx):
            verts = simplices[i][2]
            for drop in range(len(verts)):
                facet = verts[:drop] + verts[drop + 1 :]
                fci = cns_encode(facet, n).cindex
                r = to_pos[ci_to_idx[(facet_dim, fci)]]
                mat[r, c] = 1 if drop % 2 == 0 else p - 1
        return mat

    bd_d = (
        bmat(idx_d, pos_dm1, d - 1)
        if d >= 1
        else np.zeros((0, len(idx_d)), np.int64)
    )
    bd_d1 = bmat(idx_d1, pos_d, d)

    sub_events = []  # d-simplices entering the sub-filtration, event order
    super_events = []  # (d+1)-simplices entering the super-filtration
    for epos, (_val, dim, _sec, _negci, side, i) in enumerate(events):
        if side == 1 and dim == d:
            sub_events.append((epos, i))
        elif side == 0 and dim == d + 1:
            super_events.append((epos, i))

    sub_cols = [pos_d[i] for _, i in sub_events]
    super_cols = [pos_d1[i] for _, i in super_events]
    na, nz = len(sub_events), len(super_events)

    memo: dict[tuple[int, int], int] = {}

    def rank(a: int, z: int) -> int:
        """Rank with a sub-insertions and z super-(d+1)-insertions done."""
        key = (a, z)
        if key in memo:
            return memo[key]
        cols = sub_cols[:a]
        sub_bd = bd_d[:, cols]
        null = nullspace_mod(sub_bd, p)  # cycle basis over the a sub columns
        cycles = np.zeros((len(idx_d), null.shape[1]), dtype=np.int64)
        for r, c in enumerate(cols):
            cycles[c, :] = null[r, :]
        bnd = bd_d1[:, super_cols[:z]]
        val = null.shape[1] - dim_intersection(cycles, bnd, p)
        memo[key] = val
        return val

    bars = []
    for ai in range(1, na + 1):
        b_epos, b_idx = sub_events[ai - 1]
        # super insertions strictly before the birth event
        zb = 0
        while zb < nz and super_events[zb][0] < b_epos:
            zb += 1

        def alive(z: int) -> int:
            return rank(ai, z) - rank(ai - 1, z)

        if alive(zb) == 0:
            continue  # ephemeral: dead on arrival, spans no interval
        if alive(nz) == 1:
            bars.append((d, simplices[b_idx][1], -1, simplices[b_idx][3], np.inf))
            continue
        # the alive indicator is 1 at zb, 0 at nz, and nonincreasing:
        # binary-search the killing insertion
        lo, hi = zb, nz  # alive(lo) == 1, alive(hi) == 0
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if alive(mid):
                lo = mid
            else:
                hi = mid
        d_idx = super_events[hi - 1][1]
        bars.append(
            (
                d,
                simplices[b_idx][1],
                simplices[d_idx][1],
                simplices[b_idx][3],
                simplices[d_idx][4],
            )
        )

    if not bars:
        return []
    dims = np.array([b[0] for b in bars], np.int64)
    bci = np.array([b[1] for b in bars], np.int64)
    dci = np.array([b[2] for b in bars], np.int64)
    bval = np.array([b[3] for b in bars], np.float64)
    dval = np.array([b[4] for b in bars], np.float64)
    return [(dims, bci, dci, bval, dval)]


def image_rank_identity_holds(
    problem: ImageProblem, samples: int = 12, seed: int = 0
) -> bool:
    """Homology-route vs cohomology-route rank of the composite map.

    For sampled scale pairs s <= t and every degree, compare the rank of
    (cycles of the sub-complex at s, modulo boundaries of the super-complex
    at t) with the rank of the map induced on cohomology by cochain
    restriction from the super-complex at t to the sub-complex at s.  Both
    are dense computations over the field.
    """
    thr = problem.resolved_threshold()
    simplices = _oracle_complex(problem, thr)
    _guard_scale(problem, simplices)
    n = problem.n
    p = problem.field_char
    rng = np.random.default_rng(seed)

    scales = sorted({s[4] for s in simplices})
    pairs = [(a, b) for a in scales for b in scales if a <= b]
    if len(pairs) > samples:
        sel = rng.choice(len(pairs), size=samples, replace=False)
        pairs = [pairs[int(i)] for i in sorted(sel)]

    ci_to_idx = {(s[0], s[1]): i for i, s in enumerate(simplices)}

    def complex_at(which: int, t: float):
        # which: 3 = sub diameters, 4 = super diameters
        return [i for i, s in enumerate(simplices) if s[which] <= t]

    def bmat_for(subset, d):
        cols = [i for i in subset if simplices[i][0] == d]
        if d == 0:
            return np.zeros((0, len(cols)), dtype=np.int64), cols
        rows = [i for i in subset if simplices[i][0] == d - 1]
        rpos = {i: r for r, i in enumerate(rows)}
        mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for c, i in enumerate(cols):
            verts = simplices[i][2]
            for drop in range(len(verts)):
                facet = verts[:drop] + verts[drop + 1 :]
                fci = cns_encode(facet, n).cindex
                mat[rpos[ci_to_idx[(len(facet) - 1, fci)]], c] = (
                    1 if drop % 2 == 0 else p - 1
                )
        return mat, cols

    for d in range(0, problem.maxdim + 1):
        for s, t in pairs:
            xi = complex_at(3, s)
            zj = complex_at(4, t)
            zd = [i for i in zj if simplices[i][0] == d]
            zpos = {i: r for r, i in enumerate(zd)}

            # homology route
            bx, xcols = bmat_for(xi, d)
            null = nullspace_mod(bx, p)
            cycles = np.zeros((len(zd), null.shape[1]), np.int64)
            for r, i in enumerate(xcols):
                cycles[zpos[i], :] = null[r, :]
            bz1, _ = bmat_for(zj, d + 1)
            r_hom = null.shape[1] - dim_intersection(cycles, bz1, p)

            # cohomology route: restriction of cocycles, modulo coboundaries
            delta_z = (bz1.T % p) if bz1.size else np.zeros((0, len(zd)), np.int64)
            kz = nullspace_mod(delta_z, p) if len(zd) else np.zeros((0, 0), np.int64)
            xd = [i for i in xi if simplices[i][0] == d]
            restrict = np.zeros((len(xd), len(zd)), np.int64)
            for r, i in enumerate(xd):
                restrict[r, zpos[i]] = 1
            im = (restrict @ kz) % p
            bxd, _ = bmat_for(xi, d)
            img_cob = bxd.T % p  # columns of delta_{d-1} on the sub-complex
            if im.size or img_cob.size:
                stacked = np.hstack(
                    [im, img_cob]
                ) if im.size and img_cob.size else (im if im.size else img_cob)
                r_coh = rank_mod(stacked, p) - rank_mod(img_cob, p)
            else:
                r_coh = 0
            if r_hom != r_coh:
                return False
    return True
