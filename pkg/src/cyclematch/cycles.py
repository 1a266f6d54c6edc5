"""Representative cycles for finite intervals, one per nonzero-length pair.

The persistence pairs come from the cohomological route; the chains come
from a second pass that reduces the boundary matrix using only the columns
of the death simplices, in filtration order.  The reduced column at a death
simplex is a cycle born exactly at the paired birth simplex.  Determinism
follows from the fixed filtration order and the fixed column order; no
tightness beyond what this reduction yields is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _reduction as kern
from .combinat import SimplexKey, binomial_table, cns_decode
from .errors import CompatibilityError, InternalInvariantError
from .filtration import DistanceMatrix, simplex_diameter
from .modp import in_span, nullspace_mod
from .persistence import Barcode, PersistencePair


@dataclass(frozen=True)
class RepresentativeCycle:
    pair: PersistencePair
    chain: tuple[SimplexKey, ...]
    coefficients: tuple[int, ...]
    field_char: int


def representative_cycles(
    dmat: DistanceMatrix, barcode: Barcode, dims: list[int] | None = None
) -> list[RepresentativeCycle]:
    """One cycle per finite nonzero-length interval in degrees >= 1.

    The barcode must have been computed from ``dmat`` (same point count and
    threshold conventions); this is spot-checked against the recorded
    diameters.
    """
    if barcode.n != dmat.n:
        raise CompatibilityError(
            f"barcode has {barcode.n} points, metric has {dmat.n}"
        )
    p = barcode.field_char
    n = dmat.n
    binom = binomial_table(n, barcode.maxdim + 3)
    dist = np.ascontiguousarray(dmat.d, dtype=np.float64).ravel()
    out: list[RepresentativeCycle] = []
    if dims is None:
        dims = list(range(1, barcode.maxdim + 1))

    for d in dims:
        if d < 1:
            continue
        mask = (barcode.dims == d) & (barcode.death_ci >= 0)
        if not mask.any():
            continue
        dci = barcode.death_ci[mask]
        dval = barcode.death_val[mask]
        bci = barcode.birth_ci[mask]
        bval = barcode.birth_val[mask]
        # spot-check metric/barcode compatibility on the recorded diameters
        probe = int(np.argmax(dval))
        want = simplex_diameter(SimplexKey(d + 1, int(dci[probe])), dmat)
        if not np.isclose(want, dval[probe]):
            raise CompatibilityError(
                "barcode death diameters disagree with the metric"
            )
        requested = dval > bval
        if not requested.any():
            continue
        # all deaths in filtration order; columns after the last requested
        # one can never influence it
        order = np.lexsort((-dci, dval))
        dci_o, dval_o, bci_o, req_o = (
            dci[order],
            dval[order],
            bci[order],
            requested[order],
        )
        last = int(np.nonzero(req_o)[0].max())
        dci_o = dci_o[: last + 1]
        bci_o = bci_o[: last + 1]
        req_o = req_o[: last + 1]
        pivots = np.empty(last + 1, np.int64)
        flat_ci, flat_cf, offs = kern.boundary_death_reduction(
            np.ascontiguousarray(dci_o), d, n, dist, binom, p, pivots
        )
        bv_o = bval[order][: last + 1]
        dv_o = dval[order][: last + 1]
        for j in range(last + 1):
            if pivots[j] != bci_o[j]:
                raise InternalInvariantError(
                    "death-column reduction disagrees with the recorded pairing"
                )
            if not req_o[j]:
                continue
            lo, hi = int(offs[j]), int(offs[j + 1])
            chain = tuple(SimplexKey(d, int(ci)) for ci in flat_ci[lo:hi])
            coeffs = tuple(int(cf) for cf in flat_cf[lo:hi])
            pair = PersistencePair(
                dim=d,
                birth_simplex=SimplexKey(d, int(bci_o[j])),
                death_simplex=SimplexKey(d + 1, int(dci_o[j])),
                birth_value=float(bv_o[j]),
                death_value=float(dv_o[j]),
            )
            out.append(
                RepresentativeCycle(
                    pair=pair, chain=chain, coefficients=coeffs, field_char=p
                )
            )
    out.sort(key=lambda r: (r.pair.dim, r.pair.birth_value, r.pair.birth_simplex.cindex))
    return out


# ---------------------------------------------------------------------------
# dense verification helpers (oracle scale)
# ---------------------------------------------------------------------------


def chain_boundary_is_zero(rep: RepresentativeCycle, dmat: DistanceMatrix) -> bool:
    """Exact check that the chain is a cycle over the field."""
    p = rep.field_char
    n = dmat.n
    acc: dict[tuple, int] = {}
    for key, coef in zip(rep.chain, rep.coefficients):
        verts = cns_decode(key, n)
        for drop in range(len(verts)):
            facet = verts[:drop] + verts[drop + 1 :]
            sign = 1 if drop % 2 == 0 else p - 1
            acc[facet] = (acc.get(facet, 0) + coef * sign) % p
    return all(v == 0 for v in acc.values())


def chain_diameters_bounded(rep: RepresentativeCycle, dmat: DistanceMatrix) -> bool:
    return all(
        simplex_diameter(k, dmat) <= rep.pair.death_value + 1e-12 for k in rep.chain
    )


def cycle_class_checks(rep: RepresentativeCycle, dmat: DistanceMatrix) -> bool:
    """Dense rank check: the chain's class is nonzero at the birth scale and
    stays nonzero (hence in the image of every inclusion) until just below
    the death scale."""
    p = rep.field_char
    n = dmat.n
    d = rep.pair.dim
    import itertools

    dm = dmat.d
    d_simp = []
    for verts in itertools.combinations(range(n), d + 1):
        diam = max(dm[a, b] for a, b in itertools.combinations(verts, 2))
        d_simp.append((verts, diam))
    d1_simp = []
    for verts in itertools.combinations(range(n), d + 2):
        diam = max(dm[a, b] for a, b in itertools.combinations(verts, 2))
        d1_simp.append((verts, diam))
    pos = {verts: i for i, (verts, _) in enumerate(d_simp)}

    vec = np.zeros(len(d_simp), np.int64)
    for key, coef in zip(rep.chain, rep.coefficients):
        vec[pos[cns_decode(key, n)]] = coef % p

    def boundary_cols(scale: float, strict: bool):
        cols = []
        for verts, diam in d1_simp:
            if diam < scale or (not strict and diam <= scale):
                col = np.zeros(len(d_simp), np.int64)
                for drop in range(len(verts)):
                    facet = verts[:drop] + verts[drop + 1 :]
                    col[pos[facet]] = 1 if drop % 2 == 0 else p - 1
                cols.append(col)
        if not cols:
            return np.zeros((len(d_simp), 0), np.int64)
        return np.stack(cols, axis=1)

    # nonzero at the birth scale (inclusive)
    if in_span(vec, boundary_cols(rep.pair.birth_value, strict=False), p):
        return False
    # still nonzero strictly below the death scale
    if in_span(vec, boundary_cols(rep.pair.death_value, strict=True), p):
        return False
    # becomes a boundary once the death simplex is present
    if not in_span(vec, boundary_cols(rep.pair.death_value, strict=False), p):
        return False
    return True
