"""Point clouds, metrics, and the simplex-wise refinement of Vietoris-Rips filtrations.

The filtration order used everywhere is the strict total order

    (diameter ascending, dimension ascending, cindex descending)

truncated at a real threshold.  It refines the Vietoris-Rips filtration
(diameter is the primary key, so the natural re-indexing by diameters is
monotone), puts every face before its cofaces, and restricts consistently
to sub-clouds occupying the leading positions of a union, which is what
the matching stage needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .combinat import SimplexKey, cns_decode, cns_encode
from .errors import DimensionMismatchError, EmptyInputError, InvalidSimplexError, ReindexError


@dataclass(frozen=True)
class PointCloud:
    """Ordered list of points; the order is part of the identity."""

    points: np.ndarray  # (n, ambient_dim) float64
    id: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise EmptyInputError("point cloud must be a nonempty (n, d) array")
        if pts.shape[1] < 1:
            raise DimensionMismatchError("ambient dimension must be >= 1")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]


def as_point_cloud(obj, id: str = "") -> PointCloud:
    if isinstance(obj, PointCloud):
        return obj
    return PointCloud(np.asarray(obj, dtype=np.float64), id=id)


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric finite matrix with zero diagonal; sentinel entries flag
    'effectively infinite' distances used by the union construction."""

    d: np.ndarray
    sentinel_mask: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.d, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError("distance matrix must be square")
        if not np.allclose(m, m.T):
            raise DimensionMismatchError("distance matrix must be symmetric")
        if np.any(np.diag(m) != 0.0):
            raise DimensionMismatchError("distance matrix diagonal must be zero")
        if np.any(m < 0.0):
            raise DimensionMismatchError("distances must be nonnegative")
        object.__setattr__(self, "d", m)
        if self.sentinel_mask is not None:
            mask = np.asarray(self.sentinel_mask, dtype=bool)
            if mask.shape != m.shape:
                raise DimensionMismatchError("sentinel mask shape mismatch")
            if mask.any():
                lo = m[mask].min()
                unmasked = m[~mask]
                if unmasked.size and unmasked.max() >= lo:
                    raise DimensionMismatchError(
                        "sentinel entries must exceed every genuine entry"
                    )
            object.__setattr__(self, "sentinel_mask", mask)

    @property
    def n(self) -> int:
        return self.d.shape[0]


def pairwise_distances(cloud: PointCloud) -> DistanceMatrix:
    """Euclidean metric of the ambient space; no sentinel entries."""
    pts = as_point_cloud(cloud).points
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(d, 0.0)
    # enforce exact symmetry: the loop order of the summation is identical
    # for (i,j) and (j,i), but keep it explicit
    d = np.minimum(d, d.T)
    return DistanceMatrix(d)


def enclosing_radius(dmat: DistanceMatrix) -> float:
    """min over points of the max distance to the others; homology above this
    scale is dominated by a cone point.  Sentinel entries are ignored."""
    d = dmat.d.copy()
    if dmat.sentinel_mask is not None and dmat.sentinel_mask.any():
        d = np.where(dmat.sentinel_mask, -np.inf, d)
    if d.shape[0] == 1:
        return 0.0
    return float(np.min(np.max(d, axis=1)))


def default_threshold(dmat: DistanceMatrix, threshold: float | None = None) -> float:
    if threshold is None:
        return enclosing_radius(dmat)
    if threshold < 0:
        raise InvalidSimplexError("threshold must be >= 0")
    return float(threshold)


def simplex_diameter(key: SimplexKey, dmat: DistanceMatrix) -> float:
    """Max pairwise distance over the vertex set; 0 for vertices."""
    verts = cns_decode(key, dmat.n)
    if key.dim == 0:
        return 0.0
    d = dmat.d
    return float(max(d[u, v] for u, v in itertools.combinations(verts, 2)))


def filtration_key(diam: float, dim: int, cindex: int) -> tuple:
    """Sort key realizing (diameter asc, dim asc, cindex desc)."""
    return (diam, dim, -cindex)


@dataclass(frozen=True)
class FiltrationOrder:
    """The comparator (diameter asc, dim asc, cindex desc) with an inclusion
    threshold.  Total, strict and deterministic on simplices with
    diameter <= threshold."""

    threshold: float

    def key(self, dmat: DistanceMatrix, skey: SimplexKey) -> tuple:
        return filtration_key(simplex_diameter(skey, dmat), skey.dim, skey.cindex)

    def admits(self, dmat: DistanceMatrix, skey: SimplexKey) -> bool:
        return simplex_diameter(skey, dmat) <= self.threshold


def simplexwise_stream(
    dmat: DistanceMatrix, maxdim: int, threshold: float | None = None
) -> list[SimplexKey]:
    """All simplices of dimension <= maxdim+1 with diameter <= threshold, in
    filtration order.  Every prefix is a simplicial complex.

    Materializes the stream; meant for moderate sizes (the reduction engine
    never materializes it).
    """
    thr = default_threshold(dmat, threshold)
    n = dmat.n
    entries = []  # (diam, dim, -cindex, cindex)
    for dim in range(0, min(maxdim + 1, n - 1) + 1):
        for verts in itertools.combinations(range(n), dim + 1):
            key = cns_encode(verts, n)
            diam = simplex_diameter(key, dmat)
            if diam <= thr:
                entries.append((diam, dim, -key.cindex, key.cindex))
    entries.sort()
    return [SimplexKey(dim, cindex) for _, dim, _, cindex in entries]


def stream_diameters(dmat: DistanceMatrix, stream: Sequence[SimplexKey]) -> np.ndarray:
    return np.array([simplex_diameter(k, dmat) for k in stream], dtype=np.float64)


@dataclass(frozen=True)
class ReindexMap:
    """Natural filtration index -> real value.

    Index 1 covers all vertices at once (they enter at diameter 0);
    each later simplex of the stream advances the index by one.  By
    convention t_0 = -inf and the value one past the final index is +inf.
    """

    values: np.ndarray  # values[i] = t_{i+1}, i.e. values[0] = t_1 = 0.0

    @classmethod
    def from_stream(cls, dmat: DistanceMatrix, stream: Sequence[SimplexKey]) -> "ReindexMap":
        diams = [0.0]
        for skey in stream:
            if skey.dim > 0:
                diams.append(simplex_diameter(skey, dmat))
        vals = np.array(diams, dtype=np.float64)
        if np.any(np.diff(vals) < 0):
            raise ReindexError("stream diameters are not monotone")
        return cls(vals)

    @property
    def last_index(self) -> int:
        return len(self.values)

    def value(self, index: int) -> float:
        if index == 0:
            return -np.inf
        if index == self.last_index + 1:
            return np.inf
        if not (1 <= index <= self.last_index):
            raise ReindexError(f"index {index} outside 0..{self.last_index + 1}")
        return float(self.values[index - 1])


def natural_indices(stream: Sequence[SimplexKey]) -> dict[SimplexKey, int]:
    """Map each simplex of the stream to its natural index (vertices -> 1)."""
    out: dict[SimplexKey, int] = {}
    step = 1
    for skey in stream:
        if skey.dim == 0:
            out[skey] = 1
        else:
            step += 1
            out[skey] = step
    return out


@dataclass(frozen=True)
class UnionProblem:
    """Two clouds embedded in their union, with sentinel-extended metrics that
    make each cloud's Vietoris-Rips filtration appear as a filtration of the
    full index set (the Ripser-image input shape)."""

    union_points: PointCloud
    d_z: DistanceMatrix
    d_xp: DistanceMatrix
    d_yp: DistanceMatrix
    n_x: int
    n_y: int
    sentinel: float

    @property
    def n(self) -> int:
        return self.n_x + self.n_y


def build_union_problem(x: PointCloud, y: PointCloud) -> UnionProblem:
    """Concatenate X then Y, take the Euclidean metric on the union, and build
    the two sentinel-extended metrics.  The sentinel is 2x the enclosing
    diameter of the union, so it strictly exceeds every genuine distance and
    the default threshold excludes sentinel simplices entirely."""
    x = as_point_cloud(x)
    y = as_point_cloud(y)
    if len(x) == 0 or len(y) == 0:
        raise EmptyInputError("union problem needs two nonempty clouds")
    if x.ambient_dim != y.ambient_dim:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {x.ambient_dim} vs {y.ambient_dim}"
        )
    pts = np.vstack([x.points, y.points])
    union = PointCloud(pts, id=f"{x.id}|{y.id}")
    d_z = pairwise_distances(union)
    n_x, n_y = len(x), len(y)
    n = n_x + n_y
    diam = float(d_z.d.max())
    sentinel = 2.0 * diam if diam > 0 else 1.0

    mask_x = np.zeros((n, n), dtype=bool)
    mask_x[n_x:, :] = True
    mask_x[:, n_x:] = True
    np.fill_diagonal(mask_x, False)
    d_xp = np.where(mask_x, sentinel, d_z.d)
    np.fill_diagonal(d_xp, 0.0)

    mask_y = np.zeros((n, n), dtype=bool)
    mask_y[:n_x, :] = True
    mask_y[:, :n_x] = True
    np.fill_diagonal(mask_y, False)
    d_yp = np.where(mask_y, sentinel, d_z.d)
    np.fill_diagonal(d_yp, 0.0)

    return UnionProblem(
        union_points=union,
        d_z=d_z,
        d_xp=DistanceMatrix(d_xp, sentinel_mask=mask_x),
        d_yp=DistanceMatrix(d_yp, sentinel_mask=mask_y),
        n_x=n_x,
        n_y=n_y,
        sentinel=sentinel,
    )


def translate_simplex(key: SimplexKey, offset: int, n_from: int, n_to: int) -> SimplexKey:
    """Re-encode a simplex after shifting every vertex by ``offset``.

    With offset 0 the cindex is unchanged (colex ranks do not depend on the
    ambient count); shifting is needed for the Y side of a union.
    """
    if offset == 0:
        return key
    verts = tuple(v + offset for v in cns_decode(key, n_from))
    return cns_encode(verts, n_to)
