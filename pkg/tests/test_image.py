import math

import numpy as np
import pytest

from conftest import square_points
from cyclematch import (
    DistanceMatrix,
    PointCloud,
    build_union_problem,
    compute_barcode,
    pairwise_distances,
)
from cyclematch.errors import NotNestedError, OracleScaleError
from cyclematch.image import (
    ImageProblem,
    compute_image_barcode,
    image_rank_identity_holds,
    oracle_image_barcode,
)


def random_nested(rng, n):
    """Union problems, exact duplicates, or inflated metrics."""
    r = rng.random()
    if r < 0.3:
        nx = max(1, n // 2)
        pts = rng.standard_normal((nx, 2))
        u = build_union_problem(PointCloud(pts), PointCloud(pts.copy()))
        return u.d_xp, u.d_z
    if r < 0.65:
        nx = max(1, int(rng.integers(1, n)))
        ny = max(1, n - nx)
        u = build_union_problem(
            PointCloud(rng.standard_normal((nx, 2))),
            PointCloud(rng.standard_normal((ny, 2))),
        )
        return u.d_xp, u.d_z
    pts = rng.standard_normal((n, 2))
    dz = pairwise_distances(PointCloud(pts))
    bump = np.abs(rng.standard_normal((n, n))) * rng.random()
    bump = np.triu(bump, 1)
    bump = bump + bump.T
    return DistanceMatrix(dz.d + bump), dz


def test_identity_inclusion_reproduces_ordinary_barcode():
    rng = np.random.default_rng(4)
    for _ in range(5):
        n = int(rng.integers(2, 9))
        dm = pairwise_distances(PointCloud(rng.standard_normal((n, 2))))
        img = compute_image_barcode(ImageProblem(dm, dm, maxdim=1))
        bar = compute_barcode(dm, maxdim=1)
        assert img.simplex_multiset() == bar.simplex_multiset()


def test_single_point_identity():
    dm = pairwise_distances(PointCloud(np.zeros((1, 2))))
    img = compute_image_barcode(ImageProblem(dm, dm, maxdim=1))
    assert len(img.finite()) == 0
    ess = img.essential(0)
    assert len(ess) == 1 and ess[0].birth_value == 0.0


def test_square_in_itself():
    dm = pairwise_distances(PointCloud(square_points()))
    img = compute_image_barcode(ImageProblem(dm, dm, maxdim=1, threshold=math.inf))
    bar = compute_barcode(dm, maxdim=1, threshold=math.inf)
    assert img.simplex_multiset() == bar.simplex_multiset()


def test_not_nested_rejected():
    d1 = pairwise_distances(PointCloud(np.array([[0.0, 0.0], [1.0, 0.0]])))
    d2 = DistanceMatrix(np.array([[0.0, 2.0], [2.0, 0.0]]))
    with pytest.raises(NotNestedError):
        ImageProblem(d1, d2)


@pytest.mark.parametrize("use_apparent", [True, False])
def test_engine_equals_rank_oracle(use_apparent):
    rng = np.random.default_rng(100 + use_apparent)
    for trial in range(10):
        n = int(rng.integers(3, 9))
        dsub, dz = random_nested(rng, n)
        thr = None if trial % 3 else math.inf
        p = 3 if trial % 4 == 0 else 2
        prob = ImageProblem(dsub, dz, maxdim=1, threshold=thr, field_char=p)
        got = compute_image_barcode(prob, use_apparent=use_apparent)
        want = oracle_image_barcode(prob)
        assert got.simplex_multiset() == want.simplex_multiset()


def test_engine_equals_rank_oracle_maxdim2():
    rng = np.random.default_rng(321)
    for _ in range(4):
        n = int(rng.integers(4, 8))
        dsub, dz = random_nested(rng, n)
        prob = ImageProblem(dsub, dz, maxdim=2, threshold=math.inf)
        got = compute_image_barcode(prob)
        want = oracle_image_barcode(prob)
        assert got.simplex_multiset() == want.simplex_multiset()


def test_birth_and_death_containment_in_own_barcodes():
    rng = np.random.default_rng(7)
    for _ in range(6):
        nx = int(rng.integers(2, 5))
        ny = int(rng.integers(2, 5))
        u = build_union_problem(
            PointCloud(rng.standard_normal((nx, 2))),
            PointCloud(rng.standard_normal((ny, 2))),
        )
        prob = ImageProblem(u.d_xp, u.d_z, maxdim=1)
        img = compute_image_barcode(prob)
        sub_bar = compute_barcode(u.d_xp, maxdim=1, threshold=prob.resolved_threshold())
        sup_bar = compute_barcode(u.d_z, maxdim=1, threshold=prob.resolved_threshold())
        sub_births = {
            (p.dim, p.birth_simplex.cindex) for p in sub_bar.pairs
        }
        sup_deaths = {
            (p.dim, p.death_simplex.cindex)
            for p in sup_bar.pairs
            if p.death_simplex is not None
        }
        for p in img.finite():
            assert (p.dim, p.birth_simplex.cindex) in sub_births
            assert (p.dim, p.death_simplex.cindex) in sup_deaths
        for p in img.essential():
            assert (p.dim, p.birth_simplex.cindex) in sub_births
        # interleaving: the image interval is contained in the sub-interval
        # sharing its birth simplex
        sub_by_birth = {
            (p.dim, p.birth_simplex.cindex): p for p in sub_bar.pairs
        }
        for p in img.finite():
            own = sub_by_birth[(p.dim, p.birth_simplex.cindex)]
            assert p.birth_value == own.birth_value
            assert p.death_value <= own.death_value + 1e-12


def test_sub_filtration_births_live_on_sub_indices():
    rng = np.random.default_rng(9)
    x = PointCloud(rng.standard_normal((4, 2)))
    y = PointCloud(rng.standard_normal((4, 2)))
    u = build_union_problem(x, y)
    img = compute_image_barcode(ImageProblem(u.d_xp, u.d_z, maxdim=1))
    from cyclematch import cns_decode

    for p in img.finite(1) + img.essential(1):
        verts = cns_decode(p.birth_simplex, 8)
        assert all(v < 4 for v in verts)


def test_offset_squares_image_bar():
    # the sub-filtration loop is born at the square's side length and its
    # image dies at the union's filling scale, computed by the dense oracle
    x = PointCloud(square_points())
    y = PointCloud(square_points() + np.array([0.2, 0.0]))
    u = build_union_problem(x, y)
    prob = ImageProblem(u.d_xp, u.d_z, maxdim=1, threshold=math.inf)
    got = compute_image_barcode(prob)
    want = oracle_image_barcode(prob)
    assert got.simplex_multiset() == want.simplex_multiset()
    dim1 = [p for p in got.finite(1) if p.death_value > p.birth_value]
    assert len(dim1) == 1
    assert dim1[0].birth_value == 1.0
    # the union fills the sub-loop strictly before the sub-filtration does
    sub_bar = compute_barcode(u.d_xp, maxdim=1, threshold=math.inf)
    own = [q for q in sub_bar.real_view().in_dim(1) if not q.essential]
    assert len(own) == 1
    assert dim1[0].death_value < own[0].death_value


def test_homology_cohomology_rank_identity():
    rng = np.random.default_rng(13)
    for trial in range(5):
        n = int(rng.integers(3, 7))
        dsub, dz = random_nested(rng, n)
        prob = ImageProblem(dsub, dz, maxdim=1)
        assert image_rank_identity_holds(prob, samples=8, seed=trial)


def test_oracle_refuses_large_instances():
    rng = np.random.default_rng(15)
    dm = pairwise_distances(PointCloud(rng.standard_normal((20, 2))))
    with pytest.raises(OracleScaleError):
        oracle_image_barcode(ImageProblem(dm, dm, maxdim=1))
