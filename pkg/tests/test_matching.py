import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import circle_points, square_points
from cyclematch import (
    PointCloud,
    build_union_problem,
    compute_barcode,
    jaccard,
    match_intervals,
    match_point_clouds,
    pairwise_distances,
    prevalence,
    resample,
    subsample_noise,
)
from cyclematch.errors import CompatibilityError, EmptyInputError
from cyclematch.image import ImageProblem, oracle_image_barcode
from cyclematch.matching import _interval


def test_jaccard_identity():
    assert jaccard((0.0, 2.0), (0.0, 2.0)) == 1.0


def test_jaccard_partial_overlap():
    assert jaccard((0.0, 2.0), (1.0, 3.0)) == pytest.approx(1.0 / 3.0)


def test_jaccard_disjoint():
    assert jaccard((0.0, 1.0), (2.0, 3.0)) == 0.0


def test_jaccard_degenerate_pair_is_zero():
    assert jaccard((1.0, 1.0), (1.0, 1.0)) == 0.0


@given(
    st.tuples(
        st.floats(0, 10), st.floats(0, 10), st.floats(0, 10), st.floats(0, 10)
    )
)
@settings(max_examples=200, deadline=None)
def test_jaccard_properties(vals):
    a, b, c, d = vals
    i = (min(a, b), max(a, b))
    j = (min(c, d), max(c, d))
    v = jaccard(i, j)
    assert 0.0 <= v <= 1.0
    assert v == jaccard(j, i)
    if v == 1.0:
        # equal nondegenerate intervals, up to float rounding of the lengths
        assert i[1] > i[0]
        scale = max(abs(x) for x in (*i, *j))
        assert abs(i[0] - j[0]) <= 1e-9 * scale
        assert abs(i[1] - j[1]) <= 1e-9 * scale
    if i == j and i[1] > i[0]:
        assert v == 1.0


def test_identity_matching_every_finite_bar():
    rng = np.random.default_rng(2)
    pts = circle_points(rng, 30, noise=0.05)
    cloud = PointCloud(pts)
    res = match_point_clouds(cloud, cloud, maxdim=1)
    finite = res.bar_x.real_view().finite(1)
    assert len(res.matches) == len(finite)
    for m in res.matches:
        assert m.affinities == {"A": 1.0, "B": 1.0, "C": 1.0, "D": 1.0}


def test_affinity_algebraic_identities():
    rng = np.random.default_rng(6)
    x = PointCloud(circle_points(rng, 50, noise=0.08))
    y = PointCloud(circle_points(rng, 50, center=(0.4, 0.0), noise=0.08))
    res = match_point_clouds(x, y, maxdim=1)
    assert res.matches, "expected at least one match"
    thr = res.img_x.threshold
    for m in res.matches:
        a = m.affinities
        ja = jaccard(_interval(m.alpha, thr), _interval(m.alpha_img, thr))
        jb = jaccard(_interval(m.beta, thr), _interval(m.beta_img, thr))
        assert a["C"] == pytest.approx(a["D"] * ja * jb, abs=1e-12)
        assert a["C"] <= a["A"] + 1e-12
        assert a["C"] <= a["B"] + 1e-12
        for v in a.values():
            assert 0.0 <= v <= 1.0
        assert m.alpha.dim == m.beta.dim == m.alpha_img.dim == m.beta_img.dim


def test_matching_is_a_partial_injection_both_ways():
    rng = np.random.default_rng(14)
    x = PointCloud(rng.random((40, 2)))
    y = PointCloud(rng.random((40, 2)))
    res = match_point_clouds(x, y, maxdim=1)
    alphas = [(m.alpha.birth_simplex, m.alpha.death_simplex) for m in res.matches]
    betas = [(m.beta.birth_simplex, m.beta.death_simplex) for m in res.matches]
    assert len(set(alphas)) == len(alphas)
    assert len(set(betas)) == len(betas)


def test_matching_symmetry_transpose():
    rng = np.random.default_rng(15)
    x = PointCloud(rng.random((25, 2)))
    y = PointCloud(rng.random((25, 2)))
    res = match_point_clouds(x, y, maxdim=1)
    swapped = match_intervals(
        res.bar_y, res.bar_x, res.img_y, res.img_x, offset_x=len(x), offset_y=0
    )
    fwd = {
        (m.alpha.birth_simplex, m.beta.birth_simplex): m.affinities["A"]
        for m in res.matches
    }
    bwd = {
        (m.beta.birth_simplex, m.alpha.birth_simplex): m.affinities["A"]
        for m in swapped
    }
    assert fwd == bwd


def test_incompatible_inputs_rejected():
    rng = np.random.default_rng(16)
    x = PointCloud(rng.random((6, 2)))
    y = PointCloud(rng.random((5, 2)))
    res = match_point_clouds(x, y, maxdim=1)
    bad = compute_barcode(pairwise_distances(PointCloud(rng.random((4, 2)))), 1)
    with pytest.raises(CompatibilityError):
        match_intervals(bad, res.bar_y, res.img_x, res.img_y)


def test_offset_squares_single_match_found_exhaustively():
    # independent check: enumerate Def-style joins over the oracle image
    # barcodes and both brute-force barcodes
    x = PointCloud(square_points())
    y = PointCloud(square_points() + np.array([0.2, 0.0]))
    u = build_union_problem(x, y)
    res = match_point_clouds(x, y, maxdim=1)
    dim1 = [m for m in res.matches if m.dim == 1]
    assert len(dim1) == 1

    from cyclematch import brute_force_barcode, cns_decode, cns_encode

    img_x = oracle_image_barcode(ImageProblem(u.d_xp, u.d_z, maxdim=1))
    img_y = oracle_image_barcode(ImageProblem(u.d_yp, u.d_z, maxdim=1))
    bar_x = brute_force_barcode(pairwise_distances(x), maxdim=1).real_view()
    bar_y = brute_force_barcode(pairwise_distances(y), maxdim=1).real_view()
    found = []
    for a in bar_x.finite(1):
        for b in bar_y.finite(1):
            for at in img_x.finite(1):
                for bt in img_y.finite(1):
                    if at.birth_simplex.cindex != a.birth_simplex.cindex:
                        continue
                    bverts = tuple(v + 4 for v in cns_decode(b.birth_simplex, 4))
                    if bt.birth_simplex != cns_encode(bverts, 8):
                        continue
                    if at.death_simplex == bt.death_simplex:
                        found.append((a, b))
    assert len(found) == 1
    assert found[0][0].birth_simplex == dim1[0].alpha.birth_simplex
    assert found[0][1].birth_simplex == dim1[0].beta.birth_simplex


def test_distant_circles_give_no_dim1_match():
    rng = np.random.default_rng(20)
    x = PointCloud(circle_points(rng, 60))
    y = PointCloud(circle_points(rng, 60, center=(4.0, 0.0)))
    res = match_point_clouds(x, y, maxdim=1)
    assert [m for m in res.matches if m.dim == 1] == []


def test_same_circle_affinity_mostly_high():
    # two noisy samples of one circle: the main loops match with high
    # affinity in most seeded trials
    wins = 0
    trials = 10
    for seed in range(trials):
        rng = np.random.default_rng(1000 + seed)
        x = PointCloud(circle_points(rng, 100, noise=0.1))
        y = PointCloud(circle_points(rng, 100, noise=0.1))
        res = match_point_clouds(x, y, maxdim=1)
        best = max((m.affinities["A"] for m in res.matches), default=0.0)
        if best > 0.8:
            wins += 1
    assert wins >= 0.8 * trials


def test_resample_zero_noise_is_multiset_of_originals():
    rng = np.random.default_rng(3)
    cloud = PointCloud(rng.random((12, 2)))
    out = resample(cloud, 12, 0.0, seed=5)
    orig = {tuple(p) for p in cloud.points}
    assert all(tuple(p) in orig for p in out.points)


def test_resample_deterministic_under_seed():
    rng = np.random.default_rng(4)
    cloud = PointCloud(rng.random((10, 2)))
    a = resample(cloud, 20, 0.3, seed=9)
    b = resample(cloud, 20, 0.3, seed=9)
    assert np.array_equal(a.points, b.points)


def test_resample_noise_magnitude_monte_carlo():
    # mean absolute displacement per coordinate of N(0, sigma) is
    # sigma * sqrt(2/pi)
    sigma = 0.25
    cloud = PointCloud(np.zeros((1, 2)))
    out = resample(cloud, 10_000, sigma, seed=11)
    got = np.abs(out.points).mean()
    assert got == pytest.approx(sigma * math.sqrt(2.0 / math.pi), rel=0.05)


def test_subsample_requires_enough_points():
    cloud = PointCloud(np.zeros((3, 2)))
    with pytest.raises(EmptyInputError):
        subsample_noise(cloud, 5, 0.0, seed=1)


def test_prevalence_exact_resample_scores_one():
    rng = np.random.default_rng(8)
    ref = PointCloud(circle_points(rng, 40, noise=0.02))
    report = prevalence(ref, k=1, n=40, sigma=0.0, kind="A", seed=123, mode="subsample")
    assert report.entries, "reference should have at least one loop"
    for e in report.entries:
        assert e.score == 1.0
        assert e.per_resampling == [1.0]


def test_prevalence_requires_seed():
    ref = PointCloud(np.zeros((4, 2)))
    with pytest.raises(EmptyInputError):
        prevalence(ref, k=1, n=4, sigma=0.0, kind="A", seed=None)


def test_prevalence_deterministic_across_jobs():
    rng = np.random.default_rng(9)
    ref = PointCloud(circle_points(rng, 30, noise=0.05))
    a = prevalence(ref, k=4, n=30, sigma=0.05, kind="D", seed=7, jobs=1)
    b = prevalence(ref, k=4, n=30, sigma=0.05, kind="D", seed=7, jobs=2)
    assert [e.per_resampling for e in a.entries] == [e.per_resampling for e in b.entries]
