import numpy as np
import pytest

from conftest import circle_points
from cyclematch import PointCloud, match_point_clouds, track_frames
from cyclematch.errors import CycleMatchError


def test_three_identical_frames_form_full_chains():
    rng = np.random.default_rng(1)
    pts = circle_points(rng, 30, noise=0.03)
    frames = [PointCloud(pts.copy()) for _ in range(3)]
    res = track_frames(frames, maxdim=1)
    finite = match_point_clouds(frames[0], frames[1], maxdim=1).bar_x.real_view().finite(1)
    chains = [c for c in res.chains if c.dim == 1]
    assert len(chains) == len(finite)
    for c in chains:
        assert c.length == 3
        assert c.first_frame == 0
    assert res.diagnostics == []


def test_two_frames_reduce_to_plain_matching():
    rng = np.random.default_rng(2)
    a = PointCloud(circle_points(rng, 30, noise=0.05))
    b = PointCloud(circle_points(rng, 30, noise=0.05))
    res = track_frames([a, b], maxdim=1)
    direct = match_point_clouds(a, b, maxdim=1).matches
    assert len(res.matches) == 1
    got = {
        (m.alpha.birth_simplex, m.beta.birth_simplex) for m in res.matches[0]
    }
    want = {(m.alpha.birth_simplex, m.beta.birth_simplex) for m in direct}
    assert got == want
    for c in res.chains:
        assert c.length == 2


def test_disappearing_cycle_terminates_its_chain():
    rng = np.random.default_rng(3)
    loop = circle_points(rng, 40, noise=0.02)
    blob = rng.normal(0.0, 0.15, (40, 2)) + np.array([30.0, 30.0])  # far, no loop
    frames = [PointCloud(loop), PointCloud(loop.copy()), PointCloud(blob)]
    res = track_frames(frames, maxdim=1)
    main = [c for c in res.chains if c.dim == 1 and c.length >= 2]
    assert main, "the loop should persist over the first two frames"
    for c in main:
        # no chain survives into the loopless frame
        assert c.first_frame + c.length - 1 <= 1


def test_chain_ids_are_stable_and_sorted():
    rng = np.random.default_rng(4)
    frames = [PointCloud(circle_points(rng, 25, noise=0.05)) for _ in range(3)]
    res1 = track_frames(frames, maxdim=1)
    res2 = track_frames(frames, maxdim=1)
    assert [c.id for c in res1.chains] == [c.id for c in res2.chains]
    assert [c.id for c in res1.chains] == [f"t{k:04d}" for k in range(len(res1.chains))]


def test_single_frame_rejected():
    with pytest.raises(CycleMatchError):
        track_frames([PointCloud(np.zeros((3, 2)))])
