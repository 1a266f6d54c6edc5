import math

import numpy as np
import pytest

from cyclematch import (
    PointCloud,
    build_union_problem,
    compute_barcode,
    pairwise_distances,
    representative_cycles,
)
from cyclematch.image import ImageProblem, compute_image_barcode


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    """Compile the jitted kernels once so timed assertions measure the
    algorithms rather than the compiler."""
    rng = np.random.default_rng(0)
    pts = PointCloud(rng.random((6, 2)))
    dm = pairwise_distances(pts)
    compute_barcode(dm, maxdim=2, threshold=math.inf, field_char=3)
    bar = compute_barcode(dm, maxdim=1, threshold=math.inf)
    representative_cycles(dm, bar)
    u = build_union_problem(pts, PointCloud(rng.random((5, 2))))
    compute_image_barcode(ImageProblem(u.d_xp, u.d_z, maxdim=1))


def triangle_points() -> np.ndarray:
    s = math.sqrt(3) / 2
    return np.array([[0.0, 0.0], [1.0, 0.0], [s, s]])


def square_points(side: float = 1.0) -> np.ndarray:
    return np.array([[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]])


def circle_points(rng, n: int, radius: float = 1.0, center=(0.0, 0.0), noise: float = 0.0):
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    pts = np.c_[
        center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)
    ]
    if noise > 0:
        pts = pts + rng.normal(0.0, noise, pts.shape)
    return pts
