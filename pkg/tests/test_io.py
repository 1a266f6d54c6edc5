import json
import math

import numpy as np
import pytest

from conftest import circle_points, triangle_points
from cyclematch import (
    PointCloud,
    compute_barcode,
    match_point_clouds,
    pairwise_distances,
    prevalence,
    representative_cycles,
)
from cyclematch import io as cio
from cyclematch.errors import EmptyInputError, InputFormatError
from cyclematch.image import ImageProblem, compute_image_barcode


def test_point_cloud_round_trip(tmp_path):
    path = tmp_path / "pts.txt"
    path.write_text("# comment\n0.5, 1.5\n 2.0\t3.0 # trailing\n\n-1, 4\n")
    cloud = cio.load_point_cloud(str(path))
    assert np.array_equal(
        cloud.points, np.array([[0.5, 1.5], [2.0, 3.0], [-1.0, 4.0]])
    )


def test_point_cloud_bad_number_reports_location(tmp_path):
    path = tmp_path / "pts.txt"
    path.write_text("0, 0\n1, abc\n")
    with pytest.raises(InputFormatError) as err:
        cio.load_point_cloud(str(path))
    assert err.value.line == 2
    assert err.value.column == 2


def test_point_cloud_inconsistent_width(tmp_path):
    path = tmp_path / "pts.txt"
    path.write_text("0 0\n1 2 3\n")
    with pytest.raises(InputFormatError) as err:
        cio.load_point_cloud(str(path))
    assert err.value.line == 2


def test_point_cloud_empty(tmp_path):
    path = tmp_path / "pts.txt"
    path.write_text("# nothing\n")
    with pytest.raises(EmptyInputError):
        cio.load_point_cloud(str(path))


def test_lower_distance_matrix_with_and_without_leading_empty_row(tmp_path):
    body = "1.0\n2.0,3.0\n"
    with_empty = tmp_path / "a.lower_distance_matrix"
    with_empty.write_text("\n" + body)
    without = tmp_path / "b.lower_distance_matrix"
    without.write_text(body)
    da = cio.load_lower_distance_matrix(str(with_empty))
    db = cio.load_lower_distance_matrix(str(without))
    want = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]])
    assert np.array_equal(da.d, want)
    assert np.array_equal(db.d, want)


def test_lower_distance_matrix_matches_point_cloud_route():
    pts = triangle_points()
    dm = pairwise_distances(PointCloud(pts))
    import io as _io

    text = "\n" + "\n".join(
        ",".join(repr(float(dm.d[i, j])) for j in range(i)) for i in range(1, 3)
    )
    import tempfile, os

    with tempfile.NamedTemporaryFile("w", suffix=".ldm", delete=False) as fh:
        fh.write(text)
        name = fh.name
    try:
        loaded = cio.load_lower_distance_matrix(name)
        assert np.array_equal(loaded.d, dm.d)
        a = compute_barcode(loaded, maxdim=1, threshold=math.inf)
        b = compute_barcode(dm, maxdim=1, threshold=math.inf)
        assert a.simplex_multiset() == b.simplex_multiset()
    finally:
        os.unlink(name)


def test_lower_distance_matrix_ragged_row(tmp_path):
    path = tmp_path / "bad.ldm"
    path.write_text("1.0\n2.0\n")
    with pytest.raises(InputFormatError):
        cio.load_lower_distance_matrix(str(path))


def _parse(text):
    return json.loads(text)


def test_barcode_json_round_trip():
    rng = np.random.default_rng(1)
    dm = pairwise_distances(PointCloud(circle_points(rng, 20, noise=0.05)))
    bar = compute_barcode(dm, maxdim=1)
    obj = cio.barcode_to_obj(bar)
    text = cio.dump_json(obj)
    assert _parse(text) == obj
    # deterministic ordering by (dim, birth, death)
    keys = [
        (b["dim"], b["birth"], math.inf if b["death"] is None else b["death"])
        for b in obj
    ]
    assert keys == sorted(keys)
    # zero-length intervals are not in the real-valued view
    assert all(b["death"] is None or b["death"] > b["birth"] for b in obj)


def test_image_json_has_kind_tag_and_dual_annotations():
    rng = np.random.default_rng(2)
    from cyclematch import build_union_problem

    u = build_union_problem(
        PointCloud(rng.random((5, 2))), PointCloud(rng.random((5, 2)))
    )
    img = compute_image_barcode(ImageProblem(u.d_xp, u.d_z, maxdim=1))
    obj = cio.image_to_obj(img)
    assert obj["kind"] == "image"
    for bar in obj["finite"]:
        assert bar["birth_simplex"]["dim"] == bar["dim"]
        assert bar["death_simplex"]["dim"] == bar["dim"] + 1
    assert _parse(cio.dump_json(obj)) == obj


def test_match_and_prevalence_json_round_trip():
    rng = np.random.default_rng(3)
    x = PointCloud(circle_points(rng, 25, noise=0.05))
    res = match_point_clouds(x, x, maxdim=1)
    obj = cio.matches_to_obj(res.matches)
    assert _parse(cio.dump_json(obj)) == obj
    for m in obj:
        assert set(m["affinities"]) == {"A", "B", "C", "D"}

    report = prevalence(x, k=2, n=len(x), sigma=0.0, kind="A", seed=5)
    pobj = cio.prevalence_to_obj(report)
    assert _parse(cio.dump_json(pobj)) == pobj
    assert pobj["params"]["resamples"] == 2
    for b in pobj["bars"]:
        assert len(b["per_resampling"]) == 2


def test_cycles_json_contains_vertex_tuples_and_points():
    rng = np.random.default_rng(4)
    cloud = PointCloud(circle_points(rng, 15, noise=0.03))
    dm = pairwise_distances(cloud)
    bar = compute_barcode(dm, maxdim=1, threshold=math.inf)
    reps = representative_cycles(dm, bar)
    obj = cio.cycles_to_obj(reps, cloud=cloud)
    assert _parse(cio.dump_json(obj)) == obj
    assert len(obj["points"]) == 15
    for c in obj["cycles"]:
        for simplex in c["simplices"]:
            assert simplex == sorted(simplex)
            assert len(simplex) == c["dim"] + 1
