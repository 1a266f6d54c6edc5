import xml.etree.ElementTree as ET

import numpy as np
import pytest

from conftest import circle_points
from cyclematch import PointCloud, compute_barcode, pairwise_distances, prevalence
from cyclematch import io as cio
from cyclematch.errors import InputFormatError
from cyclematch.render import render_svg

SVG_NS = "{http://www.w3.org/2000/svg}"


def _bars_from_svg(svg_text):
    root = ET.fromstring(svg_text)
    out = []
    for rect in root.iter(f"{SVG_NS}rect"):
        if "data-dim" in rect.attrib:
            out.append(rect.attrib)
    return out


def test_empty_barcode_renders_axes_only():
    svg = render_svg([])
    root = ET.fromstring(svg)
    lines = list(root.iter(f"{SVG_NS}line"))
    assert len(lines) >= 2  # the two axes
    assert _bars_from_svg(svg) == []


def test_all_ones_report_uses_max_thickness_single_color():
    bars = [
        {"dim": 1, "birth": 0.1, "death": 0.5, "prevalence": 1.0, "per_resampling": [1.0]},
        {"dim": 1, "birth": 0.2, "death": 0.9, "prevalence": 1.0, "per_resampling": [1.0]},
    ]
    svg = render_svg({"params": {}, "bars": bars})
    rects = _bars_from_svg(svg)
    assert len(rects) == 2
    heights = {r["height"] for r in rects}
    fills = {r["fill"] for r in rects}
    assert len(heights) == 1 and len(fills) == 1
    assert float(heights.pop()) == 12.0


def test_mixed_report_round_trips_order_and_monotone_thickness():
    rng = np.random.default_rng(5)
    ref = PointCloud(circle_points(rng, 30, noise=0.05))
    report = prevalence(ref, k=2, n=30, sigma=0.05, kind="A", seed=3)
    obj = cio.prevalence_to_obj(report)
    svg = render_svg(obj)
    rects = _bars_from_svg(svg)
    assert len(rects) == len(obj["bars"])
    keys = [(int(r["data-dim"]), float(r["data-birth"])) for r in rects]
    assert keys == sorted(keys)
    scores = [float(r["data-score"]) for r in rects]
    heights = [float(r["height"]) for r in rects]
    for (s1, h1), (s2, h2) in zip(zip(scores, heights), zip(scores[1:], heights[1:])):
        if s1 < s2:
            assert h1 < h2
        elif s1 > s2:
            assert h1 > h2
        else:
            assert h1 == h2
    # a colorbar is present in prevalence mode
    assert "linearGradient" in svg


def test_plain_barcode_uniform_thickness():
    rng = np.random.default_rng(6)
    dm = pairwise_distances(PointCloud(circle_points(rng, 20, noise=0.05)))
    bar = compute_barcode(dm, maxdim=1)
    svg = render_svg(cio.barcode_to_obj(bar))
    rects = _bars_from_svg(svg)
    assert rects
    assert {r["height"] for r in rects} == {"4.000"}


def test_malformed_input_rejected():
    with pytest.raises(InputFormatError):
        render_svg({"nonsense": True})
    with pytest.raises(InputFormatError):
        render_svg([{"dim": 0}])
