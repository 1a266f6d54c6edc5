"""File formats: point clouds, lower-distance matrices, and result JSON.

Point-cloud files: one point per line, comma- or whitespace-separated
decimal coordinates, ``#`` comments allowed.  Lower-distance-matrix files:
comma-separated strict lower triangle, one row per point, the first row
empty or absent (the de-facto interchange format of persistence tools).

All JSON emission is deterministic: sorted keys, fixed indentation, and
``null`` for infinite deaths.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .combinat import SimplexKey
from .cycles import RepresentativeCycle
from .errors import EmptyInputError, InputFormatError
from .filtration import DistanceMatrix, PointCloud, cns_decode
from .image import ImageBarcode
from .matching import IntervalMatch, PrevalenceReport
from .persistence import Barcode, PersistencePair


def _split_fields(line: str) -> list[str]:
    if "," in line:
        return [f.strip() for f in line.split(",")]
    return line.split()


def load_point_cloud(path: str) -> PointCloud:
    rows: list[list[float]] = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = _split_fields(line)
            vals = []
            for col, f in enumerate(fields, start=1):
                try:
                    vals.append(float(f))
                except ValueError:
                    raise InputFormatError(
                        f"not a number: {f!r}", path=path, line=lineno, column=col
                    ) from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise InputFormatError(
                    f"expected {width} coordinates, found {len(vals)}",
                    path=path,
                    line=lineno,
                )
            rows.append(vals)
    if not rows:
        raise EmptyInputError(f"{path}: no points")
    return PointCloud(np.array(rows, dtype=np.float64), id=path)


def load_lower_distance_matrix(path: str) -> DistanceMatrix:
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = fh.read().splitlines()
    started = False
    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if not started:
                # a leading empty row stands for the first point
                rows.append([])
                started = True
            continue
        started = True
        fields = [f for f in _split_fields(line) if f]
        vals = []
        for col, f in enumerate(fields, start=1):
            try:
                vals.append(float(f))
            except ValueError:
                raise InputFormatError(
                    f"not a number: {f!r}", path=path, line=lineno, column=col
                ) from None
        rows.append(vals)
    if rows and rows[0] == []:
        rows = rows[1:]
    if not rows and not started:
        raise EmptyInputError(f"{path}: empty lower-distance matrix")
    # row i (0-based, counting from the second point) has i+1 entries
    n = len(rows) + 1
    for i, vals in enumerate(rows):
        if len(vals) != i + 1:
            raise InputFormatError(
                f"row for point {i + 1} should have {i + 1} entries, found {len(vals)}",
                path=path,
                line=i + 1,
            )
    d = np.zeros((n, n), dtype=np.float64)
    for i, vals in enumerate(rows):
        for j, v in enumerate(vals):
            d[i + 1, j] = v
            d[j, i + 1] = v
    return DistanceMatrix(d)


def load_input(path: str, fmt: str = "pointcloud"):
    if fmt == "pointcloud":
        return load_point_cloud(path)
    if fmt == "lowerdist":
        return load_lower_distance_matrix(path)
    raise InputFormatError(f"unknown format {fmt!r}", path=path)


# ---------------------------------------------------------------------------
# JSON emission
# ---------------------------------------------------------------------------


def _simplex_obj(key: SimplexKey | None):
    if key is None:
        return None
    return {"dim": key.dim, "cindex": key.cindex}


def _value(v: float):
    return None if math.isinf(v) else float(v)


def pair_obj(p: PersistencePair) -> dict:
    return {
        "dim": p.dim,
        "birth": float(p.birth_value),
        "death": _value(p.death_value),
        "birth_simplex": _simplex_obj(p.birth_simplex),
        "death_simplex": _simplex_obj(p.death_simplex),
    }


def barcode_to_obj(barcode: Barcode) -> list[dict]:
    """Real-valued view as a bare array ordered by (dim, birth, death)."""
    view = barcode.real_view()
    bars = [view._make_pair(i) for i in range(len(view))]
    bars.sort(
        key=lambda p: (
            p.dim,
            p.birth_value,
            math.inf if p.death_simplex is None else p.death_value,
            p.birth_simplex.cindex,
        )
    )
    return [pair_obj(p) for p in bars]


def image_to_obj(img: ImageBarcode) -> dict:
    finite = sorted(
        (p for d in range(img.maxdim + 1) for p in img.finite(d)),
        key=lambda p: (p.dim, p.birth_value, p.death_value, p.birth_simplex.cindex),
    )
    essential = sorted(
        (p for d in range(img.maxdim + 1) for p in img.essential(d)),
        key=lambda p: (p.dim, p.birth_value, p.birth_simplex.cindex),
    )
    return {
        "kind": "image",
        "finite": [pair_obj(p) for p in finite],
        "essential": [
            {
                "dim": p.dim,
                "birth": float(p.birth_value),
                "birth_simplex": _simplex_obj(p.birth_simplex),
            }
            for p in essential
        ],
    }


def match_to_obj(m: IntervalMatch) -> dict:
    return {
        "dim": m.dim,
        "alpha": pair_obj(m.alpha),
        "beta": pair_obj(m.beta),
        "alpha_img": pair_obj(m.alpha_img),
        "beta_img": pair_obj(m.beta_img),
        "affinities": {k: float(v) for k, v in sorted(m.affinities.items())},
    }


def matches_to_obj(matches: list[IntervalMatch]) -> list[dict]:
    return [match_to_obj(m) for m in matches]


def prevalence_to_obj(report: PrevalenceReport) -> dict:
    bars = []
    for e in report.entries:
        bars.append(
            {
                "dim": e.pair.dim,
                "birth": float(e.pair.birth_value),
                "death": _value(e.pair.death_value),
                "birth_simplex": _simplex_obj(e.pair.birth_simplex),
                "death_simplex": _simplex_obj(e.pair.death_simplex),
                "prevalence": float(e.score),
                "per_resampling": [float(v) for v in e.per_resampling],
            }
        )
    bars.sort(key=lambda b: (b["dim"], b["birth"], b["birth_simplex"]["cindex"]))
    return {
        "params": {
            "kind": report.kind,
            "resamples": report.k,
            "resample_size": report.n,
            "reference_size": report.n_ref,
            "noise_sigma": report.noise_sigma,
            "seed": report.seed,
            "mode": report.mode,
        },
        "bars": bars,
        "failures": report.failures,
    }


def cycles_to_obj(
    reps: list[RepresentativeCycle], cloud: PointCloud | None = None, n: int | None = None
) -> dict:
    if n is None and cloud is not None:
        n = len(cloud)
    out = []
    for r in reps:
        out.append(
            {
                "dim": r.pair.dim,
                "birth": float(r.pair.birth_value),
                "death": _value(r.pair.death_value),
                "birth_simplex": _simplex_obj(r.pair.birth_simplex),
                "death_simplex": _simplex_obj(r.pair.death_simplex),
                "simplices": [list(cns_decode(k, n)) for k in r.chain],
                "coefficients": list(r.coefficients),
            }
        )
    obj: dict[str, Any] = {
        "field": reps[0].field_char if reps else 2,
        "cycles": out,
    }
    if cloud is not None:
        obj["points"] = [[float(x) for x in row] for row in cloud.points]
    return obj


def dump_json(obj, path: str | None = None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
