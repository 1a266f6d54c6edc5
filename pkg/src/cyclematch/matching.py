"""Interval matching across two barcodes through their image barcodes,
affinity scores, and bootstrapped prevalence.

Two intervals match when each shares its birth simplex with an interval of
the respective image barcode and the two image intervals share one death
simplex in the union.  Degree-0 intervals are not matched: in the union
construction every point of one cloud is instantly connected to its nearest
neighbour in the other, which degenerates the degree-0 image intervals (a
cloud matched against itself would score 0 instead of 1), and the affinity
experiments only ever score cycles.

Matching operates on the real-valued views (zero-length intervals are not
intervals of the barcode); image intervals of zero length still witness a
match and simply contribute Jaccard 0.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .combinat import SimplexKey, cns_decode, cns_encode
from .errors import CompatibilityError, EmptyInputError, InternalInvariantError
from .filtration import (
    DistanceMatrix,
    PointCloud,
    UnionProblem,
    as_point_cloud,
    build_union_problem,
    pairwise_distances,
)
from .image import ImageBarcode, ImageProblem, compute_image_barcode
from .persistence import Barcode, PersistencePair, compute_barcode

log = logging.getLogger(__name__)

AFFINITY_KINDS = ("A", "B", "C", "D")


def jaccard(i: tuple[float, float], j: tuple[float, float]) -> float:
    """Jaccard index of two real intervals: |I cap J| / |I cup J|.

    Two degenerate intervals give 0 by convention.
    """
    a, b = float(i[0]), float(i[1])
    c, d = float(j[0]), float(j[1])
    if b < a or d < c:
        raise ValueError("intervals must be ordered (lo, hi)")
    inter = min(b, d) - max(a, c)
    if inter < 0.0:
        inter = 0.0
    union = (b - a) + (d - c) - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def _interval(p: PersistencePair, threshold: float) -> tuple[float, float]:
    # deaths are diameters <= threshold by construction; the min is a guard
    # for explicitly infinite thresholds
    hi = p.death_value if np.isfinite(p.death_value) else threshold
    return (p.birth_value, min(hi, threshold) if np.isfinite(threshold) else hi)


@dataclass(frozen=True)
class IntervalMatch:
    """A matched pair of intervals with their image intervals and affinities."""

    dim: int
    alpha: PersistencePair
    beta: PersistencePair
    alpha_img: PersistencePair
    beta_img: PersistencePair
    affinities: dict[str, float]


def _affinities(alpha, beta, alpha_img, beta_img, threshold: float) -> dict[str, float]:
    ia = _interval(alpha, threshold)
    ib = _interval(beta, threshold)
    iat = _interval(alpha_img, threshold)
    ibt = _interval(beta_img, threshold)
    j_ab = jaccard(ia, ib)
    j_tt = jaccard(iat, ibt)
    j_a = jaccard(ia, iat)
    j_b = jaccard(ib, ibt)
    return {
        "A": j_ab * j_a * j_b,
        "B": j_tt * j_a * j_b,
        "C": j_ab * j_tt * j_a * j_b,
        "D": j_ab * j_tt,
    }


def affinity(match: IntervalMatch, kind: str) -> float:
    if kind not in AFFINITY_KINDS:
        raise ValueError(f"affinity kind must be one of {AFFINITY_KINDS}")
    return match.affinities[kind]


def _births_to_union(bar: Barcode, offset: int, n_union: int):
    """Map each real finite interval of ``bar`` (degrees >= 1) to its birth
    simplex cindex in union coordinates."""
    real = bar.real_view()
    out = []
    for d in range(1, bar.maxdim + 1):
        for p in real.finite(d):
            ci = p.birth_simplex.cindex
            if offset:
                verts = tuple(
                    v + offset for v in cns_decode(p.birth_simplex, bar.n)
                )
                ci = cns_encode(verts, n_union).cindex
            out.append((d, ci, p))
    return out


def match_intervals(
    bar_x: Barcode,
    bar_y: Barcode,
    img_x: ImageBarcode,
    img_y: ImageBarcode,
    offset_x: int | None = None,
    offset_y: int | None = None,
) -> list[IntervalMatch]:
    """All matches between the real finite intervals of the two barcodes.

    The barcodes are indexed over their own clouds; by default the first
    cloud occupies the foremost union positions and the second the trailing
    ones.  Each interval participates in at most one match.
    """
    n_union = img_x.n
    if img_y.n != n_union or bar_x.n + bar_y.n != n_union:
        raise CompatibilityError(
            "inputs do not share one union problem "
            f"(|X|={bar_x.n}, |Y|={bar_y.n}, union={n_union}, {img_y.n})"
        )
    if offset_x is None:
        offset_x = 0
    if offset_y is None:
        offset_y = bar_x.n

    def image_lookup(img: ImageBarcode):
        by_birth: dict[tuple[int, int], PersistencePair] = {}
        for d in range(1, img.maxdim + 1):
            for p in img.finite(d):
                key = (d, p.birth_simplex.cindex)
                if key in by_birth:
                    raise InternalInvariantError(
                        f"image barcode has two intervals born at {key}"
                    )
                by_birth[key] = p
        return by_birth

    img_x_by_birth = image_lookup(img_x)
    img_y_by_birth = image_lookup(img_y)

    x_side: dict[tuple[int, int], tuple[PersistencePair, PersistencePair]] = {}
    for d, ci, p in _births_to_union(bar_x, offset_x, n_union):
        tilde = img_x_by_birth.get((d, ci))
        if tilde is None:
            continue
        dkey = (d, tilde.death_simplex.cindex)
        if dkey in x_side:
            raise InternalInvariantError(f"two image intervals die at {dkey}")
        x_side[dkey] = (p, tilde)

    matches: list[IntervalMatch] = []
    seen_beta = set()
    for d, ci, q in _births_to_union(bar_y, offset_y, n_union):
        tilde = img_y_by_birth.get((d, ci))
        if tilde is None:
            continue
        dkey = (d, tilde.death_simplex.cindex)
        hit = x_side.get(dkey)
        if hit is None:
            continue
        if dkey in seen_beta:
            raise InternalInvariantError(f"death simplex {dkey} matched twice")
        seen_beta.add(dkey)
        p, p_tilde = hit
        matches.append(
            IntervalMatch(
                dim=d,
                alpha=p,
                beta=q,
                alpha_img=p_tilde,
                beta_img=tilde,
                affinities=_affinities(p, q, p_tilde, tilde, img_x.threshold),
            )
        )
    matches.sort(
        key=lambda m: (m.dim, m.alpha.birth_value, m.alpha.birth_simplex.cindex)
    )
    return matches


@dataclass
class MatchResult:
    matches: list[IntervalMatch]
    bar_x: Barcode
    bar_y: Barcode
    img_x: ImageBarcode
    img_y: ImageBarcode
    n_x: int
    n_y: int
    timings: dict[str, float] = field(default_factory=dict)


def match_point_clouds(
    x: PointCloud,
    y: PointCloud,
    maxdim: int = 1,
    field_char: int = 2,
    use_apparent: bool = True,
    bar_x: Barcode | None = None,
) -> MatchResult:
    """Full pipeline: union problem, two barcodes, two image barcodes, match.

    ``bar_x`` may be passed in when the reference barcode is reused across
    many comparisons.
    """
    x = as_point_cloud(x)
    y = as_point_cloud(y)
    t0 = time.perf_counter()
    union = build_union_problem(x, y)
    if bar_x is None:
        bar_x = compute_barcode(
            pairwise_distances(x), maxdim, None, field_char, use_apparent
        )
    bar_y = compute_barcode(
        pairwise_distances(y), maxdim, None, field_char, use_apparent
    )
    t1 = time.perf_counter()
    img_x = compute_image_barcode(
        ImageProblem(union.d_xp, union.d_z, maxdim, None, field_char), use_apparent
    )
    img_y = compute_image_barcode(
        ImageProblem(union.d_yp, union.d_z, maxdim, None, field_char), use_apparent
    )
    t2 = time.perf_counter()
    matches = match_intervals(bar_x, bar_y, img_x, img_y)
    t3 = time.perf_counter()
    timings = {"barcode": t1 - t0, "image": t2 - t1, "match": t3 - t2}
    log.info(
        "match: |X|=%d |Y|=%d barcode=%.3fs image=%.3fs match=%.3fs",
        len(x),
        len(y),
        timings["barcode"],
        timings["image"],
        timings["match"],
    )
    return MatchResult(
        matches, bar_x, bar_y, img_x, img_y, len(x), len(y), timings
    )


# ---------------------------------------------------------------------------
# resampling and prevalence
# ---------------------------------------------------------------------------


def resample(cloud: PointCloud, n: int, sigma: float, seed: int) -> PointCloud:
    """n points drawn uniformly with replacement, then perturbed by centered
    Gaussian noise of standard deviation sigma per coordinate."""
    cloud = as_point_cloud(cloud)
    if n < 1:
        raise EmptyInputError("resample size must be >= 1")
    rng = np.random.default_rng(seed)
    return _draw(cloud, n, sigma, rng, replace=True)


def subsample_noise(cloud: PointCloud, n: int, sigma: float, seed: int) -> PointCloud:
    """n points drawn without replacement, then perturbed by Gaussian noise."""
    cloud = as_point_cloud(cloud)
    if n < 1:
        raise EmptyInputError("resample size must be >= 1")
    if n > len(cloud):
        raise EmptyInputError(
            f"cannot subsample {n} points from {len(cloud)} without replacement"
        )
    rng = np.random.default_rng(seed)
    return _draw(cloud, n, sigma, rng, replace=False)


def _draw(cloud: PointCloud, n: int, sigma: float, rng, replace: bool) -> PointCloud:
    idx = (
        rng.integers(0, len(cloud), size=n)
        if replace
        else rng.permutation(len(cloud))[:n]
    )
    pts = cloud.points[idx]
    if sigma > 0:
        pts = pts + rng.normal(0.0, sigma, size=pts.shape)
    return PointCloud(pts, id=f"{cloud.id}#resample")


@dataclass
class PrevalenceEntry:
    pair: PersistencePair
    score: float
    per_resampling: list[float]


@dataclass
class PrevalenceReport:
    entries: list[PrevalenceEntry]
    kind: str
    k: int
    n: int
    n_ref: int
    noise_sigma: float
    seed: int | None
    mode: str
    failures: list[dict] = field(default_factory=list)

    def scores(self, dim: int | None = None) -> list[float]:
        return [
            e.score for e in self.entries if dim is None or e.pair.dim == dim
        ]


def _bar_key(p: PersistencePair) -> tuple:
    d = p.death_simplex.cindex if p.death_simplex else -1
    return (p.dim, p.birth_simplex.cindex, d)


def _match_worker(args):
    """One resampling pipeline; returns {reference bar key: affinities}."""
    ref_pts, bar_ref, cloud_pts, maxdim, field_char, k = args
    try:
        res = match_point_clouds(
            PointCloud(ref_pts),
            PointCloud(cloud_pts),
            maxdim=maxdim,
            field_char=field_char,
            bar_x=bar_ref,
        )
        return k, {_bar_key(m.alpha): m.affinities for m in res.matches}, None
    except Exception as exc:  # noqa: BLE001 - per-resampling isolation
        return k, {}, f"{type(exc).__name__}: {exc}"


def prevalence_scores(
    ref: PointCloud,
    clouds: list[PointCloud],
    kind: str = "A",
    maxdim: int = 1,
    field_char: int = 2,
    jobs: int = 1,
    bar_ref: Barcode | None = None,
    seed: int | None = None,
    mode: str = "explicit",
    sigma: float = 0.0,
) -> PrevalenceReport:
    """Prevalence of every real finite interval (degrees >= 1) of the
    reference cloud's barcode over the given comparison clouds.

    Each comparison runs an independent pipeline (union with the reference,
    barcodes, image barcodes, matching); unmatched intervals contribute 0.
    ``jobs`` bounds the number of concurrent pipelines; results are merged
    by resampling index, so the output does not depend on scheduling.
    """
    if kind not in AFFINITY_KINDS:
        raise ValueError(f"affinity kind must be one of {AFFINITY_KINDS}")
    ref = as_point_cloud(ref)
    if bar_ref is None:
        bar_ref = compute_barcode(pairwise_distances(ref), maxdim, None, field_char)
    targets = [
        p for d in range(1, maxdim + 1) for p in bar_ref.real_view().finite(d)
    ]
    work = [
        (ref.points, bar_ref, c.points, maxdim, field_char, k)
        for k, c in enumerate(clouds)
    ]
    results: dict[int, dict] = {}
    failures: list[dict] = []
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for k, got, err in pool.map(_match_worker, work):
                results[k] = got
                if err:
                    failures.append({"k": k, "error": err})
    else:
        for args in work:
            k, got, err = _match_worker(args)
            results[k] = got
            if err:
                failures.append({"k": k, "error": err})

    entries = []
    for p in targets:
        key = _bar_key(p)
        per = []
        for k in range(len(clouds)):
            m = results.get(k, {}).get(key)
            per.append(0.0 if m is None else m[kind])
        score = float(np.mean(per)) if per else 0.0
        entries.append(PrevalenceEntry(pair=p, score=score, per_resampling=per))
    return PrevalenceReport(
        entries=entries,
        kind=kind,
        k=len(clouds),
        n=len(clouds[0]) if clouds else 0,
        n_ref=len(ref),
        noise_sigma=sigma,
        seed=seed,
        mode=mode,
        failures=failures,
    )


def prevalence(
    ref: PointCloud,
    k: int,
    n: int,
    sigma: float,
    kind: str = "A",
    seed: int | None = None,
    mode: str = "subsample",
    maxdim: int = 1,
    field_char: int = 2,
    jobs: int = 1,
) -> PrevalenceReport:
    """Prevalence over k resamplings of the reference cloud.

    ``mode`` selects the resampling scheme: ``subsample`` draws n points
    without replacement then adds noise; ``bootstrap`` draws with
    replacement then adds noise.  The per-resampling seeds are derived from
    ``seed`` up front, so the report is identical for any ``jobs`` level.
    """
    if k < 1:
        raise EmptyInputError("need at least one resampling")
    if seed is None:
        raise EmptyInputError("stochastic commands require a seed")
    ref = as_point_cloud(ref)
    children = np.random.SeedSequence(seed).spawn(k)
    clouds = []
    for child in children:
        rng = np.random.default_rng(child)
        if mode == "subsample":
            if n > len(ref):
                raise EmptyInputError(
                    f"cannot subsample {n} points from {len(ref)} without replacement"
                )
            clouds.append(_draw(ref, n, sigma, rng, replace=False))
        elif mode == "bootstrap":
            clouds.append(_draw(ref, n, sigma, rng, replace=True))
        else:
            raise ValueError(f"unknown resample mode: {mode}")
    return prevalence_scores(
        ref,
        clouds,
        kind=kind,
        maxdim=maxdim,
        field_char=field_char,
        jobs=jobs,
        seed=seed,
        mode=mode,
        sigma=sigma,
    )
