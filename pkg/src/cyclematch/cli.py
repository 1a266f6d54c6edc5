"""Command-line interface.

Subcommands: barcode, match, track, prevalence, cycles, render.  Stage
timings go to the log on stderr; result JSON is deterministic for a fixed
seed and configuration, independent of the jobs level.  Exit codes:
0 success, 2 input error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import io as cio
from .cycles import representative_cycles
from .errors import CycleMatchError, EmptyInputError, InputFormatError, InternalInvariantError
from .filtration import DistanceMatrix, PointCloud, pairwise_distances
from .matching import AFFINITY_KINDS, match_point_clouds, prevalence
from .persistence import compute_barcode
from .render import render_svg
from .tracking import track_frames

log = logging.getLogger("cyclematch")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _default_jobs() -> int:
    env = os.environ.get("CYCLEMATCH_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _add_common(sp, formats=True):
    sp.add_argument("--maxdim", type=int, default=1, help="top homology degree")
    sp.add_argument(
        "--threshold",
        type=float,
        default=None,
        help="filtration cutoff (default: enclosing radius)",
    )
    sp.add_argument("--field", type=int, default=2, help="coefficient field (prime)")
    sp.add_argument(
        "--no-apparent-pairs",
        action="store_true",
        help="disable the apparent-pair shortcut in the reduction",
    )
    if formats:
        sp.add_argument(
            "--format",
            choices=("pointcloud", "lowerdist"),
            default="pointcloud",
            help="input file format",
        )
    sp.add_argument("--output", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cyclematch",
        description="Vietoris-Rips persistence, cycle matching and prevalence",
    )
    ap.add_argument("-v", "--verbose", action="store_true", help="log timings and progress")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("barcode", help="persistence barcode of one input")
    b.add_argument("input")
    _add_common(b)

    m = sub.add_parser("match", help="match intervals of two point clouds")
    m.add_argument("input_x")
    m.add_argument("input_y")
    _add_common(m, formats=False)

    t = sub.add_parser("track", help="chain matches over an ordered frame sequence")
    t.add_argument("inputs", nargs="+")
    _add_common(t, formats=False)

    p = sub.add_parser("prevalence", help="bootstrap prevalence of reference intervals")
    p.add_argument("input")
    p.add_argument("--resamples", type=int, required=True, metavar="K")
    p.add_argument("--resample-size", type=int, required=True, metavar="N")
    p.add_argument("--noise", type=float, default=0.0, metavar="SIGMA")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--affinity", choices=AFFINITY_KINDS, default="A")
    p.add_argument(
        "--resample-mode", choices=("subsample", "bootstrap"), default="subsample"
    )
    p.add_argument("--jobs", type=int, default=None, help="max concurrent pipelines")
    _add_common(p, formats=False)

    c = sub.add_parser("cycles", help="representative cycles of finite intervals")
    c.add_argument("input")
    _add_common(c)

    r = sub.add_parser("render", help="render barcode or prevalence JSON to SVG")
    r.add_argument("input")
    r.add_argument("--output", default=None)
    return ap


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_cloud(path: str) -> PointCloud:
    return cio.load_point_cloud(path)


def _positive(args) -> None:
    for name in ("maxdim",):
        if getattr(args, name, 0) < 0:
            raise EmptyInputError(f"--{name} must be >= 0")
    if getattr(args, "threshold", None) is not None and args.threshold < 0:
        raise EmptyInputError("--threshold must be >= 0")


def cmd_barcode(args) -> int:
    _positive(args)
    data = cio.load_input(args.input, args.format)
    dmat = data if isinstance(data, DistanceMatrix) else pairwise_distances(data)
    bar = compute_barcode(
        dmat,
        maxdim=args.maxdim,
        threshold=args.threshold,
        field_char=args.field,
        use_apparent=not args.no_apparent_pairs,
    )
    _emit(cio.dump_json(cio.barcode_to_obj(bar)), args.output)
    return EXIT_OK


def cmd_match(args) -> int:
    _positive(args)
    x = _load_cloud(args.input_x)
    y = _load_cloud(args.input_y)
    res = match_point_clouds(
        x,
        y,
        maxdim=args.maxdim,
        field_char=args.field,
        use_apparent=not args.no_apparent_pairs,
    )
    _emit(cio.dump_json(cio.matches_to_obj(res.matches)), args.output)
    return EXIT_OK


def cmd_track(args) -> int:
    _positive(args)
    if len(args.inputs) < 2:
        raise EmptyInputError("track needs at least two inputs")
    frames = [_load_cloud(p) for p in args.inputs]
    res = track_frames(frames, maxdim=args.maxdim, field_char=args.field)
    obj = {
        "frames": list(args.inputs),
        "chains": [
            {
                "id": c.id,
                "dim": c.dim,
                "first_frame": c.first_frame,
                "length": c.length,
                "links": [
                    {"frame": l.frame, **cio.match_to_obj(l.match)} for l in c.links
                ],
            }
            for c in res.chains
        ],
        "matches": [cio.matches_to_obj(ms) for ms in res.matches],
        "diagnostics": res.diagnostics,
    }
    _emit(cio.dump_json(obj), args.output)
    return EXIT_OK


def cmd_prevalence(args) -> int:
    _positive(args)
    if args.seed is None:
        raise EmptyInputError("--seed is required (stochastic command)")
    if args.resamples < 1 or args.resample_size < 1:
        raise EmptyInputError("--resamples and --resample-size must be >= 1")
    if args.noise < 0:
        raise EmptyInputError("--noise must be >= 0")
    ref = _load_cloud(args.input)
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    report = prevalence(
        ref,
        k=args.resamples,
        n=args.resample_size,
        sigma=args.noise,
        kind=args.affinity,
        seed=args.seed,
        mode=args.resample_mode,
        maxdim=args.maxdim,
        field_char=args.field,
        jobs=max(1, jobs),
    )
    _emit(cio.dump_json(cio.prevalence_to_obj(report)), args.output)
    return EXIT_OK


def cmd_cycles(args) -> int:
    _positive(args)
    data = cio.load_input(args.input, args.format)
    cloud = None if isinstance(data, DistanceMatrix) else data
    dmat = data if isinstance(data, DistanceMatrix) else pairwise_distances(data)
    bar = compute_barcode(
        dmat,
        maxdim=args.maxdim,
        threshold=args.threshold,
        field_char=args.field,
        use_apparent=not args.no_apparent_pairs,
    )
    reps = representative_cycles(dmat, bar)
    _emit(cio.dump_json(cio.cycles_to_obj(reps, cloud=cloud, n=dmat.n)), args.output)
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(
            f"malformed JSON: {exc.msg}", path=args.input, line=exc.lineno, column=exc.colno
        ) from None
    _emit(render_svg(data), args.output)
    return EXIT_OK


_COMMANDS = {
    "barcode": cmd_barcode,
    "match": cmd_match,
    "track": cmd_track,
    "prevalence": cmd_prevalence,
    "cycles": cmd_cycles,
    "render": cmd_render,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except InternalInvariantError as exc:
        log.error("internal invariant violated: %s", exc)
        return EXIT_INTERNAL
    except (CycleMatchError, FileNotFoundError, IsADirectoryError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        log.error("unexpected failure: %s: %s", type(exc).__name__, exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
