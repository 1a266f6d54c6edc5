"""Tracking matched intervals across an ordered sequence of frames.

Consecutive frames are matched pairwise; matches that share an interval in
the common frame are linked into chains.  Matching is injective both ways
per frame pair, so chains are simple paths with stable ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CycleMatchError
from .filtration import PointCloud, as_point_cloud, pairwise_distances
from .matching import IntervalMatch, MatchResult, match_point_clouds
from .persistence import Barcode, PersistencePair, compute_barcode


def _bar_id(p: PersistencePair) -> tuple:
    return (p.dim, p.birth_simplex.cindex, -1 if p.death_simplex is None else p.death_simplex.cindex)


@dataclass
class ChainLink:
    frame: int  # match between this frame and frame+1
    match: IntervalMatch


@dataclass
class TrackedChain:
    id: str
    dim: int
    first_frame: int
    links: list[ChainLink] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.links) + 1


@dataclass
class TrackResult:
    chains: list[TrackedChain]
    matches: list[list[IntervalMatch]]  # per consecutive pair
    diagnostics: list[dict]


def track_frames(
    frames: list[PointCloud], maxdim: int = 1, field_char: int = 2
) -> TrackResult:
    """Match consecutive frames and group the matches into chains."""
    if len(frames) < 2:
        raise CycleMatchError("tracking needs at least two frames")
    frames = [as_point_cloud(f) for f in frames]
    bars: list[Barcode | None] = [None] * len(frames)
    per_pair: list[list[IntervalMatch]] = []
    diagnostics: list[dict] = []
    for i in range(len(frames) - 1):
        try:
            if bars[i] is None:
                bars[i] = compute_barcode(
                    pairwise_distances(frames[i]), maxdim, None, field_char
                )
            res: MatchResult = match_point_clouds(
                frames[i], frames[i + 1], maxdim, field_char, bar_x=bars[i]
            )
            bars[i + 1] = res.bar_y
            per_pair.append(res.matches)
        except CycleMatchError as exc:
            diagnostics.append({"frame": i, "error": f"{type(exc).__name__}: {exc}"})
            per_pair.append([])
            bars[i + 1] = None

    # chain assembly: a match in pair i consumes (i, alpha) and produces
    # (i+1, beta); injectivity per pair keeps chains simple paths
    open_chains: dict[tuple, TrackedChain] = {}
    done: list[TrackedChain] = []
    for i, matches in enumerate(per_pair):
        next_open: dict[tuple, TrackedChain] = {}
        for m in sorted(
            matches, key=lambda m: (m.dim, m.alpha.birth_value, m.alpha.birth_simplex.cindex)
        ):
            key = (m.dim,) + _bar_id(m.alpha)
            chain = open_chains.pop(key, None)
            if chain is None:
                chain = TrackedChain(id="", dim=m.dim, first_frame=i)
            chain.links.append(ChainLink(frame=i, match=m))
            next_open[(m.dim,) + _bar_id(m.beta)] = chain
        done.extend(open_chains.values())
        open_chains = next_open
    done.extend(open_chains.values())

    done.sort(
        key=lambda c: (
            c.first_frame,
            c.dim,
            c.links[0].match.alpha.birth_value,
            c.links[0].match.alpha.birth_simplex.cindex,
        )
    )
    for k, chain in enumerate(done):
        chain.id = f"t{k:04d}"
    return TrackResult(chains=done, matches=per_pair, diagnostics=diagnostics)
