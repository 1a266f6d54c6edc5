"""Vietoris-Rips persistence, image-persistence, cycle matching and prevalence."""

from .combinat import SimplexKey, cns_decode, cns_encode
from .cycles import RepresentativeCycle, representative_cycles
from .filtration import (
    DistanceMatrix,
    PointCloud,
    UnionProblem,
    build_union_problem,
    enclosing_radius,
    pairwise_distances,
    simplex_diameter,
    simplexwise_stream,
)
from .image import (
    ImageBarcode,
    ImageProblem,
    compute_image_barcode,
    oracle_image_barcode,
)
from .matching import (
    IntervalMatch,
    MatchResult,
    PrevalenceReport,
    affinity,
    jaccard,
    match_intervals,
    match_point_clouds,
    prevalence,
    prevalence_scores,
    resample,
    subsample_noise,
)
from .persistence import (
    Barcode,
    PersistencePair,
    attach_natural_indices,
    brute_force_barcode,
    compute_barcode,
    reindex_barcode,
    reindex_map_for,
)
from .tracking import TrackedChain, TrackResult, track_frames

__all__ = [
    "SimplexKey",
    "cns_decode",
    "cns_encode",
    "RepresentativeCycle",
    "representative_cycles",
    "DistanceMatrix",
    "PointCloud",
    "UnionProblem",
    "build_union_problem",
    "enclosing_radius",
    "pairwise_distances",
    "simplex_diameter",
    "simplexwise_stream",
    "ImageBarcode",
    "ImageProblem",
    "compute_image_barcode",
    "oracle_image_barcode",
    "IntervalMatch",
    "MatchResult",
    "PrevalenceReport",
    "affinity",
    "jaccard",
    "match_intervals",
    "match_point_clouds",
    "prevalence",
    "prevalence_scores",
    "resample",
    "subsample_noise",
    "Barcode",
    "PersistencePair",
    "attach_natural_indices",
    "brute_force_barcode",
    "compute_barcode",
    "reindex_barcode",
    "reindex_map_for",
    "TrackedChain",
    "TrackResult",
    "track_frames",
]
__version__ = "0.1.0"
