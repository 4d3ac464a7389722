"""Core trees, pants decompositions with factorial cuff lengths, and
non-wandering certificates for quasiconformal maps of infinite-type surfaces."""

from .certificate import Certificate, compute_N, report, verify_non_wandering
from .core_tree import CoreTree, TreeSpec, classify_ends, preset, truncate, validate
from .hyp_geom import (
    BoundaryGeodesic,
    PantsGeometry,
    geodesic_distance,
    pants_orthogeodesics,
    pentagon_check,
    returning_arc_bound,
    wolpert_interval,
)
from .metric import Length, MetricComplex, compare, factorial_gap, label_lengths
from .pants_complex import PantsComplex, TruncationTooShallow, build, exhaustion
from .tree_surgery import normalize

__all__ = [
    "BoundaryGeodesic",
    "Certificate",
    "CoreTree",
    "Length",
    "MetricComplex",
    "PantsComplex",
    "PantsGeometry",
    "TreeSpec",
    "TruncationTooShallow",
    "build",
    "classify_ends",
    "compare",
    "compute_N",
    "exhaustion",
    "factorial_gap",
    "geodesic_distance",
    "label_lengths",
    "normalize",
    "pants_orthogeodesics",
    "pentagon_check",
    "preset",
    "report",
    "returning_arc_bound",
    "truncate",
    "validate",
    "verify_non_wandering",
    "wolpert_interval",
]
