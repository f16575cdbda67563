"""Virtual and metric ED degrees of rank <= 2 symmetric matrices.

Exact torus localization for the virtual ED degree of sigma_2(v_2(P^{n-1})),
and homotopy continuation for ED-critical point counts of the 3 x 3
symmetroid under a chosen metric.
"""
from .exactcore import NOT_STABILIZED, Rat, TruncSeries, elem_sym, forward_diff_order, interpolate, series_inverse
from .grassloc import ChernMatherDegrees, ProblemSize, WeightVector, ved, weight_independence_check
from .edlagrange import (
    MetricSpec,
    SymTensor,
    TargetPoint,
    build_system,
    bw_gram,
    bw_metric,
    bw_product,
    diag_family_metric,
    random_metric,
    random_target,
)
from .pathtrack import Homotopy, SolutionSet, TrackerConfig, classify, ed_count, parameter_homotopy, total_degree_start, track

__all__ = [
    "NOT_STABILIZED", "Rat", "TruncSeries", "elem_sym", "forward_diff_order", "interpolate",
    "series_inverse", "ChernMatherDegrees", "ProblemSize", "WeightVector", "ved",
    "weight_independence_check", "MetricSpec", "SymTensor", "TargetPoint", "build_system",
    "bw_gram", "bw_metric", "bw_product", "diag_family_metric", "random_metric", "random_target",
    "Homotopy", "SolutionSet", "TrackerConfig", "classify", "ed_count", "parameter_homotopy",
    "total_degree_start", "track",
]
