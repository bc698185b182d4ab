"""Multivariate quantile contours: relabeled geometric quantiles and
measure-transportation-based center-outward quantiles, with experiment
pipelines comparing the two families."""

from .contours import (
    CENTER_OUTWARD,
    GEOMETRIC,
    Contour,
    fraction_inside,
    half_extents,
    is_convex,
    points_in_polygon,
    reflex_vertex_count,
)
from .directions import cycle_sum, direction_grid
from .distributions import (
    PRESETS,
    STANDARD_GAUSSIAN,
    BananaSpec,
    ExponentialSpec,
    GaussianSpec,
    MixtureSpec,
    SampleSet,
    SkewTSpec,
    analytic_center_outward_cdf,
    analytic_center_outward_radius,
    sample,
    spec_from_config,
    spec_to_config,
)
from .exceptions import DegenerateSampleError, SolverConvergenceError
from .geometric import (
    GeometricQuantileResult,
    GeometricQuantiles,
    build_relabel_table,
    check_function,
    geometric_cdf,
    geometric_objective,
    geometric_quantile,
    relabel_order,
    relabeled_geometric_contour,
)
from .transport import (
    Assignment,
    CenterOutwardQuantiles,
    SphericalGrid,
    center_outward_contour,
    center_outward_values,
    empirical_center_outward_cdf,
    interpolated_center_outward_cdf,
    optimal_assignment,
    spherical_grid,
    two_swap_margin,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BananaSpec",
    "CENTER_OUTWARD",
    "CenterOutwardQuantiles",
    "Contour",
    "DegenerateSampleError",
    "ExponentialSpec",
    "GEOMETRIC",
    "GaussianSpec",
    "GeometricQuantileResult",
    "GeometricQuantiles",
    "MixtureSpec",
    "PRESETS",
    "STANDARD_GAUSSIAN",
    "SampleSet",
    "SkewTSpec",
    "SolverConvergenceError",
    "SphericalGrid",
    "analytic_center_outward_cdf",
    "analytic_center_outward_radius",
    "build_relabel_table",
    "center_outward_contour",
    "center_outward_values",
    "check_function",
    "cycle_sum",
    "direction_grid",
    "empirical_center_outward_cdf",
    "fraction_inside",
    "geometric_cdf",
    "geometric_objective",
    "geometric_quantile",
    "half_extents",
    "interpolated_center_outward_cdf",
    "is_convex",
    "optimal_assignment",
    "points_in_polygon",
    "reflex_vertex_count",
    "relabel_order",
    "relabeled_geometric_contour",
    "sample",
    "spec_from_config",
    "spec_to_config",
    "spherical_grid",
    "two_swap_margin",
]
