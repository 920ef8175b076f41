"""sausagelab: Monte Carlo estimation of intrinsic volumes of dilated planar Brownian paths.

The package simulates piecewise-linear Brownian paths, dilates them by a disc
of radius r through an exact Euclidean distance map, measures area, boundary
length and Euler characteristic of the dilated set, compares the Monte Carlo
means against the closed-form Bessel-integral reference, and fits parametric
approximation formulae to the resulting curves.
"""

from .brownian import (
    Polyline,
    PhiloxSource,
    SequenceSource,
    sample_increment_path,
    haar,
    schauder,
    haar_schauder_path,
    subsample_path,
    rescale_path,
)
from .geometry import (
    RasterFrame,
    DistanceMap,
    BinaryGrid,
    IntrinsicVolumes,
    SegmentIndex,
    FrameTooSmallError,
    dist_point_polyline,
    build_distance_map,
    threshold,
    intrinsic_volumes,
    euler_by_complex,
    label_components,
    auto_frame,
    dilation_summary,
)
from .hausdorff import hausdorff_polyline, sup_norm_gap
from .reference import (
    QuadratureSpec,
    QuadratureError,
    bessel_j0,
    bessel_y0,
    expected_area,
    expected_perimeter,
    legall_area_asymptote,
    legall_perimeter_asymptote,
)
from .montecarlo import (
    ExperimentConfig,
    AggregateRow,
    derive_stream,
    run_experiment,
    convergence_study,
    hole_statistics,
)
from .fitting import (
    AreaForm,
    PerimeterForm,
    EulerForm,
    FitResult,
    normal_cdf,
    eval_model,
    fit,
    relative_errors,
)

__version__ = "0.1.0"
