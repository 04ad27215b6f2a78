"""Lattice-point statistics on convex bodies and the discrete inequalities
relating them to moments, Minkowski sums and random-polytope mean widths."""

from .bodies import (
    Ball,
    Box,
    Classification,
    Combination,
    ConvexBody,
    CubeSum,
    GeometryError,
    HPolytope,
    Rotated,
    Rotation,
    Scaled,
    VPolytope,
    body_from_dict,
    body_from_json,
    body_to_json,
    classify,
    counterexample_body,
    linf_distance,
    radii,
    rotate_body,
    support,
)
from .borell import (
    BorellConstants,
    C_REF,
    C_REF_LOWER,
    C_REF_UPPER,
    HypothesisError,
    InequalityReport,
    PreconditionError,
    c0,
    c0_upper_bound,
    cq_estimate,
    paley_zygmund_check,
    union_bound_tail_check,
    verify_discrete_bm,
    verify_discrete_borell,
    verify_meanwidth_discrete,
)
from .continuous import axis_moment, ball_sum_volume, unit_ball_volume, volume
from .corpus import cross_polytope, default_corpus
from .harness import ExperimentConfig, emit_report, run_experiment
from .lattice import (
    LatticePointSet,
    ProjectionDistribution,
    enumerate_cached,
    enumerate_lattice,
    expected_max,
    moment,
    projection_distribution,
    tail,
    write_points_csv,
)
from .sampling import (
    MeanWidthEstimate,
    RngStream,
    centroid_support,
    floating_body_support,
    haar_rotation,
    mean_width_centroid,
    random_polytope_mean_width,
    uniform_in_body,
    uniform_points,
)

__version__ = "0.1.0"
