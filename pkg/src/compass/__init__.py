"""Numerical comparison-geometry toolkit.

Model-space trigonometry and cosine laws, Jacobi/Riccati comparison
solvers, four-point curvature certification of finite metric spaces,
Gromov-Hausdorff bounds, volume-comparison constants, short bases of flat
tori, gradient flows of piecewise-smooth semi-concave functions, and metric
cones/products, with a batch CLI over all of it.
"""
from .errors import (
    CompassError,
    ComparisonUndefined,
    DegenerateSide,
    DegenerateTriple,
    Disconnected,
    DomainError,
    DuplicatePoint,
    EmptySet,
    InputError,
    InvalidTriangle,
    MetricError,
    NegativeEntry,
    NegativeRadius,
    NoMidpoint,
    NonpositiveScale,
    NonpositiveWeight,
    NonzeroDiagonal,
    NotAGeodesicChain,
    NotConcave,
    NotOnGeodesic,
    NotOneLipschitz,
    NotSymmetric,
    PointsTooFarApart,
    PreconditionFailed,
    ProfileOrderViolated,
    ProfileUndefined,
    RankTooLarge,
    StepTooLarge,
    TooFewSamples,
    TooLarge,
    TriangleViolation,
    WeightsInvalid,
)
from .report import Report
from .model_space import (
    INVALID,
    VALID,
    VALID_DEGENERATE_BOUNDARY,
    Hinge,
    alexandrov_gluing,
    model_angle,
    model_diameter,
    model_side,
    modified_distance,
    solve_hinge,
    trig,
    validate_triangle,
)
from .jacobi_riccati import (
    POLE_AT_ZERO,
    CurvatureProfile,
    ScalarODESolution,
    compare_riccati,
    conjugate_bound_check,
    rauch_ratio,
    solve_jacobi,
    solve_riccati,
)
from .finite_metric import (
    CertificationReport,
    DistanceMatrix,
    MyersGate,
    PerimeterGate,
    Quadruple,
    ScanResult,
    certify_curvature,
    comparison_angle,
    curvature_scan,
    four_point_defect,
    from_graph,
    point_on_side_defect,
    star_shaped_check,
    validate_metric,
    voronoi_assign,
)
from .gromov_hausdorff import (
    EXACT_SIZE_CAP,
    Correspondence,
    GHBound,
    PointMap,
    all_self_maps_isometry_margin,
    approximate_midpoint,
    check_approximation,
    gh_bounds,
    gh_distance_exact,
    greedy_eps_net,
    hausdorff_distance,
    invert_approximation,
    rescale,
)
from .volume_comparison import (
    annulus_bound,
    bg_monotonicity_report,
    critical_separation,
    model_ball_volume,
    model_ball_volume_closed,
    myers_check,
    packing_multiplicity_bound,
    running_weighted_average,
    short_basis_bound,
    sphere_measure,
    spherical_cap_volume,
)
from .lattice_short_basis import (
    CoveringRadiusEstimate,
    Lattice,
    ShortBasis,
    count_vs_bound,
    filtration_check,
    hermite_normal_form,
    short_basis,
    torus_diameter,
    verify_geometry,
)
from .semiconcave_flow import (
    Branch,
    BusemannEval,
    GradientCurve,
    PiecewiseMinFunction,
    Ray,
    affine_branch,
    busemann_eval,
    contraction_report,
    directional_derivative,
    gradient,
    gradient_curve,
    gradient_inequality_check,
    lambda_concavity_check,
    load_function,
    min_xy,
    petrunin_report,
    quadratic_branch,
)
from .cones_products import (
    ConePoint,
    CurveFamily,
    center_of_mass,
    cone_apex,
    cone_distance,
    cone_metric,
    cone_transfer_probe,
    diagonal_distance_check,
    euclidean_segments,
    product_metric,
)

__version__ = "0.1.0"
