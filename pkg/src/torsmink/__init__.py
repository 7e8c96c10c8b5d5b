"""Anisotropic torsional rigidity of convex polygons and the associated
prescribed-measure (Minkowski-type) inverse problems."""

from .errors import (
    EmptyInteriorError,
    FacetDeathError,
    InvalidExponentError,
    InvalidInputError,
    MassInequalityError,
    MeasureValidationError,
    NonConvergenceError,
    NormDomainError,
    OriginNotInteriorError,
    ToolError,
    UnboundedRegionError,
)
from .geometry import (
    BodyMetrics,
    DiscreteMeasure,
    Polytope2,
    body_metrics,
    general_position_check,
    hausdorff_distance,
    hemisphere_check,
    polytope_from_halfspaces,
    polytope_from_vertices,
    regular_polygon,
    box_polytope,
    scale_polytope,
    support_function,
    translate_polytope,
)
from .norms import (
    AnisotropicNorm,
    NormAxiomReport,
    check_norm_axioms,
    dual_norm_value,
    euclidean,
    lq,
    norm_gradient,
    norm_value,
    smoothed_l1,
    wulff_shape,
)
from .fem import (
    Mesh,
    SolverConfig,
    TorsionSolution,
    boundary_gradient_trace,
    solve_body,
    solve_torsion_pde,
    triangulate,
)
from .torsion import (
    TorsionReport,
    cone_measure,
    facet_measure,
    log_variational_check,
    pohozaev_residual,
    saint_venant_check,
    torsion_boundary,
    torsion_energy,
    torsion_report,
    torsion_volume,
    variational_derivative_check,
)
from .minkowski import (
    MeasureValidation,
    MinkowskiConfig,
    MinkowskiRun,
    measure_residual,
    objective_psi,
    solve_minkowski,
    validate_measure_classical,
)
from .logmink import (
    DensitySpec,
    LogMinkowskiRun,
    cauchy_distances,
    discretize_measure,
    inner_maximizer_eta,
    objective_log,
    solve_log_minkowski,
    solve_log_minkowski_general,
    subspace_mass_check,
)
from .errors import DirectionMismatchError, InnerMaximizerError

__version__ = "0.1.0"
