"""Affine stochastic volatility on the cone of positive semidefinite matrices.

The package couples three layers:

* an analytic layer that solves the generalised Riccati system for the
  joint Fourier-Laplace transform of (forward curve, variance matrix),
* a Monte Carlo layer that simulates the same dynamics by thinning the
  state-dependent jumps and exponential-Euler stepping the curve, and
* a verification layer that cross-checks the two against each other and
  against a closed form available when all jump intensities are constant.
"""

from .symcone import (
    HVector,
    PsdMatrix,
    SymMatrix,
    as_matrix,
    as_vector,
    frob_inner,
    min_eig,
    outer,
    project_psd,
    psd_sqrt,
)
from .jumpmeasure import (
    Atom,
    JumpMeasureSpec,
    VectorAtom,
    chi,
    kernel_K,
    truncate_ladder,
)
from .params import (
    AdmissibleParams,
    BOperator,
    NoiseSpec,
    ValidationReport,
    check_assumption_C,
    mu_compensator_terms,
    validate_assumption_A,
    validate_subordinator,
    verify_adjoint,
    zero_operator,
)
from .semigroup import (
    GeneratorSpec,
    apply_adjoint_semigroup,
    apply_semigroup,
    dense_generator,
    growth_bound,
    upwind_matrix,
    yosida,
)
from .riccati import (
    RiccatiInput,
    RiccatiSolution,
    RiccatiStepError,
    bns_closed_form,
    solve_psi1,
    solve_riccati,
    solve_riccati_ladder,
)
from .simulate import (
    MajorantOverflowError,
    MomentReport,
    PathBatch,
    PathSample,
    SimConfig,
    moment_check_X,
    simulate_X,
    simulate_Y,
    simulate_paths,
)
from .transform import (
    CompareReport,
    MCEstimate,
    TransformQuery,
    affine_value,
    compare,
    mc_transform,
)
from .presets import PRESET_NAMES, preset
from .serialize import (
    Scenario,
    batch_summary,
    dump_report,
    load_scenario,
    paths_csv,
    riccati_csv,
    scenario_from_dict,
)

__version__ = "0.1.0"

__all__ = [
    "HVector",
    "PsdMatrix",
    "SymMatrix",
    "as_matrix",
    "as_vector",
    "frob_inner",
    "min_eig",
    "outer",
    "project_psd",
    "psd_sqrt",
    "Atom",
    "JumpMeasureSpec",
    "VectorAtom",
    "chi",
    "kernel_K",
    "truncate_ladder",
    "AdmissibleParams",
    "BOperator",
    "NoiseSpec",
    "ValidationReport",
    "check_assumption_C",
    "mu_compensator_terms",
    "validate_assumption_A",
    "validate_subordinator",
    "verify_adjoint",
    "zero_operator",
    "GeneratorSpec",
    "apply_adjoint_semigroup",
    "apply_semigroup",
    "dense_generator",
    "growth_bound",
    "upwind_matrix",
    "yosida",
    "RiccatiInput",
    "RiccatiSolution",
    "RiccatiStepError",
    "bns_closed_form",
    "solve_psi1",
    "solve_riccati",
    "solve_riccati_ladder",
    "MajorantOverflowError",
    "MomentReport",
    "PathBatch",
    "PathSample",
    "SimConfig",
    "moment_check_X",
    "simulate_X",
    "simulate_Y",
    "simulate_paths",
    "CompareReport",
    "MCEstimate",
    "TransformQuery",
    "affine_value",
    "compare",
    "mc_transform",
    "PRESET_NAMES",
    "preset",
    "Scenario",
    "batch_summary",
    "dump_report",
    "load_scenario",
    "paths_csv",
    "riccati_csv",
    "scenario_from_dict",
    "__version__",
]
