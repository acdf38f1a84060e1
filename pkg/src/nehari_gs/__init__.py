"""Radial ground states of fourth-order quasilinear elliptic equations.

The library discretizes radially symmetric fields on a truncated interval,
evaluates the associated constrained energy, certifies the standing
assumptions of the underlying existence theory for a given configuration,
and minimizes the energy over the Nehari set by projected descent.
"""

from .backend import backend_name
from .energy import (
    EnergyBreakdown,
    diagnostic_inequalities,
    energy,
    gradient,
    nehari_slope,
    nehari_value,
    norm_V_sq,
    phi_term,
)
from .fibering import (
    FiberingReport,
    ProjectionError,
    fibering_map,
    fibering_table,
    project_to_nehari,
)
from .grid import (
    RadialGrid,
    apply_bilaplacian,
    apply_laplacian,
    build_grid,
    integrate,
    lp_norm,
    radial_derivative,
    tail_decay_ok,
    unit_sphere_area,
)
from .hypotheses import (
    HypothesisFailure,
    HypothesisReport,
    Verdict,
    Witness,
    check_nonlinearity,
    check_potential,
    check_problem,
    check_rho,
    sobolev_constant,
)
from .model import (
    NonlinearitySpec,
    PotentialSpec,
    ProblemSpec,
    RhoSpec,
    eval_nonlinearity,
    eval_potential,
    eval_rho,
    potential_on_grid,
    potential_split,
)
from .solver import (
    SolveResult,
    SolverOptions,
    SweepEntry,
    default_starts,
    lambda_sweep,
    solve_ground_state,
    verify_solution,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "EnergyBreakdown",
    "diagnostic_inequalities",
    "energy",
    "gradient",
    "nehari_slope",
    "nehari_value",
    "norm_V_sq",
    "phi_term",
    "FiberingReport",
    "ProjectionError",
    "fibering_map",
    "fibering_table",
    "project_to_nehari",
    "RadialGrid",
    "apply_bilaplacian",
    "apply_laplacian",
    "build_grid",
    "integrate",
    "lp_norm",
    "radial_derivative",
    "tail_decay_ok",
    "unit_sphere_area",
    "HypothesisFailure",
    "HypothesisReport",
    "Verdict",
    "Witness",
    "check_nonlinearity",
    "check_potential",
    "check_problem",
    "check_rho",
    "sobolev_constant",
    "NonlinearitySpec",
    "PotentialSpec",
    "ProblemSpec",
    "RhoSpec",
    "eval_nonlinearity",
    "eval_potential",
    "eval_rho",
    "potential_on_grid",
    "potential_split",
    "SolveResult",
    "SolverOptions",
    "SweepEntry",
    "default_starts",
    "lambda_sweep",
    "solve_ground_state",
    "verify_solution",
    "__version__",
]
