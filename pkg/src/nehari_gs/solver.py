"""Ground-state search: projected descent on the Nehari set with multi-start.

Each start is projected onto the manifold and then driven downhill: take
the (optionally preconditioned) gradient of the discrete energy, backtrack
along u - s*d with the Armijo test applied to the re-projected trial, and
re-project every accepted iterate.  The recorded energies are therefore
non-increasing by construction, and at convergence the iterate is a
near-critical point of the free energy (the manifold multiplier vanishes
at critical points), realizing a minimizing sequence whose energies settle
while the gradient norm drops below tolerance.

The returned minimizer is the best local one over the start set; global
optimality is not certified, and the per-start energies are kept so the
spread is visible.
"""

import warnings
from dataclasses import dataclass, field as dc_field, replace
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .energy import EnergyBreakdown, _get_model
from .fibering import ProjectionError, project_to_nehari
from .grid import RadialGrid, tail_decay_ok
from .hypotheses import HypothesisFailure, check_problem
from .model import ProblemSpec, eval_nonlinearity

__all__ = [
    "SolverOptions",
    "SolveResult",
    "SweepEntry",
    "solve_ground_state",
    "verify_solution",
    "lambda_sweep",
    "default_starts",
]

_FIELD_FLOOR = 1e-12


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances, line-search constants and the start set."""

    max_iters: int = 5000
    grad_tol: float = 1e-7          # nodal sup of the discrete-energy gradient
    nehari_tol: float = 1e-8        # |constraint| relative to the squared V-norm
    armijo_init: float = 1.0
    armijo_shrink: float = 0.5
    armijo_slope: float = 1e-4
    sigmas: Sequence[float] = (0.5, 1.0, 2.0, 4.0)
    amplitudes: Sequence[float] = (1.0, 4.0)
    starts: Optional[Sequence] = None   # explicit start fields, bypass Gaussians
    seed: int = 0
    start_perturbation: float = 0.0
    precondition: bool = True
    min_step: float = 1e-12

    def __post_init__(self):
        if self.grad_tol <= 0 or self.nehari_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        has_gaussians = len(self.sigmas) > 0 and len(self.amplitudes) > 0
        has_explicit = self.starts is not None and len(self.starts) > 0
        if not (has_gaussians or has_explicit):
            raise ValueError("need at least one start")


@dataclass
class SolveResult:
    """Candidate ground state and its certificate."""

    field: np.ndarray
    energy_m: float
    norm_V_sq: float
    nehari_residual: float
    grad_residual: float
    iterations: list
    start_energies: list
    start_index: int
    certificate: dict
    stagnation: bool
    energy_history: list
    breakdown: EnergyBreakdown
    field_min: float
    field_max: float
    hypothesis_override: bool = False
    warnings: list = dc_field(default_factory=list)


def default_starts(grid: RadialGrid, opts: SolverOptions) -> list:
    """Gaussian bumps exp(-(r/sigma)^2) over the configured widths/amplitudes."""
    if opts.starts is not None and len(opts.starts) > 0:
        starts = [np.array(s, dtype=float) for s in opts.starts]
    else:
        starts = []
        for sigma in opts.sigmas:
            for amp in opts.amplitudes:
                u = amp * np.exp(-((grid.nodes / sigma) ** 2))
                starts.append(u)
    rng = np.random.default_rng(opts.seed)
    out = []
    for u in starts:
        u = u.copy()
        if opts.start_perturbation > 0:
            scale = opts.start_perturbation * float(np.max(np.abs(u)))
            coeffs = rng.standard_normal(3)
            bump = sum(
                c * np.cos((k + 1) * np.pi * grid.nodes / grid.r_max) for k, c in enumerate(coeffs)
            )
            u = u + scale * bump * np.exp(-((grid.nodes / grid.r_max) ** 2) * 4.0)
        u[-1] = 0.0
        out.append(u)
    return out


def _build_preconditioner(model):
    """SPD surrogate of the quadratic form: Lt W L + Dt W D + W V^+, Dirichlet at r_max."""
    grid = model.grid
    w = sp.diags(model.w)
    K = (
        grid._lap_t @ w @ grid._lap
        + grid._diff_t @ w @ grid._diff
        + sp.diags(model.w * np.maximum(model.v, 0.0))
    ).tolil()
    K[-1, :] = 0.0
    K[:, -1] = 0.0
    K[-1, -1] = 1.0
    K = K.tocsc()
    shift = 1e-12 * float(np.max(np.abs(K.diagonal())))
    K = K + shift * sp.identity(grid.n, format="csc")
    return spla.splu(K)


def _direction(model, g, lu):
    if lu is not None:
        d = lu.solve(g)
        d[-1] = 0.0
        slope = float(np.dot(g, d))
        if np.isfinite(slope) and slope > 0.0:
            return d, slope
    return g, float(np.dot(g, g))


def _project_step(grid, spec, u, d, s):
    trial = u - s * d
    trial[-1] = 0.0
    if float(np.max(np.abs(trial))) <= _FIELD_FLOOR:
        return None
    try:
        tfield, _ = project_to_nehari(grid, spec, trial)
    except ProjectionError:
        return None
    return tfield


def _descend(grid, spec, model, u0, opts, lu):
    """One start: project, then Armijo descent with re-projection.

    Phase 1 backtracks on the energy of the re-projected trial.  Once the
    achievable energy decrease drops below floating-point resolution the
    energy test cannot certify progress anymore, so phase 2 keeps stepping
    while the gradient sup-norm measurably shrinks (energies there agree
    to roundoff; only phase-1 energies are recorded).
    """
    u, _ = project_to_nehari(grid, spec, u0)
    E = model.parts(u).total
    history = [E]
    stagnated = False
    iters = 0
    gsup = np.inf
    while iters < opts.max_iters:
        g = model.grad(u)
        gsup = float(np.max(np.abs(g)))
        if gsup <= opts.grad_tol:
            return u, E, iters, history, False
        iters += 1
        d, slope = _direction(model, g, lu)
        s = opts.armijo_init
        accepted = False
        while s >= opts.min_step:
            tfield = _project_step(grid, spec, u, d, s)
            if tfield is not None:
                Et = model.parts(tfield).total
                if Et <= E - opts.armijo_slope * s * slope:
                    accepted = True
                    break
            s *= opts.armijo_shrink
        if not accepted:
            break
        u, E = tfield, Et
        history.append(E)

    # gradient polish; quits as soon as no step shrinks the gradient
    s = opts.armijo_init
    while iters < opts.max_iters:
        g = model.grad(u)
        gsup = float(np.max(np.abs(g)))
        if gsup <= opts.grad_tol:
            break
        iters += 1
        d, _ = _direction(model, g, lu)
        accepted = False
        while s >= opts.min_step:
            tfield = _project_step(grid, spec, u, d, s)
            if tfield is not None:
                gt = float(np.max(np.abs(model.grad(tfield))))
                if gt < gsup * (1.0 - 1e-3 * s):
                    u = tfield
                    accepted = True
                    s = min(opts.armijo_init, 2.0 * s)
                    break
            s *= opts.armijo_shrink
        if not accepted:
            stagnated = True
            break
    E = model.parts(u).total
    if not history or E < history[-1]:
        history.append(E)
    return u, E, iters, history, stagnated


def solve_ground_state(
    grid: RadialGrid,
    spec: ProblemSpec,
    opts: Optional[SolverOptions] = None,
    *,
    check_hypotheses: bool = True,
    force: bool = False,
) -> SolveResult:
    """Minimize the energy over the Nehari set from every configured start.

    Runs the hypothesis checker first unless check_hypotheses=False; a
    failing report raises HypothesisFailure unless force=True, in which
    case the override is recorded on the result.
    """
    opts = opts or SolverOptions()
    override = False
    if check_hypotheses:
        report = check_problem(spec, grid)
        if not report.all_ok():
            if not force:
                raise HypothesisFailure(report)
            override = True

    model = _get_model(grid, spec)
    lu = _build_preconditioner(model) if opts.precondition else None

    starts = default_starts(grid, opts)
    outcomes = []
    for u0 in starts:
        try:
            outcomes.append(_descend(grid, spec, model, u0, opts, lu))
        except (ProjectionError, ValueError) as exc:
            outcomes.append((None, np.inf, 0, [], True, exc))

    energies = [o[1] for o in outcomes]
    if not np.isfinite(energies).any():
        raise ProjectionError("all starts failed to project; the configuration is degenerate")
    winner = int(np.argmin(energies))
    u, E, iters, history, stagnated = outcomes[winner][:5]

    nv = model.norm_v_sq(u)
    nres = abs(model.nehari(u)) / max(1.0, nv)
    gres = float(np.max(np.abs(model.grad(u))))
    breakdown = model.parts(u)

    decay_ok, decay_ratio = tail_decay_ok(grid, u)
    notes = []
    if not decay_ok:
        msg = (
            f"field has not decayed near r_max (tail ratio {decay_ratio:.2e}); "
            "consider a larger r_max"
        )
        warnings.warn(msg)
        notes.append(msg)

    result = SolveResult(
        field=u,
        energy_m=E,
        norm_V_sq=nv,
        nehari_residual=nres,
        grad_residual=gres,
        iterations=[o[2] for o in outcomes],
        start_energies=[float(e) for e in energies],
        start_index=winner,
        certificate={},
        stagnation=bool(stagnated),
        energy_history=history,
        breakdown=breakdown,
        field_min=float(np.min(u)),
        field_max=float(np.max(u)),
        hypothesis_override=override,
        warnings=notes,
    )
    result.certificate = verify_solution(grid, spec, result, opts)
    return result


def verify_solution(grid, spec, result: SolveResult, opts: Optional[SolverOptions] = None) -> dict:
    """Solution-level certificate; failures are recorded, never raised.

    Items: (a) manifold residual, (b) gradient sup-norm, (c) energy at
    least a quarter of the squared V-norm, (d) squared V-norm dominated by
    int f(u)u, (e) negative manifold slope, (f) positive energy, (g) tail
    decay audit.
    """
    opts = opts or SolverOptions()
    model = _get_model(grid, spec)
    u = result.field
    nv = model.norm_v_sq(u)
    items = {}

    nres = abs(model.nehari(u)) / max(1.0, nv)
    items["a_nehari_residual"] = {"pass": bool(nres <= opts.nehari_tol), "value": nres, "tol": opts.nehari_tol}

    gres = float(np.max(np.abs(model.grad(u))))
    items["b_gradient_sup"] = {"pass": bool(gres <= opts.grad_tol), "value": gres, "tol": opts.grad_tol}

    E = model.parts(u).total
    items["c_energy_floor"] = {
        "pass": bool(E >= 0.25 * nv - 1e-10),
        "value": E,
        "floor": 0.25 * nv,
    }

    f_vals, _, _ = eval_nonlinearity(model.spec.nonlinearity, u)
    rhs = float(np.dot(grid.quad_weights, f_vals * u))
    items["d_nehari_inequality"] = {
        "pass": bool(nv <= rhs + 1e-8 * max(1.0, abs(rhs))),
        "value": nv,
        "bound": rhs,
    }

    slope = model.nehari_slope(u)
    items["e_manifold_slope"] = {"pass": bool(slope < 0.0), "value": slope}

    items["f_energy_positive"] = {"pass": bool(E > 0.0), "value": E}

    ok, ratio = tail_decay_ok(grid, u)
    items["g_decay_audit"] = {"pass": bool(ok), "tail_ratio": ratio}

    items["all_pass"] = all(v["pass"] for k, v in items.items() if isinstance(v, dict))
    return items


@dataclass
class SweepEntry:
    lam: float
    result: Optional[SolveResult]
    error: str = ""


def lambda_sweep(
    grid: RadialGrid,
    spec: ProblemSpec,
    lambdas: Sequence[float],
    opts: Optional[SolverOptions] = None,
    *,
    check_hypotheses: bool = True,
    force: bool = False,
) -> list:
    """Solve for each coupling in ascending order with warm starts.

    The previous minimizer joins the start list of the next coupling.
    Per-coupling failures are recorded and the sweep continues.
    """
    lambdas = [float(x) for x in lambdas]
    if any(x < 0 for x in lambdas):
        raise ValueError("couplings must be >= 0")
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("couplings must be strictly ascending")
    opts = opts or SolverOptions()

    if check_hypotheses:
        report = check_problem(spec, grid)
        if not report.all_ok() and not force:
            raise HypothesisFailure(report)

    entries = []
    prev_field = None
    for lam in lambdas:
        spec_l = spec.with_lam(lam)
        base = default_starts(grid, opts)
        if prev_field is not None:
            base = base + [prev_field.copy()]
        opts_l = replace(opts, starts=base)
        try:
            res = solve_ground_state(
                grid, spec_l, opts_l, check_hypotheses=False, force=force
            )
            entries.append(SweepEntry(lam=lam, result=res))
            prev_field = res.field
        except (ProjectionError, ValueError) as exc:
            entries.append(SweepEntry(lam=lam, result=None, error=str(exc)))
    return entries
