"""Command-line front end: check / solve / sweep driven by a TOML config.

Exit codes
----------
0   success (all hypotheses pass; solve certified)
1   unusable config or arguments
2   hypothesis check failed (and, for solve/sweep, --force not given)
3   solve finished without certification (stagnation or a failed
    certificate item)

All outputs are plain text: comma-separated tables and JSON records.
Identical config and seed produce bit-identical files on one platform.
"""

import argparse
import json
import sys
from pathlib import Path


from . import __version__
from .backend import backend_name
from .fibering import fibering_table
from .grid import apply_laplacian, build_grid, radial_derivative
from .hypotheses import check_problem
from .model import NonlinearitySpec, PotentialSpec, ProblemSpec, RhoSpec
from .solver import SolverOptions, lambda_sweep, solve_ground_state

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config schema

_SOLVER_KEYS = {
    "max_iters": int,
    "grad_tol": float,
    "nehari_tol": float,
    "armijo_init": float,
    "armijo_shrink": float,
    "armijo_slope": float,
    "sigmas": list,
    "amplitudes": list,
    "seed": int,
    "start_perturbation": float,
    "precondition": bool,
    "min_step": float,
}

_POTENTIAL_KEYS = {"family", "v_infinity", "c", "alpha", "cutoff", "radii", "values"}
_NONLINEARITY_KEYS = {"family", "m", "p"}
_RHO_KEYS = {"family", "a", "b", "alpha"}
_OUTPUT_KEYS = {"directory", "write_fibering"}


def _require(block: dict, key: str, path: str):
    if key not in block:
        raise ConfigError(f"missing required key '{path}.{key}'")
    return block[key]


def _reject_unknown(block: dict, allowed, path: str):
    for key in block:
        if key not in allowed:
            raise ConfigError(f"unknown key '{path}.{key}'")


def _parse_potential(block: dict) -> PotentialSpec:
    _reject_unknown(block, _POTENTIAL_KEYS, "problem.potential")
    family = _require(block, "family", "problem.potential")
    v_inf = float(_require(block, "v_infinity", "problem.potential"))
    if family == "constant":
        return PotentialSpec.constant(v_inf)
    if family == "inverse_power":
        return PotentialSpec.inverse_power(
            v_inf,
            float(_require(block, "c", "problem.potential")),
            float(_require(block, "alpha", "problem.potential")),
            float(_require(block, "cutoff", "problem.potential")),
        )
    if family == "tabulated":
        return PotentialSpec.tabulated(
            v_inf,
            _require(block, "radii", "problem.potential"),
            _require(block, "values", "problem.potential"),
        )
    raise ConfigError(f"unknown potential family '{family}'")


def _parse_nonlinearity(block: dict) -> NonlinearitySpec:
    _reject_unknown(block, _NONLINEARITY_KEYS, "problem.nonlinearity")
    family = _require(block, "family", "problem.nonlinearity")
    if family != "power":
        raise ConfigError(f"unknown nonlinearity family '{family}' (config supports 'power')")
    return NonlinearitySpec.power(
        float(_require(block, "m", "problem.nonlinearity")),
        float(_require(block, "p", "problem.nonlinearity")),
    )


def _parse_rho(block: dict) -> RhoSpec:
    _reject_unknown(block, _RHO_KEYS, "problem.rho")
    family = _require(block, "family", "problem.rho")
    if family == "affine":
        return RhoSpec.affine(float(block.get("a", 0.0)), float(block.get("b", 0.0)))
    if family == "sqrt_shift":
        return RhoSpec.sqrt_shift()
    if family == "affine_plus_sqrt":
        return RhoSpec.affine_plus_sqrt(float(block.get("a", 0.0)), float(block.get("b", 0.0)))
    if family == "power_shift":
        return RhoSpec.power_shift(float(_require(block, "alpha", "problem.rho")))
    raise ConfigError(f"unknown rho family '{family}'")


def load_config(path: str, seed_override=None):
    """Parse a TOML run configuration into the library objects."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    _reject_unknown(raw, {"problem", "grid", "solver", "output"}, "top level")
    problem = raw.get("problem")
    if problem is None:
        raise ConfigError("missing required block [problem]")
    _reject_unknown(problem, {"dim", "lambda", "potential", "nonlinearity", "rho"}, "problem")

    dim = int(_require(problem, "dim", "problem"))
    lam = float(_require(problem, "lambda", "problem"))
    potential = _parse_potential(_require(problem, "potential", "problem"))
    nonlinearity = _parse_nonlinearity(_require(problem, "nonlinearity", "problem"))
    rho = _parse_rho(_require(problem, "rho", "problem"))
    try:
        spec = ProblemSpec(dim=dim, lam=lam, potential=potential, nonlinearity=nonlinearity, rho=rho)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    grid_block = raw.get("grid")
    if grid_block is None:
        raise ConfigError("missing required block [grid]")
    _reject_unknown(grid_block, {"r_max", "n"}, "grid")
    try:
        grid = build_grid(
            dim,
            float(_require(grid_block, "r_max", "grid")),
            int(_require(grid_block, "n", "grid")),
            allow_high_dim=(lam == 0.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    solver_block = dict(raw.get("solver", {}))
    _reject_unknown(solver_block, set(_SOLVER_KEYS), "solver")
    kwargs = {}
    for key, caster in _SOLVER_KEYS.items():
        if key in solver_block:
            value = solver_block[key]
            kwargs[key] = [float(x) for x in value] if caster is list else caster(value)
    if seed_override is not None:
        kwargs["seed"] = int(seed_override)
    try:
        opts = SolverOptions(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    output_block = dict(raw.get("output", {}))
    _reject_unknown(output_block, _OUTPUT_KEYS, "output")
    output = {
        "directory": str(output_block.get("directory", "out")),
        "write_fibering": bool(output_block.get("write_fibering", False)),
    }
    return spec, grid, opts, output


# ---------------------------------------------------------------------------
# writers


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_solution_table(path: Path, grid, u):
    du = radial_derivative(grid, u)
    lap = apply_laplacian(grid, u)
    lines = ["r,u,du/dr,laplacian_u"]
    for i in range(grid.n):
        lines.append(",".join(_fmt(x) for x in (grid.nodes[i], u[i], du[i], lap[i])))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_fibering_table(path: Path, grid, spec, u):
    ts, g, gp = fibering_table(grid, spec, u)
    lines = ["t,g,g_prime"]
    for k in range(ts.size):
        lines.append(",".join(_fmt(x) for x in (ts[k], g[k], gp[k])))
    path.write_text("\n".join(lines) + "\n")


def _diagnostics_payload(spec, grid, result, hypothesis_report):
    return {
        "backend": backend_name(),
        "dim": spec.dim,
        "lambda": spec.lam,
        "grid": {"r_max": grid.r_max, "n": grid.n, "h": grid.h},
        "energy_m": result.energy_m,
        "norm_V_sq": result.norm_V_sq,
        "nehari_residual": result.nehari_residual,
        "grad_residual": result.grad_residual,
        "energy_breakdown": result.breakdown.to_dict(),
        "iterations": result.iterations,
        "start_energies": result.start_energies,
        "start_index": result.start_index,
        "stagnation": result.stagnation,
        "field_min": result.field_min,
        "field_max": result.field_max,
        "energy_history": result.energy_history,
        "solution_certificate": result.certificate,
        "hypothesis_certificate": hypothesis_report.to_dict(),
        "hypothesis_override": result.hypothesis_override,
        "warnings": result.warnings,
    }


def _solve_into(outdir: Path, spec, grid, opts, output_cfg, force: bool):
    """Run the gate + solve and write artifacts; returns an exit code."""
    report = check_problem(spec, grid)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_json(outdir / "certificate.json", report.to_dict())
    if not report.all_ok() and not force:
        print(f"hypothesis check failed ({', '.join(report.failures())}); "
              "use --force to solve anyway", file=sys.stderr)
        return 2

    result = solve_ground_state(grid, spec, opts, check_hypotheses=False)
    result.hypothesis_override = not report.all_ok()
    if result.hypothesis_override:
        result.certificate["hypothesis_override"] = True

    _write_solution_table(outdir / "solution.csv", grid, result.field)
    _write_json(outdir / "diagnostics.json", _diagnostics_payload(spec, grid, result, report))
    if output_cfg["write_fibering"]:
        _write_fibering_table(outdir / "fibering.csv", grid, spec, result.field)

    certified = result.certificate["all_pass"] and not result.stagnation
    print(f"energy_m = {result.energy_m:.12g}  grad_residual = {result.grad_residual:.3e}  "
          f"certified = {certified}")
    return 0 if certified else 3


# ---------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    spec, grid, _, output_cfg = load_config(args.config, args.seed)
    outdir = Path(args.out or output_cfg["directory"])
    outdir.mkdir(parents=True, exist_ok=True)
    report = check_problem(spec, grid)
    _write_json(outdir / "certificate.json", report.to_dict())
    for name, verdict in sorted(report.verdicts.items()):
        line = f"{name}: {verdict.status}"
        if verdict.witness is not None:
            w = verdict.witness
            line += f"  [witness at {w.point:g}: lhs={w.lhs:g}, rhs={w.rhs:g}; {w.description}]"
        print(line)
    return 0 if report.all_ok() else 2


def cmd_solve(args) -> int:
    spec, grid, opts, output_cfg = load_config(args.config, args.seed)
    outdir = Path(args.out or output_cfg["directory"])
    return _solve_into(outdir, spec, grid, opts, output_cfg, args.force)


def cmd_sweep(args) -> int:
    spec, grid, opts, output_cfg = load_config(args.config, args.seed)
    try:
        lambdas = [float(x) for x in args.lambdas.split(",") if x.strip() != ""]
    except ValueError:
        print(f"cannot parse --lambdas '{args.lambdas}'", file=sys.stderr)
        return 1
    if not lambdas:
        print("--lambdas list is empty", file=sys.stderr)
        return 1
    if any(x < 0 for x in lambdas) or any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        print("--lambdas must be nonnegative and strictly ascending", file=sys.stderr)
        return 1
    if max(lambdas) > 0 and spec.dim > 6:
        print("dim > 6 requires every lambda to be 0", file=sys.stderr)
        return 1

    outdir = Path(args.out or output_cfg["directory"])
    outdir.mkdir(parents=True, exist_ok=True)

    report = check_problem(spec, grid)
    _write_json(outdir / "certificate.json", report.to_dict())
    if not report.all_ok() and not args.force:
        print(f"hypothesis check failed ({', '.join(report.failures())}); "
              "use --force to sweep anyway", file=sys.stderr)
        return 2

    rows = ["lambda,energy_m,norm_V_sq,nehari_residual,status"]
    all_certified = True
    entries = lambda_sweep(grid, spec, lambdas, opts, check_hypotheses=False, force=args.force)
    for idx, entry in enumerate(entries):
        subdir = outdir / f"lambda_{idx:02d}"
        subdir.mkdir(parents=True, exist_ok=True)
        if entry.result is None:
            rows.append(f"{_fmt(entry.lam)},nan,nan,nan,error")
            (subdir / "error.txt").write_text(entry.error + "\n")
            all_certified = False
            continue
        res = entry.result
        spec_l = spec.with_lam(entry.lam)
        _write_solution_table(subdir / "solution.csv", grid, res.field)
        _write_json(subdir / "diagnostics.json", _diagnostics_payload(spec_l, grid, res, report))
        if output_cfg["write_fibering"]:
            _write_fibering_table(subdir / "fibering.csv", grid, spec_l, res.field)
        certified = res.certificate["all_pass"] and not res.stagnation
        all_certified = all_certified and certified
        rows.append(
            f"{_fmt(entry.lam)},{_fmt(res.energy_m)},{_fmt(res.norm_V_sq)},"
            f"{_fmt(res.nehari_residual)},{'certified' if certified else 'uncertified'}"
        )
        print(f"lambda={entry.lam:g}: energy_m={res.energy_m:.12g} certified={certified}")
    (outdir / "branch_summary.csv").write_text("\n".join(rows) + "\n")
    return 0 if all_certified else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nehari-gs",
        description="Radial ground states of fourth-order quasilinear elliptic equations",
        epilog=(
            "exit codes: 0 success; 1 config/usage error; 2 hypothesis check failed; "
            "3 solve not certified (stagnation or failed certificate item)"
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="path to the TOML run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides [output].directory)")
        p.add_argument("--seed", type=int, default=None, help="override [solver].seed")

    p_check = sub.add_parser("check", help="certify the hypotheses for a configuration")
    common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_solve = sub.add_parser("solve", help="compute a ground-state candidate")
    common(p_solve)
    p_solve.add_argument("--force", action="store_true", help="solve even if the hypothesis check fails")
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="solve along an ascending list of couplings")
    common(p_sweep)
    p_sweep.add_argument("--force", action="store_true", help="sweep even if the hypothesis check fails")
    p_sweep.add_argument("--lambdas", required=True, help="comma-separated ascending couplings, e.g. 0,0.5,1")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
