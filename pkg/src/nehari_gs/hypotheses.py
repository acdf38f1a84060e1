"""Certify or refute the standing assumptions for a problem configuration.

Each assumption is sampled over a wide logarithmic range and reported as a
verdict: pass, fail with a concrete witness point (both sides of the
violated inequality evaluated), or pass with a warning where the theory
leaves a gap.  Nothing here is a proof; the checker estimates the
existential constants (delta, the asymptotic slope, the negative-part
norm) and flags configurations that visibly leave the admissible set.

Checked families:
  V1  radial symmetry (structural) and approach to a positive limit
  V2  |V^-|_{N/2} below the Sobolev constant S of D^{1,2} -> L^{2*}
  f1  f(0) = f'(0) = 0
  f2  f'(t) t^2 - f(t) t >= delta |t|^p with p in the dimension range
  f3  f(t) t / 4 - F(t) >= 0
  f4  f(t)/t^{p-1} -> m > 0
  r1  rho is C^4 (attested by finite differences for custom specs)
  r2  bounded derivatives up to order 4
  r3  bounded s rho'(s) rho''(s)
  r4  rho'(s) >= -sqrt(2) rho''(s) s >= 0
  r5  2 rho''(s) + rho'''(s) s <= 0
"""

from dataclasses import dataclass, field
from math import gamma, pi, sqrt
from typing import Optional

import numpy as np

from .grid import RadialGrid, lp_norm
from .model import (
    NonlinearitySpec,
    PotentialSpec,
    ProblemSpec,
    RhoSpec,
    eval_nonlinearity,
    eval_potential,
    eval_rho,
    potential_on_grid,
    rho_derivative_consistency,
)

__all__ = [
    "Witness",
    "Verdict",
    "HypothesisReport",
    "HypothesisFailure",
    "sobolev_constant",
    "check_potential",
    "check_nonlinearity",
    "check_rho",
    "check_problem",
]

SAMPLES_PER_DECADE = 400
SAMPLE_LO, SAMPLE_HI = 1e-6, 1e6
POWER_SHIFT_ALPHA_MIN = 1.0 - 1.0 / sqrt(2.0)


def _slack(rhs) -> float:
    return 1e-12 * (1.0 + abs(rhs))


def _log_samples() -> np.ndarray:
    n = int(round(np.log10(SAMPLE_HI / SAMPLE_LO))) * SAMPLES_PER_DECADE + 1
    return np.logspace(np.log10(SAMPLE_LO), np.log10(SAMPLE_HI), n)


@dataclass(frozen=True)
class Witness:
    point: float
    lhs: float
    rhs: float
    description: str

    def to_dict(self) -> dict:
        return {"point": self.point, "lhs": self.lhs, "rhs": self.rhs, "description": self.description}


@dataclass(frozen=True)
class Verdict:
    status: str  # "pass" | "fail" | "pass_with_warning"
    witness: Optional[Witness] = None
    note: str = ""

    def ok(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        d = {"status": self.status}
        if self.witness is not None:
            d["witness"] = self.witness.to_dict()
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class HypothesisReport:
    verdicts: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)

    def all_ok(self) -> bool:
        return all(v.ok() for v in self.verdicts.values())

    def failures(self) -> list:
        return [k for k, v in self.verdicts.items() if not v.ok()]

    def merge(self, other: "HypothesisReport") -> "HypothesisReport":
        self.verdicts.update(other.verdicts)
        self.constants.update(other.constants)
        return self

    def to_dict(self) -> dict:
        return {
            "all_pass": self.all_ok(),
            "verdicts": {k: v.to_dict() for k, v in sorted(self.verdicts.items())},
            "constants": dict(sorted(self.constants.items())),
        }


class HypothesisFailure(RuntimeError):
    """Raised when a solve is requested on a configuration that fails the checks."""

    def __init__(self, report: HypothesisReport):
        self.report = report
        super().__init__(f"hypothesis check failed: {', '.join(report.failures())}")


def sobolev_constant(dim: int) -> float:
    """Best constant of the embedding D^{1,2}(R^N) -> L^{2N/(N-2)}(R^N).

    Closed form pi N (N-2) (Gamma(N/2)/Gamma(N))^{2/N}; the extremal
    profile is the bubble (1 + r^2)^{-(N-2)/2}.
    """
    if dim < 3:
        raise ValueError("Sobolev constant needs dim >= 3")
    return pi * dim * (dim - 2) * (gamma(dim / 2.0) / gamma(float(dim))) ** (2.0 / dim)


# ---------------------------------------------------------------------------
# potential


def check_potential(spec: PotentialSpec, grid: RadialGrid) -> HypothesisReport:
    rep = HypothesisReport()

    # V1: radial by construction; verify the tail has settled at v_infinity
    tail_lo = int(0.95 * grid.n)
    tail_r = grid.nodes[tail_lo:]
    tail_v = np.asarray(eval_potential(spec, tail_r), dtype=float)
    dev = np.abs(tail_v - spec.v_infinity)
    tol = 1e-3 * spec.v_infinity
    worst = int(np.argmax(dev))
    if dev[worst] < tol:
        rep.verdicts["V1"] = Verdict("pass")
    else:
        rep.verdicts["V1"] = Verdict(
            "fail",
            Witness(float(tail_r[worst]), float(tail_v[worst]), spec.v_infinity,
                    "potential has not settled at its limit on the outer 5% of the grid"),
        )

    # V2: |V^-|_{N/2} < S on the solver quadrature
    v, substituted = potential_on_grid(spec, grid)
    vminus = np.maximum(-v, 0.0)
    norm_vminus = lp_norm(grid, vminus, grid.dim / 2.0)
    S = sobolev_constant(grid.dim)
    rep.constants["V_minus_norm_N_half"] = norm_vminus
    rep.constants["sobolev_S"] = S
    note = "origin value taken at half node" if substituted else ""
    if norm_vminus < S:
        rep.verdicts["V2"] = Verdict("pass", note=note)
    else:
        rep.verdicts["V2"] = Verdict(
            "fail",
            Witness(0.0, norm_vminus, S, "|V^-|_{N/2} is not below the Sobolev constant"),
            note=note,
        )
    return rep


# ---------------------------------------------------------------------------
# nonlinearity


def check_nonlinearity(spec: NonlinearitySpec, dim: int) -> HypothesisReport:
    rep = HypothesisReport()
    p = spec.p

    # f1: double zero at the origin
    f0, fp0, _ = eval_nonlinearity(spec, 0.0)
    if abs(f0) <= 1e-12 and abs(fp0) <= 1e-12:
        rep.verdicts["f1"] = Verdict("pass")
    else:
        which = "f(0)" if abs(f0) > 1e-12 else "f'(0)"
        rep.verdicts["f1"] = Verdict(
            "fail", Witness(0.0, f0 if abs(f0) > 1e-12 else fp0, 0.0, f"{which} must vanish")
        )

    pos = _log_samples()
    ts = np.concatenate([-pos[::-1], pos])
    f, fp, F = eval_nonlinearity(spec, ts)

    # f2: superquadratic gap with the declared exponent, plus the exponent range
    gap = (fp * ts**2 - f * ts) / np.abs(ts) ** p
    i_min = int(np.argmin(gap))
    delta_hat = float(gap[i_min])
    rep.constants["delta_hat"] = delta_hat
    f2_fail = None
    warn = ""
    if p <= 4:
        f2_fail = Witness(p, p, 4.0, "declared exponent p must exceed 4")
    elif dim > 4:
        cap = 2.0 * dim / (dim - 4.0)
        if p >= cap:
            f2_fail = Witness(p, p, cap, f"declared exponent p must stay below 2N/(N-4) = {cap:g} for N = {dim}")
    elif dim == 4:
        warn = "exponent upper bound for N = 4 is not settled; accepting any p > 4"
    if f2_fail is None and delta_hat <= 0:
        f2_fail = Witness(float(ts[i_min]), float(fp[i_min] * ts[i_min] ** 2 - f[i_min] * ts[i_min]),
                          0.0, "f'(t)t^2 - f(t)t fails to dominate |t|^p")
    if f2_fail is None:
        # a gap still shrinking at the edge of the sampled range has
        # infimum zero in the limit even though every sample is positive
        gap_pos = gap[ts > 0]
        edge = float(gap_pos[-1])
        inner = float(gap_pos[np.searchsorted(pos, SAMPLE_HI / 100.0)])
        if edge < 0.5 * inner:
            f2_fail = Witness(float(pos[-1]), edge, inner,
                              "f'(t)t^2 - f(t)t decays relative to |t|^p at large t")
    if f2_fail is None:
        # monotonicity of f(t)/t on t > 0 (consequence used downstream)
        ratio = f[ts > 0] / ts[ts > 0]
        diffs = np.diff(ratio)
        bad = np.where(diffs < -_slack(np.max(np.abs(ratio))))[0]
        if bad.size:
            k = int(bad[0])
            f2_fail = Witness(float(pos[k + 1]), float(ratio[k + 1]), float(ratio[k]),
                              "f(t)/t is not increasing on t > 0")
    rep.verdicts["f2"] = (
        Verdict("fail", f2_fail) if f2_fail is not None
        else (Verdict("pass_with_warning", note=warn) if warn else Verdict("pass"))
    )

    # f3: quarter inequality, checked at 0 and sampled t of both signs
    q = 0.25 * f * ts - F
    bad = np.where(q < -(1e-12 * (1.0 + np.abs(F))))[0]
    if bad.size:
        k = int(bad[0])
        rep.verdicts["f3"] = Verdict(
            "fail", Witness(float(ts[k]), float(0.25 * f[k] * ts[k]), float(F[k]),
                            "f(t)t/4 falls below F(t)")
        )
    else:
        rep.verdicts["f3"] = Verdict("pass")

    # f4: stabilization of f(T)/T^{p-1} over the top two decades
    top = pos[pos >= SAMPLE_HI / 100.0]
    f_top, _, _ = eval_nonlinearity(spec, top)
    ratio = f_top / top ** (p - 1.0)
    m_hat = float(ratio[-1])
    rep.constants["m_hat"] = m_hat
    spread = float(np.max(np.abs(ratio - m_hat)))
    if m_hat > 0 and spread <= 0.01 * max(abs(m_hat), 1e-300):
        rep.verdicts["f4"] = Verdict("pass")
    else:
        k = int(np.argmax(np.abs(ratio - m_hat)))
        rep.verdicts["f4"] = Verdict(
            "fail", Witness(float(top[k]), float(ratio[k]), m_hat,
                            "f(T)/T^{p-1} does not stabilize at a positive limit")
        )
    return rep


# ---------------------------------------------------------------------------
# rho


def _growth_fail(samples, vals, what) -> Optional[Witness]:
    """Flag unbounded growth: the last decade dwarfing a mid-range decade."""
    last = (samples >= SAMPLE_HI / 10.0)
    mid = (samples >= 1e2) & (samples <= 1e3)
    peak_last = float(np.max(vals[last]))
    peak_mid = float(np.max(vals[mid]))
    if peak_last > 10.0 * max(peak_mid, 1e-300):
        k = int(np.argmax(vals[last]))
        return Witness(float(samples[last][k]), peak_last, 10.0 * peak_mid,
                       f"{what} keeps growing with s; no finite bound is plausible")
    return None


def check_rho(spec: RhoSpec) -> HypothesisReport:
    rep = HypothesisReport()
    s = np.concatenate([[0.0], _log_samples()])

    # r1: smoothness
    if spec.kind == "custom":
        ok, worst = rho_derivative_consistency(spec)
        if ok:
            rep.verdicts["rho1"] = Verdict("pass", note="C^4 attested by finite-difference consistency")
        else:
            rep.verdicts["rho1"] = Verdict(
                "fail", Witness(0.0, worst, 1e-4, "derivative callables are mutually inconsistent")
            )
    else:
        rep.verdicts["rho1"] = Verdict("pass", note="closed-form family")

    d = {k: np.asarray(eval_rho(spec, s, k), dtype=float) for k in range(4 + 1)}

    # r2: bounded derivatives
    fail = None
    for i in range(1, 5):
        vals = np.abs(d[i])
        rep.constants[f"C{i}"] = float(np.max(vals))
        if fail is None:
            fail = _growth_fail(s, vals, f"|rho^({i})|")
    rep.verdicts["rho2"] = Verdict("fail", fail) if fail else Verdict("pass")

    # r3: bounded s rho' rho''
    vals3 = np.abs(s * d[1] * d[2])
    rep.constants["C5"] = float(np.max(vals3))
    fail = _growth_fail(s, vals3, "|s rho'(s) rho''(s)|")
    rep.verdicts["rho3"] = Verdict("fail", fail) if fail else Verdict("pass")

    # r4: rho' >= -sqrt(2) rho'' s >= 0
    fail = None
    mid = -np.sqrt(2.0) * d[2] * s
    bad = np.where(mid < -1e-12)[0]
    if bad.size:
        k = int(bad[0])
        fail = Witness(float(s[k]), float(mid[k]), 0.0, "rho'' must be nonpositive")
    if fail is None:
        lhs = d[1] - mid
        bad = np.where(lhs < -(1e-12 * (1.0 + np.abs(mid))))[0]
        if bad.size:
            k = int(bad[0])
            fail = Witness(float(s[k]), float(d[1][k]), float(mid[k]),
                           "rho' falls below -sqrt(2) rho'' s")
    if fail is None and spec.kind == "power_shift":
        # sharp closed-form criterion; sampling may miss violations beyond
        # the sampled range when alpha sits just below the threshold
        if spec.alpha < POWER_SHIFT_ALPHA_MIN:
            s_w = 2.0 / (np.sqrt(2.0) * (1.0 - spec.alpha) - 1.0)
            fail = Witness(float(s_w), float(eval_rho(spec, s_w, 1)),
                           float(-np.sqrt(2.0) * eval_rho(spec, s_w, 2) * s_w),
                           "rho' falls below -sqrt(2) rho'' s (closed-form witness)")
        elif spec.alpha > 1.0:
            fail = Witness(1.0, float(eval_rho(spec, 1.0, 2)), 0.0, "rho'' must be nonpositive")
    rep.verdicts["rho4"] = Verdict("fail", fail) if fail else Verdict("pass")

    # r5: 2 rho'' + rho''' s <= 0
    expr = 2.0 * d[2] + d[3] * s
    bad = np.where(expr > 1e-12)[0]
    if bad.size:
        k = int(bad[0])
        rep.verdicts["rho5"] = Verdict(
            "fail", Witness(float(s[k]), float(expr[k]), 0.0, "2 rho'' + rho''' s must be nonpositive")
        )
    else:
        rep.verdicts["rho5"] = Verdict("pass")
    return rep


# ---------------------------------------------------------------------------
# whole problem


def check_problem(spec: ProblemSpec, grid: RadialGrid) -> HypothesisReport:
    """Run every check for the configuration; verdicts merged into one report."""
    rep = HypothesisReport()
    rep.merge(check_potential(spec.potential, grid))
    rep.merge(check_nonlinearity(spec.nonlinearity, spec.dim))
    rep.merge(check_rho(spec.rho))
    return rep
