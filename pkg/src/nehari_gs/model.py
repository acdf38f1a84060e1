"""Problem data: potential V, nonlinearity f and smoothing function rho.

The equation being solved is

    Lap^2 u - Lap u + V(|x|) u - lam * Lap[rho(u^2)] rho'(u^2) u = f(u)

on R^N, truncated to a radial grid.  Every ingredient enters as an
immutable spec object that can be evaluated pointwise; the built-in
families have closed-form derivatives, custom ones supply callables.
No symbolic differentiation happens anywhere.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

__all__ = [
    "PotentialSpec",
    "NonlinearitySpec",
    "RhoSpec",
    "ProblemSpec",
    "eval_potential",
    "potential_split",
    "potential_on_grid",
    "eval_nonlinearity",
    "eval_rho",
    "rho_products_coded",
    "RHO_AFFINE",
    "RHO_SQRT_SHIFT",
    "RHO_AFFINE_PLUS_SQRT",
    "RHO_POWER_SHIFT",
]

# integer codes shared with the compiled scan kernel
RHO_AFFINE = 0
RHO_SQRT_SHIFT = 1
RHO_AFFINE_PLUS_SQRT = 2
RHO_POWER_SHIFT = 3


# ---------------------------------------------------------------------------
# potential


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """Radial potential with positive limit v_infinity at infinity.

    Profiles: constant, inverse_power (V_inf - c r^{-alpha} up to a cutoff
    radius, possibly unbounded below at the origin), tabulated values, or a
    custom callable.
    """

    v_infinity: float
    kind: str
    c: float = 0.0
    alpha: float = 0.0
    cutoff: float = 0.0
    radii: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    func: Optional[Callable] = None

    def __post_init__(self):
        if not self.v_infinity > 0:
            raise ValueError("v_infinity must be positive")
        if self.kind not in ("constant", "inverse_power", "tabulated", "custom"):
            raise ValueError(f"unknown potential profile {self.kind!r}")
        if self.kind == "inverse_power":
            if not self.c > 0:
                raise ValueError("inverse_power needs c > 0")
            if not 0 < self.alpha < 2:
                raise ValueError("inverse_power needs alpha in (0, 2)")
            if not self.cutoff > 0:
                raise ValueError("inverse_power needs cutoff > 0")

    @staticmethod
    def constant(v_infinity: float) -> "PotentialSpec":
        return PotentialSpec(v_infinity=v_infinity, kind="constant")

    @staticmethod
    def inverse_power(v_infinity: float, c: float, alpha: float, cutoff: float) -> "PotentialSpec":
        return PotentialSpec(v_infinity=v_infinity, kind="inverse_power", c=c, alpha=alpha, cutoff=cutoff)

    @staticmethod
    def tabulated(v_infinity: float, radii, values) -> "PotentialSpec":
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if radii.ndim != 1 or radii.shape != values.shape or radii.size < 2:
            raise ValueError("tabulated profile needs matching 1-D radii/values, >= 2 points")
        if np.any(np.diff(radii) <= 0):
            raise ValueError("tabulated radii must be strictly increasing")
        return PotentialSpec(v_infinity=v_infinity, kind="tabulated", radii=radii, values=values)

    @staticmethod
    def custom(v_infinity: float, func: Callable) -> "PotentialSpec":
        return PotentialSpec(v_infinity=v_infinity, kind="custom", func=func)


def eval_potential(spec: PotentialSpec, r):
    """V(r) for scalar or array r >= 0.

    An unbounded-below profile evaluates to -inf at r = 0; grid-based
    callers regularize through potential_on_grid.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    if spec.kind == "constant":
        out = np.full_like(r, spec.v_infinity)
    elif spec.kind == "inverse_power":
        with np.errstate(divide="ignore"):
            out = np.where(
                r <= spec.cutoff,
                spec.v_infinity - spec.c * r ** (-spec.alpha),
                spec.v_infinity,
            )
    elif spec.kind == "tabulated":
        out = np.interp(r, spec.radii, spec.values, right=spec.v_infinity)
    else:
        out = np.asarray(spec.func(r), dtype=float)
    return out if out.ndim else float(out)


def potential_split(spec: PotentialSpec, r):
    """Positive/negative parts (V+, V-) with V = V+ - V- and V+ * V- = 0."""
    v = np.asarray(eval_potential(spec, r))
    return np.maximum(v, 0.0), np.maximum(-v, 0.0)


def potential_on_grid(spec: PotentialSpec, grid):
    """Nodal values of V with half-node regularization at a singular origin.

    Returns (values, origin_substituted).  If V(0) is not finite, the node-0
    value is replaced by V(h/2); the quadrature weight there is zero, so the
    substitution only affects diagnostics.
    """
    v = np.asarray(eval_potential(spec, grid.nodes), dtype=float).copy()
    substituted = False
    if not np.isfinite(v[0]):
        v[0] = float(eval_potential(spec, grid.h / 2.0))
        substituted = True
    if not np.all(np.isfinite(v)):
        raise ValueError("potential is non-finite away from the origin")
    return v, substituted


# ---------------------------------------------------------------------------
# nonlinearity


@dataclass(frozen=True, eq=False)
class NonlinearitySpec:
    """Source term f with primitive F and derivative f'.

    The power family is f(t) = m |t|^{p-2} t, F(t) = (m/p) |t|^p.  The
    exponent p and the asymptotic slope m are declared for custom triples
    as well; the hypothesis checker certifies the admissible ranges.
    """

    kind: str
    m: float
    p: float
    f: Optional[Callable] = None
    fprime: Optional[Callable] = None
    F: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in ("power", "custom"):
            raise ValueError(f"unknown nonlinearity kind {self.kind!r}")
        if self.kind == "power":
            if not self.m > 0:
                raise ValueError("power nonlinearity needs m > 0")
            if not self.p > 2:
                raise ValueError("power nonlinearity needs p > 2")

    @staticmethod
    def power(m: float, p: float) -> "NonlinearitySpec":
        return NonlinearitySpec(kind="power", m=m, p=p)

    @staticmethod
    def custom(f: Callable, fprime: Callable, F: Callable, p: float, m: float) -> "NonlinearitySpec":
        return NonlinearitySpec(kind="custom", m=m, p=p, f=f, fprime=fprime, F=F)


def eval_nonlinearity(spec: NonlinearitySpec, t):
    """Consistent triple (f(t), f'(t), F(t)) for scalar or array t."""
    t = np.asarray(t, dtype=float)
    if spec.kind == "power":
        at = np.abs(t)
        f = spec.m * at ** (spec.p - 2.0) * t
        fp = spec.m * (spec.p - 1.0) * at ** (spec.p - 2.0)
        F = (spec.m / spec.p) * at**spec.p
    else:
        f = np.asarray(spec.f(t), dtype=float)
        fp = np.asarray(spec.fprime(t), dtype=float)
        F = np.asarray(spec.F(t), dtype=float)
    if f.ndim:
        return f, fp, F
    return float(f), float(fp), float(F)


# ---------------------------------------------------------------------------
# smoothing function rho


@dataclass(frozen=True, eq=False)
class RhoSpec:
    """Smoothing function rho on [0, inf) with derivatives up to order 4.

    Built-in families:
      affine            a + b s           (a, b >= 0)
      sqrt_shift        (1 + s)^{1/2}
      affine_plus_sqrt  a + b s + (1 + s)^{1/2}
      power_shift       (1 + s)^{alpha}

    power_shift is constructible for any alpha > 0; the hypothesis checker
    decides which alpha are admissible.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    alpha: float = 0.0
    derivs: Optional[tuple] = None  # custom: (rho, rho', rho'', rho''', rho'''')

    def __post_init__(self):
        if self.kind not in ("affine", "sqrt_shift", "affine_plus_sqrt", "power_shift", "custom"):
            raise ValueError(f"unknown rho kind {self.kind!r}")
        if self.kind in ("affine", "affine_plus_sqrt") and (self.a < 0 or self.b < 0):
            raise ValueError("affine coefficients must be nonnegative")
        if self.kind == "power_shift" and not self.alpha > 0:
            raise ValueError("power_shift needs alpha > 0")
        if self.kind == "custom" and (self.derivs is None or len(self.derivs) != 5):
            raise ValueError("custom rho needs the 5-tuple (rho, rho', rho'', rho''', rho'''')")

    @staticmethod
    def affine(a: float, b: float) -> "RhoSpec":
        return RhoSpec(kind="affine", a=a, b=b)

    @staticmethod
    def sqrt_shift() -> "RhoSpec":
        return RhoSpec(kind="sqrt_shift")

    @staticmethod
    def affine_plus_sqrt(a: float, b: float) -> "RhoSpec":
        return RhoSpec(kind="affine_plus_sqrt", a=a, b=b)

    @staticmethod
    def power_shift(alpha: float) -> "RhoSpec":
        return RhoSpec(kind="power_shift", alpha=alpha)

    @staticmethod
    def custom(rho, d1, d2, d3, d4) -> "RhoSpec":
        return RhoSpec(kind="custom", derivs=(rho, d1, d2, d3, d4))

    def scan_code(self):
        """(code, p0, p1) for the compiled scan kernel, or None for custom."""
        if self.kind == "affine":
            return RHO_AFFINE, self.a, self.b
        if self.kind == "sqrt_shift":
            return RHO_SQRT_SHIFT, 0.0, 0.0
        if self.kind == "affine_plus_sqrt":
            return RHO_AFFINE_PLUS_SQRT, self.a, self.b
        if self.kind == "power_shift":
            return RHO_POWER_SHIFT, self.alpha, 0.0
        return None


def _sqrt_shift_deriv(s, order):
    # d^k/ds^k (1+s)^{1/2} = (1/2)(1/2-1)...(1/2-k+1) (1+s)^{1/2-k}
    coef = 1.0
    for j in range(order):
        coef *= 0.5 - j
    return coef * (1.0 + s) ** (0.5 - order)


def eval_rho(spec: RhoSpec, s, order: int = 0):
    """rho^{(order)}(s) for scalar or array s >= 0, order in 0..4."""
    if order not in (0, 1, 2, 3, 4):
        raise ValueError(f"order must be in 0..4, got {order}")
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("rho argument must be nonnegative")
    if spec.kind == "affine":
        if order == 0:
            out = spec.a + spec.b * s
        elif order == 1:
            out = np.full_like(s, spec.b)
        else:
            out = np.zeros_like(s)
    elif spec.kind == "sqrt_shift":
        out = _sqrt_shift_deriv(s, order)
    elif spec.kind == "affine_plus_sqrt":
        out = _sqrt_shift_deriv(s, order)
        if order == 0:
            out = out + spec.a + spec.b * s
        elif order == 1:
            out = out + spec.b
    elif spec.kind == "power_shift":
        coef = 1.0
        for j in range(order):
            coef *= spec.alpha - j
        out = coef * (1.0 + s) ** (spec.alpha - order)
    else:
        out = np.asarray(spec.derivs[order](s), dtype=float)
    return out if out.ndim else float(out)


def rho_products_coded(code: int, p0: float, p1: float, s):
    """(rho'(s)^2, rho'(s) rho''(s)) for a coded built-in family.

    These are the only rho quantities the fibering scan needs; the closed
    forms below avoid redundant pow/sqrt calls.
    """
    s = np.asarray(s, dtype=float)
    if code == RHO_AFFINE:
        b = p1
        return np.full_like(s, b * b), np.zeros_like(s)
    if code == RHO_SQRT_SHIFT:
        q = 1.0 + s
        return 0.25 / q, -0.125 / (q * q)
    if code == RHO_AFFINE_PLUS_SQRT:
        b = p1
        q = 1.0 + s
        rt = np.sqrt(q)
        rp = b + 0.5 / rt
        return rp * rp, rp * (-0.25 / (q * rt))
    if code == RHO_POWER_SHIFT:
        al = p0
        q = 1.0 + s
        return al * al * q ** (2.0 * al - 2.0), al * al * (al - 1.0) * q ** (2.0 * al - 3.0)
    raise ValueError(f"unknown rho code {code}")


def rho_products(spec: RhoSpec, s):
    """(rho'^2, rho' rho'') for any spec, vectorized."""
    code = spec.scan_code()
    if code is not None:
        return rho_products_coded(*code, s)
    rp = eval_rho(spec, s, 1)
    return rp * rp, rp * eval_rho(spec, s, 2)


# ---------------------------------------------------------------------------
# full problem


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Dimension, coupling strength and the three function specs."""

    dim: int
    lam: float
    potential: PotentialSpec
    nonlinearity: NonlinearitySpec
    rho: RhoSpec

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("coupling lam must be >= 0")
        if int(self.dim) != self.dim or self.dim < 3:
            raise ValueError("dim must be an integer >= 3")
        if self.lam > 0 and self.dim > 6:
            raise ValueError("dim must be <= 6 when the quasilinear coupling is on (lam > 0)")

    def with_lam(self, lam: float) -> "ProblemSpec":
        return replace(self, lam=lam)


# ---------------------------------------------------------------------------
# finite-difference consistency checks (used by tests and the checker)


def nonlinearity_triple_consistency(spec: NonlinearitySpec, t_samples=None, rel_tol: float = 1e-6):
    """Check F' ~ f and f' ~ (f)' by central differences on sampled t.

    Returns (ok, worst_rel_err).  Default samples are log-spaced over
    [-1e3, 1e3] away from the origin kink.
    """
    if t_samples is None:
        pos = np.logspace(-3, 3, 121)
        t_samples = np.concatenate([-pos[::-1], pos])
    worst = 0.0
    for t in np.asarray(t_samples, dtype=float):
        if t == 0.0:
            continue
        d = 1e-6 * abs(t)
        f_t, fp_t, _ = eval_nonlinearity(spec, t)
        fm, _, Fm = eval_nonlinearity(spec, t - d)
        fp_, _, Fp_ = eval_nonlinearity(spec, t + d)
        scale_f = max(abs(f_t), 1e-12)
        scale_fp = max(abs(fp_t), 1e-12)
        worst = max(worst, abs((Fp_ - Fm) / (2 * d) - f_t) / scale_f)
        worst = max(worst, abs((fp_ - fm) / (2 * d) - fp_t) / scale_fp)
    return worst < rel_tol, worst


def rho_derivative_consistency(spec: RhoSpec, s_samples=None, rel_tol: float = 1e-4):
    """Check rho^{(k+1)} ~ d/ds rho^{(k)} by central differences, k = 0..3."""
    if s_samples is None:
        s_samples = np.logspace(-3, 6, 181)
    worst = 0.0
    for s in np.asarray(s_samples, dtype=float):
        d = 6e-6 * max(s, 1.0)
        if s - d < 0:
            continue
        for k in range(4):
            lo = eval_rho(spec, s - d, k)
            hi = eval_rho(spec, s + d, k)
            target = eval_rho(spec, s, k + 1)
            scale = max(abs(target), 1e-12)
            worst = max(worst, abs((hi - lo) / (2 * d) - target) / scale)
    return worst < rel_tol, worst
