"""Energy functional, its exact discrete gradient, and the ray derivatives.

For a nodal field u on a RadialGrid the discrete energy is

    E(u) = 1/2 * int(|Lap u|^2 + |u'|^2 + V u^2)
           + lam * int(rho'(u^2)^2 u^2 |u'|^2)
           - int F(u),

all integrals being the grid quadrature and Lap/' the grid operators.
The quasilinear integral equals 1/4 int |grad rho(u^2)|^2 by the chain
rule.  The gradient returned here is the exact derivative of E with
respect to the nodal values (differentiate the discretization, not the
PDE), so descent directions are genuine and finite-difference checks
close to machine precision.

The ray (fibering) quantities along t -> t*u are

    nehari_value(u)  = d/dt E(t u) * t at t = 1   (the manifold constraint)
    nehari_slope(u)  = d/dt [nehari_value(t u)] at t = 1.

nehari_slope expands into the quadratic form plus six quasilinear
integrals; the coefficients below reproduce the t-derivative of
nehari_value(t u) exactly, which is what tests verify.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import backend
from .grid import RadialGrid, _as_field
from .model import (
    ProblemSpec,
    RhoSpec,
    eval_nonlinearity,
    eval_rho,
    potential_on_grid,
    rho_products,
)

__all__ = [
    "EnergyBreakdown",
    "norm_V_sq",
    "phi_term",
    "energy",
    "gradient",
    "nehari_value",
    "nehari_slope",
    "diagnostic_inequalities",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    """The five integrals composing the energy, plus their combination."""

    quad_bilap: float  # int |Lap u|^2
    quad_grad: float   # int |u'|^2
    quad_pot: float    # int V u^2
    phi: float         # 1/4 int |grad rho(u^2)|^2
    nonlinear: float   # int F(u)
    total: float

    def recompute_total(self, lam: float) -> float:
        return 0.5 * (self.quad_bilap + self.quad_grad + self.quad_pot) + lam * self.phi - self.nonlinear

    def to_dict(self) -> dict:
        return {
            "quad_bilap": self.quad_bilap,
            "quad_grad": self.quad_grad,
            "quad_pot": self.quad_pot,
            "phi": self.phi,
            "nonlinear": self.nonlinear,
            "total": self.total,
        }


class _EnergyModel:
    """Precomputed per-(grid, spec) data shared by all evaluations."""

    def __init__(self, grid: RadialGrid, spec: ProblemSpec):
        if spec.dim != grid.dim:
            raise ValueError(f"spec.dim={spec.dim} does not match grid.dim={grid.dim}")
        self.grid = grid
        self.spec = spec
        self.w = grid.quad_weights
        self.lam = spec.lam
        self.v, self.origin_substituted = potential_on_grid(spec.potential, grid)
        nl = spec.nonlinearity
        self.f_power = (nl.m, nl.p) if nl.kind == "power" else None
        self.rho_code = spec.rho.scan_code()

    # -- pointwise building blocks -------------------------------------

    def lap(self, u):
        return self.grid._lap @ u

    def diff(self, u):
        return self.grid._diff @ u

    def parts(self, u, lap_u=None, du=None) -> EnergyBreakdown:
        if lap_u is None:
            lap_u = self.lap(u)
        if du is None:
            du = self.diff(u)
        qb, qg, qp = backend.quad_form_parts(self.w, lap_u, du, self.v, u)
        s = u * u
        rp2, _ = rho_products(self.spec.rho, s)
        phi = backend.weighted_dot(self.w, rp2 * s * du * du)
        _, _, F = eval_nonlinearity(self.spec.nonlinearity, u)
        nonlinear = backend.weighted_dot(self.w, F)
        total = 0.5 * (qb + qg + qp) + self.lam * phi - nonlinear
        return EnergyBreakdown(qb, qg, qp, phi, nonlinear, total)

    def norm_v_sq(self, u, lap_u=None, du=None) -> float:
        if lap_u is None:
            lap_u = self.lap(u)
        if du is None:
            du = self.diff(u)
        qb, qg, qp = backend.quad_form_parts(self.w, lap_u, du, self.v, u)
        return qb + qg + qp

    def grad(self, u) -> np.ndarray:
        grid = self.grid
        w = self.w
        lap_u = grid._lap @ u
        du = grid._diff @ u
        g = grid._lap_t @ (w * lap_u) + grid._diff_t @ (w * du) + w * self.v * u

        s = u * u
        rp2, rprpp = rho_products(self.spec.rho, s)
        gq = rp2 * s                           # rho'(u^2)^2 u^2
        gq_prime = 2.0 * u * (2.0 * s * rprpp + rp2)
        g = g + self.lam * (w * gq_prime * du * du + 2.0 * (grid._diff_t @ (w * gq * du)))

        f, _, _ = eval_nonlinearity(self.spec.nonlinearity, u)
        g = g - w * f
        g[-1] = 0.0  # Dirichlet constraint at r_max
        return g

    def nehari(self, u, lap_u=None, du=None) -> float:
        if du is None:
            du = self.diff(u)
        quad = self.norm_v_sq(u, lap_u, du)
        s = u * u
        rp2, rprpp = rho_products(self.spec.rho, s)
        du2 = du * du
        quasi = 4.0 * backend.weighted_dot(self.w, rprpp * s * s * du2) + 4.0 * backend.weighted_dot(
            self.w, rp2 * s * du2
        )
        f, _, _ = eval_nonlinearity(self.spec.nonlinearity, u)
        return quad + self.lam * quasi - backend.weighted_dot(self.w, f * u)

    def nehari_slope(self, u) -> float:
        du = self.diff(u)
        quad = self.norm_v_sq(u, du=du)
        s = u * u
        du2 = du * du
        w = self.w
        rho = self.spec.rho
        rp = eval_rho(rho, s, 1)
        rpp = eval_rho(rho, s, 2)
        rppp = eval_rho(rho, s, 3)
        b_int = backend.weighted_dot(w, rp * rp * s * du2)
        c_int = backend.weighted_dot(w, rp * rpp * s * s * du2)
        d_int = backend.weighted_dot(w, rpp * rpp * s * s * s * du2)
        e_int = backend.weighted_dot(w, rp * rppp * s * s * s * du2)
        f, fp, _ = eval_nonlinearity(self.spec.nonlinearity, u)
        f_part = backend.weighted_dot(w, fp * s + f * u)
        return 2.0 * quad + self.lam * (16.0 * b_int + 40.0 * c_int + 8.0 * d_int + 8.0 * e_int) - f_part


@lru_cache(maxsize=32)
def _get_model(grid: RadialGrid, spec: ProblemSpec) -> _EnergyModel:
    return _EnergyModel(grid, spec)


# ---------------------------------------------------------------------------
# public operations


def norm_V_sq(grid: RadialGrid, spec: ProblemSpec, u) -> float:
    """int(|Lap u|^2 + |u'|^2 + V u^2), the squared V-norm."""
    u = _as_field(grid, u)
    return _get_model(grid, spec).norm_v_sq(u)


def phi_term(grid: RadialGrid, rho: RhoSpec, u) -> float:
    """1/4 int |grad rho(u^2)|^2 = int rho'(u^2)^2 u^2 |u'|^2."""
    u = _as_field(grid, u)
    du = grid._diff @ u
    s = u * u
    rp2, _ = rho_products(rho, s)
    return backend.weighted_dot(grid.quad_weights, rp2 * s * du * du)


def energy(grid: RadialGrid, spec: ProblemSpec, u) -> EnergyBreakdown:
    """All five integrals and the combined energy at u."""
    u = _as_field(grid, u)
    return _get_model(grid, spec).parts(u)


def gradient(grid: RadialGrid, spec: ProblemSpec, u) -> np.ndarray:
    """Exact nodal gradient of the discrete energy (boundary entry zeroed)."""
    u = _as_field(grid, u)
    return _get_model(grid, spec).grad(u)


def nehari_value(grid: RadialGrid, spec: ProblemSpec, u) -> float:
    """The manifold constraint value: derivative of the energy along the ray at u."""
    u = _as_field(grid, u)
    return _get_model(grid, spec).nehari(u)


def nehari_slope(grid: RadialGrid, spec: ProblemSpec, u) -> float:
    """d/dt of t -> nehari_value(t u) at t = 1 (negative on the manifold)."""
    u = _as_field(grid, u)
    return _get_model(grid, spec).nehari_slope(u)


def diagnostic_inequalities(grid: RadialGrid, spec: ProblemSpec, u) -> dict:
    """Optional diagnostics comparing quasilinear integrals.

    Reports lhs/rhs of
      sq_bound:   2 int [rho''(u^2) u^2]^2 u^2 |u'|^2  <=  int rho'(u^2)^2 u^2 |u'|^2
      mixed_sign: int rho' rho'' u^4 |u'|^2            <=  0
    On a discrete field a small violation indicates quadrature error rather
    than a bug; values are reported, not asserted.
    """
    u = _as_field(grid, u)
    du = grid._diff @ u
    s = u * u
    du2 = du * du
    w = grid.quad_weights
    rp = eval_rho(spec.rho, s, 1)
    rpp = eval_rho(spec.rho, s, 2)
    sq_lhs = 2.0 * backend.weighted_dot(w, (rpp * s) ** 2 * s * du2)
    sq_rhs = backend.weighted_dot(w, rp * rp * s * du2)
    mixed = backend.weighted_dot(w, rp * rpp * s * s * du2)
    return {
        "sq_bound_lhs": sq_lhs,
        "sq_bound_rhs": sq_rhs,
        "sq_bound_ok": bool(sq_lhs <= sq_rhs + 1e-12 * (1.0 + abs(sq_rhs))),
        "mixed_sign_value": mixed,
        "mixed_sign_ok": bool(mixed <= 1e-12),
    }
