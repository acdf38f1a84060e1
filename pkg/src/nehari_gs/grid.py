"""Radial grids and finite-difference operators on [0, r_max].

A radially symmetric function u(x) = u(|x|) on R^N is carried by its nodal
values on the uniform grid r_i = i*h, h = r_max/(n-1).  Integrals over R^N
reduce to weighted 1-D quadrature,

    int_{R^N} g(|x|) dx = omega * int_0^{r_max} g(r) r^{N-1} dr,

where omega = 2 pi^{N/2} / Gamma(N/2) is the surface measure of the unit
(N-1)-sphere; the trapezoid rule supplies the weights, so w_0 = 0 for
N >= 2 and the discrete Hoelder inequality holds exactly with shared
weights.

The radial Laplacian u'' + (N-1)/r u' is discretized with second-order
central differences.  At the origin the singular term is removed by even
symmetry (ghost node u_{-1} = u_1), which gives the regularized value
Delta u(0) = N u''(0).  At r_max one-sided second-order stencils are used;
they are exact on quadratics, like the interior stencils.
"""

from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np
import scipy.sparse as sp

__all__ = [
    "RadialGrid",
    "build_grid",
    "apply_laplacian",
    "apply_bilaplacian",
    "radial_derivative",
    "integrate",
    "lp_norm",
    "unit_sphere_area",
    "tail_decay_ok",
]

# truncation at r_max uses u(r_max) = 0 together with Delta u(r_max) = 0
# for the outer application of the bilaplacian (Navier-type data)

DIM_MIN = 3
DIM_MAX_COUPLED = 6  # quasilinear coupling restricts the dimension
N_MIN = 16


def unit_sphere_area(dim: int) -> float:
    """Surface measure of the unit (dim-1)-sphere in R^dim."""
    return 2.0 * pi ** (dim / 2.0) / gamma(dim / 2.0)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Uniform radial mesh plus the discrete operators built on it.

    Attributes
    ----------
    dim : spatial dimension N
    r_max : truncation radius
    n : number of nodes (including r = 0 and r = r_max)
    h : spacing r_max/(n-1)
    nodes : radii r_i = i*h
    quad_weights : w_i = omega * r_i^{N-1} * (trapezoid coefficient * h)
    """

    dim: int
    r_max: float
    n: int
    h: float
    nodes: np.ndarray
    quad_weights: np.ndarray
    _lap: sp.csr_matrix = field(repr=False)
    _diff: sp.csr_matrix = field(repr=False)
    _lap_t: sp.csr_matrix = field(repr=False)
    _diff_t: sp.csr_matrix = field(repr=False)


def _laplacian_matrix(dim: int, n: int, h: float, nodes: np.ndarray) -> sp.csr_matrix:
    rows, cols, vals = [], [], []

    def put(i, j, v):
        rows.append(i)
        cols.append(j)
        vals.append(v)

    # origin: Delta u(0) = N u''(0), u''(0) = (2 u_1 - 2 u_0)/h^2
    put(0, 0, -2.0 * dim / h**2)
    put(0, 1, 2.0 * dim / h**2)

    inv_h2 = 1.0 / h**2
    for i in range(1, n - 1):
        a = (dim - 1) / (2.0 * h * nodes[i])
        put(i, i - 1, inv_h2 - a)
        put(i, i, -2.0 * inv_h2)
        put(i, i + 1, inv_h2 + a)

    # one-sided second-order stencils at r_max
    m = n - 1
    b = (dim - 1) / (2.0 * h * nodes[m])
    put(m, m, 2.0 * inv_h2 + 3.0 * b)
    put(m, m - 1, -5.0 * inv_h2 - 4.0 * b)
    put(m, m - 2, 4.0 * inv_h2 + b)
    put(m, m - 3, -1.0 * inv_h2)

    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _derivative_matrix(n: int, h: float) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    # row 0 stays empty: u'(0) = 0 by even symmetry
    for i in range(1, n - 1):
        rows += [i, i]
        cols += [i - 1, i + 1]
        vals += [-0.5 / h, 0.5 / h]
    m = n - 1
    rows += [m, m, m]
    cols += [m, m - 1, m - 2]
    vals += [1.5 / h, -2.0 / h, 0.5 / h]
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def build_grid(dim: int, r_max: float, n: int, *, allow_high_dim: bool = False) -> RadialGrid:
    """Build a RadialGrid.

    Parameters
    ----------
    dim : spatial dimension, 3 <= dim <= 6 (dim >= 3 suffices when the
        quasilinear coupling is switched off; pass allow_high_dim=True)
    r_max : truncation radius, > 0
    n : node count, >= 16
    """
    if int(dim) != dim or dim < DIM_MIN:
        raise ValueError(f"dim must be an integer >= {DIM_MIN}, got {dim}")
    dim = int(dim)
    if dim > DIM_MAX_COUPLED and not allow_high_dim:
        raise ValueError(
            f"dim={dim} outside the admissible range {DIM_MIN}..{DIM_MAX_COUPLED} "
            "for coupled problems; pass allow_high_dim=True for the uncoupled case"
        )
    if not r_max > 0:
        raise ValueError(f"r_max must be positive, got {r_max}")
    if n < N_MIN:
        raise ValueError(f"n must be >= {N_MIN}, got {n}")

    h = r_max / (n - 1)
    nodes = np.linspace(0.0, r_max, n)
    coeff = np.full(n, h)
    coeff[0] = coeff[-1] = 0.5 * h
    w = unit_sphere_area(dim) * nodes ** (dim - 1) * coeff

    lap = _laplacian_matrix(dim, n, h, nodes)
    diff = _derivative_matrix(n, h)
    return RadialGrid(
        dim=dim,
        r_max=float(r_max),
        n=n,
        h=h,
        nodes=nodes,
        quad_weights=w,
        _lap=lap,
        _diff=diff,
        _lap_t=lap.T.tocsr(),
        _diff_t=diff.T.tocsr(),
    )


def _as_field(grid: RadialGrid, u, check_finite: bool = True) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.n,):
        raise ValueError(f"field has shape {u.shape}, expected ({grid.n},)")
    if check_finite and not np.all(np.isfinite(u)):
        raise ValueError("field contains non-finite entries")
    return u


def apply_laplacian(grid: RadialGrid, u) -> np.ndarray:
    """Discrete radial Laplacian u'' + (N-1)/r u' (second order)."""
    return grid._lap @ _as_field(grid, u)


def apply_bilaplacian(grid: RadialGrid, u) -> np.ndarray:
    """Laplacian applied twice; the outer application sees Delta u(r_max) = 0."""
    v = grid._lap @ _as_field(grid, u)
    v[-1] = 0.0
    return grid._lap @ v


def radial_derivative(grid: RadialGrid, u) -> np.ndarray:
    """Central-difference u'(r); u'(0) = 0 by symmetry, one-sided at r_max."""
    return grid._diff @ _as_field(grid, u)


def integrate(grid: RadialGrid, f) -> float:
    """Quadrature of a radial function over the N-ball of radius r_max."""
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.n,):
        raise ValueError(f"field has shape {f.shape}, expected ({grid.n},)")
    if np.any(np.isnan(f)):
        raise ValueError("integrand contains NaN")
    return float(np.dot(grid.quad_weights, f))


def lp_norm(grid: RadialGrid, u, p: float) -> float:
    """L^p norm over R^N (truncated), p >= 1."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    u = _as_field(grid, u)
    return float(np.dot(grid.quad_weights, np.abs(u) ** p) ** (1.0 / p))


def tail_decay_ok(grid: RadialGrid, u, rel_tol: float = 1e-6, tail_start: float = 0.9):
    """Check that |u| has decayed below rel_tol * max|u| beyond tail_start * r_max.

    Returns (ok, worst_ratio).  A failing audit suggests a larger r_max.
    """
    u = _as_field(grid, u)
    peak = float(np.max(np.abs(u)))
    if peak == 0.0:
        return True, 0.0
    mask = grid.nodes > tail_start * grid.r_max
    worst = float(np.max(np.abs(u[mask])) / peak) if np.any(mask) else 0.0
    return worst <= rel_tol, worst
