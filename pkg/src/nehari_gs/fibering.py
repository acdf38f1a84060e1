"""Fibering map g(t) = E(t u) and projection onto the Nehari set.

Every nonzero field u spans a ray t -> t*u on which the energy rises
quadratically from zero and eventually falls to -infinity; somewhere in
between g attains a maximum where the ray derivative vanishes, i.e. where
t*u satisfies the manifold constraint nehari_value(t u) = 0.  The
projection scans a fixed geometric t-range for sign changes of g',
refines each bracket by bisection (g' is only as smooth as quadrature
allows, so no Newton), and returns the critical point with the largest
energy.  The number of sign changes is reported so callers can detect
multi-bump fibering maps; uniqueness of the crossing is measured, never
assumed.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .energy import _get_model
from .grid import RadialGrid, _as_field
from .model import ProblemSpec, eval_nonlinearity, rho_products

__all__ = [
    "FiberingReport",
    "ProjectionError",
    "fibering_map",
    "project_to_nehari",
    "fibering_table",
    "SCAN_LO",
    "SCAN_HI",
    "SCAN_PER_DECADE",
]

SCAN_LO = 1e-6
SCAN_HI = 1e6
SCAN_PER_DECADE = 60

_FIELD_FLOOR = 1e-12  # nodal sup below which a field counts as zero
_MAX_BISECT = 200


class ProjectionError(RuntimeError):
    """No Nehari crossing found on the scanned ray."""


@dataclass(frozen=True)
class FiberingReport:
    """Outcome of a projection: selected scale and bracketing data."""

    t_star: float
    residual: float        # |g'(t_star)|
    bracket: tuple         # (t_lo, t_hi) around the selected crossing
    critical_count: int    # sign changes of g' on the scan grid
    g_star: float          # energy at the projected field


class _FiberRay:
    """Precomputed quantities for evaluating g and j = t*g' along a ray."""

    def __init__(self, grid: RadialGrid, spec: ProblemSpec, u: np.ndarray):
        model = _get_model(grid, spec)
        lap_u = model.lap(u)
        du = model.diff(u)
        qb, qg, qp = backend.quad_form_parts(model.w, lap_u, du, model.v, u)
        self.quad = qb + qg + qp
        self.lam = model.lam
        self.u = u
        u2 = u * u
        du2 = du * du
        self.u2 = u2
        self.wu2du2 = model.w * u2 * du2
        self.wu4du2 = model.w * u2 * u2 * du2
        self.w = model.w
        self.rho = spec.rho
        self.nl = spec.nonlinearity
        self.rho_code = model.rho_code
        self.f_power = model.f_power
        if self.f_power is not None:
            m, p = self.f_power
            self.wfp = backend.weighted_dot(model.w, np.abs(u) ** p)

    def gj(self, ts):
        """(g(t), j(t)) for an array of positive scales, j = t*g'(t)."""
        ts = np.asarray(ts, dtype=float)
        if self.rho_code is not None and self.f_power is not None:
            code, p0, p1 = self.rho_code
            m, p = self.f_power
            return backend.fiber_scan(
                np.ascontiguousarray(ts), self.quad, self.lam,
                np.ascontiguousarray(self.u2),
                np.ascontiguousarray(self.wu2du2),
                np.ascontiguousarray(self.wu4du2),
                code, p0, p1, m, p, self.wfp,
            )
        return self._gj_generic(ts)

    def _gj_generic(self, ts):
        g = np.empty(ts.size)
        j = np.empty(ts.size)
        for k, t in enumerate(ts):
            t2 = t * t
            s = t2 * self.u2
            rp2, rprpp = rho_products(self.rho, s)
            sb = float(np.dot(self.wu2du2, rp2))
            sc = float(np.dot(self.wu4du2, rprpp))
            tu = t * self.u
            f, _, F = eval_nonlinearity(self.nl, tu)
            fint = float(np.dot(self.w, F))
            fuint = float(np.dot(self.w, f * tu))
            t4 = t2 * t2
            g[k] = 0.5 * t2 * self.quad + self.lam * t4 * sb - fint
            j[k] = t2 * self.quad + self.lam * (4.0 * t4 * t2 * sc + 4.0 * t4 * sb) - fuint
        return g, j


def _scan_grid() -> np.ndarray:
    decades = int(round(np.log10(SCAN_HI / SCAN_LO)))
    return np.logspace(np.log10(SCAN_LO), np.log10(SCAN_HI), decades * SCAN_PER_DECADE + 1)


def fibering_map(grid: RadialGrid, spec: ProblemSpec, u, t):
    """(g(t), g'(t)) along the ray through u; g'(0) = 0 by convention."""
    u = _as_field(grid, u)
    if float(np.max(np.abs(u))) <= _FIELD_FLOOR:
        raise ValueError("fibering map needs a nonzero field")
    ray = _FiberRay(grid, spec, u)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("fibering scale t must be >= 0")
    g = np.zeros_like(t_arr)
    gp = np.zeros_like(t_arr)
    pos = t_arr > 0
    if np.any(pos):
        gv, jv = ray.gj(t_arr[pos])
        g[pos] = gv
        gp[pos] = jv / t_arr[pos]
    if np.ndim(t) == 0:
        return float(g[0]), float(gp[0])
    return g, gp


def _bisect(ray: _FiberRay, t_lo: float, t_hi: float, j_lo: float, tol_res: float):
    """Refine a sign-change bracket of j; geometric midpoints."""
    lo, hi = t_lo, t_hi
    sign_lo = j_lo > 0
    mid = np.sqrt(lo * hi)
    j_mid = 0.0
    for _ in range(_MAX_BISECT):
        mid = np.sqrt(lo * hi)
        j_mid = float(ray.gj(np.array([mid]))[1][0])
        if abs(j_mid / mid) <= tol_res and (hi - lo) <= 1e-12 * mid:
            break
        if (hi - lo) <= 4.0 * np.finfo(float).eps * mid:
            break
        if (j_mid > 0) == sign_lo:
            lo = mid
        else:
            hi = mid
    return mid, abs(j_mid / mid)


def project_to_nehari(grid: RadialGrid, spec: ProblemSpec, u):
    """Scale u onto the Nehari set; returns (projected_field, FiberingReport).

    Scans t in [SCAN_LO, SCAN_HI] geometrically, bisects every sign change
    of g', and selects the crossing with the largest fibering energy.
    Raises ProjectionError when no sign change is found and ValueError for
    a numerically zero input.
    """
    u = _as_field(grid, u)
    if float(np.max(np.abs(u))) <= _FIELD_FLOOR:
        raise ValueError("cannot project a numerically zero field")
    ray = _FiberRay(grid, spec, u)
    tol_res = 1e-10 * max(1.0, ray.quad)

    ts = _scan_grid()
    _, j = ray.gj(ts)

    roots = []  # (t, residual, bracket)
    k = 0
    while k < ts.size:
        if j[k] == 0.0:
            roots.append((float(ts[k]), 0.0, (float(ts[k]), float(ts[k]))))
            k += 1
            continue
        if k + 1 < ts.size and j[k] * j[k + 1] < 0.0:
            t_star, res = _bisect(ray, float(ts[k]), float(ts[k + 1]), float(j[k]), tol_res)
            roots.append((t_star, res, (float(ts[k]), float(ts[k + 1]))))
        k += 1

    if not roots:
        raise ProjectionError(
            f"no sign change of the fibering derivative on [{SCAN_LO:g}, {SCAN_HI:g}]; "
            "rescale the field or enlarge the scan range"
        )

    g_at = [float(ray.gj(np.array([t]))[0][0]) for t, _, _ in roots]
    best = int(np.argmax(g_at))
    t_star, residual, bracket = roots[best]
    report = FiberingReport(
        t_star=t_star,
        residual=residual,
        bracket=bracket,
        critical_count=len(roots),
        g_star=g_at[best],
    )
    return t_star * u, report


def fibering_table(grid: RadialGrid, spec: ProblemSpec, u):
    """(t, g, g') arrays over the scan grid, for dumping/plotting."""
    u = _as_field(grid, u)
    ray = _FiberRay(grid, spec, u)
    ts = _scan_grid()
    g, j = ray.gj(ts)
    return ts, g, j / ts
