"""Pure-numpy reference implementation of the hot kernels.

The compiled extension (_fastkernels) provides the same functions; the
backend module picks whichever is available at import time.  Anything
implemented here must match the compiled version to rounding error.
"""

import numpy as np

from .model import RHO_AFFINE, rho_products_coded

BACKEND_NAME = "python"

_BLOCK = 128  # scan rows per temporary, keeps the t x node matrices small


def weighted_dot(w, x) -> float:
    return float(np.dot(w, x))


def quad_form_parts(w, lap_u, du, v, u):
    """(int |Lap u|^2, int |u'|^2, int V u^2) in one sweep over the nodes."""
    qb = float(np.dot(w, lap_u * lap_u))
    qg = float(np.dot(w, du * du))
    qp = float(np.dot(w, v * u * u))
    return qb, qg, qp


def fiber_scan(ts, quad, lam, u2, wu2du2, wu4du2, rho_code, rho_p0, rho_p1, fm, fp, wfp):
    """Energy and ray-derivative values along t -> t*u.

    For the scaled field t*u with precomputed node data
        quad   = ||u||_V^2
        u2     = u^2
        wu2du2 = w u^2 u'^2
        wu4du2 = w u^4 u'^2
        wfp    = int |u|^p
    returns arrays (g, j) with
        g(t) = I(t u) = t^2/2 quad + lam t^4 S_b(t) - (fm/fp) t^fp wfp
        j(t) = I'(t u)(t u)
             = t^2 quad + lam (4 t^6 S_c(t) + 4 t^4 S_b(t)) - fm t^fp wfp
    where S_b(t) = sum wu2du2 * rho'(t^2 u^2)^2 and
          S_c(t) = sum wu4du2 * rho' rho''(t^2 u^2).

    Only the power nonlinearity and coded rho families reach this kernel;
    custom specs take the generic Python path in the fibering module.
    """
    ts = np.asarray(ts, dtype=float)
    g = np.empty_like(ts)
    j = np.empty_like(ts)
    t2 = ts * ts
    tp = fm * ts**fp * wfp

    if rho_code == RHO_AFFINE:
        b = rho_p1
        sb = b * b * float(np.sum(wu2du2))
        g[:] = 0.5 * t2 * quad + lam * t2 * t2 * sb - tp / fp
        j[:] = t2 * quad + 4.0 * lam * t2 * t2 * sb - tp
        return g, j

    for lo in range(0, ts.size, _BLOCK):
        hi = min(lo + _BLOCK, ts.size)
        s = t2[lo:hi, None] * u2[None, :]
        rp2, rprpp = rho_products_coded(rho_code, rho_p0, rho_p1, s)
        sb = rp2 @ wu2du2
        sc = rprpp @ wu4du2
        t2b = t2[lo:hi]
        t4b = t2b * t2b
        g[lo:hi] = 0.5 * t2b * quad + lam * t4b * sb - tp[lo:hi] / fp
        j[lo:hi] = t2b * quad + lam * (4.0 * t4b * t2b * sc + 4.0 * t4b * sb) - tp[lo:hi]
    return g, j
