import numpy as np
import pytest

from nehari_gs import NonlinearitySpec, PotentialSpec, ProblemSpec, RhoSpec, build_grid


def smooth_field(grid, rng, n_bumps=4, scale=1.0):
    """Random smooth field decaying well before r_max, zero at the boundary."""
    r = grid.nodes
    u = np.zeros_like(r)
    for _ in range(n_bumps):
        center = rng.uniform(0.0, 0.45 * grid.r_max)
        width = rng.uniform(0.4, 2.0)
        amp = rng.uniform(-1.0, 1.0)
        u += amp * np.exp(-(((r - center) / width) ** 2))
    u *= scale * np.exp(-((r / (0.55 * grid.r_max)) ** 4))
    u[-1] = 0.0
    return u


def standard_spec(lam=1.0, rho=None, m=1.0, p=5.0, dim=3, potential=None):
    return ProblemSpec(
        dim=dim,
        lam=lam,
        potential=potential or PotentialSpec.constant(1.0),
        nonlinearity=NonlinearitySpec.power(m, p),
        rho=rho or RhoSpec.sqrt_shift(),
    )


@pytest.fixture(scope="session")
def grid801():
    return build_grid(3, 20.0, 801)


@pytest.fixture(scope="session")
def grid401():
    return build_grid(3, 16.0, 401)
