import numpy as np
import pytest

from nehari_gs import (
    NonlinearitySpec,
    PotentialSpec,
    RhoSpec,
    build_grid,
    diagnostic_inequalities,
    energy,
    gradient,
    integrate,
    lp_norm,
    nehari_slope,
    nehari_value,
    norm_V_sq,
    phi_term,
    project_to_nehari,
    radial_derivative,
)
from conftest import smooth_field, standard_spec


def fine_quadrature(dim, r_max, n, integrand):
    """Plain weighted trapezoid of an analytic radial integrand."""
    g = build_grid(dim, r_max, n)
    return integrate(g, integrand(g.nodes))


class TestNormV:
    def test_zero(self, grid801):
        assert norm_V_sq(grid801, standard_spec(), np.zeros(grid801.n)) == 0.0

    def test_matches_plain_norm_for_unit_potential(self, grid801):
        spec = standard_spec()
        rng = np.random.default_rng(3)
        u = smooth_field(grid801, rng)
        from nehari_gs import apply_laplacian

        lap = apply_laplacian(grid801, u)
        du = radial_derivative(grid801, u)
        manual = integrate(grid801, lap**2 + du**2 + u**2)
        assert norm_V_sq(grid801, spec, u) == pytest.approx(manual, rel=1e-12)

    def test_gaussian_fine_grid_oracle(self):
        # coarse-grid discrete operators vs fine quadrature of the closed form
        g = build_grid(3, 12.0, 2401)
        spec = standard_spec()
        u = np.exp(-(g.nodes**2))
        val = norm_V_sq(g, spec, u)
        oracle = fine_quadrature(
            3, 12.0, 24001,
            lambda r: ((4 * r**2 - 6) ** 2 + 4 * r**2 + 1.0) * np.exp(-2 * r**2),
        )
        assert val == pytest.approx(oracle, rel=1e-4)


class TestPhiTerm:
    def test_constant_rho_vanishes(self, grid801):
        rng = np.random.default_rng(5)
        u = smooth_field(grid801, rng)
        assert phi_term(grid801, RhoSpec.affine(2.0, 0.0), u) == 0.0

    def test_affine_closed_form(self, grid801):
        rng = np.random.default_rng(6)
        u = smooth_field(grid801, rng)
        du = radial_derivative(grid801, u)
        b = 1.7
        expected = b * b * integrate(grid801, u**2 * du**2)
        assert phi_term(grid801, RhoSpec.affine(0.4, b), u) == pytest.approx(expected, rel=1e-12)

    def test_sqrt_shift_closed_form(self, grid801):
        rng = np.random.default_rng(7)
        u = smooth_field(grid801, rng)
        du = radial_derivative(grid801, u)
        expected = integrate(grid801, u**2 * du**2 / (4.0 * (1.0 + u**2)))
        assert phi_term(grid801, RhoSpec.sqrt_shift(), u) == pytest.approx(expected, rel=1e-12)


class TestEnergy:
    def test_zero_field(self, grid801):
        eb = energy(grid801, standard_spec(), np.zeros(grid801.n))
        assert eb.total == 0.0 and eb.phi == 0.0 and eb.nonlinear == 0.0

    def test_total_recomputable(self, grid801):
        spec = standard_spec(lam=0.7)
        rng = np.random.default_rng(8)
        u = smooth_field(grid801, rng)
        eb = energy(grid801, spec, u)
        assert eb.total == pytest.approx(eb.recompute_total(spec.lam), rel=1e-14)

    def test_lambda_zero_reduction(self, grid801):
        spec = standard_spec(lam=0.0)
        rng = np.random.default_rng(9)
        u = smooth_field(grid801, rng)
        eb = energy(grid801, spec, u)
        expected = 0.5 * norm_V_sq(grid801, spec, u) - eb.nonlinear
        assert eb.total == pytest.approx(expected, rel=1e-12)

    def test_fine_grid_oracle_with_coupling(self):
        # lam = 1, rho(s) = s, power nonlinearity, Gaussian profile
        g = build_grid(3, 12.0, 2401)
        spec = standard_spec(lam=1.0, rho=RhoSpec.affine(0.0, 1.0))
        u = np.exp(-(g.nodes**2))
        val = energy(g, spec, u).total

        def integrand(r):
            uu = np.exp(-(r**2))
            dup = -2 * r * uu
            quad = 0.5 * ((4 * r**2 - 6) ** 2 + 4 * r**2 + 1.0) * uu**2
            return quad + uu**2 * dup**2 - 0.2 * np.abs(uu) ** 5

        oracle = fine_quadrature(3, 12.0, 24001, integrand)
        assert val == pytest.approx(oracle, rel=1e-4)

    def test_phi_nonnegative_and_lambda_monotone(self, grid801):
        rng = np.random.default_rng(10)
        for _ in range(5):
            u = smooth_field(grid801, rng)
            e1 = energy(grid801, standard_spec(lam=0.3), u).total
            e2 = energy(grid801, standard_spec(lam=1.1), u).total
            assert energy(grid801, standard_spec(), u).phi >= 0.0
            assert e2 >= e1

    def test_even_in_u_for_odd_nonlinearity(self, grid801):
        rng = np.random.default_rng(11)
        for rho in (RhoSpec.sqrt_shift(), RhoSpec.affine(0.0, 1.0)):
            u = smooth_field(grid801, rng)
            a = energy(grid801, standard_spec(rho=rho), u).total
            b = energy(grid801, standard_spec(rho=rho), -u).total
            assert a == pytest.approx(b, rel=1e-14)


class TestGradient:
    @pytest.mark.parametrize("lam,rho", [
        (0.0, RhoSpec.affine(0.0, 1.0)),
        (1.0, RhoSpec.affine(0.0, 1.0)),
        (1.0, RhoSpec.sqrt_shift()),
    ])
    def test_directional_derivative(self, grid801, lam, rho):
        spec = standard_spec(lam=lam, rho=rho)
        rng = np.random.default_rng(12)
        for _ in range(6):
            u = smooth_field(grid801, rng)
            phi = smooth_field(grid801, rng)
            g = gradient(grid801, spec, u)
            h = 1e-5 * max(1.0, float(np.max(np.abs(u))))
            ep = energy(grid801, spec, u + h * phi).total
            em = energy(grid801, spec, u - h * phi).total
            fd = (ep - em) / (2 * h)
            an = float(np.dot(g, phi))
            assert abs(fd - an) <= 1e-6 * max(1.0, abs(fd))

    def test_quadratic_case_zero_only_at_zero(self, grid801):
        zero_f = NonlinearitySpec.custom(
            f=lambda t: np.zeros_like(t), fprime=lambda t: np.zeros_like(t),
            F=lambda t: np.zeros_like(t), p=5.0, m=1.0,
        )
        spec = standard_spec(lam=0.0)
        spec = type(spec)(dim=3, lam=0.0, potential=spec.potential, nonlinearity=zero_f, rho=spec.rho)
        assert np.all(gradient(grid801, spec, np.zeros(grid801.n)) == 0.0)
        rng = np.random.default_rng(13)
        u = smooth_field(grid801, rng)
        assert np.max(np.abs(gradient(grid801, spec, u))) > 0.0

    def test_boundary_entry_zeroed(self, grid801):
        rng = np.random.default_rng(14)
        u = smooth_field(grid801, rng)
        assert gradient(grid801, standard_spec(), u)[-1] == 0.0


class TestNehariValue:
    def test_zero_field(self, grid801):
        assert nehari_value(grid801, standard_spec(), np.zeros(grid801.n)) == 0.0

    def test_lambda_zero_closed_form(self, grid801):
        m, p = 2.0, 6.0
        spec = standard_spec(lam=0.0, m=m, p=p)
        rng = np.random.default_rng(15)
        u = smooth_field(grid801, rng)
        expected = norm_V_sq(grid801, spec, u) - m * lp_norm(grid801, u, p) ** p
        assert nehari_value(grid801, spec, u) == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("lam,rho", [
        (1.0, RhoSpec.sqrt_shift()),
        (0.5, RhoSpec.affine(0.3, 0.8)),
        (2.0, RhoSpec.power_shift(0.5)),
    ])
    def test_matches_gradient_pairing(self, grid801, lam, rho):
        spec = standard_spec(lam=lam, rho=rho)
        rng = np.random.default_rng(16)
        for _ in range(5):
            u = smooth_field(grid801, rng)
            lhs = nehari_value(grid801, spec, u)
            rhs = float(np.dot(gradient(grid801, spec, u), u))
            assert lhs == pytest.approx(rhs, rel=1e-8)


class TestNehariSlope:
    def test_zero_field(self, grid801):
        assert nehari_slope(grid801, standard_spec(), np.zeros(grid801.n)) == 0.0

    def test_lambda_zero_closed_form(self, grid801):
        m, p = 1.0, 5.0
        spec = standard_spec(lam=0.0, m=m, p=p)
        rng = np.random.default_rng(17)
        u = smooth_field(grid801, rng)
        expected = 2.0 * norm_V_sq(grid801, spec, u) - m * p * lp_norm(grid801, u, p) ** p
        assert nehari_slope(grid801, spec, u) == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize("rho", [
        RhoSpec.affine(0.0, 1.0),
        RhoSpec.sqrt_shift(),
        RhoSpec.affine_plus_sqrt(0.2, 0.7),
        RhoSpec.power_shift(0.6),
    ])
    def test_matches_ray_derivative_of_constraint(self, grid801, rho):
        # central differences of t -> nehari_value(t u) at t = 1
        spec = standard_spec(lam=0.9, rho=rho)
        rng = np.random.default_rng(18)
        u = smooth_field(grid801, rng)
        h = 1e-6
        jp = nehari_value(grid801, spec, (1 + h) * u)
        jm = nehari_value(grid801, spec, (1 - h) * u)
        fd = (jp - jm) / (2 * h)
        val = nehari_slope(grid801, spec, u)
        assert val == pytest.approx(fd, rel=1e-6)


class TestManifoldInequalities:
    def test_discrete_hoelder_chain(self, grid801):
        # int V^- u^2 <= |V^-|_{N/2} |u|_{2N/(N-2)}^2, exact with shared weights
        pot = PotentialSpec.inverse_power(1.0, c=1.0, alpha=1.0, cutoff=1.0)
        spec = standard_spec(potential=pot)
        from nehari_gs import potential_on_grid

        v, _ = potential_on_grid(pot, grid801)
        vminus = np.maximum(-v, 0.0)
        rng = np.random.default_rng(19)
        for k in range(20):
            # the bound is algebraic, so rough nodal noise must satisfy it too
            u = smooth_field(grid801, rng) if k % 2 == 0 else rng.standard_normal(grid801.n)
            lhs = integrate(grid801, vminus * u**2)
            rhs = lp_norm(grid801, vminus, 1.5) * lp_norm(grid801, u, 6.0) ** 2
            assert lhs <= rhs + 1e-12 * max(1.0, abs(rhs))

    @pytest.mark.parametrize("lam,rho", [
        (0.0, RhoSpec.sqrt_shift()),
        (1.0, RhoSpec.affine(0.0, 1.0)),
        (1.0, RhoSpec.sqrt_shift()),
    ])
    def test_projected_fields_slope_and_floor(self, grid801, lam, rho):
        spec = standard_spec(lam=lam, rho=rho)
        rng = np.random.default_rng(20)
        for _ in range(5):
            u = smooth_field(grid801, rng)
            pu, rep = project_to_nehari(grid801, spec, u)
            assert nehari_slope(grid801, spec, pu) < 0.0
            e = energy(grid801, spec, pu).total
            assert e >= 0.25 * norm_V_sq(grid801, spec, pu) - 1e-10


class TestDiagnostics:
    def test_smooth_field_flags(self, grid801):
        rng = np.random.default_rng(21)
        u = smooth_field(grid801, rng)
        for rho in (RhoSpec.sqrt_shift(), RhoSpec.affine(0.0, 1.0)):
            d = diagnostic_inequalities(grid801, standard_spec(rho=rho), u)
            assert d["sq_bound_ok"]
            assert d["mixed_sign_ok"]
