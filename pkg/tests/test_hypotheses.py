import numpy as np
import pytest

from nehari_gs import (
    NonlinearitySpec,
    PotentialSpec,
    RhoSpec,
    build_grid,
    check_nonlinearity,
    check_potential,
    check_problem,
    check_rho,
    integrate,
    sobolev_constant,
)
from conftest import standard_spec

ALPHA_THRESHOLD = 1.0 - 1.0 / np.sqrt(2.0)


def bubble_rayleigh_quotient(dim, r_max, n):
    """|grad U|_2^2 / |U|_{2*}^2 for U = (1+r^2)^{-(N-2)/2}, analytic integrands."""
    g = build_grid(dim, r_max, n, allow_high_dim=True)
    r = g.nodes
    U = (1.0 + r**2) ** (-(dim - 2) / 2.0)
    dU = -(dim - 2) * r * (1.0 + r**2) ** (-dim / 2.0)
    two_star = 2.0 * dim / (dim - 2.0)
    num = integrate(g, dU**2)
    den = integrate(g, np.abs(U) ** two_star) ** (2.0 / two_star)
    return num / den


class TestSobolevConstant:
    @pytest.mark.parametrize("dim,r_max,n", [(3, 400.0, 8001), (4, 120.0, 6001), (6, 60.0, 6001)])
    def test_against_bubble_quotient(self, dim, r_max, n):
        S = sobolev_constant(dim)
        oracle = bubble_rayleigh_quotient(dim, r_max, n)
        assert S == pytest.approx(oracle, rel=0.01)

    def test_low_dim_rejected(self):
        with pytest.raises(ValueError):
            sobolev_constant(2)


class TestCheckPotential:
    def test_constant_passes(self, grid801):
        rep = check_potential(PotentialSpec.constant(1.0), grid801)
        assert rep.verdicts["V1"].ok() and rep.verdicts["V2"].status == "pass"
        assert rep.constants["V_minus_norm_N_half"] == 0.0

    def test_small_well_passes(self, grid801):
        spec = PotentialSpec.inverse_power(1.0, c=0.5, alpha=1.0, cutoff=1.0)
        rep = check_potential(spec, grid801)
        assert rep.verdicts["V2"].status == "pass"
        assert 0.0 < rep.constants["V_minus_norm_N_half"] < rep.constants["sobolev_S"]

    def test_deep_well_fails_with_witness(self, grid801):
        spec = PotentialSpec.inverse_power(1.0, c=50.0, alpha=1.0, cutoff=1.0)
        rep = check_potential(spec, grid801)
        verdict = rep.verdicts["V2"]
        assert not verdict.ok()
        assert verdict.witness is not None
        assert verdict.witness.lhs >= verdict.witness.rhs

    def test_single_flip_in_depth(self, grid801):
        def passes(c):
            spec = PotentialSpec.inverse_power(1.0, c=c, alpha=1.0, cutoff=1.0)
            return check_potential(spec, grid801).verdicts["V2"].ok()

        assert passes(0.1) and not passes(50.0)
        lo, hi = 0.1, 50.0
        for _ in range(25):
            mid = 0.5 * (lo + hi)
            if passes(mid):
                lo = mid
            else:
                hi = mid
        # threshold bracketed; verdict is monotone across it
        cs = np.linspace(0.1, 50.0, 12)
        flips = sum(passes(a) != passes(b) for a, b in zip(cs, cs[1:]))
        assert flips == 1

    def test_unsettled_tail_fails_v1(self, grid801):
        radii = np.linspace(0.0, 20.0, 41)
        values = 1.0 + 0.5 * radii / 20.0  # still rising at r_max
        rep = check_potential(PotentialSpec.tabulated(1.0, radii, values), grid801)
        assert not rep.verdicts["V1"].ok()
        assert rep.verdicts["V1"].witness is not None


class TestCheckNonlinearity:
    def test_power_passes_with_exact_delta(self):
        rep = check_nonlinearity(NonlinearitySpec.power(1.0, 5.0), 3)
        assert all(rep.verdicts[k].ok() for k in ("f1", "f2", "f3", "f4"))
        assert rep.constants["delta_hat"] == pytest.approx(3.0, abs=1e-9)
        assert rep.constants["m_hat"] == pytest.approx(1.0, rel=1e-12)

    def test_linear_f_fails_f1(self):
        spec = NonlinearitySpec.custom(
            f=lambda t: np.asarray(t, dtype=float),
            fprime=lambda t: np.ones_like(np.asarray(t, dtype=float)),
            F=lambda t: np.asarray(t, dtype=float) ** 2 / 2.0,
            p=5.0,
            m=1.0,
        )
        rep = check_nonlinearity(spec, 3)
        verdict = rep.verdicts["f1"]
        assert not verdict.ok()
        assert verdict.witness.point == 0.0

    def test_cubic_with_declared_p5_fails_f2_and_f4(self):
        spec = NonlinearitySpec.custom(
            f=lambda t: np.asarray(t, dtype=float) ** 3,
            fprime=lambda t: 3.0 * np.asarray(t, dtype=float) ** 2,
            F=lambda t: np.asarray(t, dtype=float) ** 4 / 4.0,
            p=5.0,
            m=1.0,
        )
        rep = check_nonlinearity(spec, 3)
        assert not rep.verdicts["f2"].ok()
        assert rep.verdicts["f2"].witness.point >= 1e3  # violation shows at large t
        assert not rep.verdicts["f4"].ok()

    def test_exponent_range_by_dimension(self):
        assert check_nonlinearity(NonlinearitySpec.power(1.0, 12.0), 3).verdicts["f2"].ok()
        assert not check_nonlinearity(NonlinearitySpec.power(1.0, 3.0), 3).verdicts["f2"].ok()
        assert not check_nonlinearity(NonlinearitySpec.power(1.0, 12.0), 5).verdicts["f2"].ok()
        assert check_nonlinearity(NonlinearitySpec.power(1.0, 5.5), 6).verdicts["f2"].ok()
        assert not check_nonlinearity(NonlinearitySpec.power(1.0, 7.0), 6).verdicts["f2"].ok()

    def test_dimension_four_warns(self):
        verdict = check_nonlinearity(NonlinearitySpec.power(1.0, 8.0), 4).verdicts["f2"]
        assert verdict.status == "pass_with_warning"
        assert "N = 4" in verdict.note


class TestCheckRho:
    @pytest.mark.parametrize(
        "spec",
        [
            RhoSpec.affine(0.0, 1.0),
            RhoSpec.affine(2.0, 0.5),
            RhoSpec.sqrt_shift(),
            RhoSpec.affine_plus_sqrt(1.0, 2.0),
            RhoSpec.power_shift(0.30),
            RhoSpec.power_shift(0.5),
            RhoSpec.power_shift(1.0),
        ],
    )
    def test_admissible_families_pass(self, spec):
        rep = check_rho(spec)
        assert rep.all_ok(), rep.failures()

    @pytest.mark.parametrize("alpha", [0.1, 0.2, 0.25])
    def test_small_alpha_fails_r4_with_witness(self, alpha):
        rep = check_rho(RhoSpec.power_shift(alpha))
        verdict = rep.verdicts["rho4"]
        assert not verdict.ok()
        w = verdict.witness
        assert w is not None
        assert w.lhs < w.rhs  # rho' dips below -sqrt(2) rho'' s at the witness

    def test_alpha_02_witness_location(self):
        # the violation starts at s = 1/(sqrt(2)*0.8 - 1) ~ 7.6
        w = check_rho(RhoSpec.power_shift(0.2)).verdicts["rho4"].witness
        assert 7.0 <= w.point <= 9.0

    def test_alpha_above_one_rejected(self):
        rep = check_rho(RhoSpec.power_shift(1.5))
        assert not rep.all_ok()
        assert not rep.verdicts["rho4"].ok()

    def test_flip_brackets_threshold(self):
        lo, hi = 0.1, 0.5
        assert not check_rho(RhoSpec.power_shift(lo)).all_ok()
        assert check_rho(RhoSpec.power_shift(hi)).all_ok()
        for _ in range(12):
            mid = 0.5 * (lo + hi)
            if check_rho(RhoSpec.power_shift(mid)).all_ok():
                hi = mid
            else:
                lo = mid
        assert lo <= ALPHA_THRESHOLD + 0.01
        assert hi >= ALPHA_THRESHOLD - 0.01

    def test_custom_rho_attested(self):
        spec = RhoSpec.custom(
            lambda s: np.sqrt(1.0 + s),
            lambda s: 0.5 / np.sqrt(1.0 + s),
            lambda s: -0.25 * (1.0 + s) ** -1.5,
            lambda s: 0.375 * (1.0 + s) ** -2.5,
            lambda s: -0.9375 * (1.0 + s) ** -3.5,
        )
        rep = check_rho(spec)
        assert rep.all_ok()
        assert "finite-difference" in rep.verdicts["rho1"].note

    def test_custom_rho_inconsistent_derivatives_fail(self):
        spec = RhoSpec.custom(
            lambda s: np.sqrt(1.0 + s),
            lambda s: 0.5 / np.sqrt(1.0 + s),
            lambda s: np.zeros_like(np.asarray(s, dtype=float)),  # wrong second derivative
            lambda s: np.zeros_like(np.asarray(s, dtype=float)),
            lambda s: np.zeros_like(np.asarray(s, dtype=float)),
        )
        rep = check_rho(spec)
        assert not rep.verdicts["rho1"].ok()

    def test_constants_estimated(self):
        rep = check_rho(RhoSpec.sqrt_shift())
        assert rep.constants["C1"] == pytest.approx(0.5, rel=1e-6)
        assert rep.constants["C5"] > 0.0


class TestCheckProblem:
    def test_standard_config_all_pass(self, grid801):
        rep = check_problem(standard_spec(), grid801)
        assert rep.all_ok()
        assert {"V1", "V2", "f1", "f2", "f3", "f4", "rho1", "rho2", "rho3", "rho4", "rho5"} <= set(
            rep.verdicts
        )

    def test_bad_rho_reported(self, grid801):
        rep = check_problem(standard_spec(rho=RhoSpec.power_shift(0.2)), grid801)
        assert rep.failures() == ["rho4"]

    def test_serializable(self, grid801):
        import json

        rep = check_problem(standard_spec(), grid801)
        payload = json.dumps(rep.to_dict())
        assert "constants" in payload
