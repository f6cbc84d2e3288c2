import math

import numpy as np
import pytest

from presympt.core import State
from presympt.integrators import PresymplecticLeapfrogA, integrate, make_integrator, suzuki_yoshida4
from presympt.oracles import (
    BesselDomainError,
    bessel_jy,
    estimate_order,
    exact_const_damping,
    exact_decaying_damping,
    hamiltonian_error_series,
    max_hamiltonian_error,
    reference_trajectory,
)

from conftest import damped_oscillator, decaying_oscillator


def deriv1(f, t, e):
    """Fourth-order central first derivative."""
    return (-f(t + 2 * e) + 8 * f(t + e) - 8 * f(t - e) + f(t - 2 * e)) / (12 * e)


def deriv2(f, t, e):
    """Fourth-order central second derivative."""
    return (-f(t + 2 * e) + 16 * f(t + e) - 30 * f(t) + 16 * f(t - e) - f(t - 2 * e)) / (
        12 * e * e
    )


class TestBessel:
    def test_j0_small_argument(self):
        # independently summed ascending series gives J0(0.5) = 0.93846980724...
        j, _ = bessel_jy(0.0, 0.5)
        assert abs(j - 0.938469807240813) <= 1e-12

    def test_against_scipy_grid(self):
        special = pytest.importorskip("scipy.special")
        nus = np.concatenate([np.arange(0, 10.25, 0.25), [0.1, 1.99, 3.3333, 9.9]])
        xs = np.concatenate(
            [np.geomspace(0.5, 200.0, 40), [11.9, 11.99, 12.0, 12.01, 12.1, 13.0, 199.0]]
        )
        for nu in nus:
            for x in xs:
                j, y = bessel_jy(float(nu), float(x))
                j_ref = special.jv(nu, x)
                y_ref = special.yv(nu, x)
                assert abs(j - j_ref) <= 1e-10 * (1 + abs(j_ref))
                assert abs(y - y_ref) <= 1e-10 * (1 + abs(y_ref))

    def test_wronskian_identity(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            nu = rng.uniform(0.0, 9.0)
            x = rng.uniform(0.5, 200.0)
            j0, y0 = bessel_jy(nu, x)
            j1, y1 = bessel_jy(nu + 1.0, x)
            residual = j1 * y0 - j0 * y1 - 2.0 / (math.pi * x)
            assert abs(residual) <= 1e-10

    def test_three_term_recurrence(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            nu = rng.uniform(1.0, 9.0)
            x = rng.uniform(0.5, 200.0)
            j_lo, _ = bessel_jy(nu - 1.0, x)
            j_mid, _ = bessel_jy(nu, x)
            j_hi, _ = bessel_jy(nu + 1.0, x)
            lhs = j_lo + j_hi
            rhs = (2.0 * nu / x) * j_mid
            assert abs(lhs - rhs) <= 1e-9 * (1 + abs(rhs))

    def test_domain_errors(self):
        with pytest.raises(BesselDomainError):
            bessel_jy(-0.1, 1.0)
        with pytest.raises(BesselDomainError):
            bessel_jy(10.5, 1.0)
        with pytest.raises(BesselDomainError):
            bessel_jy(1.0, 0.4)
        with pytest.raises(BesselDomainError):
            bessel_jy(1.0, 201.0)

    def test_half_integer_closed_forms(self):
        # J_{1/2}(x) = sqrt(2/(pi x)) sin x, Y_{1/2}(x) = -sqrt(2/(pi x)) cos x
        for x in (0.7, 3.0, 20.0, 150.0):
            j, y = bessel_jy(0.5, x)
            amp = math.sqrt(2.0 / (math.pi * x))
            assert abs(j - amp * math.sin(x)) <= 1e-12
            assert abs(y + amp * math.cos(x)) <= 1e-12


class TestConstantDampingSolution:
    def test_initial_conditions(self):
        sol = exact_const_damping(0.2, 10.0)
        q0, p0 = sol.at(0.0)
        assert abs(q0 - 10.0) <= 1e-10
        assert abs(p0) <= 1e-10

    def test_frequency_value(self):
        sol = exact_const_damping(0.2, 10.0)
        assert abs(sol.omega - math.sqrt(3.96)) <= 1e-12
        assert abs(sol.omega - 1.98997487) <= 5e-9

    def test_ode_residual(self):
        # q'' + gamma q' + q = 0 via fourth-order stencils; e = 1e-3 keeps
        # round-off amplification below the 1e-8 target for q0 = 10
        gamma = 0.2
        sol = exact_const_damping(gamma, 10.0)
        f = lambda t: sol.at(t)[0]
        for t in np.linspace(0.1, 50.0, 200):
            res = deriv2(f, t, 1e-3) + gamma * deriv1(f, t, 1e-3) + f(t)
            assert abs(res) <= 1e-8

    def test_canonical_momentum_consistency(self):
        # p = e^{gamma t} q'
        gamma = 0.2
        sol = exact_const_damping(gamma, 10.0)
        f = lambda t: sol.at(t)[0]
        for t in (0.5, 3.0, 17.0):
            qdot = deriv1(f, t, 1e-3)
            assert abs(sol.at(t)[1] - math.exp(gamma * t) * qdot) <= 1e-7

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            exact_const_damping(2.0, 1.0)
        with pytest.raises(ValueError):
            exact_const_damping(-2.0, 1.0)
        # energy injection within the real-frequency window is fine
        exact_const_damping(-1.0, 1.0)


class TestDecayingDampingSolution:
    @pytest.mark.parametrize("gamma", [2.5, 3.0, 4.0])
    def test_initial_conditions(self, gamma):
        sol = exact_decaying_damping(gamma, 1.0)
        q0, p0 = sol.at(0.0)
        assert abs(q0 - 1.0) <= 1e-10
        assert abs(p0) <= 1e-10

    def test_integer_orders_at_gamma_3(self):
        sol = exact_decaying_damping(3.0, 1.0)
        assert sol.alpha_plus == 2.0
        assert sol.alpha_minus == 1.0

    def test_ode_residual(self):
        # q'' + gamma/(t+1) q' + q = 0; stencil spacing 0.01 balances the
        # ~1e-12 Bessel evaluation noise against truncation, meeting 1e-7
        gamma = 3.0
        sol = exact_decaying_damping(gamma, 1.0)
        f = lambda t: sol.at(t)[0]
        for t in np.linspace(0.2, 50.0, 150):
            res = deriv2(f, t, 0.01) + gamma / (t + 1.0) * deriv1(f, t, 0.01) + f(t)
            assert abs(res) <= 1e-7

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            exact_decaying_damping(1.0, 1.0)


class TestReferenceTrajectory:
    def test_matches_exact_constant_damping(self):
        system = damped_oscillator(0.2)
        sol = exact_const_damping(0.2, 10.0)
        ref = reference_trajectory(system, State(0.0, [10.0], [0.0]), 10.0, 21)
        for k in range(len(ref)):
            q, _ = sol.at(float(ref.times[k]))
            assert abs(ref.positions[k, 0] - q) <= 1e-9

    def test_matches_exact_decaying_damping(self):
        system = decaying_oscillator(3.0)
        sol = exact_decaying_damping(3.0, 1.0)
        ref = reference_trajectory(system, State(0.0, [1.0], [0.0]), 5.0, 11)
        for k in range(len(ref)):
            q, p = sol.at(float(ref.times[k]))
            assert abs(ref.positions[k, 0] - q) <= 1e-9
            assert abs(ref.momenta[k, 0] - p) <= 1e-9 * (1 + abs(p))

    def test_zero_span(self):
        s0 = State(0.0, [1.0], [0.5])
        ref = reference_trajectory(damped_oscillator(), s0, 0.0, 5)
        assert len(ref) == 1
        assert ref.times[0] == 0.0

    def test_step_halving_self_consistency(self):
        system = damped_oscillator(0.2)
        s0 = State(0.0, [1.0], [0.0])
        coarse = reference_trajectory(system, s0, 2.0, 11, h_ref=1e-4)
        fine = reference_trajectory(system, s0, 2.0, 11, h_ref=5e-5)
        assert abs(coarse.positions[-1, 0] - fine.positions[-1, 0]) <= 1e-11


class TestErrorSeries:
    def test_zero_error_against_matching_reference(self):
        system = damped_oscillator(0.2)
        traj = integrate(PresymplecticLeapfrogA(), system, State(0.0, [1.0], [0.0]), 0.01, 100)
        series = hamiltonian_error_series(system, traj, traj)
        assert np.all(series == 0.0)

    def test_grid_mismatch_rejected(self):
        system = damped_oscillator(0.2)
        a = integrate(PresymplecticLeapfrogA(), system, State(0.0, [1.0], [0.0]), 0.01, 100)
        b = integrate(PresymplecticLeapfrogA(), system, State(0.0, [1.0], [0.0]), 0.02, 100)
        with pytest.raises(ValueError):
            hamiltonian_error_series(system, a, b)

    def test_error_quartering_for_leapfrog(self):
        system = damped_oscillator(0.2)
        sol = exact_const_damping(0.2, 10.0)
        s0 = State(0.0, [10.0], [0.0])
        h = 0.01
        errs = []
        for step in (h, h / 2):
            traj = integrate(PresymplecticLeapfrogA(), system, s0, step, int(round(10.0 / step)))
            errs.append(max_hamiltonian_error(system, traj, sol))
        ratio = errs[0] / errs[1]
        assert 3.4 <= ratio <= 4.6

    def test_error_sixteenthing_for_sy4(self):
        system = damped_oscillator(0.2)
        sol = exact_const_damping(0.2, 10.0)
        s0 = State(0.0, [10.0], [0.0])
        h = 0.01
        errs = []
        for step in (h, h / 2):
            traj = integrate(suzuki_yoshida4(), system, s0, step, int(round(10.0 / step)))
            errs.append(max_hamiltonian_error(system, traj, sol))
        ratio = errs[0] / errs[1]
        assert 13.0 <= ratio <= 19.0


class TestEstimateOrder:
    def test_validation(self):
        system = damped_oscillator(0.2)
        sol = exact_const_damping(0.2, 10.0)
        s0 = State(0.0, [10.0], [0.0])
        with pytest.raises(ValueError):
            estimate_order(PresymplecticLeapfrogA(), system, s0, 10.0, [0.01], sol)
        with pytest.raises(ValueError):
            estimate_order(PresymplecticLeapfrogA(), system, s0, 10.0, [0.02, 0.015, 0.0125, 0.01], sol)

    def test_divergent_run_names_step_size(self):
        # the growing e^{gamma t} force overflows the non-preserving baseline
        system = damped_oscillator(0.2)
        sol = exact_const_damping(0.2, 10.0)
        s0 = State(0.0, [10.0], [0.0])
        with pytest.raises(RuntimeError, match="h=4"):
            estimate_order(
                make_integrator("explicit_euler"), system, s0, 4000.0, [4.0, 1.0, 0.5, 0.25], sol
            )

    def test_decaying_damping_euler_slope(self):
        system = decaying_oscillator(3.0)
        sol = exact_decaying_damping(3.0, 1.0)
        slope = estimate_order(
            make_integrator("euler_a"),
            system,
            State(0.0, [1.0], [0.0]),
            5.0,
            [0.02, 0.01, 0.005, 0.0025, 0.00125],
            sol,
        )
        assert 0.8 <= slope <= 1.2
