import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from presympt.core import (
    LinearDamping,
    State,
    ZeroDamping,
    eval_energy,
    grad_check,
    polynomial_scaling,
)
from presympt.problems import (
    PseudoHuberPotential,
    QuadraticGenerator,
    conformal_lift,
    make_bregman_system,
    make_quadratic_system,
    make_random_quadratic,
    make_relativistic_system,
    spread_quadratic,
    unit_quadratic,
)

from conftest import damped_oscillator, oscillator, random_state, shipped_systems


class TestQuadraticSystem:
    def test_reduces_to_harmonic_oscillator(self):
        system = oscillator()
        assert eval_energy(system, State(0.0, [1.0], [0.0])) == 0.5
        assert eval_energy(system, State(0.0, [0.0], [1.0])) == 0.5

    def test_gradient_fields(self):
        gamma = 0.2
        system = damped_oscillator(gamma)
        t, q, p = 1.7, np.array([0.4]), np.array([-1.1])
        np.testing.assert_allclose(system.grad_p(t, q, p), math.exp(-gamma * t) * p, rtol=1e-15)
        np.testing.assert_allclose(system.grad_q(t, q, p), math.exp(gamma * t) * q, rtol=1e-15)

    def test_dH_dt_formula(self):
        gamma = 0.2
        system = damped_oscillator(gamma)
        t, q, p = 1.3, np.array([2.0]), np.array([0.5])
        kinetic = 0.5 * math.exp(-gamma * t) * p[0] ** 2
        potential = math.exp(gamma * t) * 0.5 * q[0] ** 2
        expected = -gamma * kinetic + gamma * potential
        assert abs(system.dH_dt(t, q, p) - expected) <= 1e-12

    def test_non_spd_mass_rejected(self):
        with pytest.raises(ValueError):
            make_quadratic_system(
                np.array([[1.0, 0.0], [0.0, -1.0]]), ZeroDamping(), ZeroDamping(), unit_quadratic(2)
            )
        with pytest.raises(ValueError):
            make_quadratic_system(
                np.array([[1.0, 0.5], [0.2, 1.0]]), ZeroDamping(), ZeroDamping(), unit_quadratic(2)
            )

    def test_general_mass_matrix(self):
        mass = np.array([[2.0, 0.3], [0.3, 1.0]])
        system = make_quadratic_system(mass, ZeroDamping(), ZeroDamping(), unit_quadratic(2))
        p = np.array([0.7, -0.4])
        np.testing.assert_allclose(
            system.grad_p(0.0, np.zeros(2), p), np.linalg.solve(mass, p), rtol=1e-12
        )


class TestRandomQuadratic:
    def test_spectrum_within_marchenko_pastur_support(self):
        problem = make_random_quadratic(200, 0.8, seed=0)
        eigs = np.linalg.eigvalsh(problem.matrix)
        upper = (1 + math.sqrt(0.8)) ** 2
        assert eigs.max() <= upper * 1.15
        assert eigs.max() >= upper * 0.85

    def test_rank(self):
        problem = make_random_quadratic(200, 0.8, seed=0)
        eigs = np.linalg.eigvalsh(problem.matrix)
        assert int(np.sum(eigs > 1e-10)) == 160

    def test_deterministic_for_seed(self):
        a = make_random_quadratic(50, 0.5, seed=7)
        b = make_random_quadratic(50, 0.5, seed=7)
        np.testing.assert_array_equal(a.matrix, b.matrix)
        c = make_random_quadratic(50, 0.5, seed=8)
        assert not np.array_equal(a.matrix, c.matrix)

    def test_symmetry_and_psd(self):
        problem = make_random_quadratic(100, 0.8, seed=3)
        assert np.max(np.abs(problem.matrix - problem.matrix.T)) <= 1e-12
        assert np.linalg.eigvalsh(problem.matrix).min() >= -1e-10

    def test_validation(self):
        with pytest.raises(ValueError):
            make_random_quadratic(1, 0.8, seed=0)
        with pytest.raises(ValueError):
            make_random_quadratic(100, 0.0, seed=0)
        with pytest.raises(ValueError):
            make_random_quadratic(100, 1.5, seed=0)

    def test_minimizer_metadata(self):
        problem = make_random_quadratic(20, 0.5, seed=1)
        assert problem.f_star == 0.0
        assert problem.f(problem.q_star) == 0.0


class TestConvexGenerator:
    def test_quadratic_duality_round_trip(self):
        rng = np.random.default_rng(0)
        gen = QuadraticGenerator(np.array([[2.0, 0.4], [0.4, 1.0]]))
        for _ in range(100):
            x = rng.standard_normal(2) * 5
            back = gen.grad_h_star(gen.grad_h(x))
            assert np.linalg.norm(back - x) <= 1e-8 * (1 + np.linalg.norm(x))

    def test_hessian_spd(self):
        gen = QuadraticGenerator(np.array([[2.0, 0.4], [0.4, 1.0]]))
        hess = gen.hess_h(np.zeros(2))
        assert np.allclose(hess, hess.T)
        assert np.linalg.eigvalsh(hess).min() > 0

    def test_dual_value(self):
        gen = QuadraticGenerator(np.diag([2.0, 4.0]))
        x = np.array([1.0, 1.0])
        # h*(x) = x . M^{-1} x / 2
        assert abs(gen.h_star(x) - (0.5 / 2.0 + 0.5 / 4.0)) <= 1e-14


class TestBregmanSystem:
    def test_reduction_to_quadratic_kinetic(self):
        # quadratic generator M: gradients agree with the separable system
        # built from eta1 = gamma - alpha, eta2 = alpha + beta + gamma
        mass = np.array([[1.5, 0.2], [0.2, 0.8]])
        sc = polynomial_scaling(2.0)
        pot = unit_quadratic(2)
        breg = make_bregman_system(QuadraticGenerator(mass), pot, sc, 2)
        m_inv = np.linalg.inv(mass)
        rng = np.random.default_rng(21)
        for _ in range(100):
            s = random_state(rng, 2, t_range=(0.0, 3.0))
            t, q, p = s.t, s.q, s.p
            eta1 = sc.gamma(t) - sc.alpha(t)
            eta2 = sc.alpha(t) + sc.beta(t) + sc.gamma(t)
            gp_expected = math.exp(-eta1) * (m_inv @ p)
            gq_expected = math.exp(eta2) * pot.grad_f(q)
            h_expected = 0.5 * math.exp(-eta1) * float(p @ m_inv @ p) + math.exp(eta2) * pot.f(q)
            assert np.max(np.abs(breg.grad_p(t, q, p) - gp_expected)) <= 1e-10 * (
                1 + np.max(np.abs(gp_expected))
            )
            assert np.max(np.abs(breg.grad_q(t, q, p) - gq_expected)) <= 1e-10 * (
                1 + np.max(np.abs(gq_expected))
            )
            assert abs(breg.eval(t, q, p) - h_expected) <= 1e-10 * (1 + abs(h_expected))

    def test_zero_momentum_energy(self):
        sc = polynomial_scaling(2.0)
        pot = unit_quadratic(1)
        breg = make_bregman_system(QuadraticGenerator(np.eye(1)), pot, sc, 1)
        t, q = 1.5, np.array([3.0])
        expected = math.exp(sc.alpha(t) + sc.beta(t) + sc.gamma(t)) * pot.f(q)
        assert abs(breg.eval(t, q, np.zeros(1)) - expected) <= 1e-12 * (1 + abs(expected))

    def test_grad_check(self):
        sc = polynomial_scaling(2.0)
        breg = make_bregman_system(QuadraticGenerator(np.eye(2)), unit_quadratic(2), sc, 2)
        rng = np.random.default_rng(5)
        for _ in range(100):
            s = random_state(rng, 2)
            assert grad_check(breg, s) <= 1e-6

    def test_bad_duality_rejected(self):
        class BrokenGenerator(QuadraticGenerator):
            def grad_h_star(self, x):
                return 2.0 * super().grad_h_star(x)

        with pytest.raises(ValueError, match="duality"):
            make_bregman_system(BrokenGenerator(np.eye(2)), unit_quadratic(2), polynomial_scaling(2.0), 2)


class TestRelativisticSystem:
    def test_zero_momentum_energy(self):
        pot = unit_quadratic(1)
        system = make_relativistic_system(pot, 0.2, 1.0, 5.0, dim=1)
        t, q = 0.7, np.array([2.0])
        expected = math.exp(0.2 * t) * (1.0 * 25.0 + pot.f(q))
        assert abs(system.eval(t, q, np.zeros(1)) - expected) <= 1e-12

    def test_velocity_bounded_by_speed_limit(self):
        system = make_relativistic_system(unit_quadratic(2), 0.2, 1.0, 5.0, dim=2)
        rng = np.random.default_rng(9)
        for _ in range(1000):
            scale = 10 ** rng.uniform(-3, 6)
            p = rng.standard_normal(2)
            p = p / np.linalg.norm(p) * scale
            speed = np.linalg.norm(system.grad_p(rng.uniform(0, 3), np.zeros(2), p))
            assert speed < 5.0

    def test_paper_style_parameters_accepted(self):
        # m = 1, c = 5, step/damping chosen via mu = e^{-gamma h / 2} = 0.99
        h = 2.8e-2
        gamma = -2.0 * math.log(0.99) / h
        system = make_relativistic_system(unit_quadratic(1), gamma, 1.0, 5.0, dim=1)
        assert system.gamma > 0

    def test_validation(self):
        with pytest.raises(ValueError):
            make_relativistic_system(unit_quadratic(1), 0.2, 0.0, 5.0)
        with pytest.raises(ValueError):
            make_relativistic_system(unit_quadratic(1), 0.2, 1.0, -1.0)

    def test_grad_check(self):
        system = make_relativistic_system(unit_quadratic(2), 0.2, 1.0, 5.0, dim=2)
        s = State(0.0, [1.0, 2.0], [0.3, -0.1])
        assert grad_check(system, s, eps=1e-5) <= 1e-6


class TestConformalLift:
    def test_zero_damping_is_identity(self):
        base = oscillator()
        lifted = conformal_lift(base, ZeroDamping())
        rng = np.random.default_rng(2)
        for _ in range(20):
            s = random_state(rng, 1)
            assert abs(lifted.eval(s.t, s.q, s.p) - base.eval(0.0, s.q, s.p)) <= 1e-14

    def test_linear_damping_matches_damped_system(self):
        lifted = conformal_lift(oscillator(), LinearDamping(0.2))
        damped = damped_oscillator(0.2)
        rng = np.random.default_rng(4)
        for _ in range(50):
            s = random_state(rng, 1)
            assert abs(lifted.eval(s.t, s.q, s.p) - damped.eval(s.t, s.q, s.p)) <= 1e-12 * (
                1 + abs(damped.eval(s.t, s.q, s.p))
            )
            np.testing.assert_allclose(
                lifted.grad_q(s.t, s.q, s.p), damped.grad_q(s.t, s.q, s.p), rtol=1e-12
            )
            np.testing.assert_allclose(
                lifted.grad_p(s.t, s.q, s.p), damped.grad_p(s.t, s.q, s.p), rtol=1e-12
            )

    def test_grad_check(self):
        lifted = conformal_lift(oscillator(), LinearDamping(0.2))
        rng = np.random.default_rng(6)
        for _ in range(100):
            assert grad_check(lifted, random_state(rng, 1)) <= 1e-6

    def test_time_dependent_base_rejected(self):
        with pytest.raises(ValueError, match="time-dependent"):
            conformal_lift(damped_oscillator(0.2), LinearDamping(0.1))


class TestPotentials:
    def test_pseudo_huber_limits(self):
        pot = PseudoHuberPotential(1.0, 1)
        # quadratic core: f ~ q^2/2 for small q
        assert abs(pot.f(np.array([1e-4])) - 0.5e-8) <= 1e-14
        # linear tail: slope approaches 1
        g = pot.grad_f(np.array([1e4]))
        assert abs(g[0] - 1.0) <= 1e-7

    def test_spread_quadratic(self):
        pot = spread_quadratic(1e-4, 1.0, 5)
        eigs = np.diag(pot.matrix)
        assert eigs[0] == 1e-4 and eigs[-1] == 1.0
        assert np.all(np.diff(np.log(eigs)) > 0)
        with pytest.raises(ValueError):
            spread_quadratic(0.0, 1.0, 5)

    def test_known_minimizer_is_minimal_on_samples(self):
        rng = np.random.default_rng(13)
        for pot in (
            unit_quadratic(3),
            PseudoHuberPotential(0.5, 3),
            make_random_quadratic(10, 0.8, seed=4),
            spread_quadratic(1e-3, 1.0, 3),
        ):
            n = len(pot.q_star)
            f_star = pot.f(pot.q_star)
            assert abs(f_star - pot.f_star) <= 1e-14
            for _ in range(50):
                assert f_star <= pot.f(rng.standard_normal(n) * 3)

    @given(scale=st.floats(0.01, 10.0), q=st.floats(-100.0, 100.0))
    @settings(max_examples=100, deadline=None)
    def test_pseudo_huber_gradient_matches_fd(self, scale, q):
        pot = PseudoHuberPotential(scale, 1)
        eps = 1e-6 * max(1.0, abs(q))
        fd = (pot.f(np.array([q + eps])) - pot.f(np.array([q - eps]))) / (2 * eps)
        assert abs(pot.grad_f(np.array([q]))[0] - fd) <= 1e-5 * (1 + abs(fd))


class TestShippedSystemsInvariant:
    def test_grad_check_everywhere(self, systems):
        rng = np.random.default_rng(12)
        for name, system in systems.items():
            for _ in range(100):
                s = random_state(rng, system.dim)
                err = grad_check(system, s)
                assert err <= 1e-6, f"{name}: grad check {err}"
