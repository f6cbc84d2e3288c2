"""Concrete Hamiltonian systems and benchmark-problem generators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DampingSchedule, HamiltonianSystem, ScalingTriple


class Potential:
    """Objective contract: value f(q), gradient, optional known minimizer."""

    q_star: np.ndarray | None = None
    f_star: float | None = None

    def f(self, q: np.ndarray) -> float:
        raise NotImplementedError

    def grad_f(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class QuadraticPotential(Potential):
    """f(q) = q . A q / 2 for a symmetric positive semidefinite A."""

    def __init__(self, matrix):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError("matrix must be square")
        self.q_star = np.zeros(self.matrix.shape[0])
        self.f_star = 0.0

    def f(self, q):
        q = np.asarray(q, dtype=float)
        return 0.5 * float(q @ self.matrix @ q)

    def grad_f(self, q):
        return self.matrix @ np.asarray(q, dtype=float)


def unit_quadratic(n: int = 1) -> QuadraticPotential:
    """f(q) = |q|^2 / 2."""
    return QuadraticPotential(np.eye(n))


def spread_quadratic(lambda_min: float, lambda_max: float, modes: int) -> QuadraticPotential:
    """Diagonal quadratic with log-spaced eigenvalues.

    With unit initial displacement per mode, slow modes stay frozen
    while fast ones decay, and the total optimality gap genuinely
    attains the worst-case accelerated rate instead of beating it; a
    single-mode quadratic over-performs the bound.
    """
    if not 0.0 < lambda_min <= lambda_max:
        raise ValueError("need 0 < lambda_min <= lambda_max")
    if modes < 2:
        raise ValueError("need at least 2 modes")
    return QuadraticPotential(np.diag(np.geomspace(lambda_min, lambda_max, modes)))


class PseudoHuberPotential(Potential):
    """Smoothed absolute value, f(q) = scale * (sqrt(1 + |q|^2/scale^2) - 1).

    Quadratic within |q| ~ scale, linear with unit slope far outside;
    handy as a convex objective whose decay genuinely tracks the
    worst-case accelerated rate instead of over-performing it.
    """

    def __init__(self, scale: float = 1.0, dim: int = 1):
        if scale <= 0.0:
            raise ValueError("scale must be positive")
        self.scale = scale
        self.q_star = np.zeros(dim)
        self.f_star = 0.0

    def f(self, q):
        q = np.asarray(q, dtype=float)
        return self.scale * (math.sqrt(1.0 + float(q @ q) / self.scale**2) - 1.0)

    def grad_f(self, q):
        q = np.asarray(q, dtype=float)
        return q / (self.scale * math.sqrt(1.0 + float(q @ q) / self.scale**2))


class QuadraticKineticSystem(HamiltonianSystem):
    """H = e^{-eta1(t)} p.M^{-1}p / 2 + e^{eta2(t)} f(q); always separable."""

    separable = True

    def __init__(self, m_inv, eta1, eta2, potential, mass=None):
        self.m_inv = np.atleast_2d(np.asarray(m_inv, dtype=float))
        self.eta1 = eta1
        self.eta2 = eta2
        self.potential = potential
        self.mass = mass
        self.dim = self.m_inv.shape[0]

    def _kinetic(self, p):
        return 0.5 * float(p @ self.m_inv @ p)

    def eval(self, t, q, p):
        return math.exp(-self.eta1.eta(t)) * self._kinetic(p) + math.exp(
            self.eta2.eta(t)
        ) * self.potential.f(q)

    def grad_q(self, t, q, p):
        return math.exp(self.eta2.eta(t)) * self.potential.grad_f(q)

    def grad_p(self, t, q, p):
        return math.exp(-self.eta1.eta(t)) * (self.m_inv @ p)

    def dH_dt(self, t, q, p):
        return -self.eta1.eta_dot(t) * math.exp(-self.eta1.eta(t)) * self._kinetic(p) + self.eta2.eta_dot(
            t
        ) * math.exp(self.eta2.eta(t)) * self.potential.f(q)


def make_quadratic_system(
    mass: np.ndarray,
    eta1: DampingSchedule,
    eta2: DampingSchedule,
    potential: Potential,
) -> QuadraticKineticSystem:
    """Damped system with kinetic energy p.M^{-1}p/2; M must be symmetric positive definite."""
    mass = np.atleast_2d(np.asarray(mass, dtype=float))
    if not np.allclose(mass, mass.T, atol=1e-12):
        raise ValueError("mass matrix must be symmetric")
    try:
        np.linalg.cholesky(mass)
    except np.linalg.LinAlgError as exc:
        raise ValueError("mass matrix must be positive definite") from exc
    return QuadraticKineticSystem(np.linalg.inv(mass), eta1, eta2, potential, mass=mass)


class RandomQuadratic(QuadraticPotential):
    """f(q) = q.Mq/2 with M = A^T A / n for Gaussian A of shape (r, n).

    The spectrum of M follows the Marchenko-Pastur law with aspect
    ratio y = r/n (support edges (1 -/+ sqrt(y))^2).  Deterministic for
    a fixed seed; sampling uses the counter-based Philox generator so
    parallel trials with distinct seeds stay independent.
    """

    def __init__(self, n: int, y: float, seed: int):
        if n < 2:
            raise ValueError("n must be >= 2")
        if not 0.0 < y <= 1.0:
            raise ValueError("aspect ratio y must lie in (0, 1]")
        r = int(round(y * n))
        if r < 1:
            raise ValueError("aspect ratio too small: r = round(y*n) must be >= 1")
        rng = np.random.Generator(np.random.Philox(seed))
        a = rng.standard_normal((r, n))
        super().__init__((a.T @ a) / n)
        self.n = n
        self.rank = r
        self.seed = seed


def make_random_quadratic(n: int, y: float, seed: int) -> RandomQuadratic:
    return RandomQuadratic(n, y, seed)


class ConvexGenerator:
    """Convex generator contract: h, its gradient, the dual gradient, the Hessian."""

    def h(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def grad_h(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad_h_star(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hess_h(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def h_star(self, x: np.ndarray) -> float:
        """Convex dual value via the gradient form of the Fenchel identity."""
        v = self.grad_h_star(x)
        return float(x @ v) - self.h(v)


class QuadraticGenerator(ConvexGenerator):
    """h(x) = x.Mx/2 with M symmetric positive definite; closed-form dual."""

    def __init__(self, matrix):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if not np.allclose(self.matrix, self.matrix.T, atol=1e-12):
            raise ValueError("generator matrix must be symmetric")
        try:
            np.linalg.cholesky(self.matrix)
        except np.linalg.LinAlgError as exc:
            raise ValueError("generator matrix must be positive definite") from exc
        self.matrix_inv = np.linalg.inv(self.matrix)

    def h(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * float(x @ self.matrix @ x)

    def grad_h(self, x):
        return self.matrix @ np.asarray(x, dtype=float)

    def grad_h_star(self, x):
        return self.matrix_inv @ np.asarray(x, dtype=float)

    def hess_h(self, x):
        return self.matrix


class BregmanSystem(HamiltonianSystem):
    """Accelerated dynamics generated by a Bregman-divergence kinetic energy.

    H = e^{alpha+gamma} { D_{h*}(grad_h(q) + e^{-gamma} p, grad_h(q)) + e^{beta} f(q) }
    with D the Bregman divergence of the dual generator.  Nonseparable
    in general, so the structure-preserving steppers resolve their
    implicit sub-steps by fixed-point iteration.
    """

    separable = False

    def __init__(self, generator: ConvexGenerator, potential: Potential, scaling: ScalingTriple, dim: int):
        self.generator = generator
        self.potential = potential
        self.scaling = scaling
        self.dim = dim

    def _dual_lookahead(self, t, q, p):
        """grad_h*(grad_h(q) + e^{-gamma} p) and the shifted dual argument."""
        y = self.generator.grad_h(q) + math.exp(-self.scaling.gamma(t)) * p
        return self.generator.grad_h_star(y), y

    def eval(self, t, q, p):
        sc = self.scaling
        gen = self.generator
        x = gen.grad_h(q)
        y = x + math.exp(-sc.gamma(t)) * p
        # D_{h*}(y, x) with grad_h*(x) = q by Legendre duality
        div = gen.h_star(y) - gen.h_star(x) - float(q @ (y - x))
        return math.exp(sc.alpha(t) + sc.gamma(t)) * (
            div + math.exp(sc.beta(t)) * self.potential.f(q)
        )

    def grad_p(self, t, q, p):
        v, _ = self._dual_lookahead(t, q, p)
        return math.exp(self.scaling.alpha(t)) * (v - q)

    def grad_q(self, t, q, p):
        sc = self.scaling
        v, _ = self._dual_lookahead(t, q, p)
        ea = math.exp(sc.alpha(t))
        return (
            math.exp(sc.alpha(t) + sc.gamma(t)) * (self.generator.hess_h(q) @ (v - q))
            - ea * p
            + math.exp(sc.alpha(t) + sc.beta(t) + sc.gamma(t)) * self.potential.grad_f(q)
        )

    def dH_dt(self, t, q, p):
        sc = self.scaling
        gen = self.generator
        x = gen.grad_h(q)
        y = x + math.exp(-sc.gamma(t)) * p
        v = gen.grad_h_star(y)
        div = gen.h_star(y) - gen.h_star(x) - float(q @ (y - x))
        a_dot, b_dot, g_dot = sc.alpha_dot(t), sc.beta_dot(t), sc.gamma_dot(t)
        kinetic = (a_dot + g_dot) * math.exp(sc.alpha(t) + sc.gamma(t)) * div
        mixing = -g_dot * math.exp(sc.alpha(t)) * float(p @ (v - q))
        potential = (a_dot + b_dot + g_dot) * math.exp(
            sc.alpha(t) + sc.beta(t) + sc.gamma(t)
        ) * self.potential.f(q)
        return kinetic + mixing + potential


def make_bregman_system(
    generator: ConvexGenerator,
    potential: Potential,
    scaling: ScalingTriple,
    dim: int,
    duality_samples: int = 16,
) -> BregmanSystem:
    """Build the Bregman system; rejects generators whose duality round trip fails.

    The Legendre check ``grad_h_star(grad_h(x)) == x`` is sampled at
    construction; a failure means grad_h_star is not the inverse map.
    """
    rng = np.random.Generator(np.random.Philox(20240917))
    for _ in range(duality_samples):
        x = rng.standard_normal(dim) * 3.0
        back = generator.grad_h_star(generator.grad_h(x))
        if np.linalg.norm(back - x) > 1e-8 * (1.0 + np.linalg.norm(x)):
            raise ValueError("generator fails the Legendre duality round trip")
    return BregmanSystem(generator, potential, scaling, dim)


class RelativisticSystem(HamiltonianSystem):
    """H = e^{gamma t} sqrt(e^{-2 gamma t} c^2 p.p + m^2 c^4) + e^{gamma t} f(q).

    The velocity grad_p is bounded by c in norm for any momentum.
    """

    separable = True

    def __init__(self, potential: Potential, gamma: float, m: float, c: float, dim: int):
        if m <= 0.0 or c <= 0.0:
            raise ValueError("mass and speed limit must be positive")
        self.potential = potential
        self.gamma = gamma
        self.m = m
        self.c = c
        self.dim = dim

    def _root(self, t, p):
        return math.sqrt(
            math.exp(-2.0 * self.gamma * t) * self.c**2 * float(p @ p) + self.m**2 * self.c**4
        )

    def eval(self, t, q, p):
        e = math.exp(self.gamma * t)
        return e * self._root(t, p) + e * self.potential.f(q)

    def grad_q(self, t, q, p):
        return math.exp(self.gamma * t) * self.potential.grad_f(q)

    def grad_p(self, t, q, p):
        return math.exp(-self.gamma * t) * self.c**2 * p / self._root(t, p)

    def dH_dt(self, t, q, p):
        root = self._root(t, p)
        e = math.exp(self.gamma * t)
        h_val = e * root + e * self.potential.f(q)
        return self.gamma * (h_val - e * math.exp(-2.0 * self.gamma * t) * self.c**2 * float(p @ p) / root)


def make_relativistic_system(
    potential: Potential, gamma: float, m: float, c: float, dim: int = 1
) -> RelativisticSystem:
    return RelativisticSystem(potential, gamma, m, c, dim)


class ConformalLift(HamiltonianSystem):
    """K(t, Q, P) = e^{eta(t)} H0(Q, e^{-eta(t)} P) for a time-independent H0.

    Trajectories of K, mapped back through p = e^{-eta(t)} P, solve the
    momentum-drag equations q' = dH0/dp, p' = -dH0/dq - eta_dot(t) p.
    """

    def __init__(self, base: HamiltonianSystem, eta: DampingSchedule):
        self.base = base
        self.eta_schedule = eta
        self.dim = base.dim
        self.separable = base.separable

    def eval(self, t, q, p):
        et = math.exp(self.eta_schedule.eta(t))
        return et * self.base.eval(0.0, q, p / et)

    def grad_q(self, t, q, p):
        et = math.exp(self.eta_schedule.eta(t))
        return et * self.base.grad_q(0.0, q, p / et)

    def grad_p(self, t, q, p):
        et = math.exp(self.eta_schedule.eta(t))
        return self.base.grad_p(0.0, q, p / et)

    def dH_dt(self, t, q, p):
        et = math.exp(self.eta_schedule.eta(t))
        eta_dot = self.eta_schedule.eta_dot(t)
        p_low = p / et
        value = self.base.eval(0.0, q, p_low)
        momentum_term = float(self.base.grad_p(0.0, q, p_low) @ p_low)
        return eta_dot * et * (value - momentum_term)


def conformal_lift(base: HamiltonianSystem, eta: DampingSchedule, samples: int = 8) -> ConformalLift:
    """Lift a time-independent system to the damped time-dependent form.

    Rejects bases with a detectable explicit time dependence (sampled).
    """
    rng = np.random.Generator(np.random.Philox(73))
    for _ in range(samples):
        q = rng.standard_normal(base.dim)
        p = rng.standard_normal(base.dim)
        t = float(rng.uniform(0.0, 5.0))
        if abs(base.dH_dt(t, q, p)) > 1e-10 or abs(
            base.eval(t, q, p) - base.eval(0.0, q, p)
        ) > 1e-10 * (1.0 + abs(base.eval(0.0, q, p))):
            raise ValueError("base system is explicitly time-dependent; cannot lift")
    return ConformalLift(base, eta)
