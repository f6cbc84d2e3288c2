"""Stepping methods for time-dependent Hamiltonian systems.

The structure-preserving family updates time like a coordinate:
both Euler variants (order 1), both leapfrog variants (order 2), the
Suzuki-Yoshida composition raising any symmetric even order by two, a
rescaled leapfrog for quadratic-kinetic systems that avoids large
exponentials, and an explicit splitting for nonseparable Hamiltonians
on a doubled phase space.  Non-preserving baselines (explicit Euler,
Nesterov, plain gradient descent) are included for comparison runs.

Implicit sub-steps (nonseparable systems only) are resolved by damped
fixed-point iteration; the previous value seeds the iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DampingSchedule,
    DimensionError,
    HamiltonianSystem,
    NonFiniteError,
    State,
    Trajectory,
    eval_energy,
)

FIXED_POINT_TOL = 1e-12
FIXED_POINT_MAX_ITER = 50


class FixedPointError(RuntimeError):
    """Fixed-point iteration failed to contract; h is likely too large."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


def solve_implicit(update, guess, tol: float = FIXED_POINT_TOL, max_iter: int = FIXED_POINT_MAX_ITER):
    """Iterate x <- update(x) from ``guess`` until the step norm reaches tol.

    The stopping rule is mixed: ||x_{k+1} - x_k|| <= tol * (1 + ||x_{k+1}||),
    since a purely absolute 1e-12 cut is below machine resolution once the
    iterate grows past ~1e4.  Returns the converged vector; raises
    FixedPointError with the final residual when max_iter is exhausted.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    x = np.asarray(guess, dtype=float)
    for _ in range(max_iter):
        x_next = np.asarray(update(x), dtype=float)
        residual = float(np.linalg.norm(x_next - x))
        if not math.isfinite(residual):
            raise FixedPointError("fixed-point iteration produced non-finite values", residual)
        if residual <= tol * (1.0 + float(np.linalg.norm(x_next))):
            return x_next
        x = x_next
    raise FixedPointError(
        f"fixed-point iteration did not converge in {max_iter} iterations "
        f"(last residual {residual:.3e}); reduce the step size",
        residual,
    )


class Integrator:
    """One-step map contract: ``step`` advances a State by exactly h."""

    name: str = ""
    order: int = 0

    def step(self, system: HamiltonianSystem, s: State, h: float) -> State:
        raise NotImplementedError


class PresymplecticEulerA(Integrator):
    """Momentum first, old time in both gradient arguments (order 1)."""

    name = "euler_a"
    order = 1

    def step(self, system, s, h):
        t, q, p = s.t, s.q, s.p
        if system.separable:
            p_new = p - h * system.grad_q(t, q, p)
        else:
            p_new = solve_implicit(lambda x: p - h * system.grad_q(t, q, x), p)
        q_new = q + h * system.grad_p(t, q, p_new)
        return State(s.t + h, q_new, p_new)


class PresymplecticEulerB(Integrator):
    """Adjoint variant: position first, new time in both arguments (order 1)."""

    name = "euler_b"
    order = 1

    def step(self, system, s, h):
        t1 = s.t + h
        q, p = s.q, s.p
        if system.separable:
            q_new = q + h * system.grad_p(t1, q, p)
        else:
            q_new = solve_implicit(lambda x: q + h * system.grad_p(t1, x, p), q)
        p_new = p - h * system.grad_q(t1, q_new, p)
        return State(t1, q_new, p_new)


class PresymplecticLeapfrogA(Integrator):
    """Kick-drift-kick with the drift averaging old and new times (order 2)."""

    name = "leapfrog_a"
    order = 2

    def step(self, system, s, h):
        t0, q, p = s.t, s.q, s.p
        t1 = s.t + h
        half = 0.5 * h
        if system.separable:
            p_half = p - half * system.grad_q(t0, q, p)
        else:
            p_half = solve_implicit(lambda x: p - half * system.grad_q(t0, q, x), p)
        drift0 = system.grad_p(t0, q, p_half)
        if system.separable:
            q_new = q + half * (drift0 + system.grad_p(t1, q, p_half))
        else:
            q_new = solve_implicit(
                lambda x: q + half * (drift0 + system.grad_p(t1, x, p_half)), q
            )
        p_new = p_half - half * system.grad_q(t1, q_new, p_half)
        return State(t1, q_new, p_new)


class PresymplecticLeapfrogB(Integrator):
    """Adjoint leapfrog: drift-kick-drift about the midpoint time (order 2)."""

    name = "leapfrog_b"
    order = 2

    def step(self, system, s, h):
        t_half = s.t + 0.5 * h
        q, p = s.q, s.p
        half = 0.5 * h
        if system.separable:
            q_half = q + half * system.grad_p(t_half, q, p)
        else:
            q_half = solve_implicit(lambda x: q + half * system.grad_p(t_half, x, p), q)
        kick0 = system.grad_q(t_half, q_half, p)
        if system.separable:
            # both half-kick terms coincide when grad_q is p-independent
            p_new = p - h * kick0
        else:
            p_new = solve_implicit(
                lambda x: p - half * (kick0 + system.grad_q(t_half, q_half, x)), p
            )
        q_new = q_half + half * system.grad_p(t_half, q_half, p_new)
        # t_half + half can differ from s.t + h in the last bit; pin the sum.
        return State(s.t + h, q_new, p_new)


class ExplicitEuler(Integrator):
    """Non-preserving baseline: both updates from the old state (order 1)."""

    name = "explicit_euler"
    order = 1

    def step(self, system, s, h):
        q_new = s.q + h * system.grad_p(s.t, s.q, s.p)
        p_new = s.p - h * system.grad_q(s.t, s.q, s.p)
        return State(s.t + h, q_new, p_new)


@dataclass(frozen=True)
class SuzukiYoshida(Integrator):
    """Triple-jump composition of a symmetric even-order base method.

    Sub-step fractions tau0, tau1, tau0 with tau0 = 1/(2 - kappa),
    tau1 = -kappa/(2 - kappa), kappa**(2r+1) = 2; raises the order of
    the base method from 2r to 2r + 2.
    """

    base: Integrator

    def __post_init__(self):
        if self.base.order < 2 or self.base.order % 2 != 0:
            raise ValueError("composition requires a symmetric base method of even order >= 2")

    @property
    def kappa(self) -> float:
        return 2.0 ** (1.0 / (self.base.order + 1))

    @property
    def tau0(self) -> float:
        return 1.0 / (2.0 - self.kappa)

    @property
    def tau1(self) -> float:
        return -self.kappa / (2.0 - self.kappa)

    @property
    def order(self) -> int:  # type: ignore[override]
        return self.base.order + 2

    @property
    def name(self) -> str:  # type: ignore[override]
        return f"sy{self.base.order + 2}({self.base.name})"

    def step(self, system, s, h):
        tau0, tau1 = self.tau0, self.tau1
        out = self.base.step(system, s, tau0 * h)
        out = self.base.step(system, out, tau1 * h)
        out = self.base.step(system, out, tau0 * h)
        # 2*tau0 + tau1 == 1; pin the accumulated time to s.t + h.
        return State(s.t + h, out.q, out.p)


def compose_suzuki_yoshida(base: Integrator) -> SuzukiYoshida:
    return SuzukiYoshida(base)


def suzuki_yoshida4(base: Integrator | None = None) -> SuzukiYoshida:
    """Order-4 method from the leapfrog (the usual composition choice)."""
    return SuzukiYoshida(base if base is not None else PresymplecticLeapfrogA())


@dataclass(frozen=True)
class RescaledState:
    """(t, q, p_tilde) with p_tilde = exp(-eta2(t)) * p."""

    t: float
    q: np.ndarray
    p_tilde: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "p_tilde", np.asarray(self.p_tilde, dtype=float))
        if not (np.isfinite(self.q).all() and np.isfinite(self.p_tilde).all()):
            raise NonFiniteError("non-finite component in rescaled state")

    def to_state(self, eta2: DampingSchedule) -> State:
        return State(self.t, self.q, math.exp(eta2.eta(self.t)) * self.p_tilde)

    @staticmethod
    def from_state(s: State, eta2: DampingSchedule) -> "RescaledState":
        return RescaledState(s.t, s.q, math.exp(-eta2.eta(s.t)) * s.p)


def step_rescaled_leapfrog(
    eta1: DampingSchedule,
    eta2: DampingSchedule,
    m_inv: np.ndarray,
    f_grad,
    rs: RescaledState,
    h: float,
) -> RescaledState:
    """Leapfrog step for H = e^{-eta1} p.M^{-1}p/2 + e^{eta2} f(q) in rescaled momenta.

    Only differences eta_a(t + d) - eta_b(t) enter the exponentials, so
    the step stays finite however large eta grows along the run.
    """
    t, q, pt = rs.t, rs.q, rs.p_tilde
    half = 0.5 * h
    t_half = t + half
    t1 = t + h
    # d_ab(s, d) = eta_a(s + d) - eta_b(s)
    d22_0 = eta2.eta(t_half) - eta2.eta(t)
    d21_0 = eta2.eta(t_half) - eta1.eta(t)
    d12_h = eta1.eta(t1) - eta2.eta(t_half)
    d22_h = eta2.eta(t1) - eta2.eta(t_half)
    pt_half = math.exp(-d22_0) * (pt - half * f_grad(q))
    q_new = q + half * (math.exp(d21_0) + math.exp(-d12_h)) * (m_inv @ pt_half)
    pt_new = math.exp(-d22_h) * pt_half - half * f_grad(q_new)
    return RescaledState(t1, q_new, pt_new)


@dataclass(frozen=True)
class AugmentedState:
    """Doubled phase point (t, q, p, t_bar, q_bar, p_bar) with coupling xi > 0."""

    t: float
    q: np.ndarray
    p: np.ndarray
    t_bar: float
    q_bar: np.ndarray
    p_bar: np.ndarray
    xi: float

    def __post_init__(self):
        for name in ("q", "p", "q_bar", "p_bar"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = len(self.q)
        if any(len(getattr(self, name)) != n for name in ("p", "q_bar", "p_bar")):
            raise DimensionError("augmented blocks have inconsistent lengths")
        if self.xi <= 0.0:
            raise ValueError("xi must be positive")

    @staticmethod
    def from_state(s: State, xi: float) -> "AugmentedState":
        return AugmentedState(s.t, s.q, s.p, s.t, s.q, s.p, xi)

    def primary(self) -> State:
        return State(self.t, self.q, self.p)


def _tao_a(system, a: AugmentedState, h: float) -> AugmentedState:
    gq = system.grad_q(a.t, a.q, a.p_bar)
    gp = system.grad_p(a.t, a.q, a.p_bar)
    return AugmentedState(a.t, a.q, a.p - h * gq, a.t_bar + h, a.q_bar + h * gp, a.p_bar, a.xi)


def _tao_b(system, a: AugmentedState, h: float) -> AugmentedState:
    gq = system.grad_q(a.t_bar, a.q_bar, a.p)
    gp = system.grad_p(a.t_bar, a.q_bar, a.p)
    return AugmentedState(a.t + h, a.q + h * gp, a.p, a.t_bar, a.q_bar, a.p_bar - h * gq, a.xi)


def tao_rotation(a: AugmentedState, h: float) -> AugmentedState:
    """Mixing map: rotates the block differences by angle 2*xi*h, means fixed."""
    angle = 2.0 * a.xi * h
    c, s_ = math.cos(angle), math.sin(angle)
    sum_q, diff_q = a.q + a.q_bar, a.q - a.q_bar
    sum_p, diff_p = a.p + a.p_bar, a.p - a.p_bar
    rot_q = c * diff_q + s_ * diff_p
    rot_p = -s_ * diff_q + c * diff_p
    return AugmentedState(
        a.t,
        0.5 * (sum_q + rot_q),
        0.5 * (sum_p + rot_p),
        a.t_bar,
        0.5 * (sum_q - rot_q),
        0.5 * (sum_p - rot_p),
        a.xi,
    )


def step_tao(system: HamiltonianSystem, a: AugmentedState, h: float) -> AugmentedState:
    """Strang composition A(h/2) B(h/2) C(h) B(h/2) A(h/2); explicit, order 2.

    Works for arbitrary (nonseparable) time-dependent Hamiltonians; both
    time copies advance by h per step.
    """
    half = 0.5 * h
    out = _tao_a(system, a, half)
    out = _tao_b(system, out, half)
    out = tao_rotation(out, h)
    out = _tao_b(system, out, half)
    out = _tao_a(system, out, half)
    return AugmentedState(a.t + h, out.q, out.p, a.t_bar + h, out.q_bar, out.p_bar, a.xi)


class TaoIntegrator(Integrator):
    """State-level wrapper around the augmented splitting.

    Each step lifts (t, q, p) to the doubled space with equal copies,
    applies the Strang composition, and reads back the primary block.
    Exact only as a diagnostic convenience; sustained runs should keep
    the AugmentedState via ``step_tao`` to avoid re-collapsing copies.
    """

    name = "tao"
    order = 2

    def __init__(self, xi: float = 20.0):
        self.xi = xi

    def step(self, system, s, h):
        return step_tao(system, AugmentedState.from_state(s, self.xi), h).primary()


def integrate_tao(
    system: HamiltonianSystem,
    a0: AugmentedState,
    h: float,
    n_steps: int,
) -> Trajectory:
    """Run the augmented splitting, recording the primary block per step."""
    times = np.empty(n_steps + 1)
    qs = np.empty((n_steps + 1, len(a0.q)))
    ps = np.empty_like(qs)
    hams = np.empty(n_steps + 1)
    a = a0
    for k in range(n_steps + 1):
        times[k], qs[k], ps[k] = a.t, a.q, a.p
        hams[k] = system.eval(a.t, a.q, a.p)
        if not (math.isfinite(hams[k]) and np.isfinite(a.q).all() and np.isfinite(a.p).all()):
            raise NonFiniteError(f"non-finite augmented state at step {k}", step=k)
        if k < n_steps:
            a = step_tao(system, a, h)
    return Trajectory(times, qs, ps, hams, h)


def step_gradient_descent(f_grad, q: np.ndarray, h: float) -> np.ndarray:
    """q - h * grad f(q)."""
    return np.asarray(q, dtype=float) - h * np.asarray(f_grad(q), dtype=float)


class NesterovMuRule:
    """Momentum coefficient schedule for the two-sequence Nesterov iteration."""

    def mu(self, step_index: int, h: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantDampingMu(NesterovMuRule):
    """mu = (1 - gamma h / 2) / (1 + gamma h / 2), the constant-damping match."""

    gamma: float

    def mu(self, step_index, h):
        return (1.0 - 0.5 * self.gamma * h) / (1.0 + 0.5 * self.gamma * h)


class PolynomialMu(NesterovMuRule):
    """mu_l = l / (l + 3), the classical decaying-momentum rule."""

    def mu(self, step_index, h):
        return step_index / (step_index + 3.0)


def step_nesterov(f_grad, q_prev, q_curr, h: float, mu: float) -> np.ndarray:
    """One two-sequence update: extrapolate by mu, then gradient step at the lookahead."""
    q_prev = np.asarray(q_prev, dtype=float)
    q_curr = np.asarray(q_curr, dtype=float)
    y = q_curr + mu * (q_curr - q_prev)
    return y - (h * h) * np.asarray(f_grad(y), dtype=float)


def nesterov_trajectory(
    system,
    f_grad,
    q0: np.ndarray,
    h: float,
    n_steps: int,
    mu_rule: NesterovMuRule,
) -> Trajectory:
    """Run Nesterov from rest and record it as a phase-space trajectory.

    ``system`` must be a quadratic-kinetic system (the family this
    iteration discretizes).  The recorded momentum is the difference
    quotient p_l = (q_l - q_{l-1}) / h (p_0 = 0), which estimates the
    velocity; the recorded Hamiltonian values lift it to the canonical
    momentum e^{eta1(t)} M p_l first, so that error series against an
    exact solution compare momentum-consistent samples.  Slotting the
    raw velocity into the canonical argument would instead measure the
    e^{-eta1} collapse of the kinetic term, which saturates and masks
    the method's genuine error growth.
    """
    mass = system.mass if system.mass is not None else np.eye(system.dim)
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    n = len(q0)
    times = np.empty(n_steps + 1)
    qs = np.empty((n_steps + 1, n))
    ps = np.empty((n_steps + 1, n))
    hams = np.empty(n_steps + 1)
    q_prev = q0.copy()
    q_curr = q0.copy()
    for k in range(n_steps + 1):
        t = k * h
        p_diag = (q_curr - q_prev) / h if k > 0 else np.zeros(n)
        p_canonical = math.exp(system.eta1.eta(t)) * (mass @ p_diag)
        times[k], qs[k], ps[k] = t, q_curr, p_diag
        hams[k] = system.eval(t, q_curr, p_canonical)
        if not (math.isfinite(hams[k]) and np.isfinite(q_curr).all()):
            raise NonFiniteError(f"non-finite iterate at step {k}", step=k)
        if k < n_steps:
            q_next = step_nesterov(f_grad, q_prev, q_curr, h, mu_rule.mu(k, h))
            q_prev, q_curr = q_curr, q_next
    return Trajectory(times, qs, ps, hams, h)


def integrate(
    integrator: Integrator,
    system: HamiltonianSystem,
    s0: State,
    h: float,
    n_steps: int,
    diagnostics=None,
) -> Trajectory:
    """Apply ``integrator`` n_steps times, recording H (and |grad f| when given).

    ``diagnostics`` is an optional potential; its gradient norm at q is
    recorded per state.  Aborts with the step index as soon as any
    component goes non-finite.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    if s0.dim != system.dim:
        raise DimensionError(f"state dimension {s0.dim} != system dimension {system.dim}")
    n = s0.dim
    times = np.empty(n_steps + 1)
    qs = np.empty((n_steps + 1, n))
    ps = np.empty((n_steps + 1, n))
    hams = np.empty(n_steps + 1)
    gnorms = np.empty(n_steps + 1) if diagnostics is not None else None
    s = s0
    for k in range(n_steps + 1):
        times[k], qs[k], ps[k] = s.t, s.q, s.p
        try:
            hams[k] = eval_energy(system, s)
        except NonFiniteError as exc:
            raise NonFiniteError(
                f"Hamiltonian non-finite at step {k} (t={s.t:.6g})", state=s, step=k
            ) from exc
        if gnorms is not None:
            gnorms[k] = float(np.linalg.norm(diagnostics.grad_f(s.q)))
        if k < n_steps:
            try:
                with np.errstate(over="ignore", invalid="ignore"):
                    s = integrator.step(system, s, h)
            except (NonFiniteError, OverflowError) as exc:
                raise NonFiniteError(
                    f"non-finite state at step {k + 1}; last finite state at t={s.t:.6g}",
                    state=s,
                    step=k + 1,
                ) from exc
    return Trajectory(times, qs, ps, hams, h, gnorms)


PRESYMPLECTIC_INTEGRATORS = {
    "euler_a": PresymplecticEulerA,
    "euler_b": PresymplecticEulerB,
    "leapfrog_a": PresymplecticLeapfrogA,
    "leapfrog_b": PresymplecticLeapfrogB,
}


def make_integrator(name: str) -> Integrator:
    """Look up a stepping method by its config name."""
    if name in PRESYMPLECTIC_INTEGRATORS:
        return PRESYMPLECTIC_INTEGRATORS[name]()
    if name == "sy4":
        return suzuki_yoshida4()
    if name == "explicit_euler":
        return ExplicitEuler()
    raise ValueError(f"unknown integrator {name!r}")
