"""Domain types for dissipative Hamiltonian dynamics.

Everything here is an immutable value type: phase points, damping
schedules, scaling-function triples, the Hamiltonian behaviour contract,
and recorded trajectories.  All operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class DimensionError(ValueError):
    """Phase-space blocks have inconsistent lengths."""


class NonFiniteError(ArithmeticError):
    """A NaN/Inf appeared; carries the offending state when known."""

    def __init__(self, message, state=None, step=None):
        super().__init__(message)
        self.state = state
        self.step = step


def _freeze(v) -> np.ndarray:
    a = np.array(v, dtype=float, copy=True, ndmin=1)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class State:
    """Phase point (t, q, p) with time carried as a coordinate."""

    t: float
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _freeze(self.q))
        object.__setattr__(self, "p", _freeze(self.p))
        object.__setattr__(self, "t", float(self.t))
        if self.q.ndim != 1 or self.p.ndim != 1 or len(self.q) != len(self.p) or len(self.q) < 1:
            raise DimensionError(
                f"q and p must be equal-length vectors, got {self.q.shape} and {self.p.shape}"
            )
        if not (math.isfinite(self.t) and np.isfinite(self.q).all() and np.isfinite(self.p).all()):
            raise NonFiniteError("non-finite component in state", state=(self.t, self.q, self.p))

    @property
    def dim(self) -> int:
        return len(self.q)


class DampingSchedule:
    """Monotone damping function eta(t) with its analytic derivative.

    Subclasses supply ``eta`` and ``eta_dot``; derivatives are always
    analytic, never produced by internal differencing.
    """

    def eta(self, t: float) -> float:
        raise NotImplementedError

    def eta_dot(self, t: float) -> float:
        raise NotImplementedError


class ZeroDamping(DampingSchedule):
    """eta identically zero (conservative limit)."""

    def eta(self, t):
        return 0.0

    def eta_dot(self, t):
        return 0.0


@dataclass(frozen=True)
class LinearDamping(DampingSchedule):
    """eta(t) = gamma * t.  Constant damping coefficient.

    gamma >= 0 gives dissipation; negative gamma injects energy and is
    only admitted by the harness behind an explicit flag.
    """

    gamma: float

    def eta(self, t):
        return self.gamma * t

    def eta_dot(self, t):
        return self.gamma


@dataclass(frozen=True)
class LogarithmicDamping(DampingSchedule):
    """eta(t) = gamma * log(t + t0), decaying damping coefficient.

    The offset t0 > 0 (default 1) keeps eta finite at t = 0.
    """

    gamma: float
    t0: float = 1.0

    def __post_init__(self):
        if self.t0 <= 0.0:
            raise ValueError("t0 must be positive")

    def eta(self, t):
        return self.gamma * math.log(t + self.t0)

    def eta_dot(self, t):
        return self.gamma / (t + self.t0)


@dataclass(frozen=True)
class PowerMixDamping(DampingSchedule):
    """eta(t) = gamma1 * log(t + t0) + gamma2 * t**delta.

    Intermediate between logarithmic and linear damping.  Supported
    range gamma1, gamma2 >= 0 and 0 < delta <= 1; for delta < 1 the
    derivative of the power term is unbounded at t = 0, so eta_dot is
    meant for t > 0 there.
    """

    gamma1: float
    gamma2: float
    delta: float
    t0: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.delta <= 1.0:
            raise ValueError("delta must lie in (0, 1]")
        if self.t0 <= 0.0:
            raise ValueError("t0 must be positive")

    def eta(self, t):
        return self.gamma1 * math.log(t + self.t0) + self.gamma2 * t ** self.delta

    def eta_dot(self, t):
        return self.gamma1 / (t + self.t0) + self.gamma2 * self.delta * t ** (self.delta - 1.0)


@dataclass(frozen=True)
class ScalingTriple:
    """Scaling functions (alpha, beta, gamma) with analytic derivatives.

    Used to build accelerated Bregman dynamics; valid triples satisfy
    beta_dot <= exp(alpha) and gamma_dot = exp(alpha).
    """

    alpha: callable
    beta: callable
    gamma: callable
    alpha_dot: callable
    beta_dot: callable
    gamma_dot: callable


def polynomial_scaling(c: float, t0: float = 1.0, constant: float = 0.0) -> ScalingTriple:
    """Triple with alpha = log c - log(t+t0), beta = c log(t+t0) + C, gamma = c log(t+t0).

    Induces a polynomial convergence rate O(t**-c).  The offset t0 > 0
    keeps the logarithms finite at t = 0; with t0 = 0 the domain is
    t > 0 and grids must avoid the singularity.
    """
    if c <= 0.0:
        raise ValueError("c must be positive")
    if t0 < 0.0:
        raise ValueError("t0 must be nonnegative")
    log_c = math.log(c)
    return ScalingTriple(
        alpha=lambda t: log_c - math.log(t + t0),
        beta=lambda t: c * math.log(t + t0) + constant,
        gamma=lambda t: c * math.log(t + t0),
        alpha_dot=lambda t: -1.0 / (t + t0),
        beta_dot=lambda t: c / (t + t0),
        gamma_dot=lambda t: c / (t + t0),
    )


def exponential_scaling(c: float, constant: float = 0.0) -> ScalingTriple:
    """Triple with alpha = log c, beta = c t, gamma = c t + C; rate O(exp(-c t))."""
    if c <= 0.0:
        raise ValueError("c must be positive")
    log_c = math.log(c)
    return ScalingTriple(
        alpha=lambda t: log_c,
        beta=lambda t: c * t + constant,
        gamma=lambda t: c * t,
        alpha_dot=lambda t: 0.0,
        beta_dot=lambda t: c,
        gamma_dot=lambda t: c,
    )


class HamiltonianSystem:
    """Behaviour contract for an explicitly time-dependent Hamiltonian.

    Concrete systems expose the value H(t, q, p), both gradient blocks,
    the explicit time partial, a separability flag and the dimension n.
    If ``separable`` is true, grad_q must be independent of p and grad_p
    independent of q.
    """

    separable: bool = False
    dim: int = 0

    def eval(self, t: float, q: np.ndarray, p: np.ndarray) -> float:
        raise NotImplementedError

    def grad_q(self, t: float, q: np.ndarray, p: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad_p(self, t: float, q: np.ndarray, p: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dH_dt(self, t: float, q: np.ndarray, p: np.ndarray) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered record of an integration run.

    Parallel arrays: times (L,), positions (L, n), momenta (L, n),
    Hamiltonian values (L,), and optionally the potential-gradient
    norms (L,).  ``step_size`` is the h the run used.
    """

    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray
    ham_values: np.ndarray
    step_size: float
    grad_norms: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.times)
        lengths = [len(self.positions), len(self.momenta), len(self.ham_values)]
        if self.grad_norms is not None:
            lengths.append(len(self.grad_norms))
        if any(m != n for m in lengths):
            raise DimensionError("trajectory record lengths differ")

    def __len__(self) -> int:
        return len(self.times)

    def state(self, k: int) -> State:
        return State(self.times[k], self.positions[k], self.momenta[k])

    @property
    def states(self):
        return [self.state(k) for k in range(len(self))]


def eval_energy(system: HamiltonianSystem, s: State) -> float:
    """H(s.t, s.q, s.p); raises if dimensions mismatch or the value is non-finite."""
    if s.dim != system.dim:
        raise DimensionError(f"state dimension {s.dim} != system dimension {system.dim}")
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            value = float(system.eval(s.t, s.q, s.p))
    except OverflowError as exc:
        raise NonFiniteError(f"Hamiltonian overflowed: {exc}", state=s) from exc
    if not math.isfinite(value):
        raise NonFiniteError(f"Hamiltonian evaluated to {value}", state=s)
    return value


def physical_energy(system: HamiltonianSystem, eta: DampingSchedule, s: State) -> float:
    """exp(-eta(t)) * H(t, q, p): the time-independent energy of the damped system.

    The caller must pass the schedule the system was built with.  On
    exponential overflow the error suggests the rescaled-momentum
    stepping, which only ever forms finite differences of eta.
    """
    try:
        h_val = eval_energy(system, s)
        value = math.exp(-eta.eta(s.t)) * h_val
    except (OverflowError, NonFiniteError) as exc:
        raise NonFiniteError(
            "physical energy overflowed; consider the rescaled-momentum formulation",
            state=s,
        ) from exc
    if not math.isfinite(value):
        raise NonFiniteError(
            "physical energy overflowed; consider the rescaled-momentum formulation",
            state=s,
        )
    return value


@dataclass(frozen=True)
class ScalingReport:
    ok: bool
    worst_violation: float


def validate_scaling(sc: ScalingTriple, t_grid) -> ScalingReport:
    """Check beta_dot <= exp(alpha) and gamma_dot = exp(alpha) on a time grid."""
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t_grid.size == 0:
        raise ValueError("empty time grid")
    worst = 0.0
    ok = True
    for t in t_grid:
        ea = math.exp(sc.alpha(t))
        excess = sc.beta_dot(t) - ea - 1e-9
        if excess > 0.0:
            ok = False
            worst = max(worst, excess)
        mismatch = abs(sc.gamma_dot(t) - ea) - 1e-9 * (1.0 + ea)
        if mismatch > 0.0:
            ok = False
            worst = max(worst, mismatch)
    return ScalingReport(ok=ok, worst_violation=worst)


def grad_check(system: HamiltonianSystem, s: State, eps: float = 1e-5) -> float:
    """Max relative error between analytic partials and central differences.

    Covers grad_q, grad_p and the explicit time partial.  eps must lie
    in (0, 1e-2].
    """
    if not 0.0 < eps <= 1e-2:
        raise ValueError("eps must lie in (0, 1e-2]")
    if s.dim != system.dim:
        raise DimensionError(f"state dimension {s.dim} != system dimension {system.dim}")
    t, q, p = s.t, np.array(s.q), np.array(s.p)
    gq = system.grad_q(t, q, p)
    gp = system.grad_p(t, q, p)
    gt = system.dH_dt(t, q, p)
    worst = 0.0
    for i in range(s.dim):
        dq = np.zeros(s.dim)
        dq[i] = eps
        fd = (system.eval(t, q + dq, p) - system.eval(t, q - dq, p)) / (2.0 * eps)
        worst = max(worst, abs(gq[i] - fd) / (1.0 + abs(gq[i])))
        fd = (system.eval(t, q, p + dq) - system.eval(t, q, p - dq)) / (2.0 * eps)
        worst = max(worst, abs(gp[i] - fd) / (1.0 + abs(gp[i])))
    fd = (system.eval(t + eps, q, p) - system.eval(t - eps, q, p)) / (2.0 * eps)
    worst = max(worst, abs(gt - fd) / (1.0 + abs(gt)))
    return worst
