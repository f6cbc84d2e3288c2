"""Exact solutions, Bessel functions, reference trajectories, diagnostics.

Everything the verification suite compares against lives here, kept
independent of the stepping code it checks (the reference trajectory is
the one exception: it reuses the order-4 composition, and is itself
validated against the closed forms).
"""

from __future__ import annotations

import math

import numpy as np

from .core import HamiltonianSystem, State, Trajectory
from .integrators import Integrator, integrate, suzuki_yoshida4

_EULER_MASCHERONI = 0.5772156649015328606
_SERIES_CUTOFF = 12.0
_X_MIN, _X_MAX = 0.5, 200.0
_NU_MAX = 10.0


class BesselDomainError(ValueError):
    """Requested (nu, x) outside the supported evaluation domain."""


def _j_series(nu: float, x: float) -> float:
    """Ascending power series for J_nu, reliable for x <= 12.

    Valid for negative non-integer nu as well (the reflection path);
    cancellation near x = 12 costs at most ~5 digits of the peak term.
    """
    half = 0.5 * x
    qx2 = half * half
    term = half**nu / math.gamma(nu + 1.0)
    total = term
    peak = abs(term)
    for k in range(1, 200):
        term *= -qx2 / (k * (nu + k))
        total += term
        peak = max(peak, abs(term))
        if abs(term) <= 1e-18 * peak and k > half:
            break
    return total


def _psi_int(m: int) -> float:
    """Digamma at a positive integer: -gamma_E + sum_{j<m} 1/j."""
    return -_EULER_MASCHERONI + sum(1.0 / j for j in range(1, m))


def _y_integer_series(n: int, x: float) -> float:
    """Y_n for integer n >= 0 via the logarithm/digamma series (x <= 12)."""
    half = 0.5 * x
    qx2 = half * half
    log_term = (2.0 / math.pi) * _j_series(float(n), x) * math.log(half)
    finite = 0.0
    if n > 0:
        power = half ** (-n)
        for k in range(n):
            finite += (math.factorial(n - k - 1) / math.factorial(k)) * power
            power *= qx2
    psi_a = _psi_int(1)
    psi_b = _psi_int(n + 1)
    base = half**n / math.factorial(n)  # (x/2)^{2k+n} / (k! (n+k)!) at k = 0
    sign = 1.0
    total = (psi_a + psi_b) * base
    peak = abs(total)
    for k in range(1, 200):
        base *= qx2 / (k * (n + k))
        sign = -sign
        psi_a += 1.0 / k
        psi_b += 1.0 / (n + k)
        term = sign * (psi_a + psi_b) * base
        total += term
        peak = max(peak, abs(term))
        if abs(term) <= 1e-18 * peak and k > half:
            break
    return log_term - finite / math.pi - total / math.pi


def _jy_hankel(nu: float, x: float) -> tuple[float, float]:
    """Large-argument asymptotic expansion; accurate for x > 12 at small nu.

    The amplitude/phase series are truncated at their smallest term,
    which for nu <= 2 and x >= 12 sits far below 1e-10.
    """
    mu4 = 4.0 * nu * nu
    inv8x = 1.0 / (8.0 * x)
    p_sum, q_sum = 1.0, 0.0
    term = 1.0
    prev = math.inf
    for j in range(1, 60):
        term *= (mu4 - (2.0 * j - 1.0) ** 2) * inv8x / j
        if abs(term) >= prev:
            break
        prev = abs(term)
        sign = -1.0 if (j // 2) % 2 else 1.0
        if j % 2:
            q_sum += sign * term
        else:
            p_sum += sign * term
        if abs(term) < 1e-18:
            break
    chi = x - (0.5 * nu + 0.25) * math.pi
    amp = math.sqrt(2.0 / (math.pi * x))
    cos_chi, sin_chi = math.cos(chi), math.sin(chi)
    return (
        amp * (p_sum * cos_chi - q_sum * sin_chi),
        amp * (p_sum * sin_chi + q_sum * cos_chi),
    )


def _jy_small_x(nu: float, x: float) -> tuple[float, float]:
    j_val = _j_series(nu, x)
    nearest = round(nu)
    if abs(nu - nearest) < 1e-8:
        y_val = _y_integer_series(int(nearest), x)
    else:
        j_neg = _j_series(-nu, x)
        y_val = (j_val * math.cos(math.pi * nu) - j_neg) / math.sin(math.pi * nu)
    return j_val, y_val


def bessel_jy(nu: float, x: float) -> tuple[float, float]:
    """Bessel functions of the first and second kinds, (J_nu(x), Y_nu(x)).

    Supported domain: nu in [0, 10], x in [0.5, 200]; accuracy ~1e-10
    relative to the oscillation envelope.  Below x = 12 the ascending
    series is used directly (reflection or digamma form for Y); above,
    the asymptotic expansion is evaluated at the fractional base order
    and walked up by the three-term recurrence, which is stable here
    because nu stays below x.
    """
    if not (0.0 <= nu <= _NU_MAX):
        raise BesselDomainError(f"order {nu} outside [0, {_NU_MAX}]")
    if not (_X_MIN <= x <= _X_MAX):
        raise BesselDomainError(f"argument {x} outside [{_X_MIN}, {_X_MAX}]")
    if x <= _SERIES_CUTOFF:
        return _jy_small_x(nu, x)
    steps = int(math.floor(nu))
    base = nu - steps
    if steps == 0:
        return _jy_hankel(nu, x)
    j_lo, y_lo = _jy_hankel(base, x)
    j_hi, y_hi = _jy_hankel(base + 1.0, x)
    order = base + 1.0
    for _ in range(steps - 1):
        factor = 2.0 * order / x
        j_lo, j_hi = j_hi, factor * j_hi - j_lo
        y_lo, y_hi = y_hi, factor * y_hi - y_lo
        order += 1.0
    return j_hi, y_hi


class ExactSolution:
    """Closed-form (q(t), p(t)) pair for a scalar damped oscillator."""

    domain: tuple[float, float] = (0.0, math.inf)
    params: tuple = ()

    def at(self, t: float) -> tuple[float, float]:
        raise NotImplementedError


class ConstantDampingSolution(ExactSolution):
    """Solution of q'' + gamma q' + q = 0 from rest, in canonical variables.

    q(t) = q0 e^{-t gamma/2} (cos(w t/2) + (gamma/w) sin(w t/2)),
    p(t) = -(2 q0 / w) e^{+t gamma/2} sin(w t/2),  w = sqrt(4 - gamma^2).

    p is the canonical momentum e^{gamma t} q'(t), hence its growing
    prefactor.  Valid for |gamma| < 2 (real w); negative gamma covers
    energy-injection runs.
    """

    def __init__(self, gamma: float, q0: float):
        if not -2.0 < gamma < 2.0:
            raise ValueError("constant-damping closed form requires |gamma| < 2")
        self.gamma = gamma
        self.q0 = q0
        self.omega = math.sqrt(4.0 - gamma * gamma)
        self.params = (gamma, q0)

    def at(self, t):
        g, w = self.gamma, self.omega
        phase = 0.5 * w * t
        q = self.q0 * math.exp(-0.5 * g * t) * (math.cos(phase) + (g / w) * math.sin(phase))
        p = -(2.0 * self.q0 / w) * math.exp(0.5 * g * t) * math.sin(phase)
        return q, p


def exact_const_damping(gamma: float, q0: float) -> ConstantDampingSolution:
    return ConstantDampingSolution(gamma, q0)


class DecayingDampingSolution(ExactSolution):
    """Solution of q'' + gamma/(t+1) q' + q = 0 from rest, canonical variables.

    Built from Bessel functions at orders (gamma -/+ 1)/2; the t = 0
    values reduce to (q0, 0) through the cross-product identity
    J_{v+1}(x) Y_v(x) - J_v(x) Y_{v+1}(x) = 2/(pi x).
    """

    def __init__(self, gamma: float, q0: float):
        if gamma <= 1.0:
            raise ValueError("decaying-damping closed form requires gamma > 1")
        self.gamma = gamma
        self.q0 = q0
        self.alpha_minus = 0.5 * (gamma - 1.0)
        self.alpha_plus = 0.5 * (gamma + 1.0)
        self.j_plus_1, self.y_plus_1 = bessel_jy(self.alpha_plus, 1.0)
        self.params = (gamma, q0)
        self._cache: dict[float, tuple[float, float]] = {}

    def at(self, t):
        cached = self._cache.get(t)
        if cached is not None:
            return cached
        x = t + 1.0
        j_minus, y_minus = bessel_jy(self.alpha_minus, x)
        j_plus, y_plus = bessel_jy(self.alpha_plus, x)
        front = 0.5 * self.q0 * math.pi
        q = front * x ** (-self.alpha_minus) * (self.j_plus_1 * y_minus - self.y_plus_1 * j_minus)
        p = front * x**self.alpha_plus * (self.y_plus_1 * j_plus - self.j_plus_1 * y_plus)
        self._cache[t] = (q, p)
        return q, p


def exact_decaying_damping(gamma: float, q0: float) -> DecayingDampingSolution:
    return DecayingDampingSolution(gamma, q0)


def reference_trajectory(
    system: HamiltonianSystem, s0: State, t_max: float, samples: int, h_ref: float | None = None
) -> Trajectory:
    """High-accuracy numerical oracle: order-4 composition at a fine internal step.

    Returns states on the uniform sample grid over [s0.t, s0.t + t_max];
    the internal step defaults to min(1e-4, t_max / (100 * samples)),
    giving ~1e-10 accuracy on the benchmark oscillators.  ``h_ref``
    overrides it for step-halving self-consistency checks.
    """
    if samples < 2 and t_max > 0.0:
        raise ValueError("need at least 2 samples for a nonzero span")
    stepper = suzuki_yoshida4()
    if t_max == 0.0:
        h_q = system.eval(s0.t, s0.q, s0.p)
        return Trajectory(
            np.array([s0.t]),
            s0.q[np.newaxis, :].copy(),
            s0.p[np.newaxis, :].copy(),
            np.array([h_q]),
            0.0,
        )
    dt = t_max / (samples - 1)
    if h_ref is None:
        h_ref = min(1e-4, t_max / (100.0 * samples))
    substeps = max(1, math.ceil(dt / h_ref))
    h_sub = dt / substeps
    times = np.empty(samples)
    qs = np.empty((samples, s0.dim))
    ps = np.empty_like(qs)
    hams = np.empty(samples)
    s = s0
    for k in range(samples):
        times[k], qs[k], ps[k] = s.t, s.q, s.p
        hams[k] = system.eval(s.t, s.q, s.p)
        if k < samples - 1:
            for _ in range(substeps):
                s = stepper.step(system, s, h_sub)
            s = State(s0.t + (k + 1) * dt, s.q, s.p)
    return Trajectory(times, qs, ps, hams, dt)


def _exact_ham_values(system: HamiltonianSystem, exact, times: np.ndarray) -> np.ndarray:
    if isinstance(exact, Trajectory):
        if len(exact) != len(times) or np.max(np.abs(exact.times - times)) > 1e-9:
            raise ValueError("reference trajectory grid does not align with the numeric grid")
        return np.asarray(exact.ham_values)
    values = np.empty(len(times))
    for k, t in enumerate(times):
        q, p = exact.at(float(t))
        values[k] = system.eval(float(t), np.atleast_1d(q), np.atleast_1d(p))
    return values


def hamiltonian_error_series(system: HamiltonianSystem, traj: Trajectory, exact) -> np.ndarray:
    """|H(t_l, exact) - H(t_l, numeric)| per recorded step.

    ``exact`` is either an ExactSolution or an aligned reference
    Trajectory (grids must agree to 1e-9).
    """
    reference = _exact_ham_values(system, exact, traj.times)
    return np.abs(reference - np.asarray(traj.ham_values))


def max_hamiltonian_error(system: HamiltonianSystem, traj: Trajectory, exact) -> float:
    return float(np.max(hamiltonian_error_series(system, traj, exact)))


def estimate_order(
    integrator: Integrator,
    system: HamiltonianSystem,
    s0: State,
    t_max: float,
    h_list,
    exact,
) -> float:
    """Least-squares slope of log(max Hamiltonian error) against log(h).

    ``h_list`` needs >= 4 values spanning at least a decade.  A run that
    diverges raises with the offending step size named.
    """
    h_list = [float(h) for h in h_list]
    if len(h_list) < 4:
        raise ValueError("h_list must contain at least 4 step sizes")
    if max(h_list) / min(h_list) < 10.0:
        raise ValueError("h_list must span at least one decade")
    errors = []
    for h in h_list:
        n_steps = int(round(t_max / h))
        try:
            traj = integrate(integrator, system, s0, h, n_steps)
        except Exception as exc:
            raise RuntimeError(f"integration diverged at h={h}") from exc
        errors.append(max_hamiltonian_error(system, traj, exact))
    slope, _ = np.polyfit(np.log(h_list), np.log(errors), 1)
    return float(slope)
