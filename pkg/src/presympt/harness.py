"""Experiment runners: JSON configs in, CSV tables out.

Five experiment kinds: ``simulate`` (single trajectory against an
exact-solution oracle), ``order`` (step-size sweep with fitted error
slopes), ``phase_sweep`` (convergence map over the damping/step grid),
``rate_report`` (optimality gap against the continuous-rate bound) and
``quad_bench`` (Monte Carlo comparison on random quadratics).

Configs are strict: unknown keys are rejected so misspellings cannot
silently fall back to defaults.  All randomness flows through the
counter-based Philox generator; problems receive plain integer seeds
(phase-sweep cells use base_seed + cell_index), so parallel runs are
bitwise identical to serial ones.  CSV floats use the shortest
round-trip decimal form.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    LinearDamping,
    LogarithmicDamping,
    State,
    ZeroDamping,
)
from .integrators import (
    ConstantDampingMu,
    PolynomialMu,
    RescaledState,
    integrate,
    make_integrator,
    nesterov_trajectory,
    step_nesterov,
    step_rescaled_leapfrog,
    step_gradient_descent,
)
from .oracles import (
    exact_const_damping,
    exact_decaying_damping,
    max_hamiltonian_error,
)
from .problems import (
    PseudoHuberPotential,
    QuadraticGenerator,
    make_bregman_system,
    make_quadratic_system,
    make_random_quadratic,
    spread_quadratic,
    unit_quadratic,
)
from .core import exponential_scaling, polynomial_scaling

DEFAULT_H_LIST = (0.02, 0.01, 0.005, 0.0025, 0.00125)
INIT_STREAM = 1  # Philox sub-stream for initial points, distinct from problem sampling


class ConfigError(ValueError):
    """Malformed experiment configuration."""


def _check_keys(mapping, required, optional, context):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{context} must be a JSON object")
    unknown = sorted(set(mapping) - set(required) - set(optional))
    if unknown:
        raise ConfigError(f"unknown keys {unknown} in {context}")
    missing = sorted(set(required) - set(mapping))
    if missing:
        raise ConfigError(f"missing keys {missing} in {context}")


def _positive(value, name):
    if not isinstance(value, (int, float)) or not value > 0:
        raise ConfigError(f"{name} must be a positive number, got {value!r}")
    return float(value)


def fmt(value) -> str:
    """Shortest round-trip decimal form for floats; plain str otherwise."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


@dataclass(frozen=True)
class OscillatorSpec:
    """One-dimensional damped oscillator: M = I, f(q) = q^2/2, eta1 = eta2."""

    damping: str
    gamma: float
    t0: float = 1.0
    q0: float = 1.0
    p0: float = 0.0
    allow_excitation: bool = False

    @staticmethod
    def parse(raw, context="system"):
        _check_keys(
            raw,
            required=("damping", "gamma"),
            optional=("t0", "q0", "p0", "allow_excitation"),
            context=context,
        )
        spec = OscillatorSpec(
            damping=raw["damping"],
            gamma=float(raw["gamma"]),
            t0=float(raw.get("t0", 1.0)),
            q0=float(raw.get("q0", 1.0)),
            p0=float(raw.get("p0", 0.0)),
            allow_excitation=bool(raw.get("allow_excitation", False)),
        )
        if spec.damping not in ("linear", "logarithmic", "zero"):
            raise ConfigError(f"unknown damping kind {spec.damping!r}")
        if spec.gamma < 0.0 and not spec.allow_excitation:
            raise ConfigError(
                "negative gamma injects energy; set allow_excitation to confirm"
            )
        return spec

    def schedule(self):
        if self.damping == "zero":
            return ZeroDamping()
        if self.damping == "linear":
            return LinearDamping(self.gamma)
        return LogarithmicDamping(self.gamma, self.t0)

    def system(self):
        sched = self.schedule()
        return make_quadratic_system(np.eye(1), sched, sched, unit_quadratic(1))

    def oracle(self):
        """Closed-form solution when one applies (rest start at t = 0)."""
        if self.p0 != 0.0:
            return None
        if self.damping == "linear" and -2.0 < self.gamma < 2.0 and self.gamma != 0.0:
            return exact_const_damping(self.gamma, self.q0)
        if self.damping == "zero":
            return exact_const_damping(0.0, self.q0)
        if self.damping == "logarithmic" and self.gamma > 1.0 and self.t0 == 1.0:
            return exact_decaying_damping(self.gamma, self.q0)
        return None

    def initial_state(self):
        return State(0.0, [self.q0], [self.p0])


def _mu_rule(name, gamma):
    if name == "constant_damping":
        return ConstantDampingMu(gamma)
    if name == "polynomial":
        return PolynomialMu()
    raise ConfigError(f"unknown Nesterov momentum rule {name!r}")


# -- simulate -----------------------------------------------------------


@dataclass(frozen=True)
class SimulateConfig:
    system: OscillatorSpec
    integrator: str
    t_max: float
    n_steps: int
    decimation: int = 1
    nesterov_mu: str = "constant_damping"

    @staticmethod
    def parse(raw):
        _check_keys(
            raw,
            required=("kind", "system", "integrator", "t_max", "n_steps"),
            optional=("decimation", "nesterov_mu"),
            context="simulate config",
        )
        cfg = SimulateConfig(
            system=OscillatorSpec.parse(raw["system"]),
            integrator=str(raw["integrator"]),
            t_max=_positive(raw["t_max"], "t_max"),
            n_steps=int(raw["n_steps"]),
            decimation=int(raw.get("decimation", 1)),
            nesterov_mu=str(raw.get("nesterov_mu", "constant_damping")),
        )
        if cfg.n_steps < 1:
            raise ConfigError("n_steps must be >= 1")
        if cfg.decimation < 1:
            raise ConfigError("decimation must be >= 1")
        _known_integrator(cfg.integrator, extra=("nesterov",))
        return cfg


def _known_integrator(name, extra=()):
    known = ("euler_a", "euler_b", "leapfrog_a", "leapfrog_b", "sy4", "explicit_euler") + extra
    if name not in known:
        raise ConfigError(f"unknown integrator {name!r}; choose from {known}")


def run_simulate(cfg: SimulateConfig):
    """One trajectory; columns follow what the run can actually report."""
    system = cfg.system.system()
    potential = system.potential
    h = cfg.t_max / cfg.n_steps
    if cfg.integrator == "nesterov":
        rule = _mu_rule(cfg.nesterov_mu, cfg.system.gamma)
        traj = nesterov_trajectory(
            system, potential.grad_f, [cfg.system.q0], h, cfg.n_steps, rule
        )
    else:
        traj = integrate(
            make_integrator(cfg.integrator), system, cfg.system.initial_state(), h, cfg.n_steps
        )
    oracle = cfg.system.oracle()
    header = ["step", "t", "q_0", "p_0", "H_numeric"]
    if oracle is not None:
        header += ["H_exact", "abs_ham_error"]
    header.append("grad_norm")
    rows = []
    for k in range(0, len(traj), cfg.decimation):
        row = [k, traj.times[k], traj.positions[k, 0], traj.momenta[k, 0], traj.ham_values[k]]
        if oracle is not None:
            q_ex, p_ex = oracle.at(float(traj.times[k]))
            h_ex = system.eval(float(traj.times[k]), np.atleast_1d(q_ex), np.atleast_1d(p_ex))
            row += [h_ex, abs(h_ex - traj.ham_values[k])]
        row.append(float(np.linalg.norm(potential.grad_f(traj.positions[k]))))
        rows.append(row)
    return header, rows


# -- order --------------------------------------------------------------


@dataclass(frozen=True)
class OrderConfig:
    system: OscillatorSpec
    integrators: tuple
    h_list: tuple = DEFAULT_H_LIST
    t_max: float = 10.0

    @staticmethod
    def parse(raw):
        _check_keys(
            raw,
            required=("kind", "system", "integrators"),
            optional=("h_list", "t_max"),
            context="order config",
        )
        cfg = OrderConfig(
            system=OscillatorSpec.parse(raw["system"]),
            integrators=tuple(str(n) for n in raw["integrators"]),
            h_list=tuple(float(h) for h in raw.get("h_list", DEFAULT_H_LIST)),
            t_max=_positive(raw.get("t_max", 10.0), "t_max"),
        )
        for name in cfg.integrators:
            _known_integrator(name)
        if len(cfg.h_list) < 2:
            raise ConfigError("h_list needs at least two step sizes to fit a slope")
        return cfg


def run_order(cfg: OrderConfig):
    system = cfg.system.system()
    oracle = cfg.system.oracle()
    if oracle is None:
        raise ConfigError("order study requires a system with a closed-form oracle")
    s0 = cfg.system.initial_state()
    header = ["integrator", "h", "max_ham_error", "slope"]
    rows = []
    summaries = []
    for name in cfg.integrators:
        integ = make_integrator(name)
        errors = []
        for h in cfg.h_list:
            traj = integrate(integ, system, s0, h, int(round(cfg.t_max / h)))
            errors.append(max_hamiltonian_error(system, traj, oracle))
            rows.append([name, h, errors[-1], ""])
        slope = float(np.polyfit(np.log(cfg.h_list), np.log(errors), 1)[0])
        summaries.append([name, "", "", slope])
    return header, rows + summaries


# -- phase sweep --------------------------------------------------------


@dataclass(frozen=True)
class PhaseSweepConfig:
    n: int
    ratio: float
    seed: int
    methods: tuple
    gamma_min: float
    gamma_max: float
    gamma_steps: int
    h_min: float
    h_max: float
    h_steps: int
    max_iter: int = 800
    tol: float = 1e-3
    nesterov_mu: str = "constant_damping"

    @staticmethod
    def parse(raw):
        _check_keys(
            raw,
            required=(
                "kind", "n", "ratio", "seed", "methods",
                "gamma_min", "gamma_max", "gamma_steps", "h_min", "h_max", "h_steps",
            ),
            optional=("max_iter", "tol", "nesterov_mu"),
            context="phase_sweep config",
        )
        cfg = PhaseSweepConfig(
            n=int(raw["n"]),
            ratio=float(raw["ratio"]),
            seed=int(raw["seed"]),
            methods=tuple(str(m) for m in raw["methods"]),
            gamma_min=float(raw["gamma_min"]),
            gamma_max=float(raw["gamma_max"]),
            gamma_steps=int(raw["gamma_steps"]),
            h_min=_positive(raw["h_min"], "h_min"),
            h_max=_positive(raw["h_max"], "h_max"),
            h_steps=int(raw["h_steps"]),
            max_iter=int(raw.get("max_iter", 800)),
            tol=float(raw.get("tol", 1e-3)),
            nesterov_mu=str(raw.get("nesterov_mu", "constant_damping")),
        )
        for m in cfg.methods:
            if m not in ("leapfrog", "nesterov", "gradient_descent"):
                raise ConfigError(f"unknown method {m!r} for phase sweep")
        if cfg.gamma_min < 0.0 or cfg.gamma_max < cfg.gamma_min:
            raise ConfigError("need 0 <= gamma_min <= gamma_max")
        if cfg.h_max < cfg.h_min:
            raise ConfigError("need h_min <= h_max")
        if cfg.gamma_steps < 1 or cfg.h_steps < 1:
            raise ConfigError("grid steps must be >= 1")
        return cfg


def _rescaled_descent(matrix, q0, gamma, h, max_iter, tol):
    """Damped leapfrog on f = q.Mq/2 in rescaled momenta; returns (gnorm, iters)."""
    sched = LinearDamping(gamma)
    eye = np.eye(len(q0))
    rs = RescaledState(0.0, q0, np.zeros(len(q0)))
    grad = lambda q: matrix @ q
    gnorm = float(np.linalg.norm(grad(rs.q)))
    for it in range(1, max_iter + 1):
        try:
            rs = step_rescaled_leapfrog(sched, sched, eye, grad, rs, h)
        except (ArithmeticError, FloatingPointError):
            return math.inf, it
        gnorm = float(np.linalg.norm(grad(rs.q)))
        if not math.isfinite(gnorm):
            return math.inf, it
        if gnorm < tol:
            return gnorm, it
    return gnorm, max_iter


def _nesterov_descent(matrix, q0, gamma, h, max_iter, tol, mu_name):
    rule = _mu_rule(mu_name, gamma)
    grad = lambda q: matrix @ q
    q_prev = q0.copy()
    q_curr = q0.copy()
    gnorm = float(np.linalg.norm(grad(q_curr)))
    for it in range(1, max_iter + 1):
        q_next = step_nesterov(grad, q_prev, q_curr, h, rule.mu(it - 1, h))
        q_prev, q_curr = q_curr, q_next
        gnorm = float(np.linalg.norm(grad(q_curr)))
        if not math.isfinite(gnorm):
            return math.inf, it
        if gnorm < tol:
            return gnorm, it
    return gnorm, max_iter


def _gd_descent(matrix, q0, h, max_iter, tol):
    grad = lambda q: matrix @ q
    q = q0.copy()
    gnorm = float(np.linalg.norm(grad(q)))
    for it in range(1, max_iter + 1):
        q = step_gradient_descent(grad, q, h)
        gnorm = float(np.linalg.norm(grad(q)))
        if not math.isfinite(gnorm):
            return math.inf, it
        if gnorm < tol:
            return gnorm, it
    return gnorm, max_iter


_SWEEP_MATRIX = None


def _sweep_init(matrix):
    global _SWEEP_MATRIX
    _SWEEP_MATRIX = matrix


def _sweep_cell(args):
    (method, gamma, h, cell_seed, n, max_iter, tol, mu_name) = args
    rng = np.random.Generator(np.random.Philox(key=[cell_seed, INIT_STREAM]))
    q0 = rng.standard_normal(n)
    with np.errstate(over="ignore", invalid="ignore"):
        if method == "leapfrog":
            gnorm, iters = _rescaled_descent(_SWEEP_MATRIX, q0, gamma, h, max_iter, tol)
        elif method == "nesterov":
            gnorm, iters = _nesterov_descent(_SWEEP_MATRIX, q0, gamma, h, max_iter, tol, mu_name)
        else:
            gnorm, iters = _gd_descent(_SWEEP_MATRIX, q0, h, max_iter, tol)
    return min(gnorm, 1.0), iters


def run_phase_sweep(cfg: PhaseSweepConfig, threads: int = 1):
    problem = make_random_quadratic(cfg.n, cfg.ratio, cfg.seed)
    gammas = np.linspace(cfg.gamma_min, cfg.gamma_max, cfg.gamma_steps)
    hs = np.linspace(cfg.h_min, cfg.h_max, cfg.h_steps)
    cells = []
    cell_index = 0
    for method in cfg.methods:
        for gamma in gammas:
            for h in hs:
                cells.append(
                    (
                        method,
                        float(gamma),
                        float(h),
                        cfg.seed + cell_index,
                        cfg.n,
                        cfg.max_iter,
                        cfg.tol,
                        cfg.nesterov_mu,
                    )
                )
                cell_index += 1
    if threads > 1:
        with ProcessPoolExecutor(
            max_workers=threads, initializer=_sweep_init, initargs=(problem.matrix,)
        ) as pool:
            results = list(pool.map(_sweep_cell, cells, chunksize=16))
    else:
        _sweep_init(problem.matrix)
        results = [_sweep_cell(c) for c in cells]
    header = ["gamma", "h", "method", "clamped_grad_norm", "iterations_used"]
    rows = [
        [cell[1], cell[2], cell[0], value, iters]
        for cell, (value, iters) in zip(cells, results)
    ]
    return header, rows


# -- rate report --------------------------------------------------------


@dataclass(frozen=True)
class RateReportConfig:
    scaling_preset: str
    c: float
    t0: float
    constant: float
    potential_kind: str
    potential_params: tuple
    q0: tuple
    t_start: float
    t_max: float
    h: float
    integrator: str = "leapfrog_a"

    @staticmethod
    def parse(raw):
        _check_keys(
            raw,
            required=("kind", "scaling", "potential", "t_max", "h"),
            optional=("q0", "t_start", "integrator"),
            context="rate_report config",
        )
        scaling = raw["scaling"]
        _check_keys(scaling, required=("preset", "c"), optional=("t0", "constant"), context="scaling")
        potential = raw["potential"]
        family = str(potential.get("family", ""))
        if family == "quadratic":
            _check_keys(potential, required=("family",), optional=(), context="potential")
            params = ()
        elif family == "pseudo_huber":
            _check_keys(potential, required=("family",), optional=("scale",), context="potential")
            params = (float(potential.get("scale", 1.0)),)
        elif family == "spread_quadratic":
            _check_keys(
                potential,
                required=("family", "lambda_min", "lambda_max", "modes"),
                optional=(),
                context="potential",
            )
            params = (
                _positive(potential["lambda_min"], "lambda_min"),
                _positive(potential["lambda_max"], "lambda_max"),
                int(potential["modes"]),
            )
        else:
            raise ConfigError(f"unknown potential family {family!r}")
        if "q0" in raw:
            q0 = tuple(float(v) for v in np.atleast_1d(raw["q0"]))
        elif family == "spread_quadratic":
            q0 = tuple(1.0 for _ in range(params[2]))
        else:
            raise ConfigError("q0 is required unless the potential fixes the dimension")
        cfg = RateReportConfig(
            scaling_preset=str(scaling["preset"]),
            c=_positive(scaling["c"], "scaling.c"),
            t0=float(scaling.get("t0", 1.0)),
            constant=float(scaling.get("constant", 0.0)),
            potential_kind=family,
            potential_params=params,
            q0=q0,
            t_start=float(raw.get("t_start", 0.0)),
            t_max=_positive(raw["t_max"], "t_max"),
            h=_positive(raw["h"], "h"),
            integrator=str(raw.get("integrator", "leapfrog_a")),
        )
        if cfg.scaling_preset not in ("polynomial", "exponential"):
            raise ConfigError(f"unknown scaling preset {cfg.scaling_preset!r}")
        if family == "spread_quadratic" and len(cfg.q0) != params[2]:
            raise ConfigError("q0 length must equal the number of spectral modes")
        _known_integrator(cfg.integrator)
        return cfg

    def scaling(self):
        if self.scaling_preset == "polynomial":
            return polynomial_scaling(self.c, self.t0, self.constant)
        return exponential_scaling(self.c, self.constant)

    def potential(self):
        dim = len(self.q0)
        if self.potential_kind == "quadratic":
            return unit_quadratic(dim)
        if self.potential_kind == "spread_quadratic":
            return spread_quadratic(*self.potential_params)
        return PseudoHuberPotential(self.potential_params[0], dim)


def run_rate_report(cfg: RateReportConfig):
    dim = len(cfg.q0)
    potential = cfg.potential()
    if potential.f_star is None:
        raise ConfigError("rate report requires a potential with a known minimum value")
    scaling = cfg.scaling()
    system = make_bregman_system(QuadraticGenerator(np.eye(dim)), potential, scaling, dim)
    s0 = State(cfg.t_start, list(cfg.q0), [0.0] * dim)
    n_steps = int(round((cfg.t_max - cfg.t_start) / cfg.h))
    traj = integrate(make_integrator(cfg.integrator), system, s0, cfg.h, n_steps)
    header = ["step", "t", "f_gap", "continuous_bound", "ratio", "slope"]
    rows = []
    gaps = np.empty(len(traj))
    for k in range(len(traj)):
        t = float(traj.times[k])
        gap = potential.f(traj.positions[k]) - potential.f_star
        bound = math.exp(-scaling.beta(t))
        gaps[k] = gap
        rows.append([k, t, gap, bound, gap / bound, ""])
    if cfg.scaling_preset == "polynomial":
        try:
            slope = fitted_gap_slope(traj.times, gaps, cfg.t_max)
        except ValueError:
            slope = ""  # gap identically ~0 (started at the minimizer)
        rows.append(["", "", "", "", "", slope])
    return header, rows


def fitted_gap_slope(times, gaps, t_max) -> float:
    """Log-log slope of the optimality gap over the final decade of the run."""
    times = np.asarray(times, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    window = (times >= t_max / 10.0) & (times > 0.0) & (gaps > 0.0)
    if np.count_nonzero(window) < 2:
        raise ValueError("not enough positive samples in the final decade to fit a slope")
    slope, _ = np.polyfit(np.log(times[window]), np.log(gaps[window]), 1)
    return float(slope)


# -- quadratic benchmark ------------------------------------------------


@dataclass(frozen=True)
class BenchMethod:
    name: str
    gamma: float
    h: float
    mu_rule: str = "constant_damping"

    @property
    def label(self) -> str:
        return f"{self.name}(gamma={fmt(self.gamma)},h={fmt(self.h)})"


@dataclass(frozen=True)
class QuadBenchConfig:
    n: int
    ratio: float
    seed: int
    n_trials: int
    iterations: int
    methods: tuple

    @staticmethod
    def parse(raw):
        _check_keys(
            raw,
            required=("kind", "n", "ratio", "seed", "methods"),
            optional=("n_trials", "iterations"),
            context="quad_bench config",
        )
        methods = []
        for m in raw["methods"]:
            _check_keys(m, required=("name", "h"), optional=("gamma", "mu_rule"), context="method")
            name = str(m["name"])
            if name not in ("leapfrog", "nesterov", "gradient_descent"):
                raise ConfigError(f"unknown method {name!r} for quad_bench")
            methods.append(
                BenchMethod(
                    name=name,
                    gamma=float(m.get("gamma", 0.0)),
                    h=_positive(m["h"], "method h"),
                    mu_rule=str(m.get("mu_rule", "constant_damping")),
                )
            )
        cfg = QuadBenchConfig(
            n=int(raw["n"]),
            ratio=float(raw["ratio"]),
            seed=int(raw["seed"]),
            n_trials=int(raw.get("n_trials", 50)),
            iterations=int(raw.get("iterations", 800)),
            methods=tuple(methods),
        )
        if cfg.n_trials < 1 or cfg.iterations < 1:
            raise ConfigError("n_trials and iterations must be >= 1")
        return cfg


def _bench_trial(matrix, q0, method: BenchMethod, iterations):
    """Gradient-norm history over a full run; NaN marks diverged iterations."""
    grad = lambda q: matrix @ q
    history = np.full(iterations + 1, np.nan)
    history[0] = np.linalg.norm(grad(q0))
    with np.errstate(over="ignore", invalid="ignore"):
        if method.name == "leapfrog":
            sched = LinearDamping(method.gamma)
            eye = np.eye(len(q0))
            rs = RescaledState(0.0, q0, np.zeros(len(q0)))
            for it in range(1, iterations + 1):
                try:
                    rs = step_rescaled_leapfrog(sched, sched, eye, grad, rs, method.h)
                except (ArithmeticError, FloatingPointError):
                    return history
                value = float(np.linalg.norm(grad(rs.q)))
                if not math.isfinite(value):
                    return history
                history[it] = value
        elif method.name == "nesterov":
            rule = _mu_rule(method.mu_rule, method.gamma)
            q_prev, q_curr = q0.copy(), q0.copy()
            for it in range(1, iterations + 1):
                q_next = step_nesterov(grad, q_prev, q_curr, method.h, rule.mu(it - 1, method.h))
                q_prev, q_curr = q_curr, q_next
                value = float(np.linalg.norm(grad(q_curr)))
                if not math.isfinite(value):
                    return history
                history[it] = value
        else:
            q = q0.copy()
            for it in range(1, iterations + 1):
                q = step_gradient_descent(grad, q, method.h)
                value = float(np.linalg.norm(grad(q)))
                if not math.isfinite(value):
                    return history
                history[it] = value
    return history


def run_quad_bench(cfg: QuadBenchConfig):
    histories = {m.label: [] for m in cfg.methods}
    for trial in range(cfg.n_trials):
        problem = make_random_quadratic(cfg.n, cfg.ratio, cfg.seed + trial)
        rng = np.random.Generator(np.random.Philox(key=[cfg.seed + trial, INIT_STREAM]))
        q0 = rng.standard_normal(cfg.n)
        for method in cfg.methods:
            histories[method.label].append(_bench_trial(problem.matrix, q0, method, cfg.iterations))
    header = ["iteration", "method", "mean_grad_norm", "std_grad_norm", "diverged_trials"]
    rows = []
    for method in cfg.methods:
        stack = np.vstack(histories[method.label])  # (trials, iterations + 1)
        for it in range(cfg.iterations + 1):
            col = stack[:, it]
            alive = col[np.isfinite(col)]
            diverged = int(len(col) - len(alive))
            if len(alive):
                mean = float(np.mean(alive))
                std = float(np.std(alive))
            else:
                mean = math.inf
                std = math.inf
            rows.append([it, method.label, mean, std, diverged])
    return header, rows


# -- config loading ------------------------------------------------------

PARSERS = {
    "simulate": SimulateConfig.parse,
    "order": OrderConfig.parse,
    "phase_sweep": PhaseSweepConfig.parse,
    "rate_report": RateReportConfig.parse,
    "quad_bench": QuadBenchConfig.parse,
}

RUNNERS = {
    SimulateConfig: run_simulate,
    OrderConfig: run_order,
    RateReportConfig: run_rate_report,
    QuadBenchConfig: run_quad_bench,
}


def load_config(path, expected_kind=None):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("config must be a JSON object with a 'kind' field")
    kind = raw["kind"]
    if kind not in PARSERS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    if expected_kind is not None and kind != expected_kind:
        raise ConfigError(f"config kind {kind!r} does not match subcommand {expected_kind!r}")
    return PARSERS[kind](raw)


def run_experiment(cfg, threads: int = 1):
    if isinstance(cfg, PhaseSweepConfig):
        return run_phase_sweep(cfg, threads=threads)
    return RUNNERS[type(cfg)](cfg)
