"""Structure-preserving integration for explicitly time-dependent Hamiltonians."""

from .core import (
    DampingSchedule,
    DimensionError,
    HamiltonianSystem,
    LinearDamping,
    LogarithmicDamping,
    NonFiniteError,
    PowerMixDamping,
    ScalingTriple,
    State,
    Trajectory,
    ZeroDamping,
    eval_energy,
    exponential_scaling,
    grad_check,
    physical_energy,
    polynomial_scaling,
    validate_scaling,
)
from .integrators import (
    AugmentedState,
    ExplicitEuler,
    FixedPointError,
    Integrator,
    PresymplecticEulerA,
    PresymplecticEulerB,
    PresymplecticLeapfrogA,
    PresymplecticLeapfrogB,
    RescaledState,
    SuzukiYoshida,
    compose_suzuki_yoshida,
    integrate,
    integrate_tao,
    make_integrator,
    nesterov_trajectory,
    solve_implicit,
    step_gradient_descent,
    step_nesterov,
    step_rescaled_leapfrog,
    step_tao,
    suzuki_yoshida4,
)
from .oracles import (
    bessel_jy,
    estimate_order,
    exact_const_damping,
    exact_decaying_damping,
    hamiltonian_error_series,
    max_hamiltonian_error,
    reference_trajectory,
)
from .problems import (
    ConvexGenerator,
    Potential,
    PseudoHuberPotential,
    QuadraticGenerator,
    QuadraticPotential,
    conformal_lift,
    make_bregman_system,
    make_quadratic_system,
    make_random_quadratic,
    make_relativistic_system,
    unit_quadratic,
)

__version__ = "0.1.0"
