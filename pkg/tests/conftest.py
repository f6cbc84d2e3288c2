import numpy as np
import pytest

from presympt.core import (
    LinearDamping,
    LogarithmicDamping,
    State,
    ZeroDamping,
    polynomial_scaling,
)
from presympt.problems import (
    QuadraticGenerator,
    conformal_lift,
    make_bregman_system,
    make_quadratic_system,
    make_relativistic_system,
    unit_quadratic,
)


def oscillator():
    """Undamped harmonic oscillator, H = p^2/2 + q^2/2."""
    return make_quadratic_system(np.eye(1), ZeroDamping(), ZeroDamping(), unit_quadratic(1))


def damped_oscillator(gamma=0.2):
    sched = LinearDamping(gamma)
    return make_quadratic_system(np.eye(1), sched, sched, unit_quadratic(1))


def decaying_oscillator(gamma=3.0):
    sched = LogarithmicDamping(gamma, 1.0)
    return make_quadratic_system(np.eye(1), sched, sched, unit_quadratic(1))


def shipped_systems():
    """One instance of every Hamiltonian family the package provides."""
    breg = make_bregman_system(
        QuadraticGenerator(np.diag([1.0, 2.0])), unit_quadratic(2), polynomial_scaling(2.0), 2
    )
    return {
        "oscillator": oscillator(),
        "damped": damped_oscillator(),
        "decaying": decaying_oscillator(),
        "bregman": breg,
        "relativistic": make_relativistic_system(unit_quadratic(2), 0.2, 1.0, 5.0, dim=2),
        "conformal_lift": conformal_lift(oscillator(), LinearDamping(0.2)),
    }


@pytest.fixture(scope="session")
def systems():
    return shipped_systems()


def random_state(rng, dim, t_range=(0.0, 2.0)):
    return State(
        float(rng.uniform(*t_range)), rng.standard_normal(dim), rng.standard_normal(dim)
    )
