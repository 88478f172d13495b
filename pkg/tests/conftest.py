import numpy as np
import pytest

from ncsched import NcsInstance, PlantDynamics, generate_instance, is_reachable

DEMO_SEED = 12345


def random_reachable_plant(rng, d, unstable=False, value_range=2.0):
    """Rejection-sample a reachable (optionally Schur-unstable) plant."""
    while True:
        A = rng.uniform(-value_range, value_range, (d, d))
        b = rng.uniform(-value_range, value_range, d)
        p = PlantDynamics(A, b)
        if not is_reachable(p):
            continue
        if unstable and np.abs(np.linalg.eigvals(A)).max() <= 1 + 1e-9:
            continue
        return p


def companion_plant(d, gain=2.0):
    """Shift register closed through a gain: reachable, not nilpotent."""
    A = np.zeros((d, d))
    if d > 1:
        A[:-1, 1:] = np.eye(d - 1)
    A[-1, 0] = gain
    b = np.zeros(d)
    b[-1] = 1.0
    return PlantDynamics(A, b)


def scalar_instance(gains, capacity, horizon, inputs=None, states=None):
    """Instance of scalar plants x(t+1) = a x(t) + b u(t)."""
    gains = list(gains)
    inputs = [1.0] * len(gains) if inputs is None else list(inputs)
    states = [1.0] * len(gains) if states is None else list(states)
    plants = tuple(PlantDynamics([[a]], [b]) for a, b in zip(gains, inputs))
    xi = tuple(np.array([x]) for x in states)
    return NcsInstance(plants, xi, capacity=capacity, horizon=horizon)


@pytest.fixture(scope="session")
def demo_instance():
    """The mixed second/third-order family: N=100, M=10, T=50."""
    rec = generate_instance(
        n=100,
        capacity=10,
        horizon=50,
        dims=[2] * 50 + [3] * 50,
        value_range=2.0,
        seed=DEMO_SEED,
    )
    return rec.instance


@pytest.fixture
def mixed_dims_instance():
    """Four plants of dimensions 1..4 sharing a capacity-2 channel, T=7."""
    plants = tuple(companion_plant(d) for d in (1, 2, 3, 4))
    xi = tuple(np.full(d, 0.5) for d in (1, 2, 3, 4))
    return NcsInstance(plants, xi, capacity=2, horizon=7)
