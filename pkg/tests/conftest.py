import numpy as np
import pytest

from sirkit import SirParams, SirState, integrate

CANON_PARAMS = SirParams(0.3, 0.1)
CANON_INIT = SirState(0.99, 0.01, 0.0)
CANON_T_END = 100.0


def random_scenarios(n=100, seed=20240611):
    """(params, init, t_end) draws over the acceptance sampling box."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        beta, gamma = rng.uniform(0.05, 5.0, size=2)
        init = rng.dirichlet([1.0, 1.0, 1.0])
        t_end = rng.uniform(1.0, 200.0)
        out.append((SirParams(float(beta), float(gamma)), SirState(*map(float, init)), float(t_end)))
    return out


@pytest.fixture(scope="session")
def canon():
    return integrate(CANON_PARAMS, CANON_INIT, CANON_T_END)


@pytest.fixture(scope="session")
def scenario_set():
    return random_scenarios()


@pytest.fixture(scope="session")
def scenario_runs(scenario_set):
    return [integrate(p, x, t) for p, x, t in scenario_set]
