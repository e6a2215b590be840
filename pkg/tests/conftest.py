import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_instance(rng, max_size=3):
    """Small random (px, e, d) with a zero in every row of e and d."""
    from uwz.solvers import RDProblem

    nx, ny, nxh = rng.integers(2, max_size + 1, size=3)
    px = rng.dirichlet(np.ones(nx))
    e = rng.uniform(0, 1, (nx, ny))
    e[np.arange(nx), rng.integers(0, ny, nx)] = 0
    d = rng.uniform(0, 1, (nx, nxh))
    d[np.arange(nx), rng.integers(0, nxh, nx)] = 0
    E = rng.uniform(0.05, 0.9) * float((px @ e).min())
    problem = RDProblem(px, e, d, E)
    D = rng.uniform(0.05, 0.8) * float((px @ d).min())
    return problem, D


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def binary25():
    from uwz.binary import binary_problem

    return binary_problem(0.25)


ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str):
    """Store one acceptance line; printed in the terminal summary."""
    ACCEPTANCE[criterion] = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE[criterion])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
