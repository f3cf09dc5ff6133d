import numpy as np
import pytest

from aledg.euler import prim_to_cons


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_states(rng, n, gamma=1.4, vmax=2.0):
    """Random physical conserved states, shape ``(n, 3)``."""
    prim = np.column_stack([
        rng.uniform(0.2, 3.0, n),
        rng.uniform(-vmax, vmax, n),
        rng.uniform(0.2, 3.0, n),
    ])
    return prim_to_cons(prim, gamma)


# acceptance results, printed once at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (len(k), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key}: {'PASS' if ok else 'FAIL'}  {detail}")
