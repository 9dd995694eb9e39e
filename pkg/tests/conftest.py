import time

import pytest

import ivpsuite as ivp


@pytest.fixture
def qgso_small():
    """63x63 interior grid; small enough for per-test builds."""
    return ivp.build_preset("qgso", "GC", {"size": "small"})


@pytest.fixture(scope="session")
def lorenz63_lyapunov():
    """One shared tight-tolerance spectrum run (about two minutes);
    returns (result, wall_seconds)."""
    problem = ivp.build_preset("lorenz63")
    start = time.time()
    result = ivp.lyapunov_spectrum(problem, averaging_span=500.0)
    return result, time.time() - start
