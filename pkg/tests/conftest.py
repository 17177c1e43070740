import sys
from pathlib import Path

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

coord = st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False)
height = st.floats(1e-3, 10.0, allow_nan=False, allow_infinity=False)


@st.composite
def positions(draw, on_plate=False):
    """Two distinct points above the plate, separated by at least 1e-2."""
    r_a = np.array([draw(coord), draw(coord), 0.0 if on_plate else draw(height)])
    r_b = np.array([draw(coord), draw(coord), draw(height)])
    offset = np.array([0.0, 0.0, 0.5]) if np.linalg.norm(r_b - r_a) < 1e-2 else 0.0
    return r_a, r_b + offset


@st.composite
def separations(draw, r_min=0.5, r_max=10.0):
    v = np.array([draw(st.floats(-1, 1)) for _ in range(3)])
    n = np.linalg.norm(v)
    if n < 1e-3:
        v, n = np.array([0.3, -0.4, 0.866]), 1.0
    return draw(st.floats(r_min, r_max)) * v / n


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
