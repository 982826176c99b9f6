import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

small_rationals = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


def matrices(rows, cols, elements=small_rationals):
    return st.lists(st.lists(elements, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@st.composite
def shaped_matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return draw(matrices(r, c))


@pytest.fixture
def sympy():
    return pytest.importorskip("sympy")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
