from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from movelab import kernels
from movelab.measure import EXACT, Measure, ground

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(params=kernels.available_backends())
def each_backend(request):
    with kernels.backend(request.param):
        yield request.param


def rationals(lo=0, hi=1, max_den=12):
    """Rationals in [lo, hi] with small denominators."""
    return (
        st.integers(1, max_den)
        .flatmap(lambda d: st.tuples(st.integers(0, d), st.just(d)))
        .map(lambda t: Fraction(*t))
        .filter(lambda x: lo <= x <= hi)
    )


@st.composite
def exact_measures(draw, min_n=1, max_n=4, zeros=True):
    n = draw(st.integers(min_n, max_n))
    lo = 0 if zeros else 1
    w = draw(st.lists(st.integers(lo, 9), min_size=1 << n, max_size=1 << n))
    if not any(w):
        w[draw(st.integers(0, (1 << n) - 1))] = 1
    s = sum(w)
    return Measure(ground(n), [Fraction(x, s) for x in w], EXACT)


@st.composite
def measure_pairs(draw, min_n=1, max_n=4, zeros=True):
    n = draw(st.integers(min_n, max_n))
    return (
        draw(exact_measures(min_n=n, max_n=n, zeros=zeros)),
        draw(exact_measures(min_n=n, max_n=n, zeros=zeros)),
    )


# one "criterion N: PASS/FAIL ..." line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
