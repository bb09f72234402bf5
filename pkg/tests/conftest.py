import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from hofa.groups import FiniteAbelianGroup, GroupFunction

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def small_groups(draw, max_order=24, max_rank=2):
    rank = draw(st.integers(1, max_rank))
    factors = []
    order = 1
    for _ in range(rank):
        m = draw(st.integers(2, max(2, max_order // order)))
        if order * m > max_order:
            break
        factors.append(m)
        order *= m
    return FiniteAbelianGroup(tuple(factors) or (2,))


@st.composite
def bounded_functions(draw, max_order=24, max_rank=2):
    group = draw(small_groups(max_order, max_rank))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return GroupFunction.random(group, np.random.default_rng(seed))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# acceptance criteria report one line each in the terminal summary
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
