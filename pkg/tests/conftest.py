import os
import sys

import hypothesis
import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from crpareto.io import load_problem  # noqa: E402
from crpareto.problem import AllocationProblem  # noqa: E402

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=1000, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def table1a():
    return load_problem("table1a")


@pytest.fixture
def table1b():
    return load_problem("table1b")


@st.composite
def problems(draw, max_users=3, max_channels=3, min_users=1, cells=12):
    """Random problems with N*M <= cells, integer-ish and irrational rewards mixed."""
    N = draw(st.integers(min_users, max_users))
    M = draw(st.integers(1, max(1, min(max_channels, cells // N))))
    reward = np.array(draw(st.lists(
        st.one_of(st.sampled_from([0.0, 1.0, 4.0, 16.0]), st.floats(1.0, 16.0)),
        min_size=N * M, max_size=N * M))).reshape(N, M)
    forbidden = {(n, m) for n in range(N) for m in range(M) if reward[n, m] == 0.0}
    triples = [(n, k, m) for n in range(N) for k in range(n + 1, N) for m in range(M)]
    conflicts = [t for t in triples if draw(st.booleans())]
    c_max = draw(st.integers(1, M))
    return AllocationProblem(N, M, reward, tuple(conflicts), c_max, frozenset(forbidden))


# acceptance reporting: one line per criterion in the terminal summary
_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA.append((marker.args[0], "PASS" if rep.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _CRITERIA:
        terminalreporter.write_line(f"{status}  {label}")
