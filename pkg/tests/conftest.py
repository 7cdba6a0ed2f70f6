import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from palimpsest import JointSource, load_source  # noqa: E402


@pytest.fixture(scope="session")
def typewriter():
    return load_source("typewriter")


@pytest.fixture(scope="session")
def editprocess2():
    return load_source("editprocess2")


@pytest.fixture(scope="session")
def huffman_src():
    return load_source("huffman_example")


def rational_source(weights, size, storage=2):
    total = sum(weights)
    joint = [[Fraction(weights[i * size + j], total) for j in range(size)] for i in range(size)]
    return JointSource(tuple(str(i) for i in range(size)), tuple(map(tuple, joint)), storage)


@st.composite
def sources(draw, size=None, storage=2, max_weight=6):
    k = size or draw(st.integers(2, 4))
    w = draw(st.lists(st.integers(0, max_weight), min_size=k * k, max_size=k * k))
    if sum(w) == 0:
        w[0] = 1
    return rational_source(w, k, storage)


# -- acceptance report: one PASS/FAIL line per criterion ----------------------------

_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    num, title = mark.args
    entry = _CRITERIA.setdefault(num, [title, True, 0.0])
    if rep.failed:
        entry[1] = False
    if rep.when == "call":
        entry[2] += rep.duration


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok, secs = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  "
                                    f"{title} ({secs:.1f} s)")
