import pytest
from fractions import Fraction

from hypothesis import strategies as st

from outer_billiards.exactfield import QuadExt


def fractions(limit: int = 50, den: int = 30):
    return st.builds(Fraction, st.integers(-limit, limit), st.integers(1, den))


@st.composite
def quad(draw, d=None):
    """A random element of Q, Q(sqrt2) or Q(sqrt3)."""
    d = draw(st.sampled_from([1, 2, 3])) if d is None else d
    a = draw(fractions())
    b = draw(fractions()) if d > 1 else Fraction(0)
    return QuadExt(a, b, d)


@pytest.fixture(scope="session")
def rocket():
    from outer_billiards.renorm_dodecagon import build_rocket_system

    return build_rocket_system()


@pytest.fixture(scope="session")
def sector():
    from outer_billiards.renorm_octagon import build_sector_system

    return build_sector_system()


# -- acceptance summary ------------------------------------------------------------

_CRITERIA: dict[int, list[str]] = {}


def _criterion(nodeid: str):
    if "test_acceptance.py::test_criterion_" not in nodeid:
        return None
    return int(nodeid.split("test_criterion_", 1)[1][:2])


def pytest_runtest_logreport(report):
    n = _criterion(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        if hasattr(report, "wasxfail"):
            state = "failed"
        else:
            state = report.outcome
        _CRITERIA.setdefault(n, []).append(state)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        states = _CRITERIA[n]
        verdict = "PASS" if all(s == "passed" for s in states) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {verdict} ({states.count('passed')}/{len(states)} checks)")
