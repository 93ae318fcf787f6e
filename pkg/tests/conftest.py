from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from lebesguelab.core import FinVec

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def rationals(bound=5, den=6):
    return st.fractions(min_value=-bound, max_value=bound, max_denominator=den)


def finvecs(max_index=30, max_size=6, bound=5, den=6, nonzero=False):
    base = st.dictionaries(st.integers(1, max_index), rationals(bound, den), max_size=max_size).map(FinVec)
    return base.filter(bool) if nonzero else base


def positive_finvecs(max_index=20, max_size=6):
    return st.dictionaries(
        st.integers(1, max_index),
        st.fractions(min_value=Fraction(1, 6), max_value=4, max_denominator=6),
        min_size=1,
        max_size=max_size,
    ).map(FinVec)


# one summary line per acceptance criterion

_CRITERIA: dict[int, tuple[bool, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, text = marker.args
    detail = dict(item.user_properties).get("detail", "")
    previous = _CRITERIA.get(number)
    ok = rep.passed and (previous is None or previous[0])
    _CRITERIA[number] = (ok, text, detail or (previous[2] if previous else ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, text, detail = _CRITERIA[number]
        suffix = f" [{detail}]" if detail else ""
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}{suffix}")
