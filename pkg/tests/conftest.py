import numpy as np
import pytest

from modattack.algebra import ModImage


@pytest.fixture
def rng():
    return np.random.default_rng(20190417)


def random_image(rng, height, width, modulus):
    return ModImage(rng.integers(0, modulus, height * width), height, width, modulus)


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion run by this test")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    number, title = mark.args
    detail = "" if call.excinfo is None else call.excinfo.exconly().splitlines()[0][:160]
    _criteria[number] = (title, call.excinfo is None, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, detail = _criteria[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
