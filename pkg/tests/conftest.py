import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from enose.classifier import FingerprintLibrary  # noqa: E402
from enose.gas_model import GasSpecies  # noqa: E402
from enose.pack import default_pack  # noqa: E402
from oracles import GridOracle  # noqa: E402


@pytest.fixture(scope="session")
def pack():
    return default_pack()


@pytest.fixture(scope="session")
def lib(pack):
    return FingerprintLibrary(pack)


@pytest.fixture(scope="session")
def grid_oracles(pack):
    return {sp: GridOracle(pack, sp) for sp in GasSpecies}


# acceptance bookkeeping: one PASS/FAIL line per @pytest.mark.criterion(n, title)
_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and not report.failed):
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, [title, True])
    entry[1] = entry[1] and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
