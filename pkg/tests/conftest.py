import numpy as np
import pytest

from wfda import _accel
from wfda.dataset import LabeledDataset, class_statistics


def fix_a_dataset():
    # d=2, c=3, two points per class; means (1,1), (3,1), (2,4)
    X = np.array([[1, 0], [1, 2], [3, 0], [3, 2], [1, 4], [3, 4]], dtype=float).T
    return LabeledDataset(X, np.array([1, 1, 2, 2, 3, 3]), ("1", "2", "3"))


@pytest.fixture
def fix_a():
    return fix_a_dataset()


@pytest.fixture
def fix_a_stats():
    return class_statistics(fix_a_dataset())


def random_problem(rng, c_max=4, d_max=5, n_min=2, n_max=6):
    c = int(rng.integers(2, c_max + 1))
    d = int(rng.integers(1, d_max + 1))
    sizes = rng.integers(n_min, n_max + 1, size=c)
    X = rng.standard_normal((d, int(sizes.sum())))
    labels = np.repeat(np.arange(1, c + 1), sizes)
    return LabeledDataset(X, labels, tuple(str(r) for r in range(1, c + 1)))


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    if request.param == "numba" and not _accel.HAS_NUMBA:
        pytest.skip("numba not installed")
    previous = _accel.set_backend(request.param == "numba")
    yield request.param
    _accel.set_backend(previous)


# --- acceptance summary ----------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "_criterion", None)
    if marker is None:
        return
    number, title = marker
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "seen": False})
    if report.when == "call" or report.outcome != "passed":
        entry["seen"] = True
        if report.outcome != "passed":
            entry["ok"] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result()._criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["ok"] and entry["seen"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {entry['title']}")
