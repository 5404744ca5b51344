import warnings

import numpy as np
import pytest

from vilenkin import make_group, walsh

_RESULTS: dict[str, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion")
    config.addinivalue_line("markers", "slow: long-running check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        key = f"{mark.args[0]:>4} {mark.args[1]}"
        _RESULTS.setdefault(key, []).append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")

    def order(key):
        num = key.split()[0]
        return (int("".join(c for c in num if c.isdigit())), num)

    for key in sorted(_RESULTS, key=order):
        outs = _RESULTS[key]
        status = "PASS" if all(o == "passed" for _, o in outs) else "FAIL"
        tr.write_line(f"{status} criterion {key} ({len(outs)} test{'s' if len(outs) > 1 else ''})")
        for name, o in outs:
            if o != "passed":
                tr.write_line(f"       failing: {name}")


@pytest.fixture
def g2():
    return walsh(12)


@pytest.fixture
def g23():
    return make_group([2, 3], 8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield
