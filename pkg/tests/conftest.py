from __future__ import annotations

import numpy as np
import pytest

from fmgen.setfn import SetFunction, additive

W3 = (0.2, 0.35, 0.45)


@pytest.fixture
def nu3() -> SetFunction:
    return additive(W3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def random_capacity(n: int, rng: np.random.Generator) -> SetFunction:
    """Monotone closure of uniform noise, rescaled so that mu(N) = 1."""
    v = rng.random(1 << n)
    v[0] = 0.0
    for i in range(n):
        blk = v.reshape(-1, 2, 1 << i)
        np.maximum(blk[:, 1, :], blk[:, 0, :], out=blk[:, 1, :])
    v /= v[-1]
    v[-1] = 1.0
    return SetFunction(n, v)


# Outcome of every acceptance test, keyed by criterion number.
_ACCEPTANCE: dict[int, list[tuple[str, bool]]] = {}
_NOTES: list[str] = []


def note(line: str) -> None:
    """Measured value worth showing in the summary whether or not the test passes."""
    _NOTES.append(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _ACCEPTANCE.setdefault(marker.args[0], []).append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE):
        results = _ACCEPTANCE[crit]
        failed = [name for name, ok in results if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {crit}: {status} ({len(results) - len(failed)}/{len(results)} checks)"
        if failed:
            line += " failing: " + ", ".join(failed)
        tr.write_line(line)
    if _NOTES:
        tr.section("acceptance measurements")
        for line in _NOTES:
            tr.write_line(line)
