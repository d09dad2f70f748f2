import numpy as np
import pytest

from rmab_lab.channel import TransitionMatrix
from rmab_lab.rng import StreamKey


@pytest.fixture
def key():
    return StreamKey(20240611)


@pytest.fixture
def P_pos():
    return TransitionMatrix(0.2, 0.8)


def brute_force_expectation(P, initial_belief, L, play):
    """E[play(states)] by summing over every L x N joint state path."""
    omega = np.asarray(initial_belief, dtype=float)
    n = omega.shape[0]
    total = 0.0
    for code in range(2 ** (L * n)):
        bits = np.array([(code >> k) & 1 for k in range(L * n)], dtype=np.int8).reshape(L, n)
        prob = 1.0
        for i in range(n):
            prob *= omega[i] if bits[0, i] else 1.0 - omega[i]
            for t in range(1, L):
                p1 = P.p11 if bits[t - 1, i] else P.p01
                prob *= p1 if bits[t, i] else 1.0 - p1
        if prob:
            total += prob * play(bits)
    return total

from hypothesis import settings

# first calls into numba kernels include compilation time
settings.register_profile("default", deadline=None)
settings.load_profile("default")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criteria = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = dict(report.user_properties).get("criterion")
    if marker is None:
        return
    detail = dict(report.user_properties).get("detail", "")
    _CRITERIA.append((marker, "PASS" if report.passed else "FAIL", detail))


_CRITERIA = []


def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m is not None:
        item.user_properties.append(("criterion", f"criterion {m.args[0]}: {m.args[1]}"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for title, status, detail in sorted(_CRITERIA):
        line = f"[{status}] {title}"
        if detail:
            line += f" | {detail}"
        terminalreporter.write_line(line)
