import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def abc_series():
    return np.array([1.0, 2.0, 3.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# criterion number -> list of (check name, passed, detail)
ACCEPTANCE = {}


def record(criterion, name, passed, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((name, bool(passed), detail))
    print(f"[criterion {criterion}] {'PASS' if passed else 'FAIL'} {name}: {detail}", flush=True)
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[crit]
        ok = all(p for _, p, _ in checks)
        tr.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'} ({sum(p for _, p, _ in checks)}/{len(checks)} checks)")
        for name, p, detail in checks:
            tr.write_line(f"    {'ok  ' if p else 'FAIL'} {name}: {detail}")
