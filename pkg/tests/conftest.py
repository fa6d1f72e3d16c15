import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from slowproj import models
from slowproj.spectral import analyze, slow_basis

settings.register_profile(
    "slowproj",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("slowproj")


@pytest.fixture
def shear():
    system = models.shear2d(models.ShearParams(5.0, 1.0))
    data = analyze(system)
    return system, data, slow_basis(data, 1)


@pytest.fixture
def grad():
    p = models.GradParams(0.1, 1.0)
    system = models.grad3(p)
    data = analyze(system)
    return p, system, data, slow_basis(data, 2)


def complex_normal(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


_ACCEPTANCE = pytest.StashKey[dict]()


class _Recorder:
    def __init__(self, store):
        self.store = store
        self.current = None

    def check(self, number, title, passed, detail=""):
        """Record one acceptance criterion; the caller still asserts ``passed``."""
        self.current = number
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        self.store[number] = line
        return passed


@pytest.fixture
def acceptance(request):
    store = request.config.stash.setdefault(_ACCEPTANCE, {})
    recorder = _Recorder(store)
    number = getattr(request.function, "criterion", None)
    yield recorder
    if number is not None and number not in store:
        store[number] = f"FAIL  criterion {number:>2}: raised before completion"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        terminalreporter.write_line(store[number])
