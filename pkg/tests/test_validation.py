import numpy as np
import pytest

from slowproj.spectral import analyze
from slowproj.validation import (
    CHECKS,
    admissible_slow_counts,
    random_normal_system,
    random_real_stable_system,
    random_stable_system,
    run_validation,
)
from slowproj.spectral import non_normality


@pytest.mark.parametrize("make", [random_stable_system, random_real_stable_system, random_normal_system])
def test_generators_are_stable_and_seeded(make):
    a = make(np.random.default_rng(9), 5)
    b = make(np.random.default_rng(9), 5)
    np.testing.assert_array_equal(a.matrix, b.matrix)
    assert analyze(a).stable


def test_normal_generator_is_normal():
    system = random_normal_system(np.random.default_rng(0), 6)
    assert non_normality(system) <= 1e-12 * np.linalg.norm(system.matrix) ** 2


def test_real_generator_is_real():
    assert random_real_stable_system(np.random.default_rng(0), 4).is_real()


def test_admissible_counts_respect_pairs():
    system = random_real_stable_system(np.random.default_rng(3), 6)
    data = analyze(system)
    for n in admissible_slow_counts(data):
        lam = data.eigenvalues
        if n < len(lam) and abs(lam[n - 1].imag) > 0:
            assert abs(lam[n - 1] - np.conj(lam[n])) > 1e-8


def test_report_structure():
    report = run_validation(7, 3)
    assert report["status"] == "pass"
    assert set(report["checks"]) == set(CHECKS)
    for entry in report["checks"].values():
        assert entry["passed"] == entry["total"] == 3
    assert report["first_counterexample"] is None


def test_self_test_rejects_unstable():
    report = run_validation(7, 1, self_test=True)
    assert report["checks"]["unstable_rejected"]["passed"] == 1
    assert any("Unstable" in line for line in report["diagnostics"])


def test_failing_check_is_reported(monkeypatch):
    import slowproj.validation as validation

    def always_fails(rng):
        system = random_stable_system(rng, 2)
        return False, system, 1, 1.0

    monkeypatch.setitem(validation.CHECKS, "idempotence", always_fails)
    report = run_validation(1, 2)
    assert report["status"] == "fail"
    assert report["first_counterexample"]["check"] == "idempotence"
    assert len(report["first_counterexample"]["matrix"]) == 2


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        run_validation(1, 0)
