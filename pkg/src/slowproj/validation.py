"""Random stable test systems and the invariant suite behind ``slowproj validate``."""

import numpy as np

from . import linalg
from .error_functional import QuadratureConfig, error_closed_form, quadrature_error
from .exceptions import SlowProjError, Unstable
from .projection import (
    dop_dual_set,
    dop_matrix,
    gramian,
    interaction_vector,
    minimizer,
    orthogonal_projection,
    riesz_projection,
)
from .spectral import LinearSystem, analyze, assert_stable, slow_basis

__all__ = [
    "random_stable_system",
    "random_real_stable_system",
    "random_normal_system",
    "admissible_slow_counts",
    "random_case",
    "CHECKS",
    "run_validation",
]


def _complex_normal(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _spread_eigenvalues(rng, d, min_sep=0.05):
    """Eigenvalues with real parts in [-3, -0.2] pairwise at least ``min_sep`` apart."""
    while True:
        re = -rng.uniform(0.2, 3.0, d)
        if d == 1 or np.diff(np.sort(re)).min() >= min_sep:
            return re + 1j * rng.uniform(-2.0, 2.0, d)


def random_stable_system(rng, d, max_cond=50.0):
    """Non-normal stable system ``V diag(lambda) V^{-1}`` with generic complex spectrum."""
    lam = _spread_eigenvalues(rng, d)
    while True:
        V = _complex_normal(rng, (d, d))
        if np.linalg.cond(V) <= max_cond:
            break
    L = V @ np.diag(lam) @ np.linalg.inv(V)
    return LinearSystem(L, "random")


def random_real_stable_system(rng, d, margin=(0.2, 1.0)):
    """Real Gaussian matrix shifted so its spectral abscissa lies in ``-margin``."""
    while True:
        A = rng.standard_normal((d, d))
        values, vectors = np.linalg.eig(A)
        if np.linalg.cond(vectors) <= 1e3:
            break
    shift = values.real.max() + rng.uniform(*margin)
    return LinearSystem(A - shift * np.eye(d), "random_real")


def random_normal_system(rng, d):
    """``U diag(lambda) U^H`` with ``U`` unitary."""
    U, _ = np.linalg.qr(_complex_normal(rng, (d, d)))
    lam = _spread_eigenvalues(rng, d)
    return LinearSystem(U @ np.diag(lam) @ U.conj().T, "random_normal")


def admissible_slow_counts(data, min_gap=1e-6):
    """Slow counts that keep conjugate pairs together and leave a spectral gap."""
    counts = []
    for n in range(1, data.system.dim + 1):
        try:
            basis = slow_basis(data, n)
        except SlowProjError:
            continue
        if basis.gap > min_gap:
            counts.append(n)
    return counts


def random_case(rng, d_max=8, kind=None, n_max=None):
    """Draw ``(system, data, n)`` for a random stable system and admissible ``n``."""
    d = int(rng.integers(1, d_max + 1))
    kind = kind or ("complex" if rng.random() < 0.5 else "real")
    make = {
        "complex": random_stable_system,
        "real": random_real_stable_system,
        "normal": random_normal_system,
    }[kind]
    system = make(rng, d)
    data = analyze(system)
    counts = admissible_slow_counts(data)
    if n_max is not None:
        counts = [n for n in counts if n <= n_max] or counts[:1]
    n = int(rng.choice(counts))
    return system, data, n


def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def _serialize(system, n, detail):
    return {
        "matrix": [[_pair(z) for z in row] for row in system.matrix],
        "slow_count": n,
        "detail": detail,
    }


def _check_idempotence(rng):
    system, data, n = random_case(rng)
    basis = slow_basis(data, n)
    worst = max(
        p.idempotence_defect()
        for p in (dop_matrix(system, basis), orthogonal_projection(basis), riesz_projection(data, n))
    )
    return worst <= 1e-9, system, n, worst


def _check_normal_collapse(rng):
    system, data, n = random_case(rng, kind="normal")
    basis = slow_basis(data, n)
    P = dop_matrix(system, basis).matrix
    worst = max(
        np.linalg.norm(P - orthogonal_projection(basis).matrix),
        np.linalg.norm(P - riesz_projection(data, n).matrix),
    )
    return worst <= 1e-9, system, n, float(worst)


def _check_minimality(rng):
    system, data, n = random_case(rng)
    basis = slow_basis(data, n)
    x0 = _complex_normal(rng, system.dim)
    xi = minimizer(gramian(basis), interaction_vector(system, basis, x0))
    best = error_closed_form(system, basis, x0, xi, data).total
    worst = np.inf
    for scale in (1e-2, 1e-1, 1.0):
        delta = _complex_normal(rng, n)
        delta *= scale / np.linalg.norm(delta)
        worst = min(worst, error_closed_form(system, basis, x0, xi + delta, data).total - best)
    return worst >= 0, system, n, max(0.0, -float(worst))


def _check_biorthogonality(rng):
    system, data, n = random_case(rng)
    basis = slow_basis(data, n)
    B = dop_dual_set(system, basis).biorthogonality(basis)
    worst = float(np.abs(B - np.eye(n)).max())
    return worst <= 1e-10, system, n, worst


def _check_riesz_commutation(rng):
    system, data, n = random_case(rng)
    P = riesz_projection(data, n)
    worst = P.commutator_norm(system.matrix) / linalg.opnorm(system.matrix)
    return worst <= 1e-9, system, n, worst


def _check_oracle_agreement(rng):
    system, data, n = random_case(rng, d_max=6)
    basis = slow_basis(data, n)
    x0 = _complex_normal(rng, system.dim)
    xi = _complex_normal(rng, n)
    closed = error_closed_form(system, basis, x0, xi, data).total
    quad = quadrature_error(system, basis, x0, xi, QuadratureConfig())
    rel = abs(closed - quad) / abs(closed)
    return rel <= 1e-6, system, n, float(rel)


CHECKS = {
    "idempotence": _check_idempotence,
    "normal_collapse": _check_normal_collapse,
    "minimality": _check_minimality,
    "biorthogonality": _check_biorthogonality,
    "riesz_commutation": _check_riesz_commutation,
    "oracle_agreement": _check_oracle_agreement,
}


def run_validation(seed, trials, self_test=False):
    """Run every check ``trials`` times and return a JSON-serializable report.

    Each check and trial gets its own generator seeded with
    ``(seed, check index, trial)``, so results do not depend on execution
    order. With ``self_test`` an unstable matrix is injected and must be
    rejected with :class:`Unstable`.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    checks = {}
    diagnostics = []
    counterexample = None
    for index, (name, check) in enumerate(CHECKS.items()):
        passed, max_defect = 0, 0.0
        for trial in range(trials):
            rng = np.random.default_rng([seed, index, trial])
            try:
                ok, system, n, defect = check(rng)
            except SlowProjError as exc:
                ok, system, n, defect = False, None, None, np.nan
                diagnostics.append(f"{name}[{trial}]: {type(exc).__name__}: {exc}")
            if ok:
                passed += 1
                max_defect = max(max_defect, abs(defect))
            elif counterexample is None:
                counterexample = {"check": name, "trial": trial}
                if system is not None:
                    counterexample.update(_serialize(system, n, f"{defect:.6e}"))
        checks[name] = {"passed": passed, "total": trials, "max_defect": f"{max_defect:.3e}"}

    if self_test:
        system = LinearSystem(np.diag([-1.0, 0.1]), "injected_unstable")
        try:
            assert_stable(analyze(system))
            dop_matrix(system, slow_basis(analyze(system), 1))
            rejected = False
        except Unstable as exc:
            rejected = True
            diagnostics.append(f"self_test: injected case rejected with Unstable({exc.eigenvalue!r})")
        checks["unstable_rejected"] = {"passed": int(rejected), "total": 1, "max_defect": "0.000e+00"}
        if not rejected and counterexample is None:
            counterexample = {"check": "unstable_rejected", **_serialize(system, 1, "not rejected")}

    failed = sum(c["total"] - c["passed"] for c in checks.values())
    return {
        "command": "validate",
        "inputs": {"seed": seed, "trials": trials, "self_test": self_test},
        "outputs": [],
        "diagnostics": diagnostics,
        "checks": checks,
        "status": "pass" if failed == 0 else "fail",
        "first_counterexample": counterexample,
    }
