"""Command line interface: ``slowproj <command> [options]``.

Commands
--------
spectrum        eigenvalues as CSV, optionally swept over wave numbers (grad3)
project         project one initial condition, JSON output
trajectories    full and reduced trajectories as CSV
error-surface   dynamical error over a grid of slow coordinates, CSV
validate        randomized invariant suite, JSON report

Complex numbers are written as separate ``_re``/``_im`` columns (CSV) or
``[re, im]`` pairs (JSON); every float carries 17 significant digits.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import models
from .error_functional import error_closed_form
from .exceptions import BadModel, BadRange, ShapeMismatch, SlowProjError, UnsupportedDimension
from .projection import Method, gramian, interaction_vector, minimizer, project
from .spectral import LinearSystem, SlowBasis, analyze, assert_stable, slow_basis
from .trajectory import TimeGrid, default_horizon, propagate_full, propagate_reduced
from .validation import run_validation

__all__ = ["main", "build_parser", "load_model_file", "resolve_model"]

BUILTINS = ("shear2d", "grad3")
METHOD_ORDER = (Method.DOP, Method.ORTHOGONAL, Method.RIESZ)


def fmt(x):
    return format(float(x), ".17g")


def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def load_model_file(path):
    """Read ``{"dimension": d, "matrix": [[[re, im], ...], ...], "slow_count": n}``."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadModel(f"cannot read model file {path}: {exc}") from exc
    try:
        d = int(payload["dimension"])
        rows = payload["matrix"]
        n = int(payload["slow_count"])
        L = np.array([[complex(re, im) for re, im in row] for row in rows])
    except (KeyError, TypeError, ValueError) as exc:
        raise BadModel(f"malformed model file {path}: {exc}") from exc
    if L.shape != (d, d):
        raise BadModel(f"matrix shape {L.shape} does not match dimension {d}")
    if not 1 <= n <= d:
        raise BadModel(f"slow_count {n} outside [1, {d}]")
    try:
        system = LinearSystem(L, os.path.basename(path))
    except ValueError as exc:
        raise BadModel(str(exc)) from exc
    return system, n


def resolve_model(args):
    """Return ``(system, slow_count, echo)`` for the ``--model`` options."""
    if args.model == "shear2d":
        p = models.ShearParams(args.alpha, args.gamma)
        system, n = models.shear2d(p), 1
    elif args.model == "grad3":
        p = models.GradParams(args.epsilon, args.k)
        system, n = models.grad3(p), 2
    elif args.model and os.path.isfile(args.model):
        system, n = load_model_file(args.model)
    else:
        raise BadModel(f"unknown model {args.model!r}; use one of {BUILTINS} or a JSON file path")
    if args.slow_count is not None:
        n = args.slow_count
    echo = {"model": system.label, "params": system.params, "slow_count": n}
    return system, n, echo


def parse_x0(text, system, basis):
    if text == "slow-orthogonal":
        if system.label == "grad3" and basis.count == 2:
            return models.grad3_slow_orthogonal_complement(
                models.GradParams(system.params["epsilon"], system.params["k"])
            )
        if basis.count == system.dim:
            raise BadModel("slow manifold is the whole space; no orthogonal complement")
        _, _, vh = np.linalg.svd(basis.vectors.conj().T)
        return vh[-1].conj()
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ShapeMismatch(f"cannot parse --x0 {text!r}") from exc
    if len(values) != 2 * system.dim:
        raise ShapeMismatch(f"--x0 needs {2 * system.dim} numbers (re,im interleaved), got {len(values)}")
    return np.array(values[0::2]) + 1j * np.array(values[1::2])


def parse_range(text, geometric=False):
    """``start:end:count`` (geometric) or ``start:end:step`` (arithmetic) to a grid."""
    try:
        start, end, third = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise BadRange(f"malformed range {text!r}; expected start:end:{'count' if geometric else 'step'}") from exc
    if geometric:
        count = int(third)
        if count != third or count < 1 or not (0 < start <= end):
            raise BadRange(f"invalid geometric range {text!r}")
        return np.geomspace(start, end, count)
    if third <= 0 or end < start:
        raise BadRange(f"invalid range {text!r}")
    count = int(round((end - start) / third)) + 1
    return start + third * np.arange(count)


def _write(text, out, written):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
        written.append(out)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _analyzed(system):
    data = analyze(system)
    assert_stable(data)
    return data


def cmd_spectrum(args):
    written = []
    if args.k_range:
        if args.model != "grad3":
            raise BadModel("--k-range sweeps are only available for --model grad3")
        ks = parse_range(args.k_range, geometric=True)
        systems = [models.grad3(models.GradParams(args.epsilon, k)) for k in ks]
        n = args.slow_count or 2
        echo = {"model": "grad3", "epsilon": args.epsilon, "k_range": args.k_range, "slow_count": n}
    else:
        system, n, echo = resolve_model(args)
        systems = [system]
        ks = [system.params.get("k")]
    rows = []
    for k, system in zip(ks, systems):
        values = analyze(system).eigenvalues
        for i, lam in enumerate(values):
            rows.append(["" if k is None else fmt(k), i, fmt(lam.real), fmt(lam.imag), int(i < n)])
    _write(_csv_text(["k", "index", "re", "im", "is_slow"], rows), args.out, written)
    return {"inputs": echo, "outputs": written}


def _projection_document(system, data, n, x0, method):
    proj = project(data, n, method)
    G = gramian(proj.basis)
    return {
        "method": method.value,
        "xi": [_pair(z) for z in proj.coordinates(x0)],
        "projected": [_pair(z) for z in proj(x0)],
        "commutator_norm": proj.commutator_norm(system.matrix),
        "gramian_condition": G.condition,
    }


def _json_text(doc):
    return json.dumps(_round_floats(doc), indent=2) + "\n"


def _round_floats(obj):
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def cmd_project(args):
    system, n, echo = resolve_model(args)
    data = _analyzed(system)
    basis = slow_basis(data, n)
    x0 = parse_x0(args.x0, system, basis)
    doc = _projection_document(system, data, n, x0, Method(args.method))
    written = []
    _write(_json_text(doc), args.out, written)
    return {"inputs": {**echo, "x0": [_pair(z) for z in x0], "method": args.method}, "outputs": written}


def cmd_trajectories(args):
    system, n, echo = resolve_model(args)
    data = _analyzed(system)
    basis = slow_basis(data, n)
    x0 = parse_x0(args.x0, system, basis)
    t_end = args.t_end or default_horizon(data.spectral_abscissa)
    grid = TimeGrid(t_end, args.samples)
    requested = {Method(m) for m in args.methods.split(",")}
    methods = [m for m in METHOD_ORDER if m in requested]

    columns = [propagate_full(data, x0, grid).states]
    header = ["t"]
    header += [f"full_{i}_{part}" for i in range(system.dim) for part in ("re", "im")]
    for m in methods:
        xi = project(data, n, m).coordinates(x0)
        columns.append(propagate_reduced(basis, xi, grid).states)
        header += [f"{m.value}_{i}_{part}" for i in range(system.dim) for part in ("re", "im")]
    rows = []
    for j, t in enumerate(grid.times):
        row = [fmt(t)]
        for states in columns:
            for z in states[j]:
                row += [fmt(z.real), fmt(z.imag)]
        rows.append(row)
    written = []
    _write(_csv_text(header, rows), args.out, written)
    echo.update({"x0": [_pair(z) for z in x0], "t_end": t_end, "samples": args.samples,
                 "methods": [m.value for m in methods]})
    return {"inputs": echo, "outputs": written}


def conjugation_symmetry(L, tol=1e-12):
    """Diagonal phases ``s`` with ``diag(s) conj(L) diag(s)^{-1} == L``, or None.

    Real matrices give ``s = 1``; operators that are real up to a diagonal
    phase change (such as ``i k`` couplings) are detected as well.
    """
    d = L.shape[0]
    scale = tol * max(1.0, np.abs(L).max())
    s = np.zeros(d, dtype=np.complex128)
    for root in range(d):
        if s[root] != 0:
            continue
        s[root] = 1.0
        stack = [root]
        while stack:
            j = stack.pop()
            for i in range(d):
                # s_i / s_j = L_ij / conj(L_ij)
                for entry, ratio_of in ((L[i, j], lambda r: s[j] * r), (L[j, i], lambda r: s[j] / r)):
                    if i == j or abs(entry) <= scale or s[i] != 0:
                        continue
                    s[i] = ratio_of(entry / np.conj(entry))
                    stack.append(i)
    S = np.diag(s)
    if np.abs(S @ L.conj() @ S.conj() - L).max() > scale * 10:
        return None
    return s


def _conjugate_symmetric_basis(system, basis):
    """Basis ``(x, S conj(x))`` for a conjugation-symmetric system with a
    complex-conjugate slow pair, so that ``xi = (z, conj(z))`` gives
    symmetric states."""
    lam = basis.eigenvalues
    if abs(lam[0] - np.conj(lam[1])) > 1e-9 * max(1.0, abs(lam[0])) or abs(lam[0].imag) <= 1e-12:
        return None
    s = conjugation_symmetry(system.matrix)
    if s is None:
        return None
    x = basis.vectors[:, 0]
    return SlowBasis(np.array([lam[0], np.conj(lam[0])]), np.column_stack([x, s * x.conj()]), basis.gap)


def error_surface(system, data, basis, x0, re_grid, im_grid):
    """Rows ``(xi_re, xi_im, e_total)``; for ``n == 2`` the grid parametrizes
    ``xi = (z, conj(z))`` of a conjugate-symmetric basis."""
    if basis.count == 2:
        basis = _conjugate_symmetric_basis(system, basis)
        if basis is None:
            raise UnsupportedDimension("n=2 surfaces need a conjugation-symmetric system with a complex-conjugate slow pair")
    elif basis.count != 1:
        raise UnsupportedDimension(f"error surfaces support n in {{1, 2}}, got {basis.count}")
    rows = []
    for re in re_grid:
        for im in im_grid:
            z = complex(re, im)
            xi = np.array([z]) if basis.count == 1 else np.array([z, np.conj(z)])
            rows.append((re, im, error_closed_form(system, basis, x0, xi, data).total))
    return basis, rows


def cmd_error_surface(args):
    system, n, echo = resolve_model(args)
    data = _analyzed(system)
    basis = slow_basis(data, n)
    x0 = parse_x0(args.x0, system, basis)
    if n == 2 and _conjugate_symmetric_basis(system, basis) is not None:
        basis = _conjugate_symmetric_basis(system, basis)
    xi_min = minimizer(gramian(basis), interaction_vector(system, basis, x0))
    if args.xi_range:
        re_grid = parse_range(args.xi_range)
    else:
        re_grid = round(xi_min[0].real, 2) + 0.01 * np.arange(-100, 101)
    im_grid = parse_range(args.xi_im_range) if args.xi_im_range else np.array([0.0])
    basis, rows = error_surface(system, data, basis, x0, re_grid, im_grid)
    prefix = "xi" if basis.count == 1 else "xi1"
    text = _csv_text([f"{prefix}_re", f"{prefix}_im", "e_total"], [[fmt(a), fmt(b), fmt(e)] for a, b, e in rows])
    written = []
    _write(text, args.out, written)
    echo.update({"x0": [_pair(z) for z in x0], "xi_min": [_pair(z) for z in xi_min]})
    return {"inputs": echo, "outputs": written}


def cmd_validate(args):
    report = run_validation(args.seed, args.trials, self_test=args.self_test)
    written = []
    if args.out:
        report["outputs"] = [args.out]
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    _write(text, args.out, written)
    return report


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _default_seed():
    env = os.environ.get("SLOWPROJ_SEED")
    return int(env) if env not in (None, "") else 42


def build_parser():
    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", default="shear2d", help="shear2d, grad3, or path to a JSON model file")
    model.add_argument("--alpha", type=float, default=5.0)
    model.add_argument("--gamma", type=float, default=1.0)
    model.add_argument("--epsilon", type=float, default=0.1)
    model.add_argument("--k", type=float, default=1.0)
    model.add_argument("--slow-count", type=_positive_int, default=None)
    model.add_argument("--out", default=None, help="output file (default: stdout)")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--x0", required=True,
                       help="re,im,re,im,... interleaved, or 'slow-orthogonal'; use --x0=-1,0 for negatives")

    parser = argparse.ArgumentParser(prog="slowproj", description="Dynamically optimal slow-manifold projections")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[model], help="eigenvalues as CSV")
    p.add_argument("--k-range", default=None, help="start:end:count, geometric (grad3 only)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("project", parents=[model, state], help="project an initial condition")
    p.add_argument("--method", choices=[m.value for m in Method], default="dop")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("trajectories", parents=[model, state], help="full and reduced trajectories")
    p.add_argument("--methods", default="dop,orth,riesz", help="comma-separated subset of dop,orth,riesz")
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--samples", type=_positive_int, default=2001)
    p.set_defaults(func=cmd_trajectories)

    p = sub.add_parser("error-surface", parents=[model, state], help="dynamical error over a xi grid")
    p.add_argument("--xi-range", default=None, help="start:end:step for Re(xi)")
    p.add_argument("--xi-im-range", default=None, help="start:end:step for Im(xi) (default: 0 only)")
    p.set_defaults(func=cmd_error_surface)

    p = sub.add_parser("validate", help="randomized invariant suite")
    p.add_argument("--seed", type=int, default=None, help="default: $SLOWPROJ_SEED or 42")
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--self-test", action="store_true", help="inject an unstable case that must be rejected")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "validate" and args.seed is None:
        args.seed = _default_seed()
    if args.command == "trajectories":
        try:
            {Method(m) for m in args.methods.split(",")}
        except ValueError:
            parser.error(f"invalid --methods {args.methods!r}")
    try:
        report = args.func(args)
    except SlowProjError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.command == "validate":
        return 0 if report["status"] == "pass" else 1
    if report["outputs"]:
        print(_json_text({"command": args.command, **report, "diagnostics": []}), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
