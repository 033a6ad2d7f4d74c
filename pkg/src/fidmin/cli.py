"""Command-line interface: ``fidmin compute | sweep | verify | state``.

Exit codes: 0 success, 1 invalid state file / failed verification / I/O error,
2 invalid flags, 3 method not applicable to the state, 4 closed form and
direct optimization disagree during a sweep.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .closedform import (
    FAMILY_FORMULAS,
    MethodNotApplicable,
    eigen_bound,
    hs_min_closed_2xn,
    min_2xn,
    pure_min,
    vanishing_point,
)
from .measure import ProjectiveMeasurement, hs_objective, min_fidelity, min_hs
from .optimizer import OptimizerSettings
from .states import (
    BipartiteState,
    InvalidStateError,
    bell_state,
    decompose,
    isotropic_state,
    random_state,
    schmidt,
    state_vector,
    werner_state,
)
from .verify import SUITES, run_suite

EXIT_INVALID_FILE = 1
EXIT_FAILED = 1
EXIT_FLAGS = 2
EXIT_INAPPLICABLE = 3
EXIT_MISMATCH = 4

SWEEP_TOL = 1e-6
CSV_HEADER = ["family", "m", "x", "N_F", "N_HS", "bound"]


# --- state files ----------------------------------------------------------


def load_state(path) -> BipartiteState:
    """Read ``{"dims": [m, n], "matrix": [[[re, im], ...], ...]}``.

    The matrix may also be given as a flat row-major list of (m n)^2 pairs.
    Raises :class:`InvalidStateError` naming the violated invariant.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidStateError(f"cannot read state file: {exc}") from exc
    if not isinstance(doc, dict) or "dims" not in doc or "matrix" not in doc:
        raise InvalidStateError("state file needs 'dims' and 'matrix' keys")
    dims = doc["dims"]
    if (not isinstance(dims, list) or len(dims) != 2
            or not all(isinstance(d, int) and d >= 1 for d in dims)):
        raise InvalidStateError("dims must be two positive integers")
    d = dims[0] * dims[1]
    try:
        pairs = np.asarray(doc["matrix"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidStateError("matrix entries must be [re, im] number pairs") from exc
    if pairs.shape[-1:] != (2,) or pairs.size != 2 * d * d:
        raise InvalidStateError(f"matrix must hold (m*n)^2 = {d * d} [re, im] pairs")
    mat = (pairs[..., 0] + 1j * pairs[..., 1]).reshape(d, d)
    return BipartiteState(tuple(dims), mat)


def dump_state(rho: BipartiteState, path) -> None:
    m = rho.matrix
    doc = {"dims": list(rho.dims),
           "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m]}
    Path(path).write_text(json.dumps(doc) + "\n")


# --- number formatting ----------------------------------------------------


def fmt(v: float) -> str:
    """12 significant digits; positional notation unless 0 < |v| < 1e-3."""
    v = float(v)
    if v == 0 or not math.isfinite(v):
        return "0" if v == 0 else repr(v)
    if abs(v) >= 1e-3:
        decimals = max(12 - 1 - math.floor(math.log10(abs(v))), 0)
        s = f"{v:.{decimals}f}"
        return s.rstrip("0").rstrip(".") if "." in s else s
    mant, exp = f"{v:.11e}".split("e")
    mant = mant.rstrip("0").rstrip(".")
    return f"{mant}e{int(exp)}"


# --- compute --------------------------------------------------------------


def compute(rho: BipartiteState, measure: str, method: str, settings: OptimizerSettings) -> dict:
    """Evaluate one measure; returns a report dict.  Raises MethodNotApplicable."""
    if method == "auto":
        if rho.is_pure():
            method = "pure"
        elif rho.m == 2:
            method = "closed-2xn"
        else:
            method = "direct"
    report = {"measure": measure, "dims": list(rho.dims)}
    measurement = None
    if method == "pure":
        if not rho.is_pure():
            raise MethodNotApplicable("method 'pure' needs a pure state")
        psi = state_vector(rho)
        value = pure_min(schmidt(psi, rho.dims))  # same value for both measures
        # the local Schmidt basis (completed to a full basis) attains the value
        measurement = ProjectiveMeasurement(np.linalg.svd(psi.reshape(rho.dims))[0])
        tag = "closed-form"
    elif method == "closed-2xn":
        if measure == "fidelity":
            res = min_2xn(rho)
            value, measurement, tag = res.value, res.measurement, res.method
            report["diagnostics"] = res.diagnostics
        else:
            value, tag = hs_min_closed_2xn(rho), "closed-form"
    elif method == "bound":
        if measure != "fidelity":
            raise MethodNotApplicable("the eigenvalue bound exists for the fidelity measure only")
        value, tag = eigen_bound(decompose(rho)), "bound"
    elif method == "direct":
        res = (min_fidelity if measure == "fidelity" else min_hs)(rho, settings)
        value, measurement, tag = res.value, res.measurement, res.method
        report["diagnostics"] = res.diagnostics
    else:
        raise ValueError(f"unknown method {method!r}")
    report.update(value=float(value), method=tag, resolved_method=method)
    if measure == "fidelity" and method == "direct":
        report["bound"] = eigen_bound(decompose(rho))
    if measurement is not None:
        report["measurement"] = measurement
    return report


def _print_report(report: dict, show_measurement: bool) -> None:
    print(f"value: {fmt(report['value'])}")
    print(f"measure: {report['measure']}")
    print(f"method: {report['method']} ({report['resolved_method']})")
    if "bound" in report:
        print(f"bound: {fmt(report['bound'])}")
    if show_measurement and "measurement" in report:
        print("measurement basis (columns):")
        for row in report["measurement"].vectors:
            print("  " + "  ".join(f"{z.real:+.10f}{z.imag:+.10f}j" for z in row))
    for key, val in report.get("diagnostics", {}).items():
        if key != "restart_values":
            print(f"{key}: {val}")


# --- sweep ----------------------------------------------------------------


@dataclass
class SweepRecord:
    family: str
    m: int
    x: float
    n_f: float | None
    n_hs: float | None
    bound: float
    methods: dict

    def row(self) -> list[str]:
        opt = lambda v: "" if v is None else fmt(v)  # noqa: E731
        return [self.family, str(self.m), fmt(self.x), opt(self.n_f), opt(self.n_hs), fmt(self.bound)]


class SweepMismatch(RuntimeError):
    pass


def sweep_grid(family: str, m: int, points: int) -> np.ndarray:
    """Uniform grid over the family's domain with the vanishing point included exactly."""
    lo, hi = FAMILY_FORMULAS[family][2]
    grid = np.linspace(lo, hi, points)
    x0 = vanishing_point(family, m)
    near = np.abs(grid - x0) < 1e-12
    if near.any():
        grid[near] = x0
    else:
        grid = np.sort(np.append(grid, x0))
    return grid


def sweep(family: str, m: int, points: int, measures=("fidelity", "hs"),
          settings: OptimizerSettings = OptimizerSettings()) -> list[SweepRecord]:
    """One record per grid point; closed forms are checked against direct optimization."""
    nf_formula, hs_formula, _ = FAMILY_FORMULAS[family]
    make = isotropic_state if family == "isotropic" else werner_state
    records = []
    for x in sweep_grid(family, m, points):
        x = float(x)
        rho = make(m, x)
        direct = min_fidelity(rho, settings)
        methods = {}
        n_f = n_hs = None
        if "fidelity" in measures:
            n_f = nf_formula(m, x)
            methods["N_F"] = "formula+direct"
            if abs(n_f - direct.value) > SWEEP_TOL:
                raise SweepMismatch(f"{family} m={m} x={x}: formula {n_f} vs direct {direct.value}")
        if "hs" in measures:
            n_hs = hs_min_closed_2xn(rho) if m == 2 else hs_formula(m, x)
            methods["N_HS"] = ("closed-2xn" if m == 2 else "formula") + "+direct"
            # both measures are maximized by the same measurement (they differ by tr rho^2)
            hs_direct = hs_objective(rho, direct.measurement)
            if abs(n_hs - hs_direct) > SWEEP_TOL:
                raise SweepMismatch(f"{family} m={m} x={x}: N_HS {n_hs} vs direct {hs_direct}")
        records.append(SweepRecord(family, m, x, n_f, n_hs, eigen_bound(decompose(rho)), methods))
    return records


def write_csv(records, out) -> None:
    """Write atomically: a failed run never leaves a partial file."""
    out = Path(out)
    fd, tmp = tempfile.mkstemp(dir=out.parent, prefix=f".{out.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in records:
                w.writerow(r.row())
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- argument parsing -----------------------------------------------------


def _settings(args) -> OptimizerSettings:
    return OptimizerSettings(restarts=args.restarts, seed=args.seed)


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _measures(s: str) -> tuple[str, ...]:
    items = tuple(p.strip() for p in s.split(",") if p.strip())
    bad = [p for p in items if p not in ("fidelity", "hs")]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"measures must be from fidelity,hs; got {s!r}")
    return items


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fidmin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def optimizer_flags(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--restarts", type=_positive_int, default=OptimizerSettings.restarts)

    c = sub.add_parser("compute", help="evaluate MIN of a state file")
    c.add_argument("state", help="JSON state file")
    c.add_argument("--measure", choices=["fidelity", "hs"], default="fidelity")
    c.add_argument("--method", choices=["auto", "direct", "closed-2xn", "pure", "bound"], default="auto")
    c.add_argument("--show-measurement", action="store_true")
    optimizer_flags(c)

    s = sub.add_parser("sweep", help="Werner / isotropic parameter sweep to CSV")
    s.add_argument("--family", choices=sorted(FAMILY_FORMULAS), required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--points", type=int, default=41)
    s.add_argument("--measures", type=_measures, default=("fidelity", "hs"))
    s.add_argument("--out", required=True)
    optimizer_flags(s)

    v = sub.add_parser("verify", help="randomized cross-check suites")
    v.add_argument("--suite", choices=sorted(SUITES), required=True)
    v.add_argument("--trials", type=_positive_int, default=100)
    v.add_argument("--quiet", action="store_true", help="print only the summary line")
    optimizer_flags(v)

    st = sub.add_parser("state", help="write a state file for a named state")
    st.add_argument("--family", choices=["bell", "werner", "isotropic", "random"], required=True)
    st.add_argument("--m", type=int, default=2)
    st.add_argument("--n", type=int, default=None)
    st.add_argument("--x", type=float, default=0.0)
    st.add_argument("--rank", type=int, default=None)
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "compute":
        try:
            rho = load_state(args.state)
        except InvalidStateError as exc:
            print(f"error: invalid state file: {exc}", file=sys.stderr)
            return EXIT_INVALID_FILE
        try:
            report = compute(rho, args.measure, args.method, _settings(args))
        except MethodNotApplicable as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INAPPLICABLE
        _print_report(report, args.show_measurement)
        return 0

    if args.command == "sweep":
        if args.m < 2 or args.points < 2:
            parser.error("--m and --points must be >= 2")
        try:
            records = sweep(args.family, args.m, args.points, args.measures, _settings(args))
        except SweepMismatch as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_MISMATCH
        try:
            write_csv(records, args.out)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_FAILED
        print(f"wrote {len(records)} rows to {args.out}")
        return 0

    if args.command == "verify":
        report = run_suite(args.suite, args.trials, args.seed, _settings(args))
        lines = list(report.lines())
        for line in lines[-1:] if args.quiet else lines:
            print(line)
        return 0 if report.passed else EXIT_FAILED

    if args.command == "state":
        try:
            if args.family == "bell":
                rho = bell_state()
            elif args.family == "werner":
                rho = werner_state(args.m, args.x)
            elif args.family == "isotropic":
                rho = isotropic_state(args.m, args.x)
            else:
                rho = random_state(args.m, args.n or args.m, args.rank, args.seed)
        except ValueError as exc:
            parser.error(str(exc))
        dump_state(rho, args.out)
        return 0
    return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
