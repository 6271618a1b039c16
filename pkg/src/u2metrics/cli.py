"""Command-line front end.

Data goes to files or standard output; diagnostics go to standard error.
Exit codes: 0 success, 1 usage error, 2 metric-file parse error, 3 numeric or
singularity failure.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile
from typing import Optional, Sequence

from . import __version__
from .btflat import (
    STATE_FIELDS,
    BtState,
    SearchFailure,
    SeedError,
    SingularSystemError,
    bt_integrate,
    bt_nonextremal_search,
    bt_residuals,
    state_from_metric,
)
from .catalog import CatalogError, catalog_get, catalog_list, page_constants
from .classify import classify
from .curvature import curvature_sample
from .exppoly import EvalOverflowError
from .geometry import TransformError, classify_end, find_bolts
from .metricfile import MetricFileError, emit_metric, parse_metric
from .numerics import BracketError, QuadratureError
from .profiles import OutOfDomainError, SingularConformalFactorError

__all__ = ["main"]

_NUMERIC_ERRORS = (
    QuadratureError,
    BracketError,
    SingularConformalFactorError,
    SingularSystemError,
    SeedError,
    SearchFailure,
    EvalOverflowError,
    OutOfDomainError,
    ZeroDivisionError,
    OverflowError,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _atomic_write(path: str, content: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(content: str, out: Optional[str]):
    if out:
        _atomic_write(out, content)
    else:
        sys.stdout.write(content)


def _parse_grid(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise _UsageError(f"--grid must be a:b:n, got {spec!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise _UsageError(f"bad --grid {spec!r}: {exc}") from None
    if n < 1:
        raise _UsageError("--grid needs n >= 1")
    if n == 1:
        return [a]
    return [a + (b - a) * i / (n - 1) for i in range(n)]


def _parse_span(spec: str):
    parts = spec.split(":")
    if len(parts) != 2:
        raise _UsageError(f"--span must be a:b, got {spec!r}")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise _UsageError(f"bad --span {spec!r}: {exc}") from None


def _load_metric(path: str):
    try:
        with open(path, "r") as handle:
            text = handle.read()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from None
    return parse_metric(text)


def _load_state(path: str) -> BtState:
    try:
        with open(path, "r") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from None
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise MetricFileError(lineno, f"state file needs 'key value' lines, got {raw!r}")
        try:
            values[toks[0]] = float(toks[1])
        except ValueError:
            raise MetricFileError(lineno, f"bad number {toks[1]!r}") from None
    missing = [k for k in ("z",) + STATE_FIELDS if k not in values]
    if missing:
        raise MetricFileError(None, f"state file missing fields: {', '.join(missing)}")
    return BtState(values["z"], *(values[k] for k in STATE_FIELDS))


def _tsv(columns: Sequence[str], rows) -> str:
    header = "# " + "\t".join(columns) + f"\tu2metrics={__version__}"
    lines = [header]
    for row in rows:
        lines.append("\t".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ commands
def _cmd_classify(args) -> int:
    m = _load_metric(args.file)
    report = classify(m, tol=args.tol, t=args.t)
    sys.stdout.write(report.text() + "\n")
    return 0


def _cmd_curvature(args) -> int:
    m = _load_metric(args.file)
    grid = _parse_grid(args.grid)
    columns = ("z", "F", "C", "s", "ric0_a", "ric0_b", "w_plus", "w_minus", "B1", "B2", "P_plus", "P_minus")
    poly = m.f_poly()
    rows = []
    for z in grid:
        cs = curvature_sample(m, z)
        rows.append(
            (
                z,
                poly.eval(z),
                _conformal(m, z),
                cs.s,
                cs.ric0_a,
                cs.ric0_b,
                cs.w_plus,
                cs.w_minus,
                cs.bach_B1,
                cs.bach_B2,
                cs.delW_plus_pot,
                cs.delW_minus_pot,
            )
        )
    _emit(_tsv(columns, rows), args.out)
    return 0


def _conformal(m, z: float) -> float:
    from .profiles import conformal_value

    return conformal_value(m, z)


def _cmd_ends(args) -> int:
    m = _load_metric(args.file)
    lines = []
    for bolt in find_bolts(m):
        extra = " degenerate" if bolt.degenerate else ""
        si = bolt.self_intersection
        si_text = f" self_intersection={si}" if si is not None else ""
        lines.append(f"bolt z0={bolt.z0:.12g} slope={bolt.slope:.12g}{si_text}{extra}")
    for side in ("lower", "upper"):
        rep = classify_end(m, side)
        line = f"end {side} kind={rep.kind} complete={'yes' if rep.complete else 'no'}"
        if rep.self_intersection is not None:
            line += f" self_intersection={rep.self_intersection}"
        if rep.cone_angle is not None:
            line += f" cone_angle={rep.cone_angle:.12g}"
        dist = rep.diagnostics.get("distance_to_end")
        if dist is not None:
            line += f" distance={dist:.12g}"
        lines.append(line)
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_transform(args) -> int:
    from .geometry import ambikahler_transform

    m = _load_metric(args.file)
    try:
        partner = ambikahler_transform(m)
    except TransformError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(emit_metric(partner), args.out)
    return 0


def _cmd_catalog_list(args) -> int:
    sys.stdout.write(catalog_list() + "\n")
    return 0


def _cmd_catalog_emit(args) -> int:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise _UsageError(f"--param needs k=v, got {item!r}")
        key, value = item.split("=", 1)
        try:
            params[key] = float(value)
        except ValueError:
            raise _UsageError(f"bad --param value {item!r}") from None
    m = catalog_get(args.name, params)
    _emit(emit_metric(m), args.out)
    return 0


def _cmd_bt_residuals(args) -> int:
    m = _load_metric(args.file)
    s_const = None
    if args.s is not None:
        if not args.s.startswith("const:"):
            raise _UsageError(f"--s must be const:<value>, got {args.s!r}")
        try:
            s_const = float(args.s[len("const:") :])
        except ValueError:
            raise _UsageError(f"bad --s value {args.s!r}") from None
    grid = _parse_grid(args.grid)
    columns = ("z", "F1res", "F2res", "Tval")
    rows = []
    for z in grid:
        state, f4d, c2d = state_from_metric(m, args.t, z, s_const=s_const)
        _, f1res, f2res, tv = bt_residuals(state, args.t, f4d, C2d=c2d)
        rows.append((z, f1res, f2res, tv))
    _emit(_tsv(columns, rows), args.out)
    return 0


_TRAJ_COLUMNS = ("z", "F", "F1d", "F2d", "F3d", "C", "C1d", "s", "K", "Tval", "F1res", "F2res")


def _traj_tsv(traj) -> str:
    rows = []
    for smp in traj.samples:
        st = smp.state
        rows.append(
            (st.z, st.F, st.F1d, st.F2d, st.F3d, st.C, st.C1d, st.s, st.K, smp.Tval, smp.F1res, smp.F2res)
        )
    return _tsv(_TRAJ_COLUMNS, rows)


def _cmd_bt_integrate(args) -> int:
    init = _load_state(args.init)
    span = _parse_span(args.span)
    traj = bt_integrate(init, args.t, span, tol=args.tol)
    _emit(_traj_tsv(traj), args.out)
    print(
        f"steps accepted={traj.steps_accepted} rejected={traj.steps_rejected} "
        f"T_drift={traj.max_T_drift:.6g} truncated={'yes' if traj.truncated else 'no'}"
        + (f" ({traj.truncation_reason})" if traj.truncation_reason else ""),
        file=sys.stderr,
    )
    return 0


def _cmd_bt_search(args) -> int:
    traj, residual = bt_nonextremal_search(args.t, trials=args.trials, seed=args.seed)
    if args.out:
        _emit(_traj_tsv(traj), args.out)
    init = traj.samples[0].state
    lines = [f"extremality_residual {residual:.12g}", f"T_drift {traj.max_T_drift:.6g}"]
    lines.append("seed_state " + " ".join(f"{k}={getattr(init, k):.12g}" for k in ("z",) + STATE_FIELDS))
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_roots_page(args) -> int:
    nu, z0, coeff = page_constants()
    sys.stdout.write(f"nu {nu:.15g}\nz0 {z0:.15g}\ncoeff {coeff:.15g}\n")
    return 0


# ------------------------------------------------------------------- parser
def _build_parser() -> _Parser:
    parser = _Parser(prog="u2metrics", description="U(2)-invariant 4-metric toolkit")
    parser.add_argument("--version", action="version", version=f"u2metrics {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="evaluate the predicate taxonomy on a metric file")
    p.add_argument("file")
    p.add_argument("--t", type=float, default=None, help="enable the B^t-flat predicate at this t")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("curvature", help="sample curvature quantities on a grid, as TSV")
    p.add_argument("file")
    p.add_argument("--grid", required=True, help="a:b:n")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_curvature)

    p = sub.add_parser("ends", help="bolts and end classification")
    p.add_argument("file")
    p.set_defaults(func=_cmd_ends)

    p = sub.add_parser("transform", help="emit the ambiKähler partner metric")
    p.add_argument("file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("catalog", help="list or emit the classic metrics")
    csub = p.add_subparsers(dest="catalog_command", required=True)
    pl = csub.add_parser("list")
    pl.set_defaults(func=_cmd_catalog_list)
    pe = csub.add_parser("emit")
    pe.add_argument("name")
    pe.add_argument("--param", action="append", help="k=v (repeatable)")
    pe.add_argument("--out", default=None)
    pe.set_defaults(func=_cmd_catalog_emit)

    p = sub.add_parser("bt", help="the B^t-flat system")
    bsub = p.add_subparsers(dest="bt_command", required=True)
    pr = bsub.add_parser("residuals")
    pr.add_argument("file")
    pr.add_argument("--t", type=float, required=True)
    pr.add_argument("--s", default=None, help="const:<v> to pin scalar curvature")
    pr.add_argument("--grid", required=True, help="a:b:n")
    pr.add_argument("--out", default=None)
    pr.set_defaults(func=_cmd_bt_residuals)
    pi = bsub.add_parser("integrate")
    pi.add_argument("--t", type=float, required=True)
    pi.add_argument("--init", required=True, help="state file: key value lines for z and the 8 fields")
    pi.add_argument("--span", required=True, help="a:b")
    pi.add_argument("--tol", type=float, default=1e-10)
    pi.add_argument("--out", default=None)
    pi.set_defaults(func=_cmd_bt_integrate)
    ps = bsub.add_parser("search")
    ps.add_argument("--t", type=float, required=True)
    ps.add_argument("--trials", type=int, default=32)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=_cmd_bt_search)

    p = sub.add_parser("roots", help="special constants")
    rsub = p.add_subparsers(dest="roots_command", required=True)
    rp = rsub.add_parser("page")
    rp.set_defaults(func=_cmd_roots_page)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except CatalogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MetricFileError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC_ERRORS as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except SystemExit as exc:  # argparse --version / --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
