"""Command-line front end.

Subcommands: ``eval``, ``approx``, ``scan``, ``column``, ``fourier``, ``norms``.
Grids use ``lin:a:b:n`` or ``log:a:b:n``; complex numbers use ``a+bi``.

Exit status: 0 on success, 1 on domain/input errors, 2 when a scan verdict
is FAIL, 64 on usage errors, 65 on numeric-accuracy failures.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asym import approx_complementary, approx_discrete, approx_general, residual_scan
from .coeffs import ROUTES, cal_p_value, frak_p_value
from .errors import AccuracyError, ConvergenceError, Sl2Error
from .fourier import basis_ft_closed, basis_ft_quadrature, column_step_fn
from .params import ReprParams, SeriesKind, classify, optimal_weight_ratio, ub_norm_11_squared, ub_norm_min

log = logging.getLogger("sl2coeffs")

EXIT_OK, EXIT_ERROR, EXIT_FAIL, EXIT_USAGE, EXIT_ACCURACY = 0, 1, 2, 64, 65

_COMPLEX_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?([+-](\d+\.?\d*|\.\d+)?([eE][+-]?\d+)?i)?$|^[+-]?(\d+\.?\d*|\.\d+)?([eE][+-]?\d+)?i$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi`` or ``a+bi`` (no spaces)."""
    s = text.strip()
    if not _COMPLEX_RE.match(s):
        raise argparse.ArgumentTypeError(f"not a complex literal: {text!r}")
    s = re.sub(r"(^|[+-])i$", r"\g<1>1i", s)
    return complex(s.replace("i", "j"))


def parse_grid(text: str) -> list[float]:
    """``lin:a:b:n``, ``log:a:b:n`` or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 4 or parts[0] not in ("lin", "log"):
            raise ValueError
        a, b, n = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; use lin:a:b:n or log:a:b:n") from None
    if n < 1:
        raise argparse.ArgumentTypeError("grid needs at least one point")
    if parts[0] == "log":
        if a <= 0 or b <= 0:
            raise argparse.ArgumentTypeError("log grid needs positive endpoints")
        return np.geomspace(a, b, n).tolist()
    return np.linspace(a, b, n).tolist()


def parse_window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad window {text!r}; use lo:hi") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("window needs lo <= hi")
    return lo, hi


def _kind_name(text: str) -> str:
    try:
        SeriesKind.parse(text)
    except (Sl2Error, ValueError):
        raise argparse.ArgumentTypeError(f"unknown series kind {text!r}") from None
    return text


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


# ------------------------------------------------------------------ helpers

def _params(args) -> ReprParams:
    if args.lam is not None:
        if args.ell is not None:
            raise UsageError("give either --ell or --lambda, not both")
        return ReprParams.principal(args.lam, args.eps)
    if args.ell is None:
        raise UsageError("one of --ell or --lambda is required")
    return ReprParams(args.ell, args.eps)


def _offset(value: float, eps: float, name: str) -> int:
    k = value - eps
    if abs(k - round(k)) > 1e-9:
        raise UsageError(f"--{name}={value} is not in eps + Z for eps={eps}")
    return int(round(k))


def _fmt(v: float) -> str:
    return repr(float(v))


def _emit(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _rows_out(header, rows, args) -> None:
    if args.format == "json":
        text = json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows([[_fmt(c) if isinstance(c, float) else c for c in r] for r in rows])
        text = buf.getvalue()
    _emit(text, args)


# ------------------------------------------------------------------ commands

def cmd_eval(args) -> int:
    p = _params(args)
    rows = []
    for x in args.x:
        for m in args.m:
            for n in args.n:
                mo, no = _offset(m, p.eps, "m"), _offset(n, p.eps, "n")
                try:
                    if args.normalized:
                        r = cal_p_value(p.ell.real, m, n, mo - no, x, p.eps, args.method)
                    else:
                        r = frak_p_value(p.ell, m, n, mo - no, x, args.method)
                except (AccuracyError, ConvergenceError) as exc:
                    log.error("accuracy failure at x=%r m=%r n=%r: %s", x, m, n, exc)
                    return EXIT_ACCURACY
                v = complex(r.value)
                rows.append([float(x), float(m), float(n), v.real, v.imag, r.method, float(r.est_rel_error)])
    _rows_out(["x", "m", "n", "re", "im", "method", "est_err"], rows, args)
    return EXIT_OK


def cmd_approx(args) -> int:
    p = _params(args)
    kind = SeriesKind.parse(args.kind)
    rows = []
    for x in args.x:
        for m in args.m:
            for n in args.n:
                if kind == SeriesKind.DISCRETE_PLUS:
                    a = approx_discrete(p.ell.real, m, n, x)
                elif kind == SeriesKind.COMPLEMENTARY:
                    a = approx_complementary(p.ell.real, p.eps, m, n, x)
                elif kind in (SeriesKind.PRINCIPAL, SeriesKind.UNIFORMLY_BOUNDED_ONLY):
                    a = approx_general(p.ell, m, n, x)[0]
                else:
                    raise UsageError(f"no approximant for kind {kind.value}")
                a = complex(a)
                rows.append([float(x), float(m), float(n), a.real, a.imag])
    _rows_out(["x", "m", "n", "re", "im"], rows, args)
    return EXIT_OK


def cmd_scan(args) -> int:
    p = _params(args)
    try:
        rep = residual_scan(args.kind, p.ell, p.eps, args.n, args.xgrid, args.mgrid, workers=args.threads)
    except (AccuracyError, ConvergenceError) as exc:
        log.error("accuracy failure during scan: %s", exc)
        return EXIT_ACCURACY
    _emit(rep.to_json(indent=2) + "\n", args)
    log.info("scan verdict %s (sup %.4g)", rep.verdict, rep.sup_stat)
    return EXIT_OK if rep.verdict == "PASS" else EXIT_FAIL


def cmd_column(args) -> int:
    p = _params(args)
    no = _offset(args.n, p.eps, "n")
    if args.window is None:
        w = int(math.ceil(40 * args.x))
        window = (-w, w)
    else:
        window = args.window
    try:
        sf = column_step_fn(p, no, args.x, window, workers=args.threads)
    except (AccuracyError, ConvergenceError) as exc:
        log.error("accuracy failure building column at x=%r: %s", args.x, exc)
        return EXIT_ACCURACY
    if args.format == "json":
        text = json.dumps(
            {"cell_width": sf.cell_width, "cells": [[c[0], [c[1].real, c[1].imag]] for c in sf.cells]}, indent=2
        ) + "\n"
        _emit(text, args)
    else:
        _emit(sf.to_csv(), args)
    log.info("l2 norm %.12g", sf.l2_norm())
    return EXIT_OK


def cmd_fourier(args) -> int:
    p = _params(args)
    rows = []
    for y in args.y:
        v = complex(basis_ft_closed(p, args.n, y))
        row = [float(y), v.real, v.imag]
        if args.oracle:
            try:
                q = basis_ft_quadrature(p, args.n, y)
            except (AccuracyError, ConvergenceError) as exc:
                log.error("accuracy failure at y=%r: %s", y, exc)
                return EXIT_ACCURACY
            row += [q.real, q.imag]
        rows.append(row)
    header = ["y", "re", "im"] + (["quad_re", "quad_im"] if args.oracle else [])
    _rows_out(header, rows, args)
    return EXIT_OK


def cmd_norms(args) -> int:
    p = _params(args)
    ell = p.ell.real
    out = {"ell": [p.ell.real, p.ell.imag], "eps": p.eps, "kind": classify(p).kind.value}
    for key, func in (
        ("ub_norm_11_squared", lambda: ub_norm_11_squared(ell, p.eps)),
        ("ub_norm_min", lambda: ub_norm_min(ell, p.eps)),
        ("optimal_weight_ratio", lambda: optimal_weight_ratio(p.ell, p.eps)),
    ):
        try:
            out[key] = func()
        except Sl2Error as exc:
            out[key] = None
            log.warning("%s undefined: %s", key, exc)
    _emit(json.dumps(out, indent=2) + "\n", args)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ell", type=parse_complex, help="representation parameter, a+bi")
    common.add_argument("--lambda", dest="lam", type=float, help="principal series: ell = -1/2 + i*lambda")
    common.add_argument("--eps", type=float, default=0.0, help="parity parameter (default 0)")
    common.add_argument("--output", "-o", help="write to file instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=_positive_int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = _Parser(prog="sl2coeffs", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", parents=[common], help="evaluate matrix coefficients")
    e.add_argument("--m", type=parse_grid, required=True)
    e.add_argument("--n", type=parse_grid, required=True)
    e.add_argument("--x", type=parse_grid, required=True)
    e.add_argument("--method", choices=ROUTES, default="Auto")
    e.add_argument("--normalized", action="store_true", help="unitary normalization (real ell)")
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("approx", parents=[common], help="evaluate the Whittaker approximant")
    a.add_argument("--kind", required=True, type=_kind_name)
    a.add_argument("--m", type=parse_grid, required=True)
    a.add_argument("--n", type=parse_grid, required=True)
    a.add_argument("--x", type=parse_grid, required=True)
    a.set_defaults(func=cmd_approx)

    s = sub.add_parser("scan", parents=[common], help="residual scan (JSON report)")
    s.add_argument("--kind", required=True, type=_kind_name)
    s.add_argument("--n", type=float, required=True)
    s.add_argument("--xgrid", type=parse_grid, required=True)
    s.add_argument("--mgrid", type=parse_grid, required=True)
    s.set_defaults(func=cmd_scan)

    c = sub.add_parser("column", parents=[common], help="step-function column embedding")
    c.add_argument("--n", type=float, required=True)
    c.add_argument("--x", type=float, required=True)
    c.add_argument("--window", type=parse_window, help="row offsets lo:hi, e.g. --window=-5:5 (default -40x:40x)")
    c.set_defaults(func=cmd_column)

    f = sub.add_parser("fourier", parents=[common], help="Fourier transform of a basis vector")
    f.add_argument("--n", type=float, required=True)
    f.add_argument("--y", type=parse_grid, required=True)
    f.add_argument("--oracle", action="store_true", help="add quadrature columns")
    f.set_defaults(func=cmd_fourier)

    nm = sub.add_parser(
        "norms", parents=[common], help="uniformly bounded norm formulas (always JSON)"
    )
    nm.set_defaults(func=cmd_norms)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "x", None) is not None and args.command == "column" and args.x < 1:
        ap.error("--x must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        sys.stderr.write(f"sl2coeffs: error: {exc}\n")
        return EXIT_USAGE
    except (AccuracyError, ConvergenceError) as exc:
        log.error("accuracy failure: %s", exc)
        return EXIT_ACCURACY
    except (Sl2Error, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
