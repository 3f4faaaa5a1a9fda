"""Command-line front end.

Subcommands: integrate | iterate | crosscheck | scan | rsum | bronstein.

Output formats: human (friendly lines, includes wall time), structured
(deterministic JSON, byte-identical across runs and worker counts, so it
carries no timing), and csv.

Exit status: 0 on convergence / PASS, 1 on non-convergence, crosscheck FAIL,
or an unbounded function, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from . import expr as expr_mod
from .bounds import LipschitzOracle, SampledOracle
from .darboux import DEFAULT_CELL_BUDGET, adaptive_integrate
from .errors import (
    ExprDimensionError,
    ExprDomainError,
    ExprSyntaxError,
    SectionFailureError,
    UnboundedFunctionError,
)
from .fubini import AxisOrder, fubini_crosscheck, iterated_integrate
from .geometry import Rectangle
from .oscillation import discontinuity_scan
from .riemann1d import DEFAULT_MAX_INTERVALS, bronstein_integral, series_limit
from .serialize import dumps, load_mock_oracle

class UsageError(Exception):
    """Invalid configuration; the message names the offending field."""


@dataclass
class JobConfig:
    subcommand: str
    expr: Optional[str] = None
    dim: Optional[int] = None
    lower: Optional[tuple[float, ...]] = None
    upper: Optional[tuple[float, ...]] = None
    tol: float = 1e-6
    budget: Optional[int] = None  # cells for integrate/crosscheck, intervals for 1-D
    oracle: str = "interval"
    order: Optional[str] = None
    grid: tuple[int, ...] = (16, 16)
    threshold: float = 0.5
    n_values: tuple[int, ...] = (10, 100, 1000)
    a: Optional[float] = None
    b: Optional[float] = None
    out_format: str = "human"
    workers: int = 1
    config_path: Optional[str] = None


def _parse_floats(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"invalid {flag}: expected comma-separated numbers, got {text!r}")


def _parse_ints(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"invalid {flag}: expected comma-separated integers, got {text!r}")


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"invalid --config: line {lineno} is not key=value")
                key, _, value = line.partition("=")
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise UsageError(f"invalid --config: {exc}")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darbox",
        description="Bracketing Darboux integration over hyperrectangles.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, *, expr=False, box=False, tol=False, budget=False, workers=False):
        if expr:
            p.add_argument("--expr", help="expression over x1..xn (aliases x,y,z)")
            p.add_argument("--dim", type=int, help="number of variables")
        if box:
            p.add_argument("--lower", help="comma-separated lower bounds")
            p.add_argument("--upper", help="comma-separated upper bounds")
        if tol:
            p.add_argument("--tol", type=float, help="target tolerance")
        if budget:
            p.add_argument("--budget", type=int, help="cell / interval budget")
        if workers:
            p.add_argument("--workers", type=int, help="worker threads (output-invariant)")
        p.add_argument("--format", dest="out_format", choices=("human", "structured", "csv"))
        p.add_argument("--config", dest="config_path", help="key=value config file")

    p = sub.add_parser("integrate", help="adaptive bracketing integral")
    common(p, expr=True, box=True, tol=True, budget=True, workers=True)
    p.add_argument("--oracle", help="sampled | lipschitz:<L> | interval | mock:<file>")

    p = sub.add_parser("iterate", help="iterated (Fubini-style) integral")
    common(p, expr=True, box=True, tol=True, budget=True)
    p.add_argument("--order", help="1-based axis permutation, outermost first (e.g. 2,1)")

    p = sub.add_parser("crosscheck", help="all axis orders vs the direct bracket")
    common(p, expr=True, box=True, tol=True, budget=True, workers=True)

    p = sub.add_parser("scan", help="discontinuity scan with threshold")
    common(p, expr=True, box=True, workers=True)
    p.add_argument("--threshold", type=float, help="oscillation threshold")
    p.add_argument("--grid", help="comma-separated cells per axis (e.g. 16,16)")

    p = sub.add_parser("rsum", help="right-endpoint Riemann sums and their limit")
    common(p, expr=True)
    p.add_argument("--a", type=float, help="interval start")
    p.add_argument("--b", type=float, help="interval end")
    p.add_argument("--n-values", dest="n_values", help="comma-separated n list")

    p = sub.add_parser("bronstein", help="log-kernel integral vs its closed form")
    common(p, tol=True, budget=True)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    return parser


_DEFAULTS = JobConfig(subcommand="")


def parse_config(argv: Sequence[str]) -> JobConfig:
    """Parse argv, merge the optional config file under it, apply defaults."""
    ns = _build_parser().parse_args(argv)
    raw = vars(ns)
    file_values = _read_config_file(raw["config_path"]) if raw.get("config_path") else {}

    def pick(name: str, parser=None):
        value = raw.get(name)
        if value is not None:
            return value
        if name in file_values:
            text = file_values[name]
            return parser(text) if parser else text
        return None

    cfg = JobConfig(subcommand=raw["subcommand"])
    cfg.config_path = raw.get("config_path")
    cfg.expr = pick("expr")
    dim = pick("dim", int)
    cfg.dim = int(dim) if dim is not None else None
    lower = pick("lower")
    upper = pick("upper")
    cfg.lower = _parse_floats(lower, "--lower") if isinstance(lower, str) else lower
    cfg.upper = _parse_floats(upper, "--upper") if isinstance(upper, str) else upper
    for name, conv in (("tol", float), ("threshold", float), ("a", float), ("b", float)):
        value = pick(name, conv)
        if value is not None:
            setattr(cfg, name, conv(value))
        elif name in ("a", "b"):
            setattr(cfg, name, None)
    for name, conv in (("budget", int), ("workers", int)):
        value = pick(name, conv)
        if value is not None:
            setattr(cfg, name, conv(value))
    oracle = pick("oracle")
    if oracle is not None:
        cfg.oracle = oracle
    order = pick("order")
    if order is not None:
        cfg.order = order
    grid = pick("grid")
    if grid is not None:
        cfg.grid = _parse_ints(grid, "--grid") if isinstance(grid, str) else grid
    nv = pick("n_values")
    if nv is not None:
        cfg.n_values = _parse_ints(nv, "--n-values") if isinstance(nv, str) else nv
    fmt = pick("out_format") or pick("format")
    if fmt is not None:
        if fmt not in ("human", "structured", "csv"):
            raise UsageError(f"invalid --format: {fmt!r}")
        cfg.out_format = fmt
    return cfg


def _require_box(cfg: JobConfig) -> Rectangle:
    if cfg.lower is None:
        raise UsageError("missing --lower")
    if cfg.upper is None:
        raise UsageError("missing --upper")
    if len(cfg.lower) != len(cfg.upper):
        raise UsageError("invalid --lower/--upper: lengths differ")
    if cfg.dim is not None and cfg.dim != len(cfg.lower):
        raise UsageError(f"invalid --dim: {cfg.dim} does not match the bounds length")
    try:
        return Rectangle(cfg.lower, cfg.upper)
    except ValueError as exc:
        raise UsageError(f"invalid --lower/--upper: {exc}")


def _require_expr(cfg: JobConfig, dim: int) -> expr_mod.Expr:
    if cfg.expr is None:
        raise UsageError("missing --expr")
    return expr_mod.parse(cfg.expr, dim)


def _positive(value: float, flag: str) -> float:
    if not value > 0.0:
        raise UsageError(f"invalid {flag}: must be positive")
    return value


def _validate_common(cfg: JobConfig) -> None:
    _positive(cfg.tol, "--tol")
    if cfg.budget is not None and cfg.budget < 1:
        raise UsageError("invalid --budget: must be at least 1")
    if cfg.workers < 1:
        raise UsageError("invalid --workers: must be at least 1")


def _build_oracle(cfg: JobConfig, rect: Rectangle):
    strategy = cfg.oracle
    if strategy == "interval":
        return expr_mod.IntervalOracle(_require_expr(cfg, rect.dim))
    if strategy == "sampled":
        e = _require_expr(cfg, rect.dim)
        return SampledOracle(expr_mod.as_callable(e))
    if strategy.startswith("lipschitz:"):
        try:
            constant = float(strategy.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"invalid --oracle: bad Lipschitz constant in {strategy!r}")
        e = _require_expr(cfg, rect.dim)
        return LipschitzOracle(expr_mod.as_callable(e), constant)
    if strategy.startswith("mock:"):
        path = strategy.split(":", 1)[1]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return load_mock_oracle(fh.read())
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"invalid --oracle: cannot load mock file {path!r}: {exc}")
    raise UsageError(f"invalid --oracle: unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _emit(payload: dict, human_lines: list[str], csv_rows: list[list], cfg, out, elapsed):
    if cfg.out_format == "structured":
        print(dumps(payload), file=out)
    elif cfg.out_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in csv_rows:
            writer.writerow(row)
        out.write(buf.getvalue())
    else:
        for line in human_lines:
            print(line, file=out)
        print(f"wall time: {elapsed:.3f} s", file=out)


def _fail(cfg: JobConfig, reason: str, detail: str, out) -> int:
    if cfg.out_format == "structured":
        print(dumps({"command": cfg.subcommand, "error": reason, "detail": detail}), file=out)
    else:
        print(f"error: {reason}: {detail}", file=out)
    return 1


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _run_integrate(cfg: JobConfig, out) -> int:
    _validate_common(cfg)
    rect = _require_box(cfg)
    oracle = _build_oracle(cfg, rect)
    budget = cfg.budget if cfg.budget is not None else DEFAULT_CELL_BUDGET
    start = time.perf_counter()
    try:
        result = adaptive_integrate(oracle, rect, cfg.tol, budget, cfg.workers)
    except UnboundedFunctionError as exc:
        return _fail(cfg, "unbounded", str(exc), out)
    elapsed = time.perf_counter() - start
    b = result.bracket
    payload = {
        "command": "integrate",
        "expr": cfg.expr,
        "oracle": cfg.oracle,
        "lower": list(rect.lower),
        "upper": list(rect.upper),
        "tol": cfg.tol,
        "budget": budget,
        "lower_sum": b.lower,
        "upper_sum": b.upper,
        "midpoint": result.midpoint,
        "width": b.width,
        "cells": b.cells,
        "refinements": result.refinements,
        "converged": result.converged,
    }
    human = [
        f"bracket: [{b.lower!r}, {b.upper!r}]",
        f"midpoint: {result.midpoint!r}",
        f"width: {b.width!r}",
        f"cells: {b.cells}  refinements: {result.refinements}  converged: {result.converged}",
    ]
    header = list(payload.keys())
    csv_rows = [header, [payload[k] for k in header]]
    _emit(payload, human, csv_rows, cfg, out, elapsed)
    return 0 if result.converged else 1


def _run_iterate(cfg: JobConfig, out) -> int:
    _validate_common(cfg)
    rect = _require_box(cfg)
    e = _require_expr(cfg, rect.dim)
    if cfg.order is not None:
        try:
            order = AxisOrder.from_text(cfg.order)
        except ValueError as exc:
            raise UsageError(f"invalid --order: {exc}")
        if order.dim != rect.dim:
            raise UsageError("invalid --order: length must match the dimension")
    else:
        order = None
    budget = cfg.budget if cfg.budget is not None else DEFAULT_MAX_INTERVALS
    start = time.perf_counter()
    try:
        result = iterated_integrate(expr_mod.as_callable(e), rect, order, cfg.tol, budget)
    except SectionFailureError as exc:
        return _fail(cfg, "section-failure", str(exc), out)
    except UnboundedFunctionError as exc:
        return _fail(cfg, "unbounded", str(exc), out)
    elapsed = time.perf_counter() - start
    payload = {
        "command": "iterate",
        "expr": cfg.expr,
        "order": (order or AxisOrder(tuple(range(rect.dim)))).to_text(),
        "lower": list(rect.lower),
        "upper": list(rect.upper),
        "tol": cfg.tol,
        "value": result.value,
        "error": result.error,
        "converged": result.converged,
    }
    human = [
        f"value: {result.value!r} +- {result.error!r}",
        f"converged: {result.converged}",
    ]
    header = list(payload.keys())
    _emit(payload, human, [header, [payload[k] for k in header]], cfg, out, elapsed)
    return 0 if result.converged else 1


def _run_crosscheck(cfg: JobConfig, out) -> int:
    _validate_common(cfg)
    rect = _require_box(cfg)
    e = _require_expr(cfg, rect.dim)
    budget = cfg.budget if cfg.budget is not None else DEFAULT_CELL_BUDGET
    start = time.perf_counter()
    try:
        report = fubini_crosscheck(e, rect, cfg.tol, budget, workers=cfg.workers)
    except UnboundedFunctionError as exc:
        return _fail(cfg, "unbounded", str(exc), out)
    elapsed = time.perf_counter() - start
    payload = {
        "command": "crosscheck",
        "expr": cfg.expr,
        "lower": list(rect.lower),
        "upper": list(rect.upper),
        "tol": cfg.tol,
        "methods": [
            {
                "method": row.method,
                "value": row.value,
                "tolerance": row.tolerance,
                "converged": row.converged,
            }
            for row in report.rows
        ],
        "max_discrepancy": report.max_discrepancy,
        "pass": report.passed,
    }
    human = [
        f"{row.method:>16}: {row.value!r}  (tolerance {row.tolerance!r})"
        for row in report.rows
    ]
    human.append(f"max discrepancy: {report.max_discrepancy!r}")
    human.append("PASS" if report.passed else "FAIL")
    csv_rows = [["method", "value", "tolerance", "pass"]]
    for row in report.rows:
        csv_rows.append([row.method, row.value, row.tolerance, report.passed])
    _emit(payload, human, csv_rows, cfg, out, elapsed)
    return 0 if report.passed else 1


def _run_scan(cfg: JobConfig, out) -> int:
    _positive(cfg.threshold, "--threshold")
    if cfg.workers < 1:
        raise UsageError("invalid --workers: must be at least 1")
    rect = _require_box(cfg)
    if len(cfg.grid) != rect.dim:
        raise UsageError("invalid --grid: length must match the dimension")
    if any(g < 1 for g in cfg.grid):
        raise UsageError("invalid --grid: counts must be at least 1")
    e = _require_expr(cfg, rect.dim)
    start = time.perf_counter()
    report = discontinuity_scan(
        expr_mod.as_callable(e), rect, cfg.threshold, cfg.grid, workers=cfg.workers
    )
    elapsed = time.perf_counter() - start
    payload = {
        "command": "scan",
        "expr": cfg.expr,
        "lower": list(rect.lower),
        "upper": list(rect.upper),
        "threshold": cfg.threshold,
        "grid": list(cfg.grid),
        "flagged_count": len(report.flagged_cells),
        "flagged": [c.to_dict() for c in report.flagged_cells],
        "cover_volume": report.cover_volume,
    }
    human = [
        f"flagged cells: {len(report.flagged_cells)} of {math.prod(cfg.grid)}",
        f"cover volume: {report.cover_volume!r}",
    ]
    if rect.dim == 2:
        flagged = {idx.indices for idx in report.flagged_indices}
        human.append("heatmap (rows: axis 2 top to bottom, cols: axis 1):")
        for iy in range(cfg.grid[1] - 1, -1, -1):
            human.append("".join("#" if (ix, iy) in flagged else "." for ix in range(cfg.grid[0])))
    csv_rows = [["cell_lower", "cell_upper", "volume"]]
    for cell in report.flagged_cells:
        csv_rows.append([
            " ".join(repr(v) for v in cell.lower),
            " ".join(repr(v) for v in cell.upper),
            cell.volume,
        ])
    csv_rows.append(["cover_volume", "", report.cover_volume])
    _emit(payload, human, csv_rows, cfg, out, elapsed)
    return 0


def _run_rsum(cfg: JobConfig, out) -> int:
    if cfg.expr is None:
        raise UsageError("missing --expr")
    if cfg.a is None or cfg.b is None:
        raise UsageError("missing --a/--b")
    if not cfg.a < cfg.b:
        raise UsageError("invalid --a/--b: need a < b")
    if not cfg.n_values or any(n < 1 for n in cfg.n_values):
        raise UsageError("invalid --n-values: need positive integers")
    start = time.perf_counter()
    result = series_limit(cfg.expr, cfg.a, cfg.b, cfg.n_values)
    elapsed = time.perf_counter() - start
    payload = {
        "command": "rsum",
        "expr": cfg.expr,
        "a": result.a,
        "b": result.b,
        "n_values": list(result.n_values),
        "partial_sums": list(result.partial_sums),
        "limit_estimate": result.limit_estimate,
    }
    human = [f"S_{n} = {s!r}" for n, s in zip(result.n_values, result.partial_sums)]
    human.append(f"limit estimate: {result.limit_estimate!r}")
    csv_rows = [["n", "partial_sum"]]
    csv_rows += [[n, s] for n, s in zip(result.n_values, result.partial_sums)]
    csv_rows.append(["limit", result.limit_estimate])
    _emit(payload, human, csv_rows, cfg, out, elapsed)
    return 0


def _run_bronstein(cfg: JobConfig, out) -> int:
    _positive(cfg.tol, "--tol")
    if cfg.a is None or cfg.b is None:
        raise UsageError("missing --a/--b")
    if cfg.a <= 0 or cfg.b <= 0:
        raise UsageError("invalid --a/--b: need positive values")
    if cfg.a == cfg.b:
        raise UsageError("invalid --a/--b: need a != b")
    budget = cfg.budget if cfg.budget is not None else DEFAULT_MAX_INTERVALS
    start = time.perf_counter()
    result = bronstein_integral(cfg.a, cfg.b, cfg.tol, budget)
    elapsed = time.perf_counter() - start
    expected = 2.0 * math.pi * math.log(max(cfg.a, cfg.b))
    delta = abs(result.value - expected)
    ok = result.converged and delta <= cfg.tol
    payload = {
        "command": "bronstein",
        "a": cfg.a,
        "b": cfg.b,
        "tol": cfg.tol,
        "value": result.value,
        "closed_form": expected,
        "delta": delta,
        "converged": result.converged,
        "pass": ok,
    }
    human = [
        f"integral: {result.value!r}",
        f"closed form 2*pi*log(max(a,b)): {expected!r}",
        f"|difference|: {delta!r}",
        "PASS" if ok else "FAIL",
    ]
    header = list(payload.keys())
    _emit(payload, human, [header, [payload[k] for k in header]], cfg, out, elapsed)
    return 0 if ok else 1


_RUNNERS = {
    "integrate": _run_integrate,
    "iterate": _run_iterate,
    "crosscheck": _run_crosscheck,
    "scan": _run_scan,
    "rsum": _run_rsum,
    "bronstein": _run_bronstein,
}


def run(config: JobConfig, out=None) -> int:
    """Execute a job; returns the process exit status."""
    out = out if out is not None else sys.stdout
    try:
        return _RUNNERS[config.subcommand](config, out)
    except (ExprSyntaxError, ExprDimensionError) as exc:
        print(f"usage error: invalid --expr: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except UnboundedFunctionError as exc:
        return _fail(config, "unbounded", str(exc), out)
    except ExprDomainError as exc:
        return _fail(config, "domain", str(exc), out)
    except SectionFailureError as exc:
        return _fail(config, "section-failure", str(exc), out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_config(sys.argv[1:] if argv is None else list(argv))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
