"""Command-line interface.

Commands:
  norm       weighted Bloch norm of a symbol
  essential  boundary scan, essential-norm sandwich and compactness verdict
  compare    sigma scan vs power criterion vs Moebius criterion
  scan-dump  raw (|a|, theta, norm) rows for external plotting
  selfcheck  built-in property suite

Exit codes: 0 success, 2 parse/config error, 3 not a self-map, 4 unsupported
weight/criterion combination, 5 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
import time

from .config import ConfigError, RunConfig, build_config, parse_config_file
from .disk import ParameterError
from .estimators import (
    UnsupportedWeightError,
    criteria_compare,
    essential_bounds,
    sigma_scan,
)
from .norms import NonFiniteError, bloch_norm
from .reporting import Report, format_complex, render_figures, write_report
from .symbols import (
    NotSelfMapError,
    SymbolParameterError,
    SymbolSyntaxError,
    parse_symbol,
)
from .weights import StandardWeight, parse_weight
from .selfcheck import run_selfcheck

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_SELF_MAP = 3
EXIT_UNSUPPORTED_WEIGHT = 4
EXIT_NUMERIC = 5


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--symbol", help="symbol text, e.g. 'dilate(0.9, identity)'")
    p.add_argument("--alpha", type=float, help="source-space exponent")
    p.add_argument("--beta", type=float, help="target power-weight exponent")
    p.add_argument("--weight", help="target weight: valpha:<a>, log, custom:<path>")
    p.add_argument("--config", help="key=value config file (flags win)")
    p.add_argument("--out", help="output path; figures are rendered next to it")
    p.add_argument("--format", choices=("csv", "json"), help="report format")
    fig = p.add_mutually_exclusive_group()
    fig.add_argument("--figures", dest="figures", action="store_true", default=None)
    fig.add_argument("--no-figures", dest="figures", action="store_false", default=None)
    for name, typ in (
        ("depth", int),
        ("max-angles", int),
        ("refine-rounds", int),
        ("shrink", float),
        ("rel-tol", float),
        ("abs-tol", float),
        ("k-min", int),
        ("k-max", int),
        ("angles", int),
        ("tail-window", int),
        ("compact-tol", float),
        ("j-max", int),
    ):
        p.add_argument(f"--{name}", type=typ, dest=name.replace("-", "_"))


def _gather_config(args: argparse.Namespace) -> RunConfig:
    file_values = parse_config_file(args.config) if args.config else None
    overrides = {}
    for key in RunConfig.__dataclass_fields__:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return build_config(file_values, overrides)


def _target_weight(cfg: RunConfig):
    return parse_weight(cfg.weight)


def _require_power_weight(cfg: RunConfig) -> float:
    weight = _target_weight(cfg)
    if not isinstance(weight, StandardWeight):
        raise UnsupportedWeightError(
            f"the power criterion needs a valpha:<beta> target, got {cfg.weight!r}"
        )
    return weight.alpha


def _scan_tables(scan) -> dict:
    rows = [
        (r, t, scan.values[i][j], scan.seminorm_values[i][j])
        for i, r in enumerate(scan.radii)
        for j, t in enumerate(scan.angles)
    ]
    tail_rows = [
        (r, scan.tail_max[i], scan.seminorm_tail_max[i])
        for i, r in enumerate(scan.radii)
    ]
    return {
        "scan": (("a_abs", "theta", "bloch_norm", "seminorm"), rows),
        "tail": (("a_abs", "tail_max", "seminorm_tail_max"), tail_rows),
    }


def run_norm(cfg: RunConfig) -> Report:
    f = parse_symbol(cfg.symbol)
    weight = _target_weight(cfg)
    t0 = time.perf_counter()
    nrm = bloch_norm(f, weight, cfg.search_settings())
    dt = time.perf_counter() - t0
    sem = nrm.seminorm
    results = {
        "symbol": cfg.symbol,
        "weight": weight.spec(),
        "value_at_zero": nrm.value_at_zero,
        "seminorm": sem.value,
        "total": nrm.total,
        "witness": format_complex(sem.witness.as_complex()),
        "converged": sem.is_converged,
        "diverging": sem.is_diverging,
    }
    trace_rows = [(size, value, format_complex(w)) for size, value, w in sem.trace.levels]
    return Report(
        command="norm",
        config=cfg.echo(),
        results=results,
        tables={"trace": (("points", "running_max", "witness"), trace_rows)},
        timing_s=dt,
    )


def run_essential(cfg: RunConfig) -> Report:
    phi = parse_symbol(cfg.symbol)
    weight = _target_weight(cfg)
    st = cfg.scan_settings()
    t0 = time.perf_counter()
    scan = sigma_scan(phi, cfg.alpha, weight, st)
    phi_norm = bloch_norm(phi, weight, st.search)
    bounds = essential_bounds(scan, cfg.alpha, phi_norm, st.compact_tol, st.floor)
    dt = time.perf_counter() - t0
    results = {
        "symbol": cfg.symbol,
        "family": scan.family,
        "alpha": cfg.alpha,
        "weight": weight.spec(),
        "L": bounds.L,
        "L_seminorm": bounds.L_seminorm,
        "lower": bounds.lower,
        "upper": bounds.upper,
        "verdict": bounds.verdict,
        "scan_converged": scan.converged,
        "symbol_norm": bounds.symbol_norm,
    }
    return Report(
        command="essential",
        config=cfg.echo(),
        results=results,
        tables=_scan_tables(scan),
        timing_s=dt,
    )


def run_compare(cfg: RunConfig) -> Report:
    phi = parse_symbol(cfg.symbol)
    beta = cfg.beta if cfg.beta is not None else _require_power_weight(cfg)
    t0 = time.perf_counter()
    cmp = criteria_compare(phi, cfg.alpha, beta, cfg.scan_settings())
    dt = time.perf_counter() - t0
    results = {
        "symbol": cfg.symbol,
        "alpha": cfg.alpha,
        "beta": beta,
        "L": cmp.bounds.L,
        "lower": cmp.bounds.lower,
        "upper": cmp.bounds.upper,
        "power_criterion": cmp.power.value,
        "mobius_limit": cmp.mobius.L_seminorm if cmp.mobius is not None else None,
        "agreement": cmp.agreement,
        "sandwich_ok": cmp.sandwich_ok,
        "notes": "; ".join(cmp.notes),
    }
    for name, verdict in cmp.verdicts.items():
        results[f"verdict.{name}"] = verdict
    criteria_rows = [
        ("sigma_scan", cmp.bounds.lower, cmp.bounds.upper, cmp.bounds.L),
        ("power_criterion", None, None, cmp.power.value),
    ]
    if cmp.mobius is not None:
        criteria_rows.append(("mobius_criterion", None, None, cmp.mobius.L_seminorm))
    tables = _scan_tables(cmp.scan)
    tables["criteria"] = (("criterion", "lower", "upper", "estimate"), criteria_rows)
    tables["power_terms"] = (
        ("j", "term"),
        [(j + 1, t) for j, t in enumerate(cmp.power.terms)],
    )
    return Report(
        command="compare",
        config=cfg.echo(),
        results=results,
        tables=tables,
        timing_s=dt,
    )


def run_scan_dump(cfg: RunConfig) -> Report:
    phi = parse_symbol(cfg.symbol)
    weight = _target_weight(cfg)
    st = cfg.scan_settings()
    t0 = time.perf_counter()
    scan = sigma_scan(phi, cfg.alpha, weight, st)
    dt = time.perf_counter() - t0
    tables = _scan_tables(scan)
    return Report(
        command="scan-dump",
        config=cfg.echo(),
        results={"family": scan.family, "L": scan.L_estimate},
        tables={"scan": tables["scan"], "tail": tables["tail"]},
        timing_s=dt,
    )


def run_selfcheck_cmd(cfg: RunConfig) -> tuple[Report, bool]:
    t0 = time.perf_counter()
    outcomes = run_selfcheck()
    dt = time.perf_counter() - t0
    all_ok = all(ok for _, ok, _ in outcomes)
    rows = [(name, "PASS" if ok else "FAIL", detail) for name, ok, detail in outcomes]
    report = Report(
        command="selfcheck",
        config=cfg.echo(),
        results={"all_ok": all_ok, "checks": len(outcomes)},
        tables={"checks": (("check", "status", "detail"), rows)},
        timing_s=dt,
    )
    return report, all_ok


def _emit(report: Report, cfg: RunConfig) -> None:
    write_report(report, cfg.out, cfg.format)
    if cfg.out and cfg.figures:
        for path in render_figures(report, cfg.out):
            print(f"figure: {path}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="blochscope",
        description="Bloch-type norms and essential-norm bounds for composition operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("norm", "essential", "compare", "scan-dump", "selfcheck"):
        _add_common(sub.add_parser(name))
    args = parser.parse_args(argv)

    try:
        cfg = _gather_config(args)
        if args.command == "norm":
            _emit(run_norm(cfg), cfg)
        elif args.command == "essential":
            _emit(run_essential(cfg), cfg)
        elif args.command == "compare":
            _emit(run_compare(cfg), cfg)
        elif args.command == "scan-dump":
            _emit(run_scan_dump(cfg), cfg)
        elif args.command == "selfcheck":
            report, all_ok = run_selfcheck_cmd(cfg)
            for name, status, detail in report.tables["checks"][1]:
                print(f"{status}  {name}  ({detail})")
            if cfg.out:
                write_report(report, cfg.out, cfg.format)
            if not all_ok:
                return 1
        return EXIT_OK
    except (SymbolSyntaxError, SymbolParameterError, ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotSelfMapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_SELF_MAP
    except UnsupportedWeightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED_WEIGHT
    except NonFiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
