"""Command-line entry point: ``vecmkit <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .dataset import Dataset, load_csv, log_transform, to_csv
from .diagnostics import diagnose
from .dynamics import bootstrap_bands, fevd_from_irf, irf
from .errors import StageError, VecmkitError
from .johansen import johansen_test, parse_det_case
from .pipeline import (
    Table,
    _coef_rows,
    _COEF_COLUMNS,
    _diag_rows,
    _johansen_table,
    _lag_table,
    load_config,
    run_pipeline,
)
from .report import emit_report, table_to_csv
from .simulate import KINDS, DgpSpec, generate
from .unitroot import adf_test, pp_test
from .varmodel import fit_var, granger_test, select_lag_order
from .vecm import fit_vecm


def _split(text):
    return [t.strip() for t in text.split(",") if t.strip()] if text else []


def _dataset(args) -> Dataset:
    cols = _split(args.columns)
    d = load_csv(args.data, {c: c for c in cols} if cols else None)
    for col in _split(args.log):
        d = d.replace(log_transform(d[col]).renamed(col))
    if args.log:
        logged = set(_split(args.log))
        d = Dataset(d[n].renamed(f"{args.log_prefix}{n}" if n in logged else n) for n in d.names)
    return d


def _emit(table: Table, out):
    text = table_to_csv(table)
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _bandwidth(text):
    return text if text == "auto" else int(text)


def cmd_pipeline(args) -> int:
    cfg = load_config(args.config)
    changes = {}
    for key in ("seed", "workers", "output", "format"):
        value = getattr(args, key)
        if value is not None:
            changes[key] = value
    if changes:
        cfg = replace(cfg, **changes)
    report = run_pipeline(cfg)
    paths = emit_report(report, cfg.format, cfg.output)
    for line in report.decisions:
        print(line)
    print(f"wrote {len(paths)} file(s) to {cfg.output}")
    if report.failure:
        raise StageError(report.failure["stage"], report.failure["message"])
    return 0


def cmd_unitroot(args) -> int:
    d = _dataset(args)
    rows = []
    tests = ("adf", "pp") if args.test == "both" else (args.test,)
    for name in d.names:
        y = d[name].values
        series = y if args.form == "level" else y[1:] - y[:-1]
        for test in tests:
            if test == "adf":
                res = adf_test(series, args.det, args.max_lag)
            else:
                res = pp_test(series, args.det, _bandwidth(args.bandwidth))
            cv = res.critical_values
            rows.append([name, args.form, res.test, res.deterministic.value, res.statistic,
                         cv["1%"], cv["5%"], cv["10%"], res.lag_or_bandwidth, res.reject_at_5pct])
    _emit(Table(["variable", "form", "test", "deterministic", "statistic", "cv1", "cv5", "cv10",
                 "lag_or_bandwidth", "reject"], rows), args.out)
    return 0


def cmd_lagselect(args) -> int:
    sel = select_lag_order(_dataset(args), args.max_lag)
    _emit(_lag_table(sel), args.out)
    return 0


def cmd_johansen(args) -> int:
    jo = johansen_test(_dataset(args), args.lag, args.case)
    _emit(_johansen_table(jo), args.out)
    print(f"decided rank: {jo.decided_rank}", file=sys.stderr)
    return 0


def _vecm(args):
    d = _dataset(args)
    case = parse_det_case(args.case)
    rank = args.rank if args.rank is not None else johansen_test(d, args.lag, case).decided_rank
    return fit_vecm(d, args.lag, rank, case, _split(args.ordering) or None)


def cmd_vecm(args) -> int:
    m = _vecm(args)
    _emit(Table(_COEF_COLUMNS, _coef_rows(m, False)), args.out)
    return 0


def cmd_granger(args) -> int:
    d = _dataset(args)
    if args.form == "difference":
        d = d.difference()
    g = granger_test(d, args.cause, args.effect, args.lag)
    _emit(Table(["cause", "effect", "lag", "form", "F", "df1", "df2", "p_value", "reject"],
                [[g.cause, g.effect, g.lag, args.form, g.statistic, g.df[0], g.df[1], g.p_value,
                  g.reject_at_5pct]]), args.out)
    return 0


def cmd_diagnose(args) -> int:
    if args.model == "var":
        model = fit_var(_dataset(args), args.lag)
    else:
        model = _vecm(args)
    rep = diagnose(model, args.portmanteau_lags, args.arch_lags)
    _emit(Table(["model", "test", "statistic", "df", "p_value", "lags"], _diag_rows(args.model, rep)), args.out)
    return 0


def _irf(args):
    m = _vecm(args)
    ordering = _split(args.ordering) or None
    if args.replications:
        return bootstrap_bands(m, args.horizon, ordering, args.replications, args.seed,
                               args.level, args.workers)
    return irf(m, args.horizon, ordering)


_LONG = ["horizon", "shock", "responder", "value", "lower", "upper"]


def cmd_irf(args) -> int:
    res = _irf(args)
    _emit(Table(_LONG, [list(r) for r in res.long_rows()]), args.out)
    return 0


def cmd_fevd(args) -> int:
    args.replications = 0
    fe = fevd_from_irf(_irf(args))
    rows = []
    wide = []
    for i, name in enumerate(fe.ordering):
        for h in fe.horizons:
            shares = fe.shares[h - 1, i]
            wide.append([name, int(h)] + [float(v) for v in shares])
            for j, shock in enumerate(fe.ordering):
                rows.append([int(h), shock, name, float(shares[j]), None, None])
    _emit(Table(_LONG, rows), args.out)
    if args.wide_out:
        _emit(Table(["variable", "period"] + list(fe.ordering), wide), args.wide_out)
    return 0


def cmd_simulate(args) -> int:
    params = json.loads(args.params) if args.params else {}
    spec = DgpSpec(args.kind, params, args.T, args.burn_in, args.seed)
    d = generate(spec)
    to_csv(d, args.out or sys.stdout)
    return 0


def _data_args(p, need_lag=False):
    p.add_argument("--data", required=True, help="CSV with a year column")
    p.add_argument("--columns", default="", help="comma-separated columns (default: all)")
    p.add_argument("--log", default="", help="columns to log-transform")
    p.add_argument("--log-prefix", default="L")
    p.add_argument("--out", help="output CSV (default: stdout)")
    if need_lag:
        p.add_argument("--lag", type=int, default=2, help="VAR lag order in levels")


def _vecm_args(p):
    _data_args(p, need_lag=True)
    p.add_argument("--rank", type=int, help="cointegrating rank (default: trace test)")
    p.add_argument("--case", default="restricted_constant")
    p.add_argument("--ordering", default="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vecmkit", description="VECM time-series toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pipeline", help="run the full study from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json", "both"))
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("unitroot", help="ADF / PP tests per column")
    _data_args(p)
    p.add_argument("--test", choices=("adf", "pp", "both"), default="both")
    p.add_argument("--form", choices=("level", "difference"), default="level")
    p.add_argument("--det", default="drift+trend")
    p.add_argument("--max-lag", type=int, default=3)
    p.add_argument("--bandwidth", default="auto")
    p.set_defaults(func=cmd_unitroot)

    p = sub.add_parser("lagselect", help="VAR lag-order criteria")
    _data_args(p)
    p.add_argument("--max-lag", type=int, default=3)
    p.set_defaults(func=cmd_lagselect)

    p = sub.add_parser("johansen", help="Johansen trace / max-eigenvalue tests")
    _data_args(p, need_lag=True)
    p.add_argument("--case", default="restricted_constant")
    p.set_defaults(func=cmd_johansen)

    p = sub.add_parser("vecm", help="estimate a VECM")
    _vecm_args(p)
    p.set_defaults(func=cmd_vecm)

    p = sub.add_parser("granger", help="bivariate Granger causality F-test")
    _data_args(p, need_lag=True)
    p.add_argument("--cause", required=True)
    p.add_argument("--effect", required=True)
    p.add_argument("--form", choices=("difference", "level"), default="difference")
    p.set_defaults(func=cmd_granger)

    p = sub.add_parser("diagnose", help="residual diagnostics")
    _vecm_args(p)
    p.add_argument("--model", choices=("vecm", "var"), default="vecm")
    p.add_argument("--portmanteau-lags", type=int, default=10)
    p.add_argument("--arch-lags", type=int, default=5)
    p.set_defaults(func=cmd_diagnose)

    for name, func, help_text in (("irf", cmd_irf, "impulse responses (long CSV)"),
                                  ("fevd", cmd_fevd, "variance decomposition (long CSV)")):
        p = sub.add_parser(name, help=help_text)
        _vecm_args(p)
        p.add_argument("--horizon", type=int, default=9)
        if name == "irf":
            p.add_argument("--replications", type=int, default=0, help="bootstrap draws (0: none)")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--level", type=float, default=0.95)
            p.add_argument("--workers", type=int, default=1)
        else:
            p.add_argument("--wide-out", help="also write the period x shock table here")
        p.set_defaults(func=func)

    p = sub.add_parser("simulate", help="write a simulated fixture CSV")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--params", help="JSON object of kind parameters")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (VecmkitError, ValueError, KeyError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: [{args.command}] {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
