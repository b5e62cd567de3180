"""
End-to-end study driver.

Stages run in a fixed order and each one feeds the next: integration
orders gate the cointegration analysis, the lag recommendation sets the
VECM order, the trace-test rank sets r, and the weak-exogeneity tests pick
the variables kept for the restricted system. A stage that cannot run
records why; a stage that fails halts the run with a stage-tagged error
and the tables produced so far are kept.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .dataset import Dataset, describe, load_csv, log_transform
from .diagnostics import diagnose
from .dynamics import bootstrap_bands, fevd_from_irf, irf
from .errors import ConfigError, StageError, VecmkitError
from .johansen import JohansenResult, johansen_test, parse_det_case
from .unitroot import adf_test, integration_order, pp_test
from .varmodel import LagSelection, granger_test, select_lag_order
from .vecm import (
    VecmModel,
    _fit_array,
    normalize_long_run,
    restrict_to_subset,
    significance_stars,
    weak_exogeneity_test,
)

STAGES = (
    "load",
    "describe",
    "unitroot",
    "lagselect",
    "johansen",
    "vecm",
    "weak_exogeneity",
    "restricted",
    "granger",
    "diagnostics",
    "irf",
    "fevd",
)

# stage -> tables it produces (CSV bundle names, plus "irf" for the JSON report)
STAGE_TABLES = {
    "load": (),
    "describe": ("table01_descriptives",),
    "unitroot": ("table02_unitroot",),
    "lagselect": ("table03_lagselect",),
    "johansen": ("table04_johansen",),
    "vecm": ("table05_vecm_unrestricted", "appendix_a1_vecm_unrestricted_full"),
    "weak_exogeneity": ("appendix_a2_weak_exogeneity",),
    "restricted": (
        "appendix_a4_lagselect_restricted",
        "appendix_a5_johansen_restricted",
        "table06_vecm_restricted",
        "appendix_a3_vecm_restricted_full",
        "table07_longrun",
    ),
    "granger": ("table08_granger",),
    "diagnostics": ("table09_diagnostics",),
    "irf": ("irf",),
    "fevd": ("table10_fevd",),
}

_LEVELS = {"1%": 0.01, "5%": 0.05, "10%": 0.10}


def _level_label(value) -> str:
    text = str(value).strip()
    if text in _LEVELS:
        return text
    try:
        x = float(text)
    except ValueError:
        raise ConfigError(f"significance level {value!r} is not one of 1%, 5%, 10%") from None
    for label, v in _LEVELS.items():
        if abs(x - v) < 1e-12:
            return label
    raise ConfigError(f"significance level {value!r} is not one of 1%, 5%, 10%")


def _names(text: str) -> list:
    return [t.strip() for t in text.split(",") if t.strip()]


@dataclass(frozen=True)
class PipelineConfig:
    data: str = ""
    columns: tuple = ()
    log: tuple = ()
    log_prefix: str = "L"
    max_lag: int = 3
    significance: str = "5%"
    weak_exogeneity_level: str = "10%"
    unitroot_test: str = "pp"
    det_level: str = "drift+trend"
    det_diff: str = "drift"
    pp_bandwidth: str = "auto"
    johansen_case: str = "restricted_constant"
    granger_form: str = "difference"
    granger_pair: tuple = ()
    granger_lag: Optional[int] = None
    portmanteau_lags: int = 10
    arch_lags: int = 5
    horizon: int = 9
    ordering: tuple = ()
    bootstrap_replications: int = 1000
    bootstrap_level: float = 0.95
    seed: int = 0
    workers: int = 1
    output: str = "report"
    format: str = "both"

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        if self.max_lag < 1:
            raise ConfigError("max_lag must be at least 1")
        if self.bootstrap_replications != 0 and self.bootstrap_replications < 100:
            raise ConfigError("bootstrap_replications must be 0 (off) or at least 100")
        if self.unitroot_test not in ("pp", "adf"):
            raise ConfigError("unitroot_test must be pp or adf")
        if self.granger_form not in ("difference", "level"):
            raise ConfigError("granger_form must be difference or level")
        if self.format not in ("csv", "json", "both"):
            raise ConfigError("format must be csv, json or both")
        if self.granger_pair and len(self.granger_pair) != 2:
            raise ConfigError("granger_pair must name exactly two variables")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        object.__setattr__(self, "significance", _level_label(self.significance))
        object.__setattr__(self, "weak_exogeneity_level", _level_label(self.weak_exogeneity_level))
        try:
            object.__setattr__(self, "johansen_case", parse_det_case(self.johansen_case))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def variable_name(self, column: str) -> str:
        return f"{self.log_prefix}{column}" if column in self.log else column

    def to_dict(self) -> dict:
        """Settings that shape the results (not where or how fast they are produced)."""
        out = asdict(self)
        for key in ("workers", "output", "format"):
            out.pop(key)
        out["data"] = Path(out["data"]).name if out["data"] else ""
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out


_INT_KEYS = {
    "max_lag", "granger_lag", "portmanteau_lags", "arch_lags", "horizon",
    "bootstrap_replications", "seed", "workers",
}
_LIST_KEYS = {"columns", "log", "granger_pair", "ordering"}
_FLOAT_KEYS = {"bootstrap_level"}


def parse_config(text: str, base_dir=None) -> PipelineConfig:
    """
    Parse the flat ``key = value`` format (``#`` starts a comment).

    A relative ``data`` path is resolved against ``base_dir``.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string("[pipeline]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    known = {f for f in PipelineConfig.__dataclass_fields__}
    values = {}
    for key, raw in parser["pipeline"].items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        raw = raw.strip()
        try:
            if key in _INT_KEYS:
                values[key] = None if raw == "" and key == "granger_lag" else int(raw)
            elif key in _FLOAT_KEYS:
                values[key] = float(raw)
            elif key in _LIST_KEYS:
                values[key] = tuple(_names(raw))
            else:
                values[key] = raw
        except ValueError:
            raise ConfigError(f"config key {key!r}: cannot parse {raw!r}") from None
    if "data" in values and base_dir is not None and values["data"]:
        path = Path(values["data"])
        if not path.is_absolute():
            values["data"] = str(Path(base_dir) / path)
    return PipelineConfig(**values)


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, path.parent)


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)


@dataclass
class StudyReport:
    config: dict
    tables: dict = field(default_factory=dict)
    decisions: list = field(default_factory=list)
    skipped: dict = field(default_factory=dict)  # stage -> reason
    failure: Optional[dict] = None
    completed: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failure is None

    def skip_rest(self, after: str, reason: str):
        for stage in STAGES[STAGES.index(after) + 1:]:
            if stage not in self.completed and stage not in self.skipped:
                self.skipped[stage] = reason


class _Halt(Exception):
    pass


def _coef_rows(model: VecmModel, ect_only: bool):
    rows = []
    for eq, reg, est, se, t, p, stars in model.coefficients.rows():
        if ect_only and not reg.startswith("ECT"):
            continue
        rows.append([eq, reg, est, se, t, p, stars])
    return rows


def _own_ect_rows(model: VecmModel):
    rows = []
    for i, name in enumerate(model.ordering[: model.r]):
        est, p = model.coefficients.get(f"d({name})", f"ECT{i + 1}")
        j = model.coefficients.equations.index(f"d({name})")
        c = model.coefficients.regressors.index(f"ECT{i + 1}")
        rows.append([
            f"d({name})", f"ECT{i + 1}", est,
            float(model.coefficients.std_error[j, c]),
            float(model.coefficients.t_stat[j, c]), p,
            significance_stars(p),
        ])
    return rows


_COEF_COLUMNS = ["equation", "regressor", "estimate", "std_error", "t_stat", "p_value", "signif"]


def _lag_table(sel: LagSelection) -> Table:
    rows = []
    for p in sel.lags:
        picked = ";".join(c for c in ("AIC", "HQ", "SC", "FPE") if sel.chosen[c] == p)
        row = [p] + [sel.table[p][c] for c in ("AIC", "HQ", "SC", "FPE")] + [picked]
        rows.append(row)
    return Table(["lag", "AIC", "HQ", "SC", "FPE", "selected_by"], rows)


def _lag_decision(sel: LagSelection, label: str) -> str:
    agree = [c for c in ("AIC", "HQ", "SC", "FPE") if sel.chosen[c] == sel.recommended]
    text = f"{label}: lag {sel.recommended} recommended ({', '.join(agree)})"
    dissent = [f"{c} at {sel.chosen[c]}" for c in ("AIC", "HQ", "SC", "FPE") if c not in agree]
    if dissent:
        text += "; dissenting: " + ", ".join(dissent)
    return text


def _johansen_table(jo: JohansenResult) -> Table:
    rows = []
    for r in range(jo.k):
        rows.append([
            r,
            float(jo.eigenvalues[r]),
            float(jo.eigen_stats[r]),
            *[float(v) for v in jo.eigen_critical[r]],
            float(jo.trace_stats[r]),
            *[float(v) for v in jo.trace_critical[r]],
        ])
    return Table(
        [
            "rank_null", "eigenvalue",
            "max_eigen_stat", "max_eigen_cv10", "max_eigen_cv5", "max_eigen_cv1",
            "trace_stat", "trace_cv10", "trace_cv5", "trace_cv1",
        ],
        rows,
    )


def _diag_rows(label, rep):
    rows = []
    for name, stat in (("portmanteau", rep.portmanteau), ("jarque_bera", rep.jarque_bera), ("arch_lm", rep.arch)):
        rows.append([label, name, stat.statistic, stat.df, stat.p_value, stat.lags])
    return rows


class _Runner:
    def __init__(self, config: PipelineConfig, data: Optional[Dataset]):
        self.cfg = config
        self.data = data
        self.report = StudyReport(config.to_dict())

    def stage(self, name, func):
        if name in self.report.skipped:
            return
        try:
            func()
        except _Halt:
            self.report.completed.append(name)
            raise
        except (VecmkitError, ValueError, KeyError, OSError, np.linalg.LinAlgError) as exc:
            message = str(exc) if not isinstance(exc, KeyError) else str(exc.args[0])
            self.report.failure = {"stage": name, "message": message}
            self.report.skip_rest(name, f"not run: stage {name!r} failed")
            raise StageError(name, message) from exc
        self.report.completed.append(name)

    def halt(self, stage: str, reason: str):
        self.report.decisions.append(reason)
        self.report.skip_rest(stage, reason)
        raise _Halt()

    # stages

    def load(self):
        cfg = self.cfg
        if self.data is None:
            if not cfg.data:
                raise ConfigError("no data path configured")
            spec = {c: c for c in cfg.columns} if cfg.columns else None
            self.data = load_csv(cfg.data, spec)
        d = self.data
        if cfg.columns:
            missing = [c for c in cfg.columns if c not in d]
            if missing:
                raise ConfigError(f"configured columns not in data: {missing}")
            d = d.select(cfg.columns)
        for col in cfg.log:
            if col not in d:
                raise ConfigError(f"log column {col!r} not in data")
            d = d.replace(log_transform(d[col]).renamed(col))
        rename = {c: cfg.variable_name(c) for c in d.names}
        d = Dataset(d[c].renamed(rename[c]) for c in d.names)
        if d.k < 2:
            raise ConfigError("the study needs at least two series")
        self.d = d

    def describe(self):
        rows = []
        for name in self.d.names:
            st = describe(self.d[name])
            rows.append([name, st.mean, st.median, st.max, st.min, st.sd, st.n_obs])
        self.report.tables["table01_descriptives"] = Table(
            ["variable", "mean", "median", "max", "min", "sd", "n_obs"], rows
        )

    def unitroot(self):
        cfg = self.cfg
        bw = cfg.pp_bandwidth if cfg.pp_bandwidth == "auto" else int(cfg.pp_bandwidth)
        rows = []
        orders = {}
        for name in self.d.names:
            y = self.d[name].values
            for form, series, det in (("level", y, cfg.det_level), ("difference", np.diff(y), cfg.det_diff)):
                for res in (adf_test(series, det, cfg.max_lag), pp_test(series, det, bw)):
                    cv = res.critical_values
                    rows.append([
                        name, form, res.test, res.deterministic.value, res.statistic,
                        cv["1%"], cv["5%"], cv["10%"], res.lag_or_bandwidth,
                        res.reject(cfg.significance),
                    ])
            try:
                orders[name] = integration_order(
                    self.d[name], cfg.det_level, cfg.det_diff, cfg.unitroot_test,
                    cfg.max_lag, bw, cfg.significance,
                )
            except VecmkitError as exc:
                if type(exc).__name__ != "UnsupportedOrderError":
                    raise
                orders[name] = None
        self.report.tables["table02_unitroot"] = Table(
            ["variable", "form", "test", "deterministic", "statistic", "cv1", "cv5", "cv10",
             "lag_or_bandwidth", "reject"],
            rows,
        )
        test = cfg.unitroot_test.upper()
        if all(o == 1 for o in orders.values()):
            self.report.decisions.append(f"integration order: all series I(1) by {test} at {cfg.significance}")
            return
        detail = ", ".join(
            f"{n} {'I(2) or higher' if o is None else f'I({o})'}" for n, o in orders.items() if o != 1
        )
        self.halt("unitroot", f"integration order by {test}: {detail}; cointegration analysis needs all series I(1)")

    def lagselect(self):
        self.sel = select_lag_order(self.d, self.cfg.max_lag)
        self.report.tables["table03_lagselect"] = _lag_table(self.sel)
        self.report.decisions.append(_lag_decision(self.sel, "lag selection"))

    def johansen(self):
        self.jo = johansen_test(self.d, self.sel.recommended, self.cfg.johansen_case, self.cfg.significance)
        self.report.tables["table04_johansen"] = _johansen_table(self.jo)
        r = self.jo.decided_rank
        if r == 0:
            self.halt("johansen", "rank 0: no cointegration; VECM skipped")
        if r == self.d.k:
            self.halt("johansen", f"rank {r} = k: the system is stationary; VECM skipped")
        self.report.decisions.append(f"cointegrating rank {r} (trace test, {self.cfg.significance})")

    def vecm(self):
        self.model = _fit_array(
            self.d.matrix, self.d.names, self.sel.recommended, self.jo.decided_rank,
            self.jo.det_case, self.d.time_index, None, self.jo,
        )
        self.report.tables["table05_vecm_unrestricted"] = Table(_COEF_COLUMNS, _own_ect_rows(self.model))
        self.report.tables["appendix_a1_vecm_unrestricted_full"] = Table(
            _COEF_COLUMNS, _coef_rows(self.model, False)
        )

    def weak_exogeneity(self):
        level = _LEVELS[self.cfg.weak_exogeneity_level]
        rows = []
        dropped = []
        for name in self.d.names:
            res = weak_exogeneity_test(self.model, name)
            exo = res.weakly_exogenous(level)
            rows.append([name, res.lr_statistic, res.df, res.p_value, exo])
            if exo:
                dropped.append(name)
        self.report.tables["appendix_a2_weak_exogeneity"] = Table(
            ["variable", "lr_statistic", "df", "p_value", "weakly_exogenous"], rows
        )
        self.keep = [n for n in self.d.names if n not in dropped]
        if dropped:
            self.report.decisions.append(
                f"weakly exogenous at {self.cfg.weak_exogeneity_level}: {', '.join(dropped)}; dropped"
            )
        else:
            self.report.decisions.append(
                f"no variable weakly exogenous at {self.cfg.weak_exogeneity_level}; nothing dropped"
            )
        if len(self.keep) < 2:
            self.halt("weak_exogeneity", f"only {self.keep} left after dropping weakly exogenous series; restricted system skipped")

    def restricted(self):
        cfg = self.cfg
        sub = self.d.select(self.keep)
        sel = select_lag_order(sub, cfg.max_lag)
        self.report.tables["appendix_a4_lagselect_restricted"] = _lag_table(sel)
        self.report.decisions.append(_lag_decision(sel, "restricted lag selection"))
        jo = johansen_test(sub, sel.recommended, cfg.johansen_case, cfg.significance)
        self.report.tables["appendix_a5_johansen_restricted"] = _johansen_table(jo)
        r = jo.decided_rank
        if r == 0 or r == sub.k:
            why = "no cointegration" if r == 0 else "the system is stationary"
            self.halt("restricted", f"restricted rank {r}: {why}; restricted VECM skipped")
        self.report.decisions.append(f"restricted cointegrating rank {r} (trace test, {cfg.significance})")
        chain = restrict_to_subset(self.d, self.keep, cfg.max_lag, cfg.johansen_case, sel.recommended, r)
        self.sub = sub
        self.restricted_sel = sel
        self.rmodel = chain.model
        self.report.tables["table06_vecm_restricted"] = Table(_COEF_COLUMNS, _own_ect_rows(self.rmodel))
        self.report.tables["appendix_a3_vecm_restricted_full"] = Table(
            _COEF_COLUMNS, _coef_rows(self.rmodel, False)
        )
        rows = []
        for i, vec in enumerate(normalize_long_run(self.rmodel)):
            eq = vec.equation()
            for name, c in vec.coefficients.items():
                rows.append([i + 1, vec.normalization_variable, name, c, eq])
        self.report.tables["table07_longrun"] = Table(
            ["vector", "normalized_on", "variable", "coefficient", "equation"], rows
        )

    def granger(self):
        cfg = self.cfg
        pair = list(cfg.granger_pair) or self.keep[:2]
        for name in pair:
            if name not in self.d:
                raise ConfigError(f"granger_pair variable {name!r} not in data")
        lag = cfg.granger_lag or self.restricted_sel.recommended
        data = self.d.difference() if cfg.granger_form == "difference" else self.d
        rows = []
        for cause, effect in ((pair[0], pair[1]), (pair[1], pair[0])):
            g = granger_test(data, cause, effect, lag)
            rows.append([cause, effect, lag, cfg.granger_form, g.statistic, g.df[0], g.df[1], g.p_value,
                         g.p_value < _LEVELS[cfg.significance]])
        self.report.tables["table08_granger"] = Table(
            ["cause", "effect", "lag", "form", "F", "df1", "df2", "p_value", "reject"], rows
        )
        causes = [f"{r[0]}->{r[1]}" for r in rows if r[-1]]
        if len(causes) == 1:
            self.report.decisions.append(f"Granger causality ({cfg.significance}): unidirectional {causes[0]}")
        elif causes:
            self.report.decisions.append(f"Granger causality ({cfg.significance}): bidirectional between {pair[0]} and {pair[1]}")
        else:
            self.report.decisions.append(f"Granger causality ({cfg.significance}): none between {pair[0]} and {pair[1]}")

    def diagnostics(self):
        cfg = self.cfg
        rows = []
        notes = []
        for label, model in (("unrestricted", self.model), ("restricted", self.rmodel)):
            rep = diagnose(model, cfg.portmanteau_lags, cfg.arch_lags)
            rows += _diag_rows(label, rep)
            if label == "restricted":
                alpha = _LEVELS[cfg.significance]
                for name, stat in (("portmanteau", rep.portmanteau), ("Jarque-Bera", rep.jarque_bera), ("ARCH", rep.arch)):
                    notes.append(f"{name} {'reject' if stat.p_value < alpha else 'accept'}")
        self.report.tables["table09_diagnostics"] = Table(
            ["model", "test", "statistic", "df", "p_value", "lags"], rows
        )
        self.report.decisions.append(f"restricted-model diagnostics ({cfg.significance}): " + ", ".join(notes))

    def irf(self):
        cfg = self.cfg
        ordering = list(cfg.ordering) or None
        if cfg.bootstrap_replications:
            res = bootstrap_bands(
                self.rmodel, cfg.horizon, ordering, cfg.bootstrap_replications, cfg.seed,
                cfg.bootstrap_level, cfg.workers,
            )
            meta = res.metadata
            self.report.decisions.append(
                f"IRF bands: {meta['interval']} bootstrap, {meta['replications']} replications, "
                f"{meta['failed_replications']} failed"
            )
        else:
            res = irf(self.rmodel, cfg.horizon, ordering)
        self.irf_result = res
        self.report.tables["irf"] = Table(
            ["horizon", "shock", "responder", "value", "lower", "upper"], [list(r) for r in res.long_rows()]
        )

    def fevd(self):
        fe = fevd_from_irf(self.irf_result)
        rows = []
        for i, name in enumerate(fe.ordering):
            for h in fe.horizons:
                rows.append([name, int(h)] + [float(v) for v in fe.shares[h - 1, i]])
        self.report.tables["table10_fevd"] = Table(["variable", "period"] + list(fe.ordering), rows)


def run_pipeline(config: PipelineConfig, data: Optional[Dataset] = None, raise_on_failure: bool = False) -> StudyReport:
    """
    Run every stage and return the report.

    ``data`` overrides ``config.data``. On a stage failure the report
    carries ``failure = {"stage", "message"}``; with ``raise_on_failure``
    the StageError is re-raised instead.
    """
    runner = _Runner(config, data)
    try:
        for name in STAGES:
            runner.stage(name, getattr(runner, name))
    except _Halt:
        pass
    except StageError:
        if raise_on_failure:
            raise
    return runner.report
