"""Estimator registry and the compute / sweep / converge / bench drivers behind the CLI."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .chatterjee import TIE_CORRECTED, chatterjee_xi, chatterjee_xi_large
from .core import PairedSample, UnitSquareSample, empirical_pit
from .epsresid import zeta_hat, zeta_limit
from .localdelta import adjacent_l1, local_delta_mean
from .moment import (cond_mean_binned, cond_mean_knn, default_bins, default_k, l2_report,
                     r_squared_ols)
from .oracle import xi_bruteforce, zeta_bruteforce
from .synth import GeneratorSpec, gen, normal_cdf, replicate_seed

ESTIMATORS = ("adjacent_l1", "local_delta", "zeta_eps", "zeta_limit", "xi", "xi_large",
              "eta2_knn", "eta2_binned", "r2")
BENCH_ESTIMATORS = ESTIMATORS + ("xi_bruteforce", "zeta_bruteforce")
# estimators whose sweep value is a ξ-type coefficient computed on the copula scale
RANK_ESTIMATORS = ("xi", "xi_large", "zeta_eps", "zeta_limit")


class ConfigError(ValueError):
    """Bad command-line or experiment configuration."""


@dataclass
class EstimatorReport:
    estimator: str
    value: float
    params: dict
    n: int
    seed: int | None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"estimator": self.estimator, "value": self.value, "params": self.params,
                "n": self.n, "seed": self.seed, "warnings": self.warnings}


@dataclass
class Params:
    eps: list[float] = field(default_factory=lambda: [0.05])
    delta: list[float] = field(default_factory=list)
    k: int | None = None
    bins: int | None = None
    force_quadratic: bool = False


def _paired(sample) -> PairedSample:
    return sample.to_paired() if isinstance(sample, UnitSquareSample) else sample


def run_estimator(name: str, sample, params: Params, seed: int | None) -> list[EstimatorReport]:
    """Evaluate one estimator; parameter lists (ε, δ) expand into one report each.

    Rank-scale estimators (ζ) run on the empirical PIT of the sample; the
    moment estimators and R² run on the raw values.
    """
    s = _paired(sample)
    n = s.n

    def report(value, prm=None, warnings=None):
        return EstimatorReport(name, value, prm or {}, n, seed, warnings or [])

    if name == "adjacent_l1":
        return [report(adjacent_l1(s, seed), {"tie_seed": seed})]
    if name == "local_delta":
        if not params.delta:
            raise ValueError("local_delta needs at least one δ (--delta)")
        return [report(local_delta_mean(s, d), {"delta": d}) for d in params.delta]
    if name in ("zeta_eps", "zeta_limit"):
        pit = empirical_pit(s)
        if name == "zeta_limit":
            estimates = [(zeta_limit(pit), {"epsilon": "limit"})]
        else:
            if not params.eps:
                raise ValueError("zeta_eps needs at least one ε (--eps)")
            estimates = [(zeta_hat(pit, e), {"epsilon": e}) for e in params.eps]
        out = []
        for est, prm in estimates:
            warnings = []
            if est.n_used < n:
                warnings.append(f"{n - est.n_used} points had empty neighbourhoods and were skipped")
            out.append(report(est.zeta, {**prm, "xi": est.xi}, warnings))
        return out
    if name in ("xi", "xi_large"):
        fn = chatterjee_xi if name == "xi" else chatterjee_xi_large
        rep = fn(s, seed)
        warnings = ["ties in y: tie-corrected denominator"] if rep.denominator_form == TIE_CORRECTED else []
        return [report(rep.xi, {"tie_seed": seed, "denominator_form": rep.denominator_form,
                                "numerator": rep.numerator}, warnings)]
    if name == "eta2_knn":
        k = params.k if params.k is not None else default_k(n)
        rep = l2_report(s, cond_mean_knn(s, k))
        return [report(rep.eta2, {"k": k, **asdict(rep)})]
    if name == "eta2_binned":
        b = params.bins if params.bins is not None else default_bins(n)
        rep = l2_report(s, cond_mean_binned(s, b))
        return [report(rep.eta2, {"bins": b, **asdict(rep)})]
    if name == "r2":
        return [report(r_squared_ols(s))]
    if name == "xi_bruteforce":
        return [report(xi_bruteforce(s, seed, force=params.force_quadratic), {"tie_seed": seed})]
    if name == "zeta_bruteforce":
        pit = empirical_pit(s)
        return [report(zeta_bruteforce(pit, e, force=params.force_quadratic), {"epsilon": e})
                for e in params.eps]
    raise ConfigError(f"unknown estimator {name!r}")


def compute(sample, estimators: Sequence[str], params: Params, seed: int | None) -> list[EstimatorReport]:
    if not estimators:
        raise ConfigError("at least one estimator is required")
    reports = []
    for name in estimators:
        reports.extend(run_estimator(name, sample, params, seed))
    return reports


# --- tables --------------------------------------------------------------------------------

@dataclass
class SweepTable:
    columns: list[str]
    rows: list[dict]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: format_cell(row.get(k)) for k in self.columns})
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        reader = csv.DictReader(io.StringIO(text))
        rows = [{k: parse_cell(v) for k, v in row.items()} for row in reader]
        return cls(list(reader.fieldnames or []), rows)

    def to_dict(self) -> dict:
        return {"columns": self.columns, "rows": self.rows}


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def parse_cell(text: str):
    if text == "":
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _summarise(values: list[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    mean = math.fsum(values) / len(values)
    if len(values) < 2:
        return mean, None
    sd = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1))
    return mean, sd


def _run_grid(tasks: list[tuple[int, Callable[[], float]]], n_rows: int, workers: int):
    """Evaluate (row, thunk) tasks; results are regrouped by row in submission order."""
    def safe(thunk):
        try:
            return thunk(), None
        except Exception as exc:  # a failing replicate marks its row, it never aborts the run
            return None, f"{type(exc).__name__}: {exc}"

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda t: safe(t[1]), tasks))
    else:
        outcomes = [safe(t[1]) for t in tasks]
    grouped: list[list] = [[] for _ in range(n_rows)]
    for (row, _), outcome in zip(tasks, outcomes):
        grouped[row].append(outcome)
    return grouped


def _finish_rows(rows: list[dict], grouped) -> None:
    for row, outcomes in zip(rows, grouped):
        errors = [e for _, e in outcomes if e is not None]
        if errors:
            row.update(mean=None, sd=None, status="failed", error=errors[0])
        else:
            row["mean"], row["sd"] = _summarise([v for v, _ in outcomes])
            row.update(status="ok", error=None)
        ref = row.get("reference")
        row["deviation"] = None if (ref is None or row["mean"] is None) else row["mean"] - ref


SWEEP_COLUMNS = ["estimator", "rho", "n", "reps", "mean", "sd", "reference", "deviation",
                 "status", "error"]


def sweep_value(name: str, rho: float, n: int, seed: int, params: Params) -> float:
    """One replicate of the ρ-sweep.

    A bivariate normal pair is drawn from ``seed``; its Φ-transform is the
    Gaussian copula sample. ξ-type estimators use the copula (ζ estimators
    report their ξ = 1 - 4ζ), moment estimators use the Gaussian pair.
    """
    pair = gen(GeneratorSpec("bivariate_normal", n, seed, rho))
    if name in RANK_ESTIMATORS:
        copula = UnitSquareSample(normal_cdf(pair.xs), normal_cdf(pair.ys))
        rep = run_estimator(name, copula, params, seed)[0]
        return rep.params["xi"] if name.startswith("zeta") else rep.value
    return run_estimator(name, pair, params, seed)[0].value


def sweep(rho_grid: Sequence[float], n: int, reps: int, seed: int, estimators: Sequence[str],
          params: Params, workers: int = 1) -> SweepTable:
    if not rho_grid:
        raise ConfigError("ρ grid must not be empty")
    if reps < 1:
        raise ConfigError("replicates must be at least 1")
    for rho in rho_grid:
        try:
            GeneratorSpec("bivariate_normal", n, seed, rho)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    rows, tasks = [], []
    for name in estimators:
        for rho in rho_grid:
            row_id = len(rows)
            rows.append({"estimator": name, "rho": rho, "n": n, "reps": reps, "reference": rho * rho})
            for r in range(reps):
                sub = replicate_seed(seed, r)
                tasks.append((row_id, lambda name=name, rho=rho, sub=sub:
                              sweep_value(name, rho, n, sub, params)))
    _finish_rows(rows, _run_grid(tasks, len(rows), workers))
    return SweepTable(SWEEP_COLUMNS, rows)


CONVERGE_COLUMNS = ["estimator", "family", "f", "epsilon", "n", "reps", "mean", "sd", "reference",
                    "deviation", "status", "error"]
_REFERENCE_ZETA = {"functional": 0.0, "independent": 0.25}


def _zeta_value(spec: GeneratorSpec, epsilon) -> float:
    pit = empirical_pit(_paired(gen(spec)))
    return (zeta_limit(pit) if epsilon == "limit" else zeta_hat(pit, epsilon)).zeta


def converge(spec: GeneratorSpec, eps_grid: Sequence[float], n_grid: Sequence[int], reps: int,
             workers: int = 1) -> SweepTable:
    """ζₙ(ε) across ``eps_grid`` at ``spec.n`` and the rank-adjacent ζₙ across ``n_grid``."""
    if not eps_grid and not n_grid:
        raise ConfigError("converge needs a non-empty ε grid or n grid")
    if reps < 1:
        raise ConfigError("replicates must be at least 1")
    reference = _REFERENCE_ZETA.get(spec.family)
    f = spec.f if spec.family == "functional" else None
    settings = [("zeta_eps", e, spec.n) for e in eps_grid] + [("zeta_limit", "limit", m) for m in n_grid]
    rows, tasks = [], []
    for name, eps, n in settings:
        if eps != "limit" and not eps > 0:
            raise ConfigError("ε must be positive")
        row_id = len(rows)
        rows.append({"estimator": name, "family": spec.family, "f": f, "epsilon": eps, "n": n,
                     "reps": reps, "reference": reference})
        base = GeneratorSpec(spec.family, n, spec.seed, spec.rho, spec.f)
        for r in range(reps):
            tasks.append((row_id, lambda s=base.replicate(r), e=eps: _zeta_value(s, e)))
    _finish_rows(rows, _run_grid(tasks, len(rows), workers))
    return SweepTable(CONVERGE_COLUMNS, rows)


# --- benchmarking --------------------------------------------------------------------------

BENCH_COLUMNS = ["estimator", "n", "seconds", "value", "status", "error"]
SCALING_LIMIT = 15.0


def time_call(fn: Callable[[], Any], repeat: int = 3) -> tuple[float, Any]:
    """Best wall time of ``repeat`` calls, plus the last result."""
    best, result = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench(n_grid: Sequence[int], estimators: Sequence[str], seed: int, params: Params,
          repeat: int = 3) -> tuple[SweepTable, list[dict]]:
    """Time each estimator on independent uniform data at each n.

    Returns the timing table and, for every estimator timed at both n and
    10·n, a scaling check ``time(10n) / time(n) <= 15``.
    """
    if not n_grid:
        raise ConfigError("n grid must not be empty")
    for name in estimators:
        if name not in BENCH_ESTIMATORS:
            raise ConfigError(f"unknown estimator {name!r}")
    rows = []
    for n in n_grid:
        sample = gen(GeneratorSpec("independent", n, seed)).to_paired()
        for name in estimators:
            row = {"estimator": name, "n": n}
            try:
                seconds, reps = time_call(lambda: run_estimator(name, sample, params, seed), repeat)
                row.update(seconds=seconds, value=reps[0].value, status="ok", error=None)
            except Exception as exc:
                row.update(seconds=None, value=None, status="refused", error=str(exc))
            rows.append(row)
    checks = []
    timings = {(r["estimator"], r["n"]): r["seconds"] for r in rows if r["seconds"]}
    for (name, n), t in timings.items():
        t10 = timings.get((name, 10 * n))
        if t10 is not None:
            ratio = t10 / t
            checks.append({"estimator": name, "n": n, "n_large": 10 * n, "ratio": ratio,
                           "limit": SCALING_LIMIT, "passed": ratio <= SCALING_LIMIT})
    return SweepTable(BENCH_COLUMNS, rows), checks


def document(config: dict, results: list[dict], **extra) -> dict:
    """Top-level JSON output document."""
    doc = {"config": config, "results": results, "version": __version__}
    doc.update(extra)
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


__all__ = ["ESTIMATORS", "EstimatorReport", "Params", "SweepTable", "ConfigError", "compute",
           "sweep", "converge", "bench", "run_estimator"]
