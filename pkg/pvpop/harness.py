"""Seeded replication engine comparing p-values with posterior probabilities of the null.

Replication ``i`` of a scenario draws from stream ``i`` of the scenario seed,
so records do not depend on chunking or worker count.
"""

from __future__ import annotations

import logging
import math
import os
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from pvpop.binary import (
    BetaParams,
    OneArmBinomialData,
    TestReport,
    TwoArmBinomialData,
    is_degenerate,
    one_sample_report,
    two_sample_report,
)
from pvpop.config import ScenarioSpec
from pvpop.csvio import parse_float, read_csv, write_csv
from pvpop.errors import ConfigError, DomainError, InvariantViolation
from pvpop.kernels import DEFAULT_QUADRATURE_ORDER, Sampler, gauss_legendre
from pvpop.multivariate import MvnPrior, MvnSample, mvn_report, unit_contrasts
from pvpop.normal import NigParams, PairedNormalData, t_test_report
from pvpop.worker import BatchWorker

logger = logging.getLogger(__name__)

RECORD_COLUMNS = ("rep_index", "p_one", "p_two", "pop_one", "pop_two")
_NORMAL_FIELDS = ("theta", "nu", "theta_hat", "ssd", "statistic")

FAMILY_FIELDS: dict[str, tuple[str, ...]] = {
    "binary-two-sample": ("y_E", "y_S", "statistic", "degenerate"),
    "binary-one-sample": ("y_E",),
    "normal-jeffreys": _NORMAL_FIELDS,
    "normal-nig-vague": _NORMAL_FIELDS,
    "normal-nig-informative": _NORMAL_FIELDS,
    "normal-nonnormal": ("shift", "theta_hat", "ssd", "statistic"),
    "mvn": ("contrast", "statistic"),
}

DEFAULT_CHUNK_SIZE = 50


@dataclass(frozen=True)
class ReplicationRecord:
    """One (p-value, PoP) pair set plus the raw summary that produced it."""

    rep_index: int
    p_one: float
    p_two: float
    pop_one: float
    pop_two: float
    fields: dict = field(default_factory=dict)

    def pair(self, sided: str = "one") -> tuple[float, float]:
        if sided == "one":
            return self.p_one, self.pop_one
        if sided == "two":
            return self.p_two, self.pop_two
        raise DomainError(f"sided must be 'one' or 'two', got {sided!r}")

    def row(self, extra: Sequence[str]) -> list:
        return [self.rep_index, self.p_one, self.p_two, self.pop_one, self.pop_two] + [
            self.fields.get(name) for name in extra
        ]


@dataclass(frozen=True)
class SummaryStats:
    count: int
    max_abs_diff: float
    mean_abs_diff: float
    median_abs_diff: float
    pearson_r: float | None


# ---------------------------------------------------------------------------
# Per-family replication
# ---------------------------------------------------------------------------


def _record(index: int, report: TestReport, **fields) -> ReplicationRecord:
    return ReplicationRecord(
        rep_index=index,
        p_one=report.p_one,
        p_two=report.p_two,
        pop_one=report.pop_one,
        pop_two=report.pop_two,
        fields=fields,
    )


def _binary_two_sample(spec, sampler, index, order):
    params = spec.params
    data = TwoArmBinomialData(spec.n, int(sampler.integers(0, spec.n)), int(sampler.integers(0, spec.n)))
    priors = (BetaParams(*params["prior_E"]), BetaParams(*params["prior_S"]))
    raw = {"y_E": data.y_E, "y_S": data.y_S}
    report = _guarded(index, raw, lambda: two_sample_report(data, priors, gauss_legendre(order)))
    return [
        _record(index, report, **raw, statistic=report.statistic, degenerate=is_degenerate(data))
    ]


def _binary_one_sample(spec, sampler, index, order):
    params = spec.params
    data = OneArmBinomialData(spec.n, int(sampler.integers(0, spec.n)), params["p0"])
    raw = {"y_E": data.y_E}
    report = _guarded(
        index,
        raw,
        lambda: one_sample_report(data, BetaParams(*params["prior"]), params["binomial_two_sided"]),
    )
    return [_record(index, report, **raw)]


def _normal(spec, sampler, index, order):
    params = spec.params
    theta = float(sampler.normal(params["theta_mean"], math.sqrt(params["theta_var"])))
    nu = float(sampler.truncated_normal(params["nu_mean"], math.sqrt(params["nu_var"]), 0.0))
    data = PairedNormalData.from_values(sampler.normal(theta, math.sqrt(nu), spec.n))
    if spec.family == "normal-jeffreys":
        prior = "jeffreys"
    elif spec.family == "normal-nig-vague":
        prior = NigParams(params["theta0"], params["nu0"], params["alpha"], params["beta"])
    else:
        prior = NigParams(
            theta + params["theta0_offset"], params["nu0"], params["alpha"], params["beta"]
        )
    raw = {"theta": theta, "nu": nu, "theta_hat": data.theta_hat, "ssd": data.ssd}
    report = _guarded(index, raw, lambda: t_test_report(data, prior))
    return [_record(index, report, **raw, statistic=report.statistic)]


def _nonnormal_draws(params: dict, sampler: Sampler, n: int) -> tuple[np.ndarray, float]:
    """Raw draws and the mean of their distribution."""
    distribution = params["distribution"]
    if distribution == "gamma":
        shape = params["gamma_shape"]
        if params["gamma_convention"] == "shape-scale":
            scale = params["gamma_param"]
        else:
            scale = 1.0 / params["gamma_param"]
        return sampler.gamma(shape, scale, n), shape * scale
    if distribution == "beta":
        a, b = params["beta_a"], params["beta_b"]
        return sampler.beta(a, b, n), a / (a + b)
    means = np.asarray(params["mixture_means"], dtype=float)
    component = sampler.integers(0, means.size - 1, n)
    draws = means[component] + math.sqrt(params["mixture_var"]) * sampler.normal(0.0, 1.0, n)
    return draws, float(means.mean())


def _normal_nonnormal(spec, sampler, index, order):
    params = spec.params
    draws, mean = _nonnormal_draws(params, sampler, spec.n)
    shift = float(sampler.uniform(params["recenter_low"], params["recenter_high"]))
    data = PairedNormalData.from_values(draws - (mean + shift))
    raw = {"shift": shift, "theta_hat": data.theta_hat, "ssd": data.ssd}
    report = _guarded(index, raw, lambda: t_test_report(data, "jeffreys"))
    return [_record(index, report, **raw, statistic=report.statistic)]


def _mvn(spec, sampler, index, order):
    params = spec.params
    sigma = np.asarray(params["sigma"], dtype=float)
    dim = sigma.shape[0]
    mu = sampler.normal(0.0, math.sqrt(params["mu_var"]), dim)
    sample = MvnSample.from_draws(sampler.multivariate_normal(mu, sigma, spec.n), sigma)
    contrasts = unit_contrasts(dim, params["n_contrasts"])
    prior = MvnPrior.vague(dim, params["prior_scale"])
    raw = {"xbar": sample.xbar.tolist()}
    reports = _guarded(index, raw, lambda: mvn_report(sample, contrasts, prior))
    return [
        _record(index, report, contrast=k, statistic=report.statistic)
        for k, report in enumerate(reports)
    ]


_GENERATORS: dict[str, Callable] = {
    "binary-two-sample": _binary_two_sample,
    "binary-one-sample": _binary_one_sample,
    "normal-jeffreys": _normal,
    "normal-nig-vague": _normal,
    "normal-nig-informative": _normal,
    "normal-nonnormal": _normal_nonnormal,
    "mvn": _mvn,
}


def _guarded(index: int, raw: dict, evaluate: Callable):
    try:
        return evaluate()
    except InvariantViolation as exc:
        raise InvariantViolation(f"replication {index} with data {raw}: {exc}") from exc


def _check_record(record: ReplicationRecord) -> None:
    for name in ("p_one", "p_two", "pop_one", "pop_two"):
        value = getattr(record, name)
        if not (math.isfinite(value) and 0.0 <= value <= 1.0):
            raise InvariantViolation(
                f"replication {record.rep_index}: {name} = {value!r} outside [0, 1] "
                f"(data {record.fields})"
            )


def _run_chunk(task) -> list[ReplicationRecord]:
    spec, start, stop, order = task
    generate = _GENERATORS[spec.family]
    records: list[ReplicationRecord] = []
    for index in range(start, stop):
        sampler = Sampler(spec.seed, index)
        records.extend(generate(spec, sampler, index, order))
    return records


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


def run_scenario(
    spec: ScenarioSpec,
    *,
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER,
    n_workers: int | None = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    progress_callback: Callable[[int, int], None] | None = None,
    cancel_check: Callable[[], bool] | None = None,
) -> list[ReplicationRecord]:
    """Run every replication of ``spec`` and return records in replication order."""
    if chunk_size < 1:
        raise ConfigError(f"chunk_size must be >= 1, got {chunk_size!r}")
    logger.info(
        "scenario %s: n=%d reps=%d seed=%d", spec.family, spec.n, spec.reps, spec.seed
    )
    tasks = [
        (spec, start, min(start + chunk_size, spec.reps), quadrature_order)
        for start in range(0, spec.reps, chunk_size)
    ]
    worker = BatchWorker(_run_chunk, tasks, n_workers)
    try:
        chunks = worker.run(progress_callback=progress_callback, cancel_check=cancel_check)
        records = [record for chunk in chunks for record in chunk]
        for record in records:
            _check_record(record)
    except InvariantViolation as exc:
        logger.error("invariant violated in scenario %s: %s", spec.family, exc)
        raise
    logger.info("scenario %s finished: %d records", spec.family, len(records))
    return records


def sweep(
    spec: ScenarioSpec, name: str, values: Sequence, **run_kwargs
) -> list[tuple[object, list[ReplicationRecord]]]:
    """Run ``spec`` once per value of a top-level field or family parameter.

    The seed is shared, so every sweep point sees the same random streams.
    """
    results = []
    for value in values:
        if name in ("n", "reps"):
            point = spec.replace(**{name: value})
        elif name in spec.params:
            point = spec.replace(params={name: value})
        else:
            raise ConfigError(f"cannot sweep unknown field {name!r} for {spec.family}")
        results.append((value, run_scenario(point, **run_kwargs)))
    return results


def is_nonincreasing(values: Sequence[float], tol: float = 0.0) -> bool:
    return all(later <= earlier + tol for earlier, later in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------


def summarize(records: Sequence[ReplicationRecord], sided: str = "one") -> SummaryStats:
    """Agreement between p-values and PoPs; independent of record order."""
    if not records:
        raise DomainError("cannot summarise an empty record list")
    pairs = sorted(record.pair(sided) for record in records)
    p = np.array([a for a, _ in pairs])
    pop = np.array([b for _, b in pairs])
    diffs = np.sort(np.abs(pop - p))
    count = len(diffs)
    mean_diff = math.fsum(diffs) / count
    median_diff = float(np.median(diffs))

    mean_p = math.fsum(p) / count
    mean_pop = math.fsum(pop) / count
    dp = p - mean_p
    dpop = pop - mean_pop
    sxx = math.fsum(dp * dp)
    syy = math.fsum(dpop * dpop)
    if sxx > 0.0 and syy > 0.0:
        r = math.fsum(dp * dpop) / math.sqrt(sxx * syy)
        pearson_r = max(-1.0, min(1.0, r))
    else:
        pearson_r = None
    return SummaryStats(
        count=count,
        max_abs_diff=float(diffs[-1]),
        mean_abs_diff=mean_diff,
        median_abs_diff=median_diff,
        pearson_r=pearson_r,
    )


def summarize_scenario(
    family: str, records: Sequence[ReplicationRecord]
) -> dict[str, SummaryStats]:
    """One- and two-sided summaries, split per contrast for the mvn family."""
    groups: dict[str, list[ReplicationRecord]] = {}
    if family == "mvn":
        for record in records:
            groups.setdefault(f"contrast={int(record.fields['contrast'])}", []).append(record)
    else:
        groups["all"] = list(records)
    out = {}
    for label, group in groups.items():
        for sided in ("one", "two"):
            out[f"{sided}:{label}"] = summarize(group, sided)
    return out


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

STATS_COLUMNS = (
    "group",
    "count",
    "max_abs_diff",
    "mean_abs_diff",
    "median_abs_diff",
    "pearson_r",
)


def emit_csv(records: Sequence[ReplicationRecord], path: str | os.PathLike, family: str) -> None:
    """Records in replication order: RECORD_COLUMNS then the family's fields."""
    if family not in FAMILY_FIELDS:
        raise ConfigError(f"unknown family {family!r}")
    extra = FAMILY_FIELDS[family]
    write_csv(path, RECORD_COLUMNS + extra, (record.row(extra) for record in records))


def emit_stats_csv(stats: dict[str, SummaryStats], path: str | os.PathLike) -> None:
    rows = (
        [label, s.count, s.max_abs_diff, s.mean_abs_diff, s.median_abs_diff, s.pearson_r]
        for label, s in stats.items()
    )
    write_csv(path, STATS_COLUMNS, rows)


def read_records_csv(path: str | os.PathLike) -> list[ReplicationRecord]:
    """Parse a file written by :func:`emit_csv`. Extra columns are read as floats when numeric."""
    records = []
    for line, row in read_csv(path, RECORD_COLUMNS):
        values = {
            name: parse_float(row[name], line=line, column=name, path=path)
            for name in RECORD_COLUMNS
        }
        index = values["rep_index"]
        if index != int(index):
            raise ConfigError(f"{path}: line {line}: rep_index must be an integer")
        extra = {}
        for name, text in row.items():
            if name in RECORD_COLUMNS:
                continue
            try:
                extra[name] = float(text) if text != "" else None
            except ValueError:
                extra[name] = text
        records.append(
            ReplicationRecord(
                rep_index=int(index),
                p_one=values["p_one"],
                p_two=values["p_two"],
                pop_one=values["pop_one"],
                pop_two=values["pop_two"],
                fields=extra,
            )
        )
    return records
