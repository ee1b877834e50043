"""Command-line interface: ``pvpop {test,oc,samplesize,simulate,plot}``."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import re
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from pvpop import __version__
from pvpop.binary import (
    BetaParams,
    OneArmBinomialData,
    TestReport,
    TwoArmBinomialData,
    bayes_clt_pop_one,
    one_sample_report,
    two_sample_report,
)
from pvpop.config import (
    BINOMIAL_TWO_SIDED,
    DEFAULT_ALPHA,
    DEFAULT_SEED,
    FAMILIES,
    RunConfig,
    ScenarioSpec,
    load_scenario_file,
    parse_override,
)
from pvpop.csvio import to_csv_text, write_csv
from pvpop.design import (
    DEFAULT_ETA_STEP,
    RULES,
    DesignSpec,
    calibrate_eta,
    exact_error_rates,
    oc_table,
    sample_size,
)
from pvpop.errors import EXIT_OK, EXIT_USAGE, ConfigError, PvpopError, exit_code_for
from pvpop.harness import emit_csv, emit_stats_csv, run_scenario, summarize_scenario
from pvpop.kernels import DEFAULT_QUADRATURE_ORDER, gauss_legendre
from pvpop.metadata import build_metadata, format_metadata_block, reproduce_command, write_sidecar
from pvpop.multivariate import ContrastSet, MvnPrior, MvnSample, iut_rejects, mvn_report, unit_contrasts
from pvpop.normal import NigParams, PairedNormalData, known_var_report, t_test_report
from pvpop.plot import load_pairs, max_vertical_deviation, render_scatter_svg, write_svg

logger = logging.getLogger(__name__)

REPORT_FIELDS = ("statistic", "p_one", "p_two", "pop_one", "pop_two")
NU0_NOTE = (
    "nu0 is the prior precision multiplier; implied prior variance of theta is proportional to 1/nu0"
)
RECENTER_NOTE = "draws are shifted by -(distribution mean + U), U ~ Uniform(recenter_low, recenter_high)"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the documented usage code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text!r}")
    return value


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (math.isfinite(value) and value > 0.0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _require(condition: bool, flag: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{flag}: {message}")


def _parse_matrix(text: str, flag: str) -> list[list[float]]:
    """Rows separated by ';', entries by ',' or whitespace."""
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            rows.append([float(v) for v in re.split(r"[,\s]+", chunk) if v])
        except ValueError:
            raise ConfigError(f"{flag}: cannot parse matrix row {chunk!r}") from None
    _require(bool(rows), flag, "matrix is empty")
    return rows


def _read_matrix_file(path: str, flag: str) -> list[list[float]]:
    """Row-major CSV matrix; blank lines are skipped."""
    rows = []
    try:
        with open(path, encoding="utf-8", newline="") as f:
            for line_number, fields in enumerate(csv.reader(f), start=1):
                fields = [v.strip() for v in fields if v.strip()]
                if not fields:
                    continue
                try:
                    rows.append([float(v) for v in fields])
                except ValueError:
                    raise ConfigError(f"{flag}: {path}: line {line_number}: non-numeric entry") from None
    except OSError as exc:
        raise ConfigError(f"{flag}: cannot read {path}: {exc}") from exc
    _require(bool(rows), flag, f"{path} contains no rows")
    return rows


def _read_values_file(path: str, flag: str) -> list[float]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{flag}: cannot read {path}: {exc}") from exc
    values = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        for token in re.split(r"[,\s]+", line.strip()):
            if not token:
                continue
            try:
                values.append(float(token))
            except ValueError:
                raise ConfigError(f"{flag}: {path}: line {line_number}: not a number: {token!r}") from None
    return values


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _fmt6(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _print_table(header: Sequence[str], rows: list[Sequence], out) -> None:
    """Human-readable lines at 6 significant digits followed by a full-precision CSV block."""
    for row in rows:
        out.write("  ".join(f"{name}={_fmt6(v)}" for name, v in zip(header, row)) + "\n")
    out.write("\n")
    out.write(to_csv_text(header, rows).replace("\r\n", "\n"))


def _report_row(report: TestReport, **extra) -> tuple[list[str], list]:
    header = list(extra) + list(REPORT_FIELDS)
    row = list(extra.values()) + [getattr(report, name) for name in REPORT_FIELDS]
    return header, row


def _emit_metadata(meta: dict, out) -> None:
    out.write("\n")
    out.write(format_metadata_block(meta))


def _run_config(args, **conventions) -> RunConfig:
    return RunConfig(
        seed=args.seed,
        alpha=args.alpha,
        quadrature_order=args.quadrature_order,
        n_workers=args.workers,
        conventions=conventions,
    )


def _options(args, *names: str) -> dict:
    return {name: getattr(args, name) for name in names}


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_test(args, out) -> int:
    kind = args.kind
    conventions: dict = {}
    if kind == "binary2":
        _require(args.n >= 1, "--n", "must be at least 1")
        _require(args.ye <= args.n, "--ye", f"must not exceed --n ({args.n})")
        _require(args.ys <= args.n, "--ys", f"must not exceed --n ({args.n})")
        data = TwoArmBinomialData(args.n, args.ye, args.ys)
        priors = (BetaParams(*args.prior_e), BetaParams(*args.prior_s))
        report = two_sample_report(data, priors, gauss_legendre(args.quadrature_order))
        header, row = _report_row(report)
        header.append("pop_one_normal_approx")
        row.append(bayes_clt_pop_one(data))
        rows = [row]
        options = _options(args, "n", "ye", "ys", "prior_e", "prior_s", "quadrature_order")
    elif kind == "binary1":
        _require(args.ye <= args.n, "--ye", f"must not exceed --n ({args.n})")
        data = OneArmBinomialData(args.n, args.ye, args.p0)
        report = one_sample_report(data, BetaParams(*args.prior), args.two_sided)
        header, row = _report_row(report)
        rows = [row]
        conventions["binomial_two_sided"] = args.two_sided
        options = _options(args, "n", "ye", "p0", "prior", "two_sided")
    elif kind == "normal-known":
        _require(args.n >= 1, "--n", "must be at least 1")
        report = known_var_report(args.theta_hat, args.n)
        header, row = _report_row(report)
        rows = [row]
        conventions["difference_variance"] = 2.0
        options = _options(args, "theta_hat", "n")
    elif kind == "normal-t":
        data = _normal_data(args)
        if args.prior == "nig":
            prior = NigParams(*args.nig)
            options = _options(args, "values", "values_file", "n", "theta_hat", "ssd", "prior", "nig")
        else:
            prior = "jeffreys"
            options = _options(args, "values", "values_file", "n", "theta_hat", "ssd", "prior")
        report = t_test_report(data, prior)
        header, row = _report_row(report)
        rows = [row]
    elif kind == "mvn":
        sample, contrasts = _mvn_inputs(args)
        reports = mvn_report(sample, contrasts, MvnPrior.vague(sample.dim, args.prior_scale))
        rows = []
        for k, report in enumerate(reports):
            header, row = _report_row(report, contrast=k)
            rows.append(row)
        freq_one, bayes_one = iut_rejects(reports, args.alpha, "one")
        freq_two, bayes_two = iut_rejects(reports, args.alpha, "two")
        out.write(
            f"iut_one_sided: frequentist={_fmt6(freq_one)} bayesian={_fmt6(bayes_one)}\n"
            f"iut_two_sided: frequentist={_fmt6(freq_two)} bayesian={_fmt6(bayes_two)}\n"
        )
        options = _options(
            args, "n", "xbar", "sigma", "sigma_file", "contrasts", "n_contrasts", "prior_scale", "alpha"
        )
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown test kind {kind!r}")

    _print_table(header, rows, out)
    if args.csv:
        write_csv(args.csv, header, rows)
    run_config = _run_config(args, **conventions)
    options["seed"] = args.seed
    command = reproduce_command(["test", kind], options)
    meta = build_metadata(run_config, command, {"test": kind})
    if args.csv:
        write_sidecar(args.csv, meta)
    _emit_metadata(meta, out)
    return EXIT_OK


def _normal_data(args) -> PairedNormalData:
    if args.values is not None or args.values_file is not None:
        _require(
            args.values is None or args.values_file is None,
            "--values",
            "give either --values or --values-file, not both",
        )
        values = args.values if args.values is not None else _read_values_file(args.values_file, "--values-file")
        _require(len(values) >= 2, "--values", "at least two differences are required")
        return PairedNormalData.from_values(values)
    _require(
        args.n is not None and args.theta_hat is not None and args.ssd is not None,
        "--values",
        "give raw differences, or all of --n, --theta-hat and --ssd",
    )
    _require(args.n >= 2, "--n", "must be at least 2 for the t test")
    _require(args.ssd >= 0.0, "--ssd", "must be non-negative")
    return PairedNormalData.from_summary(args.n, args.theta_hat, args.ssd)


def _mvn_inputs(args) -> tuple[MvnSample, ContrastSet]:
    _require(args.n >= 1, "--n", "must be at least 1")
    _require(
        (args.sigma is None) != (args.sigma_file is None),
        "--sigma",
        "give exactly one of --sigma or --sigma-file",
    )
    if args.sigma is not None:
        sigma = _parse_matrix(args.sigma, "--sigma")
    else:
        sigma = _read_matrix_file(args.sigma_file, "--sigma-file")
    dim = len(sigma)
    _require(all(len(row) == dim for row in sigma), "--sigma", "matrix must be square")
    _require(len(args.xbar) == dim, "--xbar", f"must have {dim} entries to match sigma")
    sample = MvnSample(n=args.n, xbar=np.asarray(args.xbar), sigma=np.asarray(sigma))
    if args.contrasts is not None:
        rows = _parse_matrix(args.contrasts, "--contrasts")
        _require(all(len(row) == dim for row in rows), "--contrasts", f"each contrast needs {dim} entries")
        contrasts = ContrastSet(np.asarray(rows))
    else:
        k = args.n_contrasts if args.n_contrasts is not None else dim
        _require(1 <= k <= dim, "--n-contrasts", f"must lie in [1, {dim}]")
        contrasts = unit_contrasts(dim, k)
    return sample, contrasts


def _design_from_args(args) -> DesignSpec:
    _require(args.p_s < args.p_e, "--p-e", "must exceed --p-s")
    return DesignSpec(
        alpha=args.alpha,
        target_power=args.power,
        p_S=args.p_s,
        p_E_alt=args.p_e,
        n=args.n,
        priors=(BetaParams(*args.prior_e), BetaParams(*args.prior_s)),
        eta=args.eta,
        quadrature_order=args.quadrature_order,
    )


def cmd_oc(args, out) -> int:
    design = _design_from_args(args)
    rows = []
    for rule in RULES:
        rates = exact_error_rates(design, rule, args.workers)
        rows.append([rule, design.n, design.eta if rule == "bayesian" else None,
                     rates.type1, rates.type2, rates.power])
    header = ["rule", "n", "eta", "type1", "type2", "power"]
    extra: dict = {"design": {"alpha": design.alpha, "target_power": design.target_power,
                              "p_S": design.p_S, "p_E_alt": design.p_E_alt, "n": design.n,
                              "eta": design.eta}}
    if args.calibrate:
        calibration = calibrate_eta(design, step=args.eta_step, n_workers=args.workers)
        rows.append(["bayesian-calibrated", design.n, calibration.eta,
                     calibration.achieved_type1, None, None])
        extra["calibration"] = {"eta": calibration.eta, "achieved_type1": calibration.achieved_type1,
                                "target_type1": calibration.target_type1, "step": calibration.step}
    _print_table(header, rows, out)

    run_config = _run_config(args)
    options = _options(args, "alpha", "power", "p_s", "p_e", "n", "eta", "prior_e", "prior_s",
                       "quadrature_order", "grid", "calibrate", "eta_step")
    meta = build_metadata(run_config, reproduce_command(["oc"], options), extra)
    if args.out:
        table = oc_table(design, args.grid, args.workers)
        write_csv(args.out, ["p_E", "rule", "type1_or_power"],
                  ([r["p_E"], r["rule"], r["type1_or_power"]] for r in table))
        meta["grid"] = "user" if args.grid else "p_S to p_S + 2*delta in steps of 0.01 (tool default)"
        write_sidecar(args.out, meta)
    _emit_metadata(meta, out)
    return EXIT_OK


def cmd_samplesize(args, out) -> int:
    n = sample_size(args.alpha, args.power, args.p_s, args.p_e)
    out.write(f"n_per_arm={n}\n")
    options = _options(args, "alpha", "power", "p_s", "p_e")
    meta = build_metadata(_run_config(args), reproduce_command(["samplesize"], options))
    _emit_metadata(meta, out)
    return EXIT_OK


def _scenario_from_args(args) -> ScenarioSpec:
    if args.config:
        spec = load_scenario_file(args.config)
        mapping = spec.snapshot()
    else:
        _require(args.family is not None, "--family", "required without --config")
        _require(args.n is not None, "--n", "required without --config")
        mapping = {"family": args.family, "n": args.n, "reps": 1000, "seed": DEFAULT_SEED, "params": {}}
    for key in ("family", "n", "reps"):
        value = getattr(args, key)
        if value is not None:
            mapping[key] = value
    if args.seed_given:
        mapping["seed"] = args.seed
    for text in args.set or []:
        key, value = parse_override(text)
        mapping["params"][key] = value
    return ScenarioSpec.from_mapping(mapping)


def cmd_simulate(args, out) -> int:
    spec = _scenario_from_args(args)

    def _progress(current, total):
        logger.debug("chunk %d/%d done", current, total)

    records = run_scenario(
        spec,
        quadrature_order=args.quadrature_order,
        n_workers=args.workers,
        progress_callback=_progress,
    )
    stats = summarize_scenario(spec.family, records)
    header = ["group", "count", "max_abs_diff", "mean_abs_diff", "median_abs_diff", "pearson_r"]
    rows = [[label, s.count, s.max_abs_diff, s.mean_abs_diff, s.median_abs_diff, s.pearson_r]
            for label, s in stats.items()]
    _print_table(header, rows, out)

    conventions: dict = {}
    if spec.family == "binary-one-sample":
        conventions["binomial_two_sided"] = spec.params["binomial_two_sided"]
    if spec.family == "normal-nonnormal":
        conventions["gamma_convention"] = spec.params["gamma_convention"]
        conventions["recentering"] = RECENTER_NOTE
    if spec.family == "normal-nig-informative":
        conventions["nu0"] = NU0_NOTE
    if spec.family == "binary-two-sample":
        conventions["degenerate_z"] = "Z = 0 when both proportions equal 0 or 1 (flagged per record)"
    run_config = RunConfig(
        seed=spec.seed,
        alpha=args.alpha,
        quadrature_order=args.quadrature_order,
        n_workers=args.workers,
        conventions=conventions,
    )
    options = {"family": spec.family, "n": spec.n, "reps": spec.reps, "seed": spec.seed,
               "quadrature_order": args.quadrature_order}
    command = reproduce_command(["simulate"], options, spec.params)
    meta = build_metadata(run_config, command, {"scenario": spec.snapshot()})
    if args.out:
        emit_csv(records, args.out, spec.family)
        write_sidecar(args.out, meta)
    if args.stats_out:
        emit_stats_csv(stats, args.stats_out)
        write_sidecar(args.stats_out, meta)
    _emit_metadata(meta, out)
    return EXIT_OK


def cmd_plot(args, out) -> int:
    pairs = load_pairs(args.input, args.sided)
    label = "one-sided" if args.sided == "one" else "two-sided"
    svg = render_scatter_svg(
        pairs,
        x_label=f"{label} p-value",
        y_label=f"{label} posterior probability of H0",
        title=args.title,
    )
    write_svg(args.out, svg)
    out.write(f"markers={len(pairs)}  max_abs_diff={_fmt6(max_vertical_deviation(pairs))}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _SeedAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        namespace.seed_given = True


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_count, default=DEFAULT_SEED, action=_SeedAction,
                        help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--alpha", type=_probability, default=DEFAULT_ALPHA,
                        help=f"significance level (default {DEFAULT_ALPHA})")
    common.add_argument("--quadrature-order", type=_count, default=DEFAULT_QUADRATURE_ORDER,
                        help=f"Gauss-Legendre order for Beta integrals (default {DEFAULT_QUADRATURE_ORDER})")
    common.add_argument("--workers", type=_count, default=1,
                        help="worker processes; 0 uses every CPU (default 1)")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (-v info, -vv debug)")
    return common


def _design_flags(parser: argparse.ArgumentParser, with_design: bool = True) -> None:
    parser.add_argument("--power", type=_probability, default=0.8, help="target power (default 0.8)")
    parser.add_argument("--p-s", type=_probability, required=True, help="standard-arm response rate")
    parser.add_argument("--p-e", type=_probability, required=True, help="experimental-arm rate under H1")
    if not with_design:
        return
    parser.add_argument("--n", type=_count, help="per-arm size (default: sample-size formula)")
    parser.add_argument("--eta", type=_probability, help="posterior threshold (default 1 - alpha)")
    parser.add_argument("--prior-e", type=_positive, nargs=2, metavar=("A", "B"), default=[0.2, 0.8])
    parser.add_argument("--prior-s", type=_positive, nargs=2, metavar=("A", "B"), default=[0.2, 0.8])


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(
        prog="pvpop",
        description="p-values and posterior probabilities of the null, side by side",
    )
    parser.add_argument("--version", action="version", version=f"pvpop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    test = sub.add_parser("test", help="test a single dataset")
    kinds = test.add_subparsers(dest="kind", required=True, parser_class=_Parser)

    p = kinds.add_parser("binary2", parents=[common], help="two-sample binomial")
    p.add_argument("--n", type=_count, required=True, help="per-arm sample size")
    p.add_argument("--ye", type=_count, required=True, help="experimental-arm responders")
    p.add_argument("--ys", type=_count, required=True, help="standard-arm responders")
    p.add_argument("--prior-e", type=_positive, nargs=2, metavar=("A", "B"), default=[0.2, 0.8])
    p.add_argument("--prior-s", type=_positive, nargs=2, metavar=("A", "B"), default=[0.2, 0.8])

    p = kinds.add_parser("binary1", parents=[common], help="one-sample exact binomial")
    p.add_argument("--n", type=_count, required=True)
    p.add_argument("--ye", type=_count, required=True)
    p.add_argument("--p0", type=_probability, required=True, help="reference response rate")
    p.add_argument("--prior", type=_positive, nargs=2, metavar=("A", "B"), default=[1.0, 1.0])
    p.add_argument("--two-sided", choices=BINOMIAL_TWO_SIDED, default="doubled",
                   help="two-sided exact p-value convention (default doubled)")

    p = kinds.add_parser("normal-known", parents=[common], help="paired normal, known variance")
    p.add_argument("--theta-hat", type=_finite, required=True, help="mean paired difference")
    p.add_argument("--n", type=_count, required=True)

    p = kinds.add_parser("normal-t", parents=[common], help="paired normal, unknown variance")
    p.add_argument("--values", type=_finite, nargs="+", help="raw paired differences")
    p.add_argument("--values-file", help="file of differences (comma or whitespace separated)")
    p.add_argument("--n", type=_count, help="sample size (summary input)")
    p.add_argument("--theta-hat", type=_finite, help="mean difference (summary input)")
    p.add_argument("--ssd", type=_finite, help="sum of squared deviations (summary input)")
    p.add_argument("--prior", choices=("jeffreys", "nig"), default="jeffreys")
    p.add_argument("--nig", type=_finite, nargs=4, metavar=("THETA0", "NU0", "ALPHA", "BETA"),
                   default=[0.0, 100.0, 0.01, 0.01], help="normal-inverse-gamma prior")

    p = kinds.add_parser("mvn", parents=[common], help="multivariate normal contrasts, known sigma")
    p.add_argument("--n", type=_count, required=True)
    p.add_argument("--xbar", type=_finite, nargs="+", required=True, help="sample mean vector")
    p.add_argument("--sigma", help="covariance, rows split by ';' (e.g. '1,0.3;0.3,1')")
    p.add_argument("--sigma-file", help="covariance as a row-major CSV file")
    p.add_argument("--contrasts", help="contrast rows split by ';' (default: unit vectors)")
    p.add_argument("--n-contrasts", type=_count, help="number of unit-vector contrasts (default p)")
    p.add_argument("--prior-scale", type=_positive, default=1000.0,
                   help="vague prior covariance scale (default 1000)")

    for p in kinds.choices.values():
        p.add_argument("--csv", help="also write the report row to this CSV file")
        p.set_defaults(func=cmd_test)

    p = sub.add_parser("oc", parents=[common], help="exact operating characteristics of a design")
    _design_flags(p)
    p.add_argument("--grid", type=_finite, nargs="+", help="alternative p_E values for the power curve")
    p.add_argument("--calibrate", action="store_true", help="also calibrate eta to the nominal level")
    p.add_argument("--eta-step", type=_positive, default=DEFAULT_ETA_STEP,
                   help=f"eta calibration grid step (default {DEFAULT_ETA_STEP:g})")
    p.add_argument("--out", help="write the power-curve table (p_E, rule, type1_or_power) here")
    p.set_defaults(func=cmd_oc)

    p = sub.add_parser("samplesize", parents=[common], help="per-arm sample size formula")
    _design_flags(p, with_design=False)
    p.set_defaults(func=cmd_samplesize)

    p = sub.add_parser("simulate", parents=[common], help="run a replication scenario")
    p.add_argument("--config", help="YAML scenario file")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=_count)
    p.add_argument("--reps", type=_count)
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a family parameter (repeatable)")
    p.add_argument("--out", help="records CSV")
    p.add_argument("--stats-out", help="summary statistics CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot", parents=[common], help="SVG scatter of a records CSV")
    p.add_argument("input", help="records CSV written by simulate")
    p.add_argument("--out", required=True, help="SVG output path")
    p.add_argument("--sided", choices=("one", "two"), default="one")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)

    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "seed_given"):
        args.seed_given = False
    _configure_logging(args.verbose)
    try:
        return args.func(args, out)
    except PvpopError as exc:
        code = exit_code_for(exc)
        logger.debug("exiting with code %d", code, exc_info=True)
        print(f"pvpop: error: {exc}", file=sys.stderr)
        return code
