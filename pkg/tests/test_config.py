"""Tests for pvpop.config — ScenarioSpec, RunConfig, YAML loading and overrides."""

import yaml
import pytest

from pvpop.config import (
    DEFAULT_SEED,
    FAMILIES,
    SCENARIO_DEFAULTS,
    RunConfig,
    ScenarioSpec,
    load_scenario_file,
    parse_override,
)
from pvpop.errors import ConfigError


class TestScenarioDefaults:
    def test_every_family_has_defaults(self):
        assert set(SCENARIO_DEFAULTS) == set(FAMILIES)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_defaults_validate(self, family):
        spec = ScenarioSpec(family=family, n=20, reps=3)
        assert spec.params == SCENARIO_DEFAULTS[family]
        assert spec.seed == DEFAULT_SEED

    def test_params_are_deep_copies(self):
        spec = ScenarioSpec(family="binary-two-sample", n=20, reps=3)
        spec.params["prior_E"][0] = 99.0
        assert SCENARIO_DEFAULTS["binary-two-sample"]["prior_E"] == [0.2, 0.8]

    def test_override_merges(self):
        spec = ScenarioSpec(family="normal-nonnormal", n=50, reps=3, params={"distribution": "beta"})
        assert spec.params["distribution"] == "beta"
        assert spec.params["beta_a"] == 0.5


class TestScenarioValidation:
    def test_unknown_family(self):
        with pytest.raises(ConfigError, match="unknown family"):
            ScenarioSpec(family="poisson", n=20, reps=3)

    def test_unknown_param(self):
        with pytest.raises(ConfigError, match="nu00"):
            ScenarioSpec(family="normal-nig-vague", n=20, reps=3, params={"nu00": 1.0})

    @pytest.mark.parametrize(
        "family,n",
        [("binary-two-sample", 0), ("normal-jeffreys", 1), ("mvn", 0), ("binary-one-sample", -1)],
    )
    def test_minimum_n(self, family, n):
        with pytest.raises(ConfigError):
            ScenarioSpec(family=family, n=n, reps=3)

    def test_one_sample_allows_zero_n(self):
        assert ScenarioSpec(family="binary-one-sample", n=0, reps=3).n == 0

    @pytest.mark.parametrize("reps", [0, 2.5, True])
    def test_reps(self, reps):
        with pytest.raises(ConfigError):
            ScenarioSpec(family="binary-two-sample", n=20, reps=reps)

    def test_seed_range(self):
        with pytest.raises(ConfigError):
            ScenarioSpec(family="binary-two-sample", n=20, reps=3, seed=-1)

    @pytest.mark.parametrize(
        "family,params",
        [
            ("binary-two-sample", {"prior_E": [0.2]}),
            ("binary-two-sample", {"prior_S": [0.0, 1.0]}),
            ("binary-one-sample", {"p0": 1.0}),
            ("binary-one-sample", {"binomial_two_sided": "midp"}),
            ("normal-jeffreys", {"theta_var": 0.0}),
            ("normal-jeffreys", {"nu_mean": "one"}),
            ("normal-nig-vague", {"alpha": -0.01}),
            ("normal-nig-informative", {"nu0": 0.0}),
            ("normal-nonnormal", {"distribution": "cauchy"}),
            ("normal-nonnormal", {"gamma_convention": "rate"}),
            ("normal-nonnormal", {"recenter_low": 1.0, "recenter_high": 0.0}),
            ("normal-nonnormal", {"mixture_means": []}),
            ("normal-nonnormal", {"mixture_means": [0.0, float("nan")]}),
            ("mvn", {"sigma": [[1.0, 2.0], [2.0, 1.0]]}),
            ("mvn", {"sigma": [[1.0, 0.2], [0.3, 1.0]]}),
            ("mvn", {"sigma": [[1.0, 0.0]]}),
            ("mvn", {"n_contrasts": 3}),
        ],
    )
    def test_bad_params(self, family, params):
        with pytest.raises(ConfigError):
            ScenarioSpec(family=family, n=20, reps=3, params=params)


class TestScenarioMapping:
    def test_from_mapping(self):
        spec = ScenarioSpec.from_mapping(
            {"family": "mvn", "n": 100, "reps": 10, "seed": 7, "params": {"n_contrasts": 1}}
        )
        assert (spec.family, spec.n, spec.reps, spec.seed) == ("mvn", 100, 10, 7)
        assert spec.params["n_contrasts"] == 1

    def test_missing_key(self):
        with pytest.raises(ConfigError, match="reps"):
            ScenarioSpec.from_mapping({"family": "mvn", "n": 100})

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="replications"):
            ScenarioSpec.from_mapping({"family": "mvn", "n": 100, "reps": 1, "replications": 5})

    def test_not_a_mapping(self):
        with pytest.raises(ConfigError):
            ScenarioSpec.from_mapping(["mvn"])

    def test_snapshot_round_trips(self):
        spec = ScenarioSpec(family="normal-nig-informative", n=1000, reps=5, seed=3)
        assert ScenarioSpec.from_mapping(spec.snapshot()) == spec

    def test_snapshot_is_yaml_safe(self):
        spec = ScenarioSpec(family="mvn", n=100, reps=5)
        assert yaml.safe_load(yaml.safe_dump(spec.snapshot())) == spec.snapshot()

    def test_replace(self):
        spec = ScenarioSpec(family="normal-nig-informative", n=1000, reps=5)
        changed = spec.replace(n=10_000, params={"nu0": 1.0})
        assert changed.n == 10_000
        assert changed.params["nu0"] == 1.0
        assert spec.n == 1000
        assert spec.params["nu0"] == 0.01

    def test_replace_validates(self):
        spec = ScenarioSpec(family="normal-jeffreys", n=10, reps=5)
        with pytest.raises(ConfigError):
            spec.replace(params={"theta_var": -1.0})


class TestLoadScenarioFile:
    def test_load(self, tmp_path):
        path = tmp_path / "scenario.yaml"
        path.write_text(
            "family: normal-nonnormal\n"
            "n: 50\n"
            "reps: 200\n"
            "params:\n"
            "  distribution: mixture\n"
            "  mixture_means: [-2, 2]\n",
            encoding="utf-8",
        )
        spec = load_scenario_file(path)
        assert spec.family == "normal-nonnormal"
        assert spec.params["mixture_means"] == [-2, 2]
        assert spec.seed == DEFAULT_SEED

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_scenario_file(tmp_path / "absent.yaml")

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("family: [unclosed\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="invalid YAML"):
            load_scenario_file(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ConfigError, match="missing required key"):
            load_scenario_file(path)


class TestParseOverride:
    def test_number(self):
        assert parse_override("nu0=0.001") == ("nu0", 0.001)

    def test_list(self):
        assert parse_override("prior_E=[1, 1]") == ("prior_E", [1, 1])

    def test_string(self):
        assert parse_override("distribution = beta") == ("distribution", "beta")

    @pytest.mark.parametrize("text", ["nu0", "=3", ""])
    def test_malformed(self, text):
        with pytest.raises(ConfigError):
            parse_override(text)

    def test_bad_yaml_value(self):
        with pytest.raises(ConfigError):
            parse_override("sigma=[[1, 0]")


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.seed == 2137
        assert cfg.alpha == 0.05
        assert cfg.quadrature_order == 64
        assert cfg.n_workers == 1

    def test_snapshot(self):
        cfg = RunConfig(seed=5, conventions={"gamma_convention": "shape-scale"})
        snap = cfg.snapshot()
        assert snap == {
            "seed": 5,
            "alpha": 0.05,
            "quadrature_order": 64,
            "n_workers": 1,
            "conventions": {"gamma_convention": "shape-scale"},
        }
        snap["conventions"]["gamma_convention"] = "shape-rate"
        assert cfg.conventions["gamma_convention"] == "shape-scale"

    @pytest.mark.parametrize(
        "kwargs",
        [{"seed": -1}, {"alpha": 0.0}, {"alpha": 1.5}, {"quadrature_order": 1}, {"n_workers": -1}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            RunConfig(**kwargs)
