import copy
import json
import math

import pytest

from stabaudit.cli import main
from stabaudit.harness import (
    EXIT_BUDGET,
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_PASS,
    ConfigError,
    ScenarioConfig,
    build_scenario,
    corpus_run,
    run_config,
    write_bundle,
)

BASE = {
    "name": "cli-identity",
    "domain": {"size": 3},
    "learner": {"name": "subsample_release", "params": {"k": 1}},
    "loss": {"name": "membership"},
    "m": 1,
    "numeric": "exact",
    "audits": ["T1", "T2"],
}


def cfg_with(**kw):
    raw = copy.deepcopy(BASE)
    raw.update(kw)
    return raw


# ---------------------------------------------------------------------------
# config validation


def test_minimal_config_parses():
    cfg = ScenarioConfig.from_dict(BASE)
    assert cfg.mode == "exact"  # default
    assert cfg.n_runs == 10000
    assert [a.id for a in cfg.audits] == ["T1", "T2"]


@pytest.mark.parametrize(
    "mutation",
    [
        {"surprise": 1},
        {"name": ""},
        {"domain": {"size": 3, "symbols": [0, 1, 2]}},
        {"domain": {}},
        {"domain": {"cardinality": 3}},
        {"data_dist": "gaussian"},
        {"data_dist": {"family": "zipf"}},
        {"learner": {"name": "mystery"}},
        {"learner": {"name": "subsample_release", "params": {"k": 1, "oops": 2}}},
        {"loss": {"name": "mystery"}},
        {"m": 0},
        {"m": "two"},
        {"numeric": "decimal"},
        {"mode": "magic"},
        {"seed": -1},
        {"t_grid": [0.5, 1.5]},
        {"t_grid": []},
        {"n_runs": 0},
        {"budget": 0},
        {"tolerance": -1},
        {"audits": []},
        {"audits": ["T9"]},
        {"audits": [{"id": "T1", "threshold": 0.5}]},
        {"audits": [{"id": "T4", "t_grid": [0.0, 0.5]}]},
        {"audits": [{"id": "C2-forward", "epsilon": 0.5}]},
        {"audits": [3]},
    ],
)
def test_malformed_configs_are_rejected(mutation):
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(cfg_with(**mutation))


def test_mc_mode_rejects_exact_only_audits():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(cfg_with(mode="mc", audits=["T1", "T5"]))


def test_power_family_is_float_only():
    raw = cfg_with(data_dist={"family": "power", "alpha": 1.0})
    with pytest.raises(ConfigError):
        build_scenario(ScenarioConfig.from_dict(raw))
    raw["numeric"] = "float"
    scenario = build_scenario(ScenarioConfig.from_dict(raw))
    weights = scenario.data_dist.weights
    assert weights[0] > weights[1] > weights[2]


def test_weights_must_cover_the_domain():
    raw = cfg_with(data_dist={"weights": [0.5, 0.5]})
    with pytest.raises(ConfigError):
        build_scenario(ScenarioConfig.from_dict(raw))


def test_override_revalidates():
    cfg = ScenarioConfig.from_dict(BASE)
    assert cfg.override(seed=7).seed == 7
    assert cfg.override(seed=None).seed == 0  # None means keep
    with pytest.raises(ConfigError):
        cfg.override(mode="magic")


def test_config_round_trips_through_to_dict():
    cfg = ScenarioConfig.from_dict(cfg_with(t_grid=[0.2, 0.4], budget=500, tolerance=1e-9))
    again = ScenarioConfig.from_dict(cfg.to_dict())
    assert again == cfg


# ---------------------------------------------------------------------------
# run_config


def test_run_config_pass():
    code, bundle = run_config(BASE)
    assert code == EXIT_PASS
    assert bundle["exit_code"] == EXIT_PASS
    assert bundle["method"] == "exact"
    assert bundle["schema_version"] == 1
    assert bundle["quantities"]["info"] == pytest.approx(2 / 3)
    assert bundle["quantities"]["enumeration"] == "exact-multiset"
    assert bundle["quantities"]["hypothesis_count"] == 4
    verdicts = {r["theorem"]: r["verdict"] for r in bundle["audits"]}
    assert verdicts == {"T1": "pass", "T2": "pass"}
    json.dumps(bundle)  # the whole bundle is JSON-safe


def test_run_config_fail_exit_code():
    raw = cfg_with(
        name="cli-rr",
        domain={"size": 2},
        learner={"name": "randomized_response_dp", "params": {"epsilon": 1.0}},
        loss={"name": "zero_one"},
        audits=[{"id": "P4", "epsilon": 0.01}],
    )
    code, bundle = run_config(raw)
    assert code == EXIT_FAIL
    assert bundle["audits"][0]["verdict"] == "fail"


def test_run_config_rejects_bad_raw_dict():
    code, bundle = run_config(cfg_with(mode="magic"))
    assert code == EXIT_CONFIG
    assert "error" in bundle


def test_run_config_budget_exceeded():
    raw = cfg_with(domain={"size": 256}, m=2, budget=10, mode="exact")
    code, bundle = run_config(raw)
    assert code == EXIT_BUDGET
    assert "budget" in bundle["error"]


def test_auto_mode_falls_back_to_mc():
    raw = cfg_with(
        domain={"size": 256},
        m=2,
        budget=10,
        mode="auto",
        audits=["T1"],
        n_runs=400,
    )
    code, bundle = run_config(raw)
    assert code == EXIT_PASS
    assert bundle["method"] == "mc"
    assert any("fell back to MC" in note for note in bundle["notes"])
    assert "info" in bundle["estimates"]
    assert bundle["audits"][0]["theorem"] == "T1"


def test_auto_mode_without_mc_fallback_is_budget_error():
    raw = cfg_with(domain={"size": 256}, m=2, budget=10, mode="auto", audits=["T1", "T4"])
    code, bundle = run_config(raw)
    assert code == EXIT_BUDGET
    assert "T4" in bundle["error"]


def test_run_config_overrides():
    code, bundle = run_config(BASE, overrides={"seed": 9, "mode": None})
    assert code == EXIT_PASS
    assert bundle["config"]["seed"] == 9


# ---------------------------------------------------------------------------
# report files


def test_write_bundle_files(tmp_path):
    raw = cfg_with(audits=["T1", "T4"], t_grid=[0.2, 0.5])
    code, bundle = run_config(raw, out_dir=tmp_path)
    assert code == EXIT_PASS
    report = json.loads((tmp_path / "cli-identity.json").read_text())
    assert report["config"]["name"] == "cli-identity"
    summary = (tmp_path / "cli-identity_summary.csv").read_text().splitlines()
    assert summary[0] == "scenario,theorem,verdict,computed,bound,slack"
    assert len(summary) == 3  # header + one row per audit
    series = (tmp_path / "cli-identity__T4.csv").read_text().splitlines()
    assert len(series) == 3  # header + one row per grid point


def test_reports_are_deterministic_apart_from_timings(tmp_path):
    _, a = run_config(BASE)
    _, b = run_config(BASE)
    a.pop("timings")
    b.pop("timings")
    assert a == b


def test_bundle_name_is_sanitized(tmp_path):
    raw = cfg_with(name="weird name/42")
    code, _ = run_config(raw, out_dir=tmp_path)
    assert code == EXIT_PASS
    assert (tmp_path / "weird_name_42.json").exists()


# ---------------------------------------------------------------------------
# corpus


def test_corpus_run_unknown_scenario():
    code, bundle = corpus_run(only=["nope"])
    assert code == EXIT_CONFIG
    assert "nope" in bundle["error"]


def test_corpus_run_single_scenario(tmp_path):
    code, bundle = corpus_run(out_dir=tmp_path, only=["identity-m1"])
    assert code == EXIT_PASS
    assert len(bundle["scenarios"]) == 1
    assert (tmp_path / "corpus.json").exists()
    assert (tmp_path / "corpus_summary.csv").exists()
    assert (tmp_path / "scenarios" / "identity-m1.json").exists()


# ---------------------------------------------------------------------------
# command line


def write_config(tmp_path, raw):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw))
    return str(path)


def test_cli_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "identity-m1" in out
    assert "T5" in out
    assert "subsample_release" in out


def test_cli_run(tmp_path, capsys):
    path = write_config(tmp_path, BASE)
    assert main(["run", path, "--out", str(tmp_path / "out")]) == 0
    out = capsys.readouterr().out
    assert "[        pass]" in out
    assert (tmp_path / "out" / "cli-identity.json").exists()


def test_cli_run_missing_file(capsys):
    assert main(["run", "/does/not/exist.json"]) == 2


def test_cli_run_bad_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["run", str(path)]) == 2


def test_cli_run_overrides(tmp_path):
    path = write_config(tmp_path, BASE)
    out = tmp_path / "out"
    assert main(["run", path, "--seed", "9", "--out", str(out)]) == 0
    report = json.loads((out / "cli-identity.json").read_text())
    assert report["config"]["seed"] == 9


def test_cli_run_reports_failures(tmp_path, capsys):
    raw = cfg_with(
        name="cli-rr",
        domain={"size": 2},
        learner={"name": "randomized_response_dp", "params": {"epsilon": 1.0}},
        loss={"name": "zero_one"},
        audits=[{"id": "P4", "epsilon": 0.01}],
    )
    assert main(["run", write_config(tmp_path, raw)]) == 1
    assert "fail" in capsys.readouterr().out


def test_cli_corpus(tmp_path, capsys):
    assert main(["corpus", "--only", "identity-m1", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "corpus:" in out
    assert "exit 0" in out


def test_cli_corpus_unknown_name(capsys):
    assert main(["corpus", "--only", "nope"]) == 2
