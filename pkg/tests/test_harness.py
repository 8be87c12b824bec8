import json
import math

import numpy as np
import pytest

from specsense.errors import ConfigError
from specsense.harness import (CSV_HEADER, ExperimentConfig, gitc_gammas, parse_detector,
                               parse_snr_grid, run_comparison, run_gitc_threshold_experiment,
                               run_pd_experiment, run_pf_experiment, simulate, std_error,
                               trial_rng)
from specsense.model import Hypothesis

SMALL = dict(M=3, K=2, L=3, N=500, trials=60, seed=3)


def small(**kw):
    return ExperimentConfig(**{**SMALL, **kw})


# --------------------------------------------------------------------- parsing

@pytest.mark.parametrize("text, name", [
    ("sitc-aic", "sitc-aic"), ("OITC-MDL", "oitc-mdl"), ("gitc:1.05", "gitc:1.05"),
    ("gitc:1.0375081234", "gitc:1.0375081234"), ("EV-AGM", "ev-agm"), ("ed", "ed"),
    ("ed-unc:1.5", "ed-unc:1.5"),
])
def test_parse_detector_names(text, name):
    assert parse_detector(text).name == name


def test_parse_detector_fixed_threshold():
    d = parse_detector("ev-mme@1.7")
    assert d.threshold == 1.7 and d.family == "baseline"


@pytest.mark.parametrize("bad", ["nope", "gitc:0.9", "gitc:x", "ed-unc:-1", "ev-agm@abc"])
def test_parse_detector_errors(bad):
    with pytest.raises(ConfigError):
        parse_detector(bad)


def test_snr_grid():
    assert parse_snr_grid("-24:2:-18") == [-24.0, -22.0, -20.0, -18.0]
    assert parse_snr_grid("0:0.1:0.3") == [0.0, 0.1, 0.2, 0.3]
    assert parse_snr_grid(-5) == [-5.0]
    assert parse_snr_grid([1, 2]) == [1.0, 2.0]
    for bad in ("a:b:c", "1:0:3", "5:1:0", [], True):
        with pytest.raises(ConfigError):
            parse_snr_grid(bad)


def test_unknown_key_is_named():
    with pytest.raises(ConfigError, match="snr_dB"):
        ExperimentConfig.from_dict({"snr_dB": [0]})


@pytest.mark.parametrize("change, key", [
    ({"M": 0}, "M"), ({"trials": "10"}, "trials"), ({"mode": "x"}, "mode"),
    ({"M": 1, "K": 1, "L": 5}, "M/K/L"), ({"targets": [1.5]}, "targets"), ({"format": "xml"}, "format"),
    ({"schema": 2}, "schema"), ({"seed": -1}, "seed"),
])
def test_config_errors(change, key):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_dict({**SMALL, **change})
    assert str(info.value).startswith(key)


def test_missing_config_file(tmp_path):
    path = tmp_path / "absent.json"
    with pytest.raises(ConfigError, match=str(path)):
        ExperimentConfig.from_json_file(path)


def test_config_round_trip(tmp_path):
    cfg = small(snr_db="-10:5:0", detectors=["sitc-aic", "ed-unc:2"])
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_json_file(path) == cfg


# ----------------------------------------------------------------------- trials

def test_trial_rng_streams():
    a = trial_rng(1, "x", 5).standard_normal(3)
    assert np.array_equal(a, trial_rng(1, "x", 5).standard_normal(3))
    assert not np.array_equal(a, trial_rng(1, "x", 6).standard_normal(3))
    assert not np.array_equal(a, trial_rng(1, "y", 5).standard_normal(3))
    assert not np.array_equal(a, trial_rng(2, "x", 5).standard_normal(3))


def test_simulate_worker_invariance():
    cfg = small(detectors=["sitc-aic", "oitc-mdl", "ed-unc:1"], trials=9)
    one = simulate(cfg, "t", 0.0, Hypothesis.H1, overlays=True)
    two = simulate(cfg.replace(workers=2), "t", 0.0, Hypothesis.H1, overlays=True)
    assert one == two


def test_std_error():
    assert std_error(0.5, 100) == 0.05
    assert std_error(0.0, 10) == 0.0
    assert math.isnan(std_error(0.5, 0))


# ------------------------------------------------------------------ experiments

def test_pf_report_layout():
    cfg = small(snr_db=[-5.0, 5.0])
    rep = run_pf_experiment(cfg)
    lines = rep.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 4 * 3
    all_row = rep.row("sitc-aic", "H0", "all")
    assert all_row.trials == 120
    assert all_row.decisions_h1 == sum(rep.row("sitc-aic", "H0", s).decisions_h1 for s in (-5.0, 5.0))
    assert 0 <= all_row.analytic <= 1
    assert rep.row("oitc-aic").analytic == rep.row("sitc-aic").analytic
    agree = rep.extra["agreement"]
    assert set(agree) == {"AIC", "MDL"} and agree["AIC"]["trials"] == 120


def test_pf_deterministic():
    cfg = small(detectors=["sitc-aic", "ev-agm"], trials=400)
    assert run_pf_experiment(cfg).to_csv() == run_pf_experiment(cfg).to_csv()


def test_json_report_echo():
    cfg = small()
    obj = json.loads(run_pf_experiment(cfg).to_json())
    assert ExperimentConfig.from_dict(obj["config"]) == cfg
    assert obj["seeding"]["master_seed"] == 3
    assert obj["seeding"]["experiment_ids"] == ["pf/snr=0.0"]
    assert obj["rows"][0]["detector"] == "sitc-aic"


def test_pd_saturates_and_overlays():
    cfg = small(snr_db=[20.0], detectors=["sitc-aic", "sitc-mdl"], trials=30)
    rep = run_pd_experiment(cfg)
    for name in ("sitc-aic", "sitc-mdl"):
        r = rep.row(name)
        assert r.p_hat == 1.0
        assert r.lower <= r.analytic <= r.upper


def test_oversampling_runs():
    cfg = small(mode="over-sampling", trials=20)
    rep = run_pf_experiment(cfg)
    assert rep.row("sitc-aic").trials == 20


def test_comparison_structure():
    cfg = small(trials=400, snr_db=[-2.0], detectors=["sitc-aic", "ed", "ev-agm", "ed-unc:1.5"])
    rep = run_comparison(cfg)
    cal = rep.extra["calibration"]
    assert cal["target_pf"] == rep.extra["sitc_aic_calibration_pf"]
    assert cal["thresholds"]["ed-unc:1.5"] == cal["thresholds"]["ed"]
    assert {r.hypothesis for r in rep.rows} == {"H0", "H1"}
    assert rep.row("ed", "H0").snr_db == "all"
    assert rep.experiment_ids[0] == "calibration"


def test_gitc_gammas_ordered():
    cfg = small(N=1000, M=5, K=4, L=10)
    g = gitc_gammas(cfg, [0.1, 0.05, 0.01])
    assert g[0.1] < g[0.05] < g[0.01]


def test_gitc_experiment_deterministic():
    cfg = small(trials=40, snr_db=[0.0], targets=[0.1, 0.01])
    a, b = run_gitc_threshold_experiment(cfg), run_gitc_threshold_experiment(cfg)
    assert a.to_csv() == b.to_csv()
    assert len(a.rows) == 4
