import csv
import io
import json
import math

import pytest
import yaml

from wingwrap import Outcome, TrialResult, TrialConditions
from wingwrap.cli import main
from wingwrap.config import (CONFIG_SCHEMA, ConfigError, ExperimentConfig, config_hash,
                             dump_config, from_dict, load_config, to_dict)
from wingwrap.reports import (SWEEP_COLUMNS, TRIALS_COLUMNS, csv_text, fmt, trials_csv,
                              write_outputs)


def write_cfg(tmp_path, doc, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(doc))
    return p


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# small, fast sweep: one mass level, coarse search
SMALL = {
    "master_seed": 3,
    "trial_plan": {"n_trials": 3, "speed_bracket": [1.0, 5.0], "speed_tol": 1.0},
    "sweep": {"fractions": [0.25]},
}


# -- formatting -------------------------------------------------------------

@pytest.mark.parametrize("value,text", [
    (None, ""), (True, "true"), (False, "false"), (7, "7"), (0.0, "0"), (2.5, "2.5"),
    (1 / 3, "0.333333333"), (123456.789123, "123456.789"), (1e-12, "0.000000000001"),
    (-0.25, "-0.25"), (float("nan"), "nan"), ("Miss", "Miss"),
])
def test_fmt(value, text):
    assert fmt(value) == text


def test_fmt_never_scientific():
    for x in (1e-20, 3.3e15, -7.77e-9):
        assert "e" not in fmt(x).lower()


def test_header_only_csv_for_no_trials():
    assert trials_csv([]) == ",".join(TRIALS_COLUMNS) + "\n"


def test_csv_row_width_checked():
    with pytest.raises(ValueError):
        csv_text(("a", "b"), [[1]])


def test_trials_csv_columns_and_values():
    r = TrialResult(Outcome.OVERLAP, 2.51, 3.2, 3.3, 0.8, True, False, 1.0, 0.0, True,
                    "settled", 0.2, 4.2, True, TrialConditions(2.5, 0.01, -0.02))
    rows = list(csv.reader(io.StringIO(trials_csv([(5, 0.25, r)]))))
    assert tuple(rows[0]) == TRIALS_COLUMNS
    assert rows[1] == ["5", "0.25", "2.5", "2.51", "0.01", "-0.02", "SuccessTipOverlap", "3.2",
                       "3.3", "0.8", "true", "4.2", "true"]


# -- config -----------------------------------------------------------------

def test_minimal_config_fills_defaults():
    cfg = from_dict({"master_seed": 0})
    assert cfg == ExperimentConfig(master_seed=0, material=cfg.material)
    assert cfg.material.friction_mu == cfg.pole.friction_mu
    assert cfg.material.normal_damping == cfg.pole.normal_damping


def test_config_round_trip():
    cfg = from_dict({"master_seed": 9, "vehicle": {"tip_mass_fraction": 0.1,
                                                   "wing": {"n_segments": 3}},
                     "pole": {"radius": 0.05}})
    again = from_dict(yaml.safe_load(dump_config(cfg)))
    assert again == cfg
    assert config_hash(again) == config_hash(cfg)
    assert to_dict(again) == to_dict(cfg)


def test_hash_ignores_output_dir_only():
    a = from_dict({"master_seed": 1})
    assert config_hash(a) == config_hash(from_dict({"master_seed": 1, "output_dir": "x"}))
    assert config_hash(a) != config_hash(from_dict({"master_seed": 2}))


@pytest.mark.parametrize("doc,needle", [
    ({"master_seed": 0, "pole": {"radius": 0}}, "PoleSpec.radius"),
    ({"master_seed": 0, "pole": {"raduis": 0.06}}, "raduis"),
    ({"master_seed": 0, "colour": "red"}, "colour"),
    ({}, "master_seed"),
    ({"master_seed": -1}, "master_seed"),
    ({"master_seed": 0, "vehicle": {"tip_mass_fraction": 1.5}}, "tip_mass_fraction"),
    ({"master_seed": 0, "trial_plan": {"speed_bracket": [3, 2]}}, "speed_bracket"),
    ({"master_seed": 0, "trial_plan": {"start_distance": 0.3}}, "start_distance"),
    ({"master_seed": 0, "vehicle": {"wing": {"n_segments": 0}}}, "n_segments"),
    ({"master_seed": 0, "material": {"slip_regularization_velocity": 0}}, "slip"),
])
def test_bad_configs_name_the_field(doc, needle):
    with pytest.raises(ConfigError, match=needle):
        from_dict(doc)


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("master_seed: [1,\n")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_json_config_accepted(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"master_seed": 4}))
    assert load_config(p).master_seed == 4


def test_schema_command(capsys):
    assert main(["schema"]) == 0
    assert json.loads(capsys.readouterr().out) == CONFIG_SCHEMA


# -- output writing ---------------------------------------------------------

def test_outputs_and_manifest(tmp_path):
    out = tmp_path / "o"
    m = write_outputs(out, {"a.csv": "x\n1\n"}, {"command": "t"})
    assert (out / "a.csv").read_text() == "x\n1\n"
    disk = json.loads((out / "manifest.json").read_text())
    assert disk == m
    assert set(m["files"]) == {"a.csv"}
    assert [p.name for p in tmp_path.iterdir()] == ["o"]


# -- CLI end to end ---------------------------------------------------------

def test_trial_miss(tmp_path):
    cfg = write_cfg(tmp_path, {"master_seed": 0, "trial_plan": {"trial": {"lateral_offset": 1.0}}})
    out = tmp_path / "out"
    assert main(["trial", "--config", str(cfg), "--out", str(out)]) == 0
    rows = read_csv(out / "trials.csv")
    assert len(rows) == 1
    assert rows[0]["outcome"] == "Miss"
    assert rows[0]["wrap_angle_left_rad"] == rows[0]["wrap_angle_right_rad"] == "0"
    man = json.loads((out / "manifest.json").read_text())
    assert man["command"] == "trial" and man["master_seed"] == 0
    assert set(man["files"]) == {"trials.csv", "config.yaml"}
    assert load_config(out / "config.yaml") == load_config(cfg)


def test_trial_trajectory(tmp_path):
    cfg = write_cfg(tmp_path, {"master_seed": 0, "trial_plan": {"trial": {"impact_speed": 3.0}},
                               "solver": {"timeout": 0.3}})
    out = tmp_path / "out"
    assert main(["trial", "--config", str(cfg), "--out", str(out), "--emit-trajectory", "0"]) == 0
    rows = read_csv(out / "trajectory.csv")
    assert rows[0]["t_s"] == "0"
    assert float(rows[1]["t_s"]) == pytest.approx(1e-3)
    assert "phi_left_1_rad" in rows[0] and "phi_right_4_rad" in rows[0]


def test_invalid_radius_writes_nothing(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"master_seed": 0, "pole": {"radius": 0}})
    out = tmp_path / "out"
    code = main(["sweep", "--config", str(cfg), "--out", str(out)])
    assert code != 0
    assert "PoleSpec.radius" in capsys.readouterr().err
    assert not out.exists()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["cfg.yaml"]


def test_missing_output_dir_is_config_error(tmp_path):
    cfg = write_cfg(tmp_path, {"master_seed": 0})
    assert main(["trial", "--config", str(cfg)]) == 2


def test_min_speed_bracket_failure(tmp_path, capsys):
    # at 0.5-0.6 m/s nothing perches, so no transition exists
    cfg = write_cfg(tmp_path, {"master_seed": 0,
                               "trial_plan": {"speed_bracket": [0.5, 0.6], "speed_tol": 0.05}})
    out = tmp_path / "out"
    assert main(["min-speed", "--config", str(cfg), "--out", str(out)]) == 3
    assert "speed search failed" in capsys.readouterr().err
    assert not out.exists()


def test_sweep_is_byte_identical_across_runs_and_workers(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path, SMALL)
    outs = []
    for i, threads in enumerate(("1", "3")):
        monkeypatch.setenv("WINGWRAP_THREADS", threads)
        out = tmp_path / f"run{i}"
        assert main(["sweep", "--config", str(cfg), "--out", str(out),
                     "--emit-trajectory", "1"]) == 0
        outs.append(out)
    m0, m1 = (json.loads((o / "manifest.json").read_text()) for o in outs)
    assert m0["files"] == m1["files"]
    assert m0["config_hash"] == m1["config_hash"]
    for name in ("trials.csv", "sweep.csv", "trajectory.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    rows = read_csv(outs[0] / "trials.csv")
    assert [r["trial_id"] for r in rows] == ["0", "1", "2"]
    sweep = read_csv(outs[0] / "sweep.csv")
    assert tuple(sweep[0]) == SWEEP_COLUMNS
    assert sweep[0]["n_trials"] == "3"
    traj = read_csv(outs[0] / "trajectory.csv")
    assert {r["trial_id"] for r in traj} == {"1"}


def test_seed_and_trial_overrides(tmp_path):
    cfg = write_cfg(tmp_path, {**SMALL, "trial_plan": {**SMALL["trial_plan"], "n_trials": 1}})
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--seed", "11",
                 "--trials", "2"]) == 0
    assert len(read_csv(out / "trials.csv")) == 2
    man = json.loads((out / "manifest.json").read_text())
    assert man["master_seed"] == 11
    assert load_config(out / "config.yaml").plan.n_trials == 2


def test_bad_overrides(tmp_path):
    cfg = write_cfg(tmp_path, SMALL)
    out = str(tmp_path / "out")
    assert main(["sweep", "--config", str(cfg), "--out", out, "--trials", "0"]) == 2
    assert main(["sweep", "--config", str(cfg), "--out", out, "--seed", "-1"]) == 2
    assert main(["sweep", "--config", str(cfg), "--out", out, "--emit-trajectory", "9"]) == 2


def test_nan_config_values_rejected():
    with pytest.raises(ConfigError):
        from_dict({"master_seed": 0, "pole": {"radius": math.nan}})
