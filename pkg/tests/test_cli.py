import csv

import pytest

from rmab_lab.cli import main, run_experiment
from rmab_lab.config import ConfigError, ExperimentConfig, parse_text, resolve
from rmab_lab.csvio import REGRET_COLUMNS, format_value


def run(tmp_path, name, *args):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_regret_header_and_iid_null(tmp_path):
    code, out = run(tmp_path, "r", "regret", "--p01", "0.5", "--p11", "0.5", "--horizon", "5000",
                    "--reps", "20")
    assert code == 0
    rows = read_rows(out / "regret.csv")
    assert tuple(rows[0]) == REGRET_COLUMNS
    ns = [int(r[0]) for r in rows[1:]]
    assert ns == sorted(ns)
    for r in rows[1:]:
        regret, hw = float(r[5]), float(r[6])
        assert abs(regret) <= 1.5 * hw
        assert float(r[7]) == pytest.approx(regret / (int(r[1]) * float(r[2])), rel=1e-9)
    text = (out / "regret.csv").read_bytes()
    assert text.endswith(b"\n") and not text.endswith(b"\n\n")


def test_checkpoint_off_boundary_is_config_error(tmp_path, capsys):
    code, _ = run(tmp_path, "bad", "regret", "--horizon", "100", "--checkpoints", "18")
    assert code == 2
    assert "checkpoints" in capsys.readouterr().err


@pytest.mark.parametrize("args, field", [
    (["regret", "--p01", "1.5"], "p01"),
    (["simulate", "--p11", "-0.1"], "p11"),
    (["simulate", "--horizon", "1"], "horizon"),
    (["simulate", "--belief", "0.1,0.2,0.3"], "belief"),
    (["regret", "--reps", "0"], "reps"),
    (["simulate", "--schedule", "cubic"], "schedule"),
    (["oracle-check", "--length", "25"], "length"),
])
def test_config_errors_name_the_field(tmp_path, capsys, args, field):
    code, _ = run(tmp_path, "e", *args)
    assert code == 2
    assert f"`{field}`" in capsys.readouterr().err


def test_replay_from_manifest_is_byte_identical(tmp_path):
    code, first = run(tmp_path, "a", "regret", "--p01", "0.1", "--p11", "0.9", "--horizon", "3000",
                      "--reps", "6", "--seed", "77")
    assert code == 0
    code, second = run(tmp_path, "b", "regret", "--config", str(first / "manifest.txt"),
                       "--jobs", "2")
    assert code == 0
    assert (first / "regret.csv").read_bytes() == (second / "regret.csv").read_bytes()
    manifest = (second / "manifest.txt").read_text()
    assert "seed=77" in manifest and "artifact_version=" in manifest


def test_env_seed_default(tmp_path, monkeypatch):
    monkeypatch.setenv("RMAB_LAB_SEED", "4242")
    code, out = run(tmp_path, "s", "simulate", "--horizon", "200")
    assert code == 0
    assert "seed=4242" in (out / "manifest.txt").read_text()
    monkeypatch.delenv("RMAB_LAB_SEED")
    code, out2 = run(tmp_path, "s2", "simulate", "--horizon", "200", "--seed", "4242")
    assert (out / "trajectory.csv").read_bytes() == (out2 / "trajectory.csv").read_bytes()


def test_simulate_tables(tmp_path):
    code, out = run(tmp_path, "sim", "simulate", "--horizon", "300", "--reps", "2")
    assert code == 0
    slots = read_rows(out / "trajectory.csv")
    blocks = read_rows(out / "blocks.csv")
    assert slots[0] == ["replication", "slot", "block", "policy", "channel", "reward"]
    assert blocks[0][-1] == "T_n"
    per_rep = [r for r in slots[1:] if r[0] == "0"]
    assert [int(r[1]) for r in per_rep] == list(range(1, len(per_rep) + 1))
    assert int([r for r in blocks[1:] if r[0] == "0"][-1][5]) == len(per_rep)


def test_oracle_check_passes(tmp_path):
    code, out = run(tmp_path, "o", "oracle-check", "--p01", "0.2", "--p11", "0.8", "--length", "12",
                    "--reps", "20000")
    assert code == 0
    rows = read_rows(out / "oracle.csv")
    assert [r[0] for r in rows[1:]] == ["pi1", "pi2"]
    assert all(r[-1] == "true" for r in rows[1:])


def test_chernoff_check(tmp_path):
    code, out = run(tmp_path, "c", "chernoff-check", "--trials", "20000")
    assert code == 0
    rows = read_rows(out / "chernoff.csv")
    assert len(rows) == 1 + 2 * 2 * 3


def test_failed_check_exit_code(tmp_path, monkeypatch):
    import rmab_lab.cli as cli
    from rmab_lab.analysis import chernoff

    class Fake(chernoff.ChernoffReport):
        passed = False

    real = chernoff.verify_chernoff_variant
    monkeypatch.setattr(cli, "verify_chernoff_variant",
                        lambda *a: Fake(**real(*a).__dict__))
    code, _ = run(tmp_path, "f", "chernoff-check", "--trials", "100", "--n-values", "10")
    assert code == 3


def test_profile(tmp_path):
    code, out = run(tmp_path, "p", "profile", "--horizon", "5000", "--burn-in", "500",
                    "--reps", "10", "--lengths", "10,100")
    assert code == 0
    prof = read_rows(out / "profile.csv")
    assert [r[0] for r in prof[1:]] == ["pi1", "pi2"]
    trans = read_rows(out / "transient.csv")
    assert len(trans) == 1 + 2 * 3 * 2


def test_config_file_with_overrides(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("# experiment\nhorizon = 400\np01=0.3\nreps=2\n")
    cfg = resolve("simulate", cfg_file, {"reps": 5})
    assert (cfg.horizon, cfg.p01, cfg.reps) == (400, 0.3, 5)
    with pytest.raises(ConfigError):
        parse_text("bogus=1")
    with pytest.raises(ConfigError):
        resolve("regret", None, {"command": "simulate"})


def test_manifest_round_trip():
    cfg = ExperimentConfig(command="regret", p01=0.15, checkpoints="3,5")
    assert resolve("regret", None, parse_text(cfg.to_text())) == cfg


def test_format_value():
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(float("nan")) == ""
    assert format_value(7) == "7"
    assert format_value(True) == "true"


def test_run_experiment_bundle(tmp_path):
    bundle = run_experiment(ExperimentConfig(command="simulate", horizon=100, out=str(tmp_path)))
    assert bundle.exit_code == 0
    assert (tmp_path / "summary.txt").exists()
    assert "trajectory.csv" in bundle.tables
