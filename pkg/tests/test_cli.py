import json

import pytest

from torusmhd import cli
from torusmhd import io as tio
from torusmhd.criteria import CriterionSpec, Theorem
from torusmhd.dynamics import InitialCondition, SimConfig


@pytest.fixture(autouse=True)
def clean_threads_env(monkeypatch):
    monkeypatch.delenv(cli.THREADS_ENV, raising=False)


def write_config(path, **over):
    base = dict(
        dim=2,
        modes_per_axis=16,
        nu=0.5,
        dt=1e-3,
        t_end=0.004,
        record_every=2,
        snapshot_every=2,
        initial=InitialCondition(preset="random_divfree", seed=5),
    )
    base.update(over)
    tio.save_config(path, SimConfig(**base))
    return path


def test_simulate_writes_run_directory(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json")
    out = tmp_path / "out"
    code = cli.main(["simulate", "--config", str(cfg), "--out", str(out)])
    assert code == cli.EXIT_OK
    text = capsys.readouterr().out
    assert "status: completed" in text
    assert "records: 3" in text
    man = tio.read_manifest(out)
    assert man["status"] == "completed"
    names = sorted(p.name for p in out.iterdir())
    assert tio.SERIES_NAME in names and tio.MANIFEST_NAME in names
    assert "state_00000000.spc4" in names and "state_00000004.spc4" in names


def test_simulate_is_deterministic(tmp_path, capsys):
    cfg = write_config(tmp_path / "run.json")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out1)]) == 0
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out2)]) == 0
    capsys.readouterr()
    assert (out1 / "series.csv").read_bytes() == (out2 / "series.csv").read_bytes()
    assert (
        out1 / "state_00000004.spc4"
    ).read_bytes() == (out2 / "state_00000004.spc4").read_bytes()


def test_simulate_reports_divergence(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "run.json",
        nu=1e-6,
        dt=0.5,
        t_end=2.0,
        record_every=1,
        snapshot_every=1,
        initial=InitialCondition(preset="random_divfree", seed=0, amplitude=50.0),
    )
    out = tmp_path / "out"
    code = cli.main(["simulate", "--config", str(cfg), "--out", str(out)])
    assert code == cli.EXIT_DIVERGED
    assert "status: diverged" in capsys.readouterr().out
    # partial outputs still land on disk with the status recorded
    assert tio.read_manifest(out)["status"] == "diverged"


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"viscosity": 1.0}))
    assert cli.main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    bad.write_text("{not json")
    assert cli.main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "config error" in err


def test_missing_config_exits_4(tmp_path, capsys):
    code = cli.main(
        ["simulate", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]
    )
    assert code == cli.EXIT_IO
    assert "i/o error" in capsys.readouterr().err


def test_verify_scaling_suite_passes(capsys):
    code = cli.main(["verify", "--suite", "scaling", "--seed", "3", "--n", "2"])
    assert code == cli.EXIT_OK
    text = capsys.readouterr().out
    assert "suite scaling: PASS" in text
    assert "result: pass" in text


def test_verify_rejects_empty_ensemble(capsys):
    assert cli.main(["verify", "--suite", "scaling", "--n", "0"]) == 2
    capsys.readouterr()


def monitor_config(path):
    cfg = SimConfig(
        dim=4,
        modes_per_axis=8,
        nu=0.4,
        eta=0.3,
        dt=1e-3,
        t_end=0.006,
        record_every=3,
        snapshot_every=3,
        initial=InitialCondition(
            preset="random_divfree", seed=9, amplitude=1.0, b_amplitude=0.5
        ),
        criteria=(CriterionSpec(Theorem.T1_1, pairs=(("u3", (8, 16)), ("u4", (8, 16)))),),
        monitor_bootstrap=True,
    )
    tio.save_config(path, cfg)
    return cfg


def test_monitor_replays_stored_run(tmp_path, capsys):
    cfg_path = tmp_path / "run.json"
    cfg = monitor_config(cfg_path)
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
    code = cli.main(["monitor", "--in", str(out), "--spec", str(cfg_path)])
    assert code == cli.EXIT_OK
    text = capsys.readouterr().out
    assert "replayed 3 snapshots" in text
    assert "criterion T1_1: accumulators finite" in text
    assert "bootstrap_trigger:" in text

    run_table = tio.read_series_csv(out / tio.SERIES_NAME)
    replay_table = tio.read_series_csv(out / "replay.csv")
    # snapshots at every record, so recomputed norms must agree bit for bit
    for col in ("time", "energy", "L8_u3", "L8_u4", "gradu_LN", "gradb_LN"):
        assert replay_table[col] == run_table[col]
    # trapezoid accumulators at the record cadence track the run's own
    for key in ("acc_T1_1_u3", "acc_T1_1_u4"):
        for a, b in zip(replay_table[key], run_table[key]):
            assert a == pytest.approx(b, abs=1e-9)


def test_monitor_without_snapshots_exits_2(tmp_path, capsys):
    cfg_path = tmp_path / "run.json"
    monitor_config(cfg_path)
    empty = tmp_path / "empty"
    empty.mkdir()
    assert cli.main(["monitor", "--in", str(empty), "--spec", str(cfg_path)]) == 2
    assert "no state snapshots" in capsys.readouterr().err


def test_monitor_grid_mismatch_exits_2(tmp_path, capsys):
    run_cfg = write_config(tmp_path / "run2d.json")
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(run_cfg), "--out", str(out)]) == 0
    spec_path = tmp_path / "spec4d.json"
    monitor_config(spec_path)
    assert cli.main(["monitor", "--in", str(out), "--spec", str(spec_path)]) == 2
    assert "does not match" in capsys.readouterr().err


def test_threads_env_validation(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv(cli.THREADS_ENV, "many")
    cfg = write_config(tmp_path / "run.json")
    code = cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "not an integer" in capsys.readouterr().err


def test_threads_flag_wins_over_env(monkeypatch, capsys):
    monkeypatch.setenv(cli.THREADS_ENV, "many")
    code = cli.main(
        ["--threads", "1", "verify", "--suite", "scaling", "--seed", "3", "--n", "1"]
    )
    assert code == cli.EXIT_OK
    capsys.readouterr()


def test_bad_thread_count_exits_2(capsys):
    assert cli.main(["--threads", "0", "verify", "--suite", "scaling"]) == 2
    assert "thread count" in capsys.readouterr().err
