import json
import math
import struct

import numpy as np
import pytest

from torusmhd.criteria import CriterionSpec, Theorem
from torusmhd.dynamics import InitialCondition, MhdState, SimConfig, simulate
from torusmhd.field import SpectralField, synth_random_divfree, synth_random_field
from torusmhd.grid import make_grid
from torusmhd import io as tio


def small_state(grid, seed=0):
    u = synth_random_divfree(grid, grid.dim, seed)
    b = synth_random_divfree(grid, grid.dim, seed + 1, amplitude=0.5)
    return MhdState(u, b, 0.125, 0.7, 0.3)


def tiny_config(**over):
    base = dict(
        dim=2,
        modes_per_axis=16,
        nu=0.5,
        dt=1e-3,
        t_end=0.005,
        initial=InitialCondition(preset="random_divfree", seed=4),
        criteria=(CriterionSpec(Theorem.CLASSICAL_U, pairs=(("u", (8, 4)),)),),
    )
    base.update(over)
    return SimConfig(**base)


# ---------------------------------------------------------------- snapshots


def test_state_snapshot_roundtrip(grid2, tmp_path):
    st = small_state(grid2)
    path = tmp_path / "state_00000005.spc4"
    tio.write_state_snapshot(path, st)
    back = tio.read_state_snapshot(path)
    assert back.grid == grid2
    assert back.time == st.time and back.nu == st.nu and back.eta == st.eta
    assert np.array_equal(back.u.coeffs, st.u.coeffs)
    assert np.array_equal(back.b.coeffs, st.b.coeffs)

    # byte-identical rewrites
    other = tmp_path / "again.spc4"
    tio.write_state_snapshot(other, st)
    assert other.read_bytes() == path.read_bytes()


def test_scalar_snapshot_roundtrip(grid2, tmp_path):
    f = synth_random_field(grid2, 1, seed=3)
    path = tmp_path / "pi.spc4"
    tio.write_scalar_snapshot(path, f, time=0.25)
    snap = tio.read_snapshot(path)
    assert snap.time == 0.25
    assert np.array_equal(snap.coeffs, f.coeffs)
    vec = synth_random_divfree(grid2, 2, seed=1)
    with pytest.raises(ValueError, match="one component"):
        tio.write_scalar_snapshot(tmp_path / "no.spc4", vec, time=0.0)


def header_bytes(**over):
    fields = dict(
        magic=tio.SNAPSHOT_MAGIC,
        version=tio.SNAPSHOT_VERSION,
        dim=2,
        m=16,
        count=1,
        side=2 * math.pi,
        time=0.0,
        nu=0.0,
        eta=0.0,
    )
    fields.update(over)
    return struct.pack(
        "<4s4I4d",
        fields["magic"],
        fields["version"],
        fields["dim"],
        fields["m"],
        fields["count"],
        fields["side"],
        fields["time"],
        fields["nu"],
        fields["eta"],
    )


def test_snapshot_errors_name_the_file(tmp_path):
    p = tmp_path / "bad.spc4"

    p.write_bytes(b"SP")
    with pytest.raises(tio.SnapshotFormatError, match="truncated"):
        tio.read_snapshot(p)

    p.write_bytes(header_bytes(magic=b"NOPE") + b"\0" * 4096)
    with pytest.raises(tio.SnapshotFormatError, match="bad magic"):
        tio.read_snapshot(p)

    p.write_bytes(header_bytes(version=9) + b"\0" * 4096)
    with pytest.raises(tio.SnapshotFormatError, match="version 9"):
        tio.read_snapshot(p)

    p.write_bytes(header_bytes(dim=5) + b"\0" * 4096)
    with pytest.raises(tio.SnapshotFormatError, match="dimension 5"):
        tio.read_snapshot(p)

    p.write_bytes(header_bytes(m=7) + b"\0" * 4096)
    with pytest.raises(tio.SnapshotFormatError, match="modes per axis 7"):
        tio.read_snapshot(p)

    p.write_bytes(header_bytes() + b"\0" * 64)  # wrong payload size
    with pytest.raises(tio.SnapshotFormatError, match="payload"):
        tio.read_snapshot(p)

    good = np.zeros((1, 16, 16), dtype="<c16")
    good[0, 0, 0] = math.inf
    p.write_bytes(header_bytes() + good.tobytes())
    with pytest.raises(tio.SnapshotFormatError, match="non-finite"):
        tio.read_snapshot(p)

    # error messages carry the path so batch replays can name the culprit
    try:
        tio.read_snapshot(p)
    except tio.SnapshotFormatError as exc:
        assert "bad.spc4" in str(exc)


def test_read_state_snapshot_needs_full_state(grid2, tmp_path):
    f = synth_random_field(grid2, 1, seed=2)
    path = tmp_path / "state_00000001.spc4"
    tio.write_scalar_snapshot(path, f, time=0.0)
    with pytest.raises(tio.SnapshotFormatError, match="components"):
        tio.read_state_snapshot(path)


def test_state_listing_orders_and_filters(grid2, tmp_path):
    times = {0: 0.0, 30: 0.03, 10: 0.01}
    for step, t in times.items():
        st = small_state(grid2)
        st = MhdState(st.u, st.b, t, st.nu, st.eta)
        tio.write_state_snapshot(tmp_path / tio.state_filename(step), st)
    (tmp_path / "state_123.spc4").write_bytes(b"decoy")
    (tmp_path / "other.spc4").write_bytes(b"decoy")
    (tmp_path / "series.csv").write_text("time\n0\n")
    listed = tio.list_state_snapshots(tmp_path)
    assert [t for t, _p in listed] == [0.0, 0.01, 0.03]
    assert [p.name for _t, p in listed] == [
        "state_00000000.spc4",
        "state_00000010.spc4",
        "state_00000030.spc4",
    ]
    assert tio.state_filename(7) == "state_00000007.spc4"


# ------------------------------------------------------------------- series


def test_series_roundtrip_exact(tmp_path):
    cfg = tiny_config()
    res = simulate(cfg)
    path = tmp_path / tio.SERIES_NAME
    tio.write_series_csv(path, cfg, res.series, res.ledger_history)
    table = tio.read_series_csv(path)
    cols = tio.series_columns(cfg)
    assert list(table) == cols
    assert cols[:4] == ["time", "energy", "dissipation_integral", "defect"]
    assert "L8_u" in cols and "acc_CLASSICAL_U_u" in cols
    # repr round-trips every float bit-exactly
    assert table["time"] == res.series.times
    assert table["energy"] == res.series.records["energy"]
    assert table["defect"] == res.ledger_history["defect"]


def test_series_table_missing_column(tmp_path):
    cfg = tiny_config()
    res = simulate(cfg)
    history = dict(res.ledger_history)
    del history["defect"]
    with pytest.raises(KeyError, match="defect"):
        tio.series_table(cfg, res.series, history)


def test_series_csv_errors(tmp_path):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    with pytest.raises(ValueError, match="empty"):
        tio.read_series_csv(empty)
    ragged = tmp_path / "r.csv"
    ragged.write_text("a,b\n1.0\n")
    with pytest.raises(ValueError, match="ragged"):
        tio.read_series_csv(ragged)


# ------------------------------------------------------------------- config


def full_config():
    return SimConfig(
        dim=4,
        modes_per_axis=12,
        nu=0.8,
        eta=0.6,
        dt=2e-3,
        t_end=0.01,
        initial=InitialCondition(
            preset="random_divfree", seed=11, decay=2.5, amplitude=1.5, b_amplitude=0.5
        ),
        record_every=2,
        snapshot_every=4,
        criteria=(
            CriterionSpec(Theorem.T1_1, pairs=(("u3", (8, 16)), ("u4", (math.inf, 4)))),
            CriterionSpec(Theorem.T1_2, smallness=True),
        ),
        monitor_bootstrap=True,
        free_axes=(2, 4),
    )


def test_config_document_roundtrip(tmp_path):
    cfg = full_config()
    doc = json.loads(json.dumps(tio.config_to_dict(cfg)))
    assert tio.config_from_dict(doc) == cfg
    path = tmp_path / "run.json"
    tio.save_config(path, cfg)
    assert tio.load_config(path) == cfg
    # infinite exponents travel as the string "inf"
    assert doc["criteria"][0]["pairs"]["u4"][0] == "inf"


def test_config_rejects_unknown_keys():
    with pytest.raises(tio.ConfigError, match="'viscosity'"):
        tio.config_from_dict({"viscosity": 1.0})
    with pytest.raises(tio.ConfigError, match="'initial.kind'"):
        tio.config_from_dict({"initial": {"kind": "zero"}})
    with pytest.raises(tio.ConfigError, match=r"'criteria\[0\].bogus'"):
        tio.config_from_dict({"criteria": [{"theorem": "T1_1", "bogus": 1}]})


@pytest.mark.parametrize(
    "doc,msg",
    [
        ({"dim": 2.5}, "integer"),
        ({"dt": "fast"}, "number"),
        ({"monitor_bootstrap": 1}, "boolean"),
        ({"free_axes": [1]}, "two integers"),
        ({"initial": {"seed": True}}, "integer"),
        ({"initial": {"preset": 7}}, "string"),
        ({"initial": {"preset": "vortex"}}, "preset"),
        ({"criteria": {"theorem": "T1_1"}}, "list"),
        ({"criteria": [{"pairs": {}}]}, "missing 'theorem'"),
        ({"criteria": [{"theorem": "T9"}]}, "unknown theorem"),
        ({"criteria": [{"theorem": "T1_1", "smallness": True, "pairs": {}}]}, "conflicts"),
        ({"criteria": [{"theorem": "T1_5", "smallness": True}]}, "smallness"),
        ({"criteria": [{"theorem": "T1_1", "pairs": []}]}, "map components"),
        ({"criteria": [{"theorem": "T1_1", "pairs": {"u3": [8]}}]}, r"\[p, r\] pair"),
        (
            {"criteria": [{"theorem": "T1_1", "pairs": {"u3": [8, 15], "u4": [8, 16]}}]},
            "admissible",
        ),
        ({"dim": 2, "dt": -1.0}, "dt"),
    ],
)
def test_config_rejects_bad_values(doc, msg):
    with pytest.raises(tio.ConfigError, match=msg):
        tio.config_from_dict(doc)


def test_load_config_bad_json(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(tio.ConfigError, match="not valid JSON"):
        tio.load_config(p)


# ----------------------------------------------------------------- manifest


def test_manifest_inventory(tmp_path):
    cfg = tiny_config(snapshot_every=5)
    res = simulate(
        cfg,
        snapshot_sink=lambda n, st, pi: tio.write_state_snapshot(
            tmp_path / tio.state_filename(n), st
        ),
    )
    tio.write_series_csv(tmp_path / tio.SERIES_NAME, cfg, res.series, res.ledger_history)
    (tmp_path / "notes.txt").write_text("scratch\n")
    man = tio.write_manifest(tmp_path, res, started=1.0, finished=2.0)
    again = tio.read_manifest(tmp_path)
    assert again == man
    assert man["format"] == "torusmhd-run"
    assert man["status"] == "completed"
    assert man["records"] == len(res.series)
    assert man["columns"] == tio.series_columns(cfg)
    assert man["config"] == tio.config_to_dict(cfg)
    assert tio.MANIFEST_NAME not in man["files"]
    assert set(man["files"]) == {
        "series.csv",
        "notes.txt",
        "state_00000000.spc4",
        "state_00000005.spc4",
    }
    name = "series.csv"
    assert man["files"][name] == tio.file_sha256(tmp_path / name)


def test_read_manifest_bad_json(tmp_path):
    (tmp_path / tio.MANIFEST_NAME).write_text("nope")
    with pytest.raises(tio.SnapshotFormatError, match="not valid JSON"):
        tio.read_manifest(tmp_path)
