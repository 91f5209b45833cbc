"""On-disk formats: snapshots, series tables, configs, run manifests.

Snapshot files hold raw spectral coefficients with a fixed 52-byte header,
so a stored run can be replayed bit for bit.  The series table is plain CSV
with a canonical column order; floats are written with ``repr`` so repeated
runs of the same configuration produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .criteria import CriterionSpec, Theorem
from .dynamics import (
    InitialCondition,
    MhdState,
    SimConfig,
    SimResult,
    accumulator_columns,
)
from .field import SpectralField
from .grid import Grid, make_grid

__all__ = [
    "SnapshotFormatError",
    "ConfigError",
    "Snapshot",
    "write_state_snapshot",
    "write_scalar_snapshot",
    "read_snapshot",
    "read_state_snapshot",
    "state_filename",
    "list_state_snapshots",
    "series_columns",
    "series_table",
    "write_series_csv",
    "read_series_csv",
    "config_to_dict",
    "config_from_dict",
    "load_config",
    "save_config",
    "file_sha256",
    "write_manifest",
    "read_manifest",
    "MANIFEST_NAME",
    "SERIES_NAME",
]


class SnapshotFormatError(ValueError):
    """A snapshot file is malformed; the message names the file."""


class ConfigError(ValueError):
    """A configuration document is invalid; the message names the key."""


# -- spectral snapshots -------------------------------------------------------

SNAPSHOT_MAGIC = b"SPC4"
SNAPSHOT_VERSION = 1
# magic, version, dim, modes per axis, component count; then side length,
# time, nu, eta; payload follows as little-endian complex128, component-major
_HEADER = struct.Struct("<4s4I4d")


@dataclass(frozen=True)
class Snapshot:
    grid: Grid
    time: float
    nu: float
    eta: float
    coeffs: np.ndarray  # (components,) + grid.shape, complex128


def _write_snapshot(
    path: Path, coeffs: np.ndarray, grid: Grid, time: float, nu: float, eta: float
) -> None:
    header = _HEADER.pack(
        SNAPSHOT_MAGIC,
        SNAPSHOT_VERSION,
        grid.dim,
        grid.modes_per_axis,
        coeffs.shape[0],
        grid.side_length,
        time,
        nu,
        eta,
    )
    payload = np.ascontiguousarray(coeffs, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def write_state_snapshot(path: str | Path, state: MhdState) -> None:
    """Store a full state: velocity components first, then magnetic."""
    coeffs = np.concatenate([state.u.coeffs, state.b.coeffs], axis=0)
    _write_snapshot(Path(path), coeffs, state.grid, state.time, state.nu, state.eta)


def write_scalar_snapshot(
    path: str | Path, field: SpectralField, time: float, nu: float = 0.0, eta: float = 0.0
) -> None:
    """Store a single-component field (the pressure, typically)."""
    if field.components != 1:
        raise ValueError("scalar snapshots hold exactly one component")
    _write_snapshot(Path(path), field.coeffs, field.grid, time, nu, eta)


def _read_header(path: Path) -> tuple[int, int, int, float, float, float, float]:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, dim, m, count, side, time, nu, eta = _HEADER.unpack(raw)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise SnapshotFormatError(f"{path}: unsupported version {version}")
    if dim not in (2, 3, 4):
        raise SnapshotFormatError(f"{path}: dimension {dim} out of range")
    if m < 8 or m % 2:
        raise SnapshotFormatError(f"{path}: modes per axis {m} invalid")
    if count < 1 or not (side > 0):
        raise SnapshotFormatError(f"{path}: invalid component count or side length")
    return dim, m, count, side, time, nu, eta


def read_snapshot(path: str | Path) -> Snapshot:
    path = Path(path)
    dim, m, count, side, time, nu, eta = _read_header(path)
    expected = count * m**dim
    with open(path, "rb") as fh:
        fh.seek(_HEADER.size)
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != expected:
        raise SnapshotFormatError(
            f"{path}: payload holds {data.size} coefficients, expected {expected}"
        )
    coeffs = data.reshape((count,) + (m,) * dim).astype(complex)
    if not np.all(np.isfinite(coeffs)):
        raise SnapshotFormatError(f"{path}: payload contains non-finite values")
    return Snapshot(make_grid(dim, m, side), time, nu, eta, coeffs)


def read_state_snapshot(path: str | Path) -> MhdState:
    """Load a state snapshot; validates divergence-freeness on construction."""
    snap = read_snapshot(path)
    g = snap.grid
    if snap.coeffs.shape[0] != 2 * g.dim:
        raise SnapshotFormatError(
            f"{path}: state snapshots need {2 * g.dim} components, "
            f"found {snap.coeffs.shape[0]}"
        )
    u = SpectralField(g, snap.coeffs[: g.dim])
    b = SpectralField(g, snap.coeffs[g.dim :])
    return MhdState(u, b, snap.time, snap.nu, snap.eta)


_STATE_RE = re.compile(r"^state_(\d{8})\.spc4$")


def state_filename(step: int) -> str:
    return f"state_{step:08d}.spc4"


def list_state_snapshots(directory: str | Path) -> list[tuple[float, Path]]:
    """State snapshot files under a directory, ordered by stored time."""
    directory = Path(directory)
    entries: list[tuple[float, Path]] = []
    for p in sorted(directory.iterdir()):
        if _STATE_RE.match(p.name):
            _dim, _m, _c, _side, time, _nu, _eta = _read_header(p)
            entries.append((time, p))
    entries.sort(key=lambda e: e[0])
    return entries


# -- series table -------------------------------------------------------------

SERIES_NAME = "series.csv"
MANIFEST_NAME = "manifest.json"


def series_columns(config: SimConfig) -> list[str]:
    """Canonical column order of the series table for a configuration."""
    cols = ["time", "energy", "dissipation_integral", "defect"]
    if config.dim == 4:
        cols += ["W", "X", "Y", "Z"]
    for spec in config.criteria:
        for comp, _pair in spec.pairs:
            cols.append(spec.norm_tag(comp))
            cols.append(spec.accumulator_key(comp))
    if config.monitor_bootstrap:
        for key, tag, _r in accumulator_columns(config):
            if key.startswith("acc_bootstrap_"):
                cols.append(tag)
                cols.append(key)
    return cols


def series_table(
    config: SimConfig, series, history: dict[str, list[float]]
) -> tuple[list[str], list[list[float]]]:
    """Assemble the canonical table from a run's (or replay's) parts."""
    cols = series_columns(config)
    rows = []
    for i in range(len(series)):
        row = []
        for c in cols:
            if c == "time":
                row.append(series.times[i])
            elif c in series.records:
                row.append(series.records[c][i])
            elif c in history:
                row.append(history[c][i])
            else:
                raise KeyError(f"series table column '{c}' missing from the run")
        rows.append(row)
    return cols, rows


def write_series_csv(
    path: str | Path,
    config: SimConfig,
    series,
    history: dict[str, list[float]],
) -> None:
    cols, rows = series_table(config, series, history)
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(repr(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_series_csv(path: str | Path) -> dict[str, list[float]]:
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise ValueError(f"{path}: empty series file")
    cols = text[0].split(",")
    out: dict[str, list[float]] = {c: [] for c in cols}
    for line in text[1:]:
        parts = line.split(",")
        if len(parts) != len(cols):
            raise ValueError(f"{path}: ragged row '{line}'")
        for c, v in zip(cols, parts):
            out[c].append(float(v))
    return out


# -- configuration documents --------------------------------------------------


def _num_out(v: float):
    if math.isinf(v):
        return "inf"
    return v


def _num_in(v, path: str) -> float:
    if v == "inf":
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number or \"inf\" at '{path}', got {v!r}")
    return float(v)


def config_to_dict(config: SimConfig) -> dict:
    criteria = []
    for spec in config.criteria:
        entry: dict = {"theorem": spec.theorem.value}
        if spec.smallness:
            entry["smallness"] = True
        else:
            entry["pairs"] = {
                comp: [_num_out(p), _num_out(r)] for comp, (p, r) in spec.pairs
            }
        criteria.append(entry)
    return {
        "dim": config.dim,
        "modes_per_axis": config.modes_per_axis,
        "side_length": config.side_length,
        "nu": config.nu,
        "eta": config.eta,
        "dt": config.dt,
        "t_end": config.t_end,
        "initial": {
            "preset": config.initial.preset,
            "seed": config.initial.seed,
            "decay": config.initial.decay,
            "amplitude": config.initial.amplitude,
            "b_amplitude": config.initial.b_amplitude,
        },
        "record_every": config.record_every,
        "snapshot_every": config.snapshot_every,
        "criteria": criteria,
        "monitor_bootstrap": config.monitor_bootstrap,
        "free_axes": list(config.free_axes),
    }


def _check_keys(doc: dict, allowed: tuple[str, ...], path: str) -> None:
    for k in doc:
        if k not in allowed:
            where = f"{path}.{k}" if path else k
            raise ConfigError(f"unknown config key '{where}'")


def _criterion_from_dict(doc: dict, path: str) -> CriterionSpec:
    if not isinstance(doc, dict):
        raise ConfigError(f"expected an object at '{path}'")
    _check_keys(doc, ("theorem", "smallness", "pairs"), path)
    if "theorem" not in doc:
        raise ConfigError(f"missing 'theorem' at '{path}'")
    try:
        theorem = Theorem(doc["theorem"])
    except ValueError:
        raise ConfigError(
            f"unknown theorem '{doc['theorem']}' at '{path}.theorem'"
        ) from None
    smallness = doc.get("smallness", False)
    if not isinstance(smallness, bool):
        raise ConfigError(f"'{path}.smallness' must be a boolean")
    if smallness:
        if "pairs" in doc:
            raise ConfigError(
                f"'{path}.pairs' conflicts with smallness mode; remove one"
            )
        try:
            return CriterionSpec(theorem, smallness=True)
        except ValueError as exc:
            raise ConfigError(f"at '{path}': {exc}") from None
    pairs_doc = doc.get("pairs")
    if not isinstance(pairs_doc, dict):
        raise ConfigError(f"'{path}.pairs' must map components to [p, r]")
    pairs = []
    for comp, pr in pairs_doc.items():
        if not (isinstance(pr, list) and len(pr) == 2):
            raise ConfigError(f"'{path}.pairs.{comp}' must be a [p, r] pair")
        p = _num_in(pr[0], f"{path}.pairs.{comp}[0]")
        r = _num_in(pr[1], f"{path}.pairs.{comp}[1]")
        pairs.append((comp, (p, r)))
    try:
        return CriterionSpec(theorem, tuple(pairs))
    except ValueError as exc:
        raise ConfigError(f"at '{path}': {exc}") from None


_TOP_KEYS = (
    "dim",
    "modes_per_axis",
    "side_length",
    "nu",
    "eta",
    "dt",
    "t_end",
    "initial",
    "record_every",
    "snapshot_every",
    "criteria",
    "monitor_bootstrap",
    "free_axes",
)
_INITIAL_KEYS = ("preset", "seed", "decay", "amplitude", "b_amplitude")


def config_from_dict(doc: dict) -> SimConfig:
    """Build a configuration from a parsed JSON document.

    Unknown keys anywhere in the document are errors naming the offending
    dotted path; value errors from the configuration itself pass through
    as :class:`ConfigError`.
    """
    if not isinstance(doc, dict):
        raise ConfigError("the configuration document must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "")
    kwargs: dict = {}
    for k in ("dim", "modes_per_axis", "record_every", "snapshot_every"):
        if k in doc:
            v = doc[k]
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"'{k}' must be an integer, got {v!r}")
            kwargs[k] = v
    for k in ("side_length", "nu", "eta", "dt", "t_end"):
        if k in doc:
            v = doc[k]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"'{k}' must be a number, got {v!r}")
            kwargs[k] = float(v)
    if "monitor_bootstrap" in doc:
        if not isinstance(doc["monitor_bootstrap"], bool):
            raise ConfigError("'monitor_bootstrap' must be a boolean")
        kwargs["monitor_bootstrap"] = doc["monitor_bootstrap"]
    if "free_axes" in doc:
        fa = doc["free_axes"]
        if not (isinstance(fa, list) and len(fa) == 2 and all(isinstance(a, int) and not isinstance(a, bool) for a in fa)):
            raise ConfigError("'free_axes' must be a list of two integers")
        kwargs["free_axes"] = tuple(fa)
    if "initial" in doc:
        ini = doc["initial"]
        if not isinstance(ini, dict):
            raise ConfigError("'initial' must be an object")
        _check_keys(ini, _INITIAL_KEYS, "initial")
        ikw: dict = {}
        if "preset" in ini:
            if not isinstance(ini["preset"], str):
                raise ConfigError("'initial.preset' must be a string")
            ikw["preset"] = ini["preset"]
        if "seed" in ini:
            if isinstance(ini["seed"], bool) or not isinstance(ini["seed"], int):
                raise ConfigError("'initial.seed' must be an integer")
            ikw["seed"] = ini["seed"]
        for k in ("decay", "amplitude", "b_amplitude"):
            if k in ini:
                v = ini[k]
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ConfigError(f"'initial.{k}' must be a number")
                ikw[k] = float(v)
        try:
            kwargs["initial"] = InitialCondition(**ikw)
        except ValueError as exc:
            raise ConfigError(f"at 'initial': {exc}") from None
    if "criteria" in doc:
        crits = doc["criteria"]
        if not isinstance(crits, list):
            raise ConfigError("'criteria' must be a list")
        kwargs["criteria"] = tuple(
            _criterion_from_dict(c, f"criteria[{i}]") for i, c in enumerate(crits)
        )
    try:
        return SimConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> SimConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return config_from_dict(doc)


def save_config(path: str | Path, config: SimConfig) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n")


# -- run manifest -------------------------------------------------------------


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(
    directory: str | Path,
    result: SimResult,
    started: float | None = None,
    finished: float | None = None,
) -> dict:
    """Summarize a stored run: config echo, columns, checksums of outputs.

    Every file in the directory (the manifest itself excepted) enters the
    inventory, so an interrupted or diverged run's partial outputs are
    visible together with the recorded status.
    """
    from . import __version__

    directory = Path(directory)
    files = {}
    for p in sorted(directory.iterdir()):
        if p.name == MANIFEST_NAME or not p.is_file():
            continue
        files[p.name] = file_sha256(p)
    manifest = {
        "format": "torusmhd-run",
        "format_version": SNAPSHOT_VERSION,
        "package_version": __version__,
        "status": result.status,
        "seed": result.config.initial.seed,
        "started_unix": started,
        "finished_unix": finished,
        "records": len(result.series),
        "columns": series_columns(result.config),
        "config": config_to_dict(result.config),
        "files": files,
    }
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def read_manifest(directory: str | Path) -> dict:
    path = Path(directory) / MANIFEST_NAME
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SnapshotFormatError(f"{path}: not valid JSON ({exc})") from None
