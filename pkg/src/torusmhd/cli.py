"""Command-line front end: simulate, verify, monitor.

Exit codes are part of the contract: 0 success, 2 configuration error,
3 diverged run, 4 I/O error, 5 verification failure.  argparse usage
errors also exit 2, which is the configuration-error code on purpose.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from .criteria import MonitorStatus, bootstrap_trigger
from .dynamics import (
    MhdState,
    _advance_accumulators,
    accumulator_columns,
    compute_record,
    dissipation_rate,
    simulate,
)
from .grid import set_fft_workers
from .norms import EnergyLedger, NormSeries, energy, energy_ledger_update
from . import io as tio
from .verify import SUITES, run_suite, suite_passed

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4
EXIT_VERIFY = 5

THREADS_ENV = "TORUSMHD_THREADS"

__all__ = ["main", "build_parser", "THREADS_ENV"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusmhd",
        description="Pseudo-spectral incompressible MHD on the periodic torus "
        "with regularity-criterion monitoring.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"FFT worker threads (overrides ${THREADS_ENV}; default all cores)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a configured simulation")
    p_sim.add_argument("--config", required=True, help="JSON configuration file")
    p_sim.add_argument("--out", required=True, help="output directory")

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("--suite", required=True, choices=SUITES)
    p_ver.add_argument("--seed", type=int, default=42)
    p_ver.add_argument("--n", type=int, default=20, help="ensemble size")

    p_mon = sub.add_parser(
        "monitor", help="recompute criteria from stored snapshots"
    )
    p_mon.add_argument("--in", dest="indir", required=True, help="snapshot directory")
    p_mon.add_argument("--spec", required=True, help="JSON monitoring configuration")
    return parser


def _resolve_threads(flag: int | None) -> None:
    n = flag
    if n is None:
        env = os.environ.get(THREADS_ENV)
        if env is not None:
            try:
                n = int(env)
            except ValueError:
                raise tio.ConfigError(
                    f"environment variable {THREADS_ENV}={env!r} is not an integer"
                ) from None
    if n is not None and n < 1:
        raise tio.ConfigError(f"thread count must be >= 1, got {n}")
    set_fft_workers(n)


def cmd_simulate(args) -> int:
    config = tio.load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()

    def sink(step: int, state: MhdState, _pi) -> None:
        tio.write_state_snapshot(out / tio.state_filename(step), state)

    result = simulate(config, snapshot_sink=sink)
    tio.write_series_csv(
        out / tio.SERIES_NAME, config, result.series, result.ledger_history
    )
    tio.write_manifest(out, result, started=started, finished=time.time())
    print(f"status: {result.status}")
    print(f"records: {len(result.series)}")
    print(f"energy: {result.ledger.current_energy!r}")
    print(f"defect: {result.ledger.defect!r}")
    for st in result.monitor_statuses:
        print(f"criterion {st.spec.label}: {st.verdict}")
    print(f"wrote {out / tio.SERIES_NAME} and {out / tio.MANIFEST_NAME}")
    return EXIT_OK if result.status == "completed" else EXIT_DIVERGED


def cmd_verify(args) -> int:
    if args.n < 1:
        raise tio.ConfigError("--n must be >= 1")
    reports = run_suite(args.suite, seed=args.seed, n=args.n)
    for rep in reports:
        print(rep.summary())
        print()
    ok = suite_passed(reports)
    print(f"suite {args.suite}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY


def _load_state(path: Path) -> MhdState:
    try:
        return tio.read_state_snapshot(path)
    except tio.SnapshotFormatError:
        raise
    except ValueError as exc:
        # field-level invariant failures get the file name attached
        raise tio.SnapshotFormatError(f"{path}: {exc}") from None


def cmd_monitor(args) -> int:
    spec_cfg = tio.load_config(args.spec)
    indir = Path(args.indir)
    snaps = tio.list_state_snapshots(indir)
    if not snaps:
        raise tio.ConfigError(f"{indir}: no state snapshots to monitor")

    series = NormSeries()
    statuses = [MonitorStatus.for_spec(s) for s in spec_cfg.criteria]
    acc_cols = accumulator_columns(spec_cfg)
    history: dict[str, list[float]] = {"dissipation_integral": [], "defect": []}
    for key, _tag, _r in acc_cols:
        history[key] = []
    ledger: EnergyLedger | None = None
    last_t: float | None = None

    for t, path in snaps:
        state = _load_state(path)
        g = state.grid
        if (g.dim, g.modes_per_axis) != (spec_cfg.dim, spec_cfg.modes_per_axis):
            raise tio.ConfigError(
                f"{path}: snapshot grid {g.dim}x{g.modes_per_axis} does not match "
                f"the spec's {spec_cfg.dim}x{spec_cfg.modes_per_axis}"
            )
        row, _pi = compute_record(state.u, state.b, spec_cfg)
        series.record(t, row)
        dt_rec = (t - last_t) if last_t is not None else 0.0
        _advance_accumulators(series, statuses, spec_cfg, dt_rec)
        last_t = t
        e = energy(state.u, state.b if state.has_b else None)
        if ledger is None:
            ledger = EnergyLedger(e)
        energy_ledger_update(ledger, e, dissipation_rate(state), dt_rec)
        history["dissipation_integral"].append(ledger.dissipation_integral)
        history["defect"].append(ledger.defect)
        for key, _tag, _r in acc_cols:
            history[key].append(series.accumulators[key])

    replay_csv = indir / "replay.csv"
    tio.write_series_csv(replay_csv, spec_cfg, series, history)
    print(f"replayed {len(snaps)} snapshots from {indir}")
    print(f"defect: {ledger.defect!r}")
    for st in statuses:
        finite = "finite" if st.finite else "DIVERGENT"
        vals = "  ".join(
            f"{st.spec.accumulator_key(c)}={st.accumulators[c]!r}"
            for c, _ in st.spec.pairs
        )
        print(f"criterion {st.spec.label}: accumulators {finite}  {vals}")
    if spec_cfg.monitor_bootstrap:
        print(f"bootstrap_trigger: {bootstrap_trigger(series)!r}")
    print(f"wrote {replay_csv}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve_threads(args.threads)
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_monitor(args)
    except tio.SnapshotFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except tio.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
