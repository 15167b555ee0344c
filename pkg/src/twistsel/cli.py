"""Command line: simulate, replay, gen-trace, report, serve.

Every subcommand is reproducible from its flags and seed alone; nothing
reads a wall clock. Exit codes: 0 success, 1 runtime or data error,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from statistics import fmean, stdev

from .engine import EngineConfig, Method, TraceOrderError
from .harness import (
    EmptyTraceError,
    SelectionRecord,
    TaskResult,
    TaskSpec,
    UserParams,
    aggregate,
    read_trace_csv,
    run_task,
    synth_trace,
    write_trace_csv,
)
from .scene import build_grid

DEFAULT_PORT = 8787
PORT_ENV = "TWISTSEL_PORT"

METHODS = [m.value for m in Method]


def _grid_type(text: str) -> tuple[int, int]:
    try:
        rows, cols = text.lower().split("x")
        return int(rows), int(cols)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"--grid wants RxC, e.g. 4x4, got {text!r}") from e


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=METHODS, default="dwell")
    p.add_argument("--dwell-ms", type=float, default=780.0)
    p.add_argument("--threshold-deg", type=float, default=7.5)
    p.add_argument("--rearm-ratio", type=float, default=2.0 / 3.0)
    p.add_argument("--indicator-max-deg", type=float, default=45.0)


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid", type=_grid_type, default=(4, 4), metavar="RxC")
    p.add_argument("--cell-m", type=float, default=0.35)
    p.add_argument("--gap-m", type=float, default=0.10)
    p.add_argument("--distance-m", type=float, default=2.0)


def _add_user_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--look-speed", type=float, default=90.0, help="deg/s gaze travel")
    p.add_argument("--roll-speed", type=float, default=60.0, help="deg/s head roll")
    p.add_argument("--noise-sigma", type=float, default=0.0, help="gaze noise, deg")
    p.add_argument("--sample-hz", type=float, default=72.0)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistsel")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="synthesize a task trace and run it")
    _add_engine_flags(sim)
    _add_grid_flags(sim)
    _add_user_flags(sim)
    sim.add_argument("--log", default="twistsel_events.jsonl")
    sim.add_argument("--out", default="twistsel_summary.json")

    rep = sub.add_parser("replay", help="run a stored trace through the task")
    _add_engine_flags(rep)
    _add_grid_flags(rep)
    rep.add_argument("--trace", required=True)
    rep.add_argument("--log", default="twistsel_events.jsonl")
    rep.add_argument("--out", default="twistsel_summary.json")

    gen = sub.add_parser("gen-trace", help="write a synthetic trace CSV")
    _add_engine_flags(gen)
    _add_grid_flags(gen)
    _add_user_flags(gen)
    gen.add_argument("--trace", required=True)

    rpt = sub.add_parser("report", help="aggregate event logs into a summary")
    rpt.add_argument("logs", nargs="*")
    rpt.add_argument("--out", default="twistsel_summary.json")

    srv = sub.add_parser("serve", help="run the live session service")
    _add_engine_flags(srv)
    _add_grid_flags(srv)
    srv.add_argument("--port", type=int, default=None)
    srv.add_argument("--host", default="127.0.0.1")
    return parser


def _task_from_args(args) -> tuple[TaskSpec, UserParams | None]:
    rows, cols = args.grid
    scene = build_grid(rows, cols, args.cell_m, args.cell_m, args.gap_m, args.distance_m)
    config = EngineConfig(
        dwell_ms=args.dwell_ms,
        threshold_deg=args.threshold_deg,
        rearm_ratio=args.rearm_ratio,
        indicator_max_deg=args.indicator_max_deg,
    )
    spec = TaskSpec(
        sequence=tuple(range(1, rows * cols + 1)),
        scene=scene,
        method=Method.from_wire(args.method),
        config=config,
    )
    user = None
    if hasattr(args, "look_speed"):
        user = UserParams(
            look_speed_dps=args.look_speed,
            roll_speed_dps=args.roll_speed,
            noise_sigma_deg=args.noise_sigma,
            sample_hz=args.sample_hz,
            seed=args.seed,
        )
    return spec, user


def _run_and_write(spec: TaskSpec, trace, log_path: str, out_path: str) -> TaskResult:
    log_lines: list[str] = []
    result = run_task(spec, trace, on_event=lambda rec: log_lines.append(json.dumps(rec)))
    with open(log_path, "w") as f:
        for line in log_lines:
            f.write(line + "\n")
    summary = aggregate([result])
    with open(out_path, "w") as f:
        json.dump(summary.to_dict(), f, indent=2)
        f.write("\n")
    return result


def _print_result(result: TaskResult) -> None:
    mean = "n/a" if result.mean_ms is None else f"{result.mean_ms:.1f}"
    sd = "n/a" if result.sd_ms is None else f"{result.sd_ms:.1f}"
    print(
        f"method={result.method.value} completed={result.completed} "
        f"selections={len(result.records)} mean_ms={mean} sd_ms={sd} "
        f"false_positives={result.false_positives}"
    )


def cmd_simulate(args) -> int:
    spec, user = _task_from_args(args)
    trace = synth_trace(spec, user)
    result = _run_and_write(spec, trace, args.log, args.out)
    _print_result(result)
    return 0


def cmd_replay(args) -> int:
    spec, _ = _task_from_args(args)
    with open(args.trace) as f:
        trace = read_trace_csv(f)
    result = _run_and_write(spec, trace, args.log, args.out)
    _print_result(result)
    return 0


def cmd_gen_trace(args) -> int:
    spec, user = _task_from_args(args)
    trace = synth_trace(spec, user)
    with open(args.trace, "w") as f:
        write_trace_csv(f, trace)
    print(f"wrote {len(trace)} samples to {args.trace}")
    return 0


def _results_from_log(path: str) -> list[TaskResult]:
    """Rebuild per-method task results from one event-log file. The first
    correct record of each method in a file is the uncounted starter."""
    by_method: dict[str, dict] = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{lineno}: bad JSON: {e}") from e
            slot = by_method.setdefault(rec["method"], {"records": [], "fp": 0})
            if rec["kind"] == "correct":
                slot["records"].append(rec)
            elif rec["kind"] == "false_positive":
                slot["fp"] += 1
    results = []
    for method_name, slot in by_method.items():
        method = Method.from_wire(method_name)
        records = tuple(
            SelectionRecord(
                button=r["button"],
                t_ms=r["t_ms"],
                elapsed_ms=r["elapsed_ms"],
                method=method,
                counted=i > 0,
            )
            for i, r in enumerate(slot["records"])
        )
        counted = [r.elapsed_ms for r in records if r.counted]
        results.append(
            TaskResult(
                records=records,
                false_positives=slot["fp"],
                mean_ms=fmean(counted) if counted else None,
                sd_ms=stdev(counted) if len(counted) > 1 else None,
                completed=False,
                method=method,
            )
        )
    return results


def cmd_report(args) -> int:
    if not args.logs:
        print("report: no event logs given", file=sys.stderr)
        return 1
    results = []
    for path in args.logs:
        results.extend(_results_from_log(path))
    summary = aggregate(results)
    with open(args.out, "w") as f:
        json.dump(summary.to_dict(), f, indent=2)
        f.write("\n")
    print(f"{'method':<20}{'n':>6}{'mean_ms':>12}{'sd_ms':>12}{'false_pos':>12}")
    for name, m in sorted(summary.methods.items()):
        mean = "n/a" if m.pooled_mean_ms is None else f"{m.pooled_mean_ms:.1f}"
        sd = "n/a" if m.sd_across_records_ms is None else f"{m.sd_across_records_ms:.1f}"
        print(f"{name:<20}{m.n_records:>6}{mean:>12}{sd:>12}{m.false_positives:>12}")
    return 0


def cmd_serve(args, parser: argparse.ArgumentParser) -> int:
    from .service import SessionConfig, serve

    port = args.port
    if port is None:
        env = os.environ.get(PORT_ENV)
        if env is not None:
            try:
                port = int(env)
            except ValueError:
                print(f"bad {PORT_ENV} value {env!r}", file=sys.stderr)
                return 1
        else:
            port = DEFAULT_PORT
    if not (0 < port < 65536):
        parser.error(f"port {port} out of range")
    spec, _ = _task_from_args(args)
    config = SessionConfig(
        host=args.host,
        port=port,
        method=spec.method,
        engine_config=spec.config,
        scene=spec.scene,
        sequence=spec.sequence,
    )
    serve(config)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "replay":
            return cmd_replay(args)
        if args.command == "gen-trace":
            return cmd_gen_trace(args)
        if args.command == "report":
            return cmd_report(args)
        if args.command == "serve":
            return cmd_serve(args, parser)
        parser.error(f"unknown command {args.command}")
    except (OSError, ValueError, KeyError, EmptyTraceError, TraceOrderError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
