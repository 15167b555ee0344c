#!/usr/bin/env python3
"""Simulated selection study on the default 4x4 grid.

Runs the sequential 1..16 task with the dwell baseline and the
roll-to-confirm technique, plus a "practiced" second twist session with
a faster roll, and prints the per-method table. A JSON summary lands
next to the logs.

Usage:
    python3 scripts/run_study.py [--out-dir study_out] [--seeds 0 1 2]
"""

import argparse
import json
from pathlib import Path

from twistsel.engine import EngineConfig, Method
from twistsel.harness import STUDY_PRESET, TaskSpec, UserParams, aggregate, run_task, synth_trace
from twistsel.scene import default_grid


def run_condition(name, method, user, scene, seeds, out_dir):
    results = []
    for seed in seeds:
        params = UserParams(
            look_speed_dps=user.look_speed_dps,
            roll_speed_dps=user.roll_speed_dps,
            overshoot_deg=user.overshoot_deg,
            hold_ms=user.hold_ms,
            reaction_ms=user.reaction_ms,
            noise_sigma_deg=user.noise_sigma_deg,
            sample_hz=user.sample_hz,
            seed=seed,
        )
        spec = TaskSpec(tuple(range(1, 17)), scene, method, EngineConfig())
        log_path = out_dir / f"{name}_seed{seed}.jsonl"
        with open(log_path, "w") as f:
            result = run_task(
                spec,
                synth_trace(spec, params),
                on_event=lambda rec: f.write(json.dumps(rec) + "\n"),
            )
        results.append(result)
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="study_out")
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--noise-sigma", type=float, default=0.8)
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scene = default_grid()
    base = UserParams(
        look_speed_dps=STUDY_PRESET.look_speed_dps,
        roll_speed_dps=STUDY_PRESET.roll_speed_dps,
        noise_sigma_deg=args.noise_sigma,
    )
    practiced = UserParams(
        look_speed_dps=base.look_speed_dps * 1.15,
        roll_speed_dps=base.roll_speed_dps * 1.4,
        reaction_ms=110.0,
        noise_sigma_deg=args.noise_sigma,
    )

    conditions = [
        ("dwell", Method.DWELL, base),
        ("twist_session1", Method.TWIST_BINARY, base),
        ("twist_session2", Method.TWIST_BINARY, practiced),
    ]
    print(f"{'condition':<18}{'n':>4}{'mean_s':>10}{'sd_s':>10}{'false_pos':>11}")
    all_summaries = {}
    for name, method, user in conditions:
        results = run_condition(name, method, user, scene, args.seeds, out_dir)
        summary = aggregate(results).to_dict()
        m = summary["methods"][method.value]
        sd = m["sd_across_records_ms"]
        print(
            f"{name:<18}{m['n_records']:>4}"
            f"{m['pooled_mean_ms'] / 1000:>10.4f}"
            f"{(sd or 0.0) / 1000:>10.4f}"
            f"{m['false_positives']:>11}"
        )
        all_summaries[name] = summary

    out = out_dir / "study_summary.json"
    with open(out, "w") as f:
        json.dump(all_summaries, f, indent=2)
        f.write("\n")
    print(f"\nlogs and summary in {out_dir}/")


if __name__ == "__main__":
    main()
