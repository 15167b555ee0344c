"""Sequential selection task: running, synthesizing, and scoring.

The task is a fixed sequence of button ids (1..16 on the default grid)
selected in order. Feeding a pose trace through an engine yields
selection records (time between consecutive correct triggers) and a
false-positive count; a scripted ideal user can synthesize such traces
deterministically for any method and parameter set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean, stdev
from typing import Callable, Iterable, Optional, TextIO

import numpy as np

from .engine import (
    Engine,
    EngineConfig,
    EventKind,
    FrameState,
    InteractionEvent,
    Method,
    PoseSample,
)
from .orientation import FORWARD, Vec3, from_yaw_pitch_roll
from .scene import Scene

TRACE_HEADER = "t_ms,qw,qx,qy,qz"


class EmptyTraceError(ValueError):
    """Raised when a trace has no samples."""


class InvalidTaskError(ValueError):
    """Raised for malformed task specs or unreachable targets."""


class EmptyAggregateError(ValueError):
    """Raised when aggregating an empty result list."""


@dataclass(frozen=True, slots=True)
class TaskSpec:
    sequence: tuple[int, ...]
    scene: Scene
    method: Method
    config: EngineConfig

    def validate(self) -> "TaskSpec":
        if not self.sequence:
            raise InvalidTaskError("sequence must be non-empty")
        known = {t.id for t in self.scene.targets}
        missing = [i for i in self.sequence if i not in known]
        if missing:
            raise InvalidTaskError(f"sequence ids not in scene: {missing}")
        return self


@dataclass(frozen=True, slots=True)
class SelectionRecord:
    button: int
    t_ms: float
    elapsed_ms: float
    method: Method
    counted: bool  # first correct selection is excluded from stats


@dataclass(frozen=True, slots=True)
class TaskResult:
    records: tuple[SelectionRecord, ...]
    false_positives: int
    mean_ms: Optional[float]
    sd_ms: Optional[float]
    completed: bool
    method: Method

    def counted_elapsed(self) -> list[float]:
        return [r.elapsed_ms for r in self.records if r.counted]


@dataclass(frozen=True, slots=True)
class UserParams:
    look_speed_dps: float = 90.0
    roll_speed_dps: float = 60.0
    overshoot_deg: float = 1.0
    hold_ms: float = 50.0
    reaction_ms: float = 150.0
    noise_sigma_deg: float = 0.0
    sample_hz: float = 72.0
    seed: int = 0

    def validate(self) -> "UserParams":
        if self.look_speed_dps <= 0 or self.roll_speed_dps <= 0:
            raise InvalidTaskError("speeds must be positive")
        if self.sample_hz < 30:
            raise InvalidTaskError("sample_hz must be at least 30")
        if self.hold_ms < 0 or self.reaction_ms < 0 or self.noise_sigma_deg < 0:
            raise InvalidTaskError("durations and noise must be non-negative")
        return self


# Scripted user whose dwell-task mean lands in a human-plausible band
# (roughly 1.0-1.3 s per selection) on the default grid.
STUDY_PRESET = UserParams(look_speed_dps=90.0, roll_speed_dps=60.0)


def _mean_sd(values: list[float]) -> tuple[Optional[float], Optional[float]]:
    if not values:
        return None, None
    if len(values) < 2:
        return fmean(values), None
    return fmean(values), stdev(values)


class TaskRunner:
    """Advances a task over an engine, one sample at a time.

    Produces, per sample, the engine frame, raw events, and event-log
    records ({"t_ms", "method", "kind", "button", ...}). Used by both the
    offline runner and the live session service so online and offline
    runs log identically.
    """

    def __init__(self, spec: TaskSpec):
        self.spec = spec.validate()
        self.engine = Engine(spec.method, spec.config)
        self.index = 0
        self.false_positives = 0
        self.records: list[SelectionRecord] = []
        self.completed = False
        self._first_t: Optional[float] = None
        self._last_correct_t: Optional[float] = None

    @property
    def expected_button(self) -> Optional[int]:
        if self.completed:
            return None
        return self.spec.sequence[self.index]

    def pressed_buttons(self) -> set[int]:
        return {r.button for r in self.records}

    def feed(
        self, sample: PoseSample
    ) -> tuple[FrameState, list[InteractionEvent], list[dict]]:
        if self._first_t is None:
            self._first_t = sample.t_ms
        frame, events = self.engine.step(self.spec.scene, sample)
        logs = [self._log_event(ev) for ev in events]
        return frame, events, logs

    def _log_event(self, ev: InteractionEvent) -> dict:
        rec: dict = {"t_ms": ev.t_ms, "method": self.spec.method.value}
        if ev.kind is EventKind.TRIGGERED:
            if not self.completed and ev.target_id == self.spec.sequence[self.index]:
                base = self._last_correct_t if self._last_correct_t is not None else self._first_t
                elapsed = ev.t_ms - base
                self.records.append(
                    SelectionRecord(
                        button=ev.target_id,
                        t_ms=ev.t_ms,
                        elapsed_ms=elapsed,
                        method=self.spec.method,
                        counted=len(self.records) > 0,
                    )
                )
                self._last_correct_t = ev.t_ms
                self.index += 1
                if self.index == len(self.spec.sequence):
                    self.completed = True
                rec.update(kind="correct", button=ev.target_id, elapsed_ms=elapsed)
            else:
                self.false_positives += 1
                rec.update(kind="false_positive", button=ev.target_id)
            if ev.direction is not None:
                rec["direction"] = ev.direction.value
        elif ev.kind is EventKind.TELEPORT:
            rec.update(kind="teleport", button=ev.target_id)
            rec["point"] = [ev.point.x, ev.point.y, ev.point.z]
        else:
            rec.update(kind="value", button=ev.target_id, value=ev.value)
        return rec

    def result(self) -> TaskResult:
        counted = [r.elapsed_ms for r in self.records if r.counted]
        mean, sd = _mean_sd(counted)
        return TaskResult(
            records=tuple(self.records),
            false_positives=self.false_positives,
            mean_ms=mean,
            sd_ms=sd,
            completed=self.completed,
            method=self.spec.method,
        )


def run_task(
    spec: TaskSpec,
    trace: list[PoseSample],
    on_event: Optional[Callable[[dict], None]] = None,
) -> TaskResult:
    """Feed every trace sample through the engine and score the sequence.

    A trigger on the expected button advances the sequence; any other
    trigger counts as a false positive. ``on_event`` receives one
    event-log record per interaction event.
    """
    if not trace:
        raise EmptyTraceError("trace has no samples")
    runner = TaskRunner(spec)
    for sample in trace:
        _, _, logs = runner.feed(sample)
        if on_event is not None:
            for rec in logs:
                on_event(rec)
    return runner.result()


# ---------------------------------------------------------------------------
# Scripted ideal user


def _slerp_dir(d0: Vec3, d1: Vec3, s: float) -> Vec3:
    dot = max(-1.0, min(1.0, d0.dot(d1)))
    ang = math.acos(dot)
    if ang < 1e-12:
        return d1
    sa = math.sin(ang)
    a = math.sin((1.0 - s) * ang) / sa
    b = math.sin(s * ang) / sa
    return Vec3(
        a * d0.x + b * d1.x, a * d0.y + b * d1.y, a * d0.z + b * d1.z
    ).normalized()


def _yaw_pitch_of(direction: Vec3) -> tuple[float, float]:
    pitch = math.degrees(math.asin(max(-1.0, min(1.0, direction.y))))
    yaw = math.degrees(math.atan2(-direction.x, -direction.z))
    return yaw, pitch


@dataclass(frozen=True, slots=True)
class _Segment:
    t0: float
    t1: float
    d0: Vec3
    d1: Vec3
    roll0: float
    roll1: float

    def eval(self, t: float) -> tuple[Vec3, float]:
        if self.t1 <= self.t0:
            return self.d1, self.roll1
        s = (t - self.t0) / (self.t1 - self.t0)
        return _slerp_dir(self.d0, self.d1, s), self.roll0 + (self.roll1 - self.roll0) * s


def synth_trace(spec: TaskSpec, user: UserParams) -> list[PoseSample]:
    """Synthesize the pose trace of a scripted user performing the task.

    Per target: rotate the gaze along the shortest arc to the target
    center (zero roll while traveling), wait ``reaction_ms``, then either
    hold for the dwell duration or roll to threshold+overshoot, hold, and
    roll fully back. Optional seeded Gaussian yaw/pitch noise per sample.
    """
    spec.validate()
    user.validate()
    cfg = spec.config
    period = 1000.0 / user.sample_hz

    segments: list[_Segment] = []
    t = 0.0
    cur_dir = FORWARD
    cur_roll = 0.0

    def push(dur: float, d1: Vec3 | None = None, roll1: float | None = None) -> None:
        nonlocal t, cur_dir, cur_roll
        nd = cur_dir if d1 is None else d1
        nr = cur_roll if roll1 is None else roll1
        segments.append(_Segment(t, t + dur, cur_dir, nd, cur_roll, nr))
        t += dur
        cur_dir, cur_roll = nd, nr

    for tid in spec.sequence:
        target = spec.scene.target_by_id(tid)
        aim = (target.center - spec.scene.eye).normalized()
        _, pitch = _yaw_pitch_of(aim)
        if abs(pitch) > 89.0:
            raise InvalidTaskError(f"target {tid} outside reachable pitch range")
        arc = math.degrees(math.acos(max(-1.0, min(1.0, cur_dir.dot(aim)))))
        if arc > 1e-9:
            push(arc / user.look_speed_dps * 1000.0, d1=aim)
        if user.reaction_ms > 0:
            push(user.reaction_ms)
        if spec.method is Method.DWELL:
            # Extra tail only when the reaction wait is too short to
            # guarantee a sample past the dwell deadline.
            push(cfg.dwell_ms + max(0.0, period - user.reaction_ms))
        else:
            peak = cfg.threshold_deg + user.overshoot_deg
            up = peak / user.roll_speed_dps * 1000.0
            push(up, roll1=peak)
            if user.hold_ms > 0:
                push(user.hold_ms)
            push(up, roll1=0.0)

    total = t
    n_samples = int(math.ceil(total / period)) + 2
    rng = np.random.default_rng(user.seed)
    noisy = user.noise_sigma_deg > 0

    samples: list[PoseSample] = []
    seg_i = 0
    for k in range(n_samples + 1):
        tk = k * period
        while seg_i < len(segments) - 1 and tk >= segments[seg_i].t1:
            seg_i += 1
        seg = segments[seg_i]
        if tk >= seg.t1:
            direction, roll = seg.d1, seg.roll1
        else:
            direction, roll = seg.eval(tk)
        yaw, pitch = _yaw_pitch_of(direction)
        if noisy:
            dy, dp = rng.normal(0.0, user.noise_sigma_deg, 2)
            yaw += float(dy)
            pitch += float(dp)
        samples.append(PoseSample(t_ms=tk, orientation=from_yaw_pitch_roll(yaw, pitch, roll)))
    return samples


# ---------------------------------------------------------------------------
# Aggregation


@dataclass(frozen=True, slots=True)
class MethodSummary:
    n_tasks: int
    n_records: int
    mean_of_means_ms: Optional[float]
    pooled_mean_ms: Optional[float]
    sd_across_tasks_ms: Optional[float]
    sd_across_records_ms: Optional[float]
    false_positives: int


@dataclass(frozen=True, slots=True)
class Summary:
    methods: dict[str, MethodSummary]
    total_false_positives: int

    def to_dict(self) -> dict:
        return {
            "methods": {
                name: {
                    "n_tasks": m.n_tasks,
                    "n_records": m.n_records,
                    "mean_of_means_ms": m.mean_of_means_ms,
                    "pooled_mean_ms": m.pooled_mean_ms,
                    "sd_across_tasks_ms": m.sd_across_tasks_ms,
                    "sd_across_records_ms": m.sd_across_records_ms,
                    "false_positives": m.false_positives,
                }
                for name, m in sorted(self.methods.items())
            },
            "total_false_positives": self.total_false_positives,
        }


def aggregate(results: list[TaskResult]) -> Summary:
    """Pool task results per method: mean of task means, pooled record mean,
    and sample SDs (n-1) across tasks and across all counted records.
    SDs are absent (None) below two data points."""
    if not results:
        raise EmptyAggregateError("no results to aggregate")
    by_method: dict[str, list[TaskResult]] = {}
    for r in results:
        by_method.setdefault(r.method.value, []).append(r)

    methods: dict[str, MethodSummary] = {}
    total_fp = 0
    for name, group in by_method.items():
        task_means = [r.mean_ms for r in group if r.mean_ms is not None]
        pooled = [e for r in group for e in r.counted_elapsed()]
        fp = sum(r.false_positives for r in group)
        total_fp += fp
        mom, sd_tasks = _mean_sd(task_means)
        pooled_mean, sd_records = _mean_sd(pooled)
        methods[name] = MethodSummary(
            n_tasks=len(group),
            n_records=len(pooled),
            mean_of_means_ms=mom,
            pooled_mean_ms=pooled_mean,
            sd_across_tasks_ms=sd_tasks,
            sd_across_records_ms=sd_records,
            false_positives=fp,
        )
    return Summary(methods=methods, total_false_positives=total_fp)


# ---------------------------------------------------------------------------
# File formats


def write_trace_csv(out: TextIO, trace: Iterable[PoseSample]) -> None:
    out.write(TRACE_HEADER + "\n")
    for s in trace:
        q = s.orientation
        out.write(f"{s.t_ms!r},{q.w!r},{q.x!r},{q.y!r},{q.z!r}\n")


def read_trace_csv(inp: TextIO) -> list[PoseSample]:
    """Parse a trace file; timestamps must strictly increase."""
    from .engine import TraceOrderError
    from .orientation import UnitQuat

    header = inp.readline().strip()
    if header != TRACE_HEADER:
        raise ValueError(f"bad trace header {header!r}, expected {TRACE_HEADER!r}")
    samples: list[PoseSample] = []
    prev_t: Optional[float] = None
    for lineno, line in enumerate(inp, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ValueError(f"line {lineno}: expected 5 fields, got {len(parts)}")
        try:
            t, w, x, y, z = (float(p) for p in parts)
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}") from e
        if prev_t is not None and t <= prev_t:
            raise TraceOrderError(f"line {lineno}: t_ms {t} not after {prev_t}")
        prev_t = t
        samples.append(PoseSample(t_ms=t, orientation=UnitQuat.from_components(w, x, y, z)))
    if not samples:
        raise EmptyTraceError("trace file has no samples")
    return samples
