"""Shared test helpers: independent closed-form oracles and pose builders."""

import math

from twistsel.engine import Method
from twistsel.harness import TaskSpec, UserParams
from twistsel.orientation import Vec3, from_yaw_pitch_roll
from twistsel.scene import Scene


def aim_pose(scene: Scene, target_id: int, roll: float = 0.0):
    """Yaw/pitch pose looking at a target's center, with optional roll."""
    c = scene.target_by_id(target_id).center - scene.eye
    d = c.normalized()
    yaw = math.degrees(math.atan2(-d.x, -d.z))
    pitch = math.degrees(math.asin(d.y))
    return from_yaw_pitch_roll(yaw, pitch, roll)


def predict_selection_times(spec: TaskSpec, user: UserParams) -> list[float]:
    """Closed-form per-selection times for the scripted user, independent of
    the trace synthesizer: shortest-arc travel at look speed, plus reaction,
    plus the method's completion time (dwell duration, or roll up to
    threshold+overshoot, hold, and roll back down)."""
    cfg = spec.config
    cur = Vec3(0.0, 0.0, -1.0)
    times = []
    for tid in spec.sequence:
        aim = (spec.scene.target_by_id(tid).center - spec.scene.eye).normalized()
        arc = math.degrees(math.acos(max(-1.0, min(1.0, cur.dot(aim)))))
        travel = arc / user.look_speed_dps * 1000.0
        if spec.method is Method.DWELL:
            times.append(travel + user.reaction_ms + cfg.dwell_ms)
        else:
            swing = (cfg.threshold_deg + user.overshoot_deg) / user.roll_speed_dps * 1000.0
            times.append(travel + user.reaction_ms + swing + user.hold_ms + swing)
        cur = aim
    return times
