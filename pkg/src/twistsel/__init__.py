"""Head-orientation-only target selection.

Core pieces: quaternion head-pose math (``orientation``), a planar button
grid with gaze raycasting (``scene``), the dwell and roll-to-confirm
interaction engines (``engine``), a deterministic simulation and metrics
harness (``harness``), a live session service (``service``), and a CLI
(``cli``).
"""

from .orientation import (
    Vec3,
    UnitQuat,
    SwingTwist,
    from_yaw_pitch_roll,
    compose,
    look_direction,
    swing_twist,
    twist_angle_deg,
)
from .scene import Scene, Target, TargetKind, Hit, build_grid, add_floor, raycast
from .engine import (
    Method,
    EngineConfig,
    ContinuousConfig,
    PoseSample,
    FrameState,
    InteractionEvent,
    EventKind,
    Direction,
    Engine,
    indicator_angle,
)
from .harness import (
    TaskSpec,
    SelectionRecord,
    TaskResult,
    UserParams,
    run_task,
    synth_trace,
    aggregate,
)

__version__ = "0.1.0"

__all__ = [
    "Vec3",
    "UnitQuat",
    "SwingTwist",
    "from_yaw_pitch_roll",
    "compose",
    "look_direction",
    "swing_twist",
    "twist_angle_deg",
    "Scene",
    "Target",
    "TargetKind",
    "Hit",
    "build_grid",
    "add_floor",
    "raycast",
    "Method",
    "EngineConfig",
    "ContinuousConfig",
    "PoseSample",
    "FrameState",
    "InteractionEvent",
    "EventKind",
    "Direction",
    "Engine",
    "indicator_angle",
    "TaskSpec",
    "SelectionRecord",
    "TaskResult",
    "UserParams",
    "run_task",
    "synth_trace",
    "aggregate",
]
