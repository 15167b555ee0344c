"""Interaction state machines: dwell-time and roll-to-confirm selection.

The engine is advanced purely by timestamped pose samples; it never reads
a wall clock, so identical traces always replay to identical events. One
engine instance owns its mutable state and must be stepped from a single
thread; independent instances are fully isolated.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .orientation import UnitQuat, Vec3, twist_angle_deg
from .scene import Scene, TargetKind, raycast


# Twist angles recovered from composed poses carry ~1e-15 deg of float
# error; threshold comparisons tolerate this so a commanded roll of
# exactly threshold_deg counts as crossing it.
_ANGLE_EPS = 1e-9


class InvalidConfig(ValueError):
    """Raised when an engine configuration violates its bounds."""


class TraceOrderError(ValueError):
    """Raised when a sample's timestamp does not increase."""


class Method(enum.Enum):
    DWELL = "dwell"
    TWIST_BINARY = "twist_binary"
    TWIST_DIRECTIONAL = "twist_directional"
    TWIST_CONTINUOUS = "twist_continuous"

    @staticmethod
    def from_wire(name: str) -> "Method":
        for m in Method:
            if m.value == name:
                return m
        raise ValueError(f"unknown method {name!r}")


class EventKind(enum.Enum):
    TRIGGERED = "triggered"
    VALUE_COMMITTED = "value_committed"
    TELEPORT = "teleport"


class Direction(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True, slots=True)
class ContinuousConfig:
    deadzone_deg: float = 1.0
    max_deg: float = 30.0
    commit_hold_ms: float = 700.0
    commit_eps_deg: float = 0.5


@dataclass(frozen=True, slots=True)
class EngineConfig:
    dwell_ms: float = 780.0
    threshold_deg: float = 7.5
    rearm_ratio: float = 2.0 / 3.0
    indicator_max_deg: float = 45.0
    allow_pre_twist: bool = True
    continuous: ContinuousConfig = field(default_factory=ContinuousConfig)
    teleport_enabled: bool = False

    def validate(self) -> "EngineConfig":
        if not (self.dwell_ms > 0):
            raise InvalidConfig(f"dwell_ms must be > 0, got {self.dwell_ms}")
        if not (0 < self.threshold_deg < 90):
            raise InvalidConfig(f"threshold_deg must be in (0, 90), got {self.threshold_deg}")
        if not (0 < self.rearm_ratio <= 1):
            raise InvalidConfig(f"rearm_ratio must be in (0, 1], got {self.rearm_ratio}")
        if not (self.indicator_max_deg > 0):
            raise InvalidConfig("indicator_max_deg must be > 0")
        if not (0 <= self.continuous.deadzone_deg < self.continuous.max_deg):
            raise InvalidConfig("continuous deadzone must be >= 0 and below max_deg")
        if not (self.continuous.commit_hold_ms > 0 and self.continuous.commit_eps_deg >= 0):
            raise InvalidConfig("continuous commit parameters out of range")
        return self


@dataclass(frozen=True, slots=True)
class PoseSample:
    t_ms: float
    orientation: UnitQuat


@dataclass(frozen=True, slots=True)
class FrameState:
    t_ms: float
    gaze_target: Optional[int]
    twist_deg: float
    indicator_deg: float
    indicator_visible: bool
    indicator_red: bool
    dwell_progress: float
    dwell_indicator_visible: bool
    continuous_value: float


@dataclass(frozen=True, slots=True)
class InteractionEvent:
    t_ms: float
    kind: EventKind
    target_id: int
    direction: Optional[Direction] = None
    value: Optional[float] = None
    point: Optional[Vec3] = None


def indicator_angle(twist_deg: float, config: EngineConfig) -> float:
    """Crosshair rotation for a given head roll: linear gain so the visual
    reaches indicator_max_deg exactly at the trigger threshold, clamped."""
    a = twist_deg * config.indicator_max_deg / config.threshold_deg
    return max(-config.indicator_max_deg, min(config.indicator_max_deg, a))


class Engine:
    """One interaction technique driven by pose samples.

    ``step`` consumes one sample and returns the per-frame feedback state
    plus any selection events it produced. ``set_method`` switches
    technique and resets all interaction state.
    """

    def __init__(self, method: Method, config: EngineConfig | None = None):
        self.config = (config or EngineConfig()).validate()
        self.method = method
        self._last_t: Optional[float] = None
        self._reset_interaction()

    def _reset_interaction(self) -> None:
        self._gaze: Optional[int] = None
        self._gaze_enter_t = 0.0
        self._armed = True
        self._dwell_blocked = False
        self._pre_twist_lockout = False
        self._prev_abs_twist: Optional[float] = None
        self._cont_active = False
        self._cont_stable_ref = 0.0
        self._cont_stable_t = 0.0
        self._cont_committed = False
        self._cont_last_value = 0.0

    def set_method(self, method: Method) -> None:
        """Switch technique; all timers, arming and gaze state reset."""
        self.method = method
        self._reset_interaction()

    def set_config(self, config: EngineConfig) -> None:
        """Replace the configuration; resets interaction state."""
        self.config = config.validate()
        self._reset_interaction()

    def reset(self) -> None:
        self._reset_interaction()

    def step(self, scene: Scene, sample: PoseSample) -> tuple[FrameState, list[InteractionEvent]]:
        if self._last_t is not None and sample.t_ms <= self._last_t:
            raise TraceOrderError(
                f"sample t_ms {sample.t_ms} not after previous {self._last_t}"
            )
        self._last_t = sample.t_ms
        t = sample.t_ms
        cfg = self.config

        twist = twist_angle_deg(sample.orientation)
        hit = raycast(scene, sample.orientation)
        gaze = hit.target_id if hit is not None else None

        events: list[InteractionEvent] = []
        dwell_progress = 0.0
        dwell_visible = False
        cont_value = 0.0
        ind_visible = False
        ind_red = False

        if self.method is Method.DWELL:
            if gaze != self._gaze:
                self._gaze = gaze
                self._gaze_enter_t = t
                self._dwell_blocked = False
            if gaze is not None and not self._dwell_blocked:
                elapsed = t - self._gaze_enter_t
                half = cfg.dwell_ms / 2.0
                if elapsed >= cfg.dwell_ms:
                    events.append(InteractionEvent(t_ms=t, kind=EventKind.TRIGGERED, target_id=gaze))
                    self._dwell_blocked = True
                    dwell_progress = 1.0
                    dwell_visible = True
                else:
                    dwell_progress = max(0.0, min(1.0, (elapsed - half) / half))
                    dwell_visible = elapsed >= half

        elif self.method in (Method.TWIST_BINARY, Method.TWIST_DIRECTIONAL):
            abs_twist = abs(twist)
            threshold = cfg.threshold_deg - _ANGLE_EPS
            if not self._armed and abs_twist <= cfg.rearm_ratio * cfg.threshold_deg + _ANGLE_EPS:
                self._armed = True
            if abs_twist < threshold:
                self._pre_twist_lockout = False

            can_fire = gaze is not None and self._armed and abs_twist >= threshold
            if can_fire and not cfg.allow_pre_twist:
                landed_now = gaze != self._gaze
                was_above = (
                    self._prev_abs_twist is not None
                    and self._prev_abs_twist >= threshold
                )
                if landed_now and was_above:
                    self._pre_twist_lockout = True
                if self._pre_twist_lockout:
                    can_fire = False

            if can_fire:
                self._armed = False
                target = scene.target_by_id(gaze)
                if cfg.teleport_enabled and target.kind is TargetKind.FLOOR:
                    events.append(
                        InteractionEvent(
                            t_ms=t, kind=EventKind.TELEPORT, target_id=gaze, point=hit.point
                        )
                    )
                else:
                    direction = None
                    if self.method is Method.TWIST_DIRECTIONAL:
                        direction = Direction.RIGHT if twist > 0 else Direction.LEFT
                    events.append(
                        InteractionEvent(
                            t_ms=t, kind=EventKind.TRIGGERED, target_id=gaze, direction=direction
                        )
                    )
            self._gaze = gaze
            self._prev_abs_twist = abs_twist
            ind_visible = gaze is not None
            ind_red = gaze is not None and not self._armed

        elif self.method is Method.TWIST_CONTINUOUS:
            cont = cfg.continuous
            abs_twist = abs(twist)
            if gaze is not None and abs_twist > cont.deadzone_deg:
                span = cont.max_deg - cont.deadzone_deg
                cont_value = math.copysign(
                    min(1.0, (abs_twist - cont.deadzone_deg) / span), twist
                )

            if gaze != self._gaze:
                if self._gaze is not None and self._cont_active and not self._cont_committed:
                    events.append(
                        InteractionEvent(
                            t_ms=t,
                            kind=EventKind.VALUE_COMMITTED,
                            target_id=self._gaze,
                            value=self._cont_last_value,
                        )
                    )
                self._gaze = gaze
                self._cont_active = gaze is not None
                self._cont_committed = False
                self._cont_stable_ref = twist
                self._cont_stable_t = t
            elif gaze is not None and self._cont_active and not self._cont_committed:
                if abs(twist - self._cont_stable_ref) > cont.commit_eps_deg:
                    self._cont_stable_ref = twist
                    self._cont_stable_t = t
                elif t - self._cont_stable_t >= cont.commit_hold_ms:
                    events.append(
                        InteractionEvent(
                            t_ms=t,
                            kind=EventKind.VALUE_COMMITTED,
                            target_id=gaze,
                            value=cont_value,
                        )
                    )
                    self._cont_committed = True
            self._cont_last_value = cont_value
            ind_visible = gaze is not None

        frame = FrameState(
            t_ms=t,
            gaze_target=gaze,
            twist_deg=twist,
            indicator_deg=indicator_angle(twist, cfg),
            indicator_visible=ind_visible,
            indicator_red=ind_red,
            dwell_progress=dwell_progress,
            dwell_indicator_visible=dwell_visible,
            continuous_value=cont_value,
        )
        return frame, events
