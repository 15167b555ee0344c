"""Target geometry and head-gaze raycasting.

A scene is a set of planar rectangular targets (a button grid facing the
viewer, plus an optional floor) observed from a fixed eye at the origin:
orientation is the only tracked quantity, so every ray starts at the eye
and follows the head's look direction.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional

from .orientation import UnitQuat, Vec3, look_direction

_EPS_PARALLEL = 1e-12
_EPS_DISTANCE = 1e-9


class InvalidScene(ValueError):
    """Raised for non-positive grid dimensions or malformed scene documents."""


class TargetKind(enum.Enum):
    BUTTON = "button"
    FLOOR = "floor"


@dataclass(frozen=True, slots=True)
class Target:
    id: int
    kind: TargetKind
    center: Vec3
    half_width: float
    half_height: float
    normal: Vec3  # unit, faces the eye side
    u: Vec3  # in-plane width direction, unit
    v: Vec3  # in-plane height direction, unit


@dataclass(frozen=True, slots=True)
class FloorSpec:
    height_m: float
    extent_m: float


@dataclass(frozen=True, slots=True)
class GridSpec:
    rows: int
    cols: int
    cell_width_m: float
    cell_height_m: float
    gap_m: float
    distance_m: float
    floor: Optional[FloorSpec] = None


@dataclass(frozen=True, slots=True)
class Scene:
    targets: tuple[Target, ...]
    eye: Vec3
    grid: Optional[GridSpec] = None

    def target_by_id(self, target_id: int) -> Target:
        for t in self.targets:
            if t.id == target_id:
                return t
        raise KeyError(target_id)

    def button_ids(self) -> list[int]:
        return [t.id for t in self.targets if t.kind is TargetKind.BUTTON]


@dataclass(frozen=True, slots=True)
class Hit:
    target_id: int
    point: Vec3
    distance: float


def build_grid(
    rows: int,
    cols: int,
    cell_width: float,
    cell_height: float,
    gap: float,
    distance: float,
) -> Scene:
    """Build a rows x cols button grid centered on the -z axis, facing the eye.

    Ids run 1..rows*cols row-major from the top-left, matching the order
    the buttons are meant to be selected in.
    """
    if rows < 1 or cols < 1:
        raise InvalidScene(f"grid needs at least 1x1, got {rows}x{cols}")
    if cell_width <= 0 or cell_height <= 0 or distance <= 0:
        raise InvalidScene("cell dimensions and distance must be positive")
    if gap < 0:
        raise InvalidScene("gap must be non-negative")

    pitch_x = cell_width + gap
    pitch_y = cell_height + gap
    targets = []
    for r in range(rows):
        for c in range(cols):
            tid = r * cols + c + 1
            x = (c - (cols - 1) / 2.0) * pitch_x
            y = ((rows - 1) / 2.0 - r) * pitch_y
            targets.append(
                Target(
                    id=tid,
                    kind=TargetKind.BUTTON,
                    center=Vec3(x, y, -distance),
                    half_width=cell_width / 2.0,
                    half_height=cell_height / 2.0,
                    normal=Vec3(0.0, 0.0, 1.0),
                    u=Vec3(1.0, 0.0, 0.0),
                    v=Vec3(0.0, 1.0, 0.0),
                )
            )
    spec = GridSpec(rows, cols, cell_width, cell_height, gap, distance)
    return Scene(targets=tuple(targets), eye=Vec3(0.0, 0.0, 0.0), grid=spec)


def add_floor(scene: Scene, height: float, extent: float) -> Scene:
    """Append a horizontal square floor target of side ``extent`` at ``height``.

    The floor must lie below the eye (eye is at the origin).
    """
    if height >= scene.eye.y:
        raise InvalidScene("floor must be below the eye")
    if extent <= 0:
        raise InvalidScene("floor extent must be positive")
    next_id = max((t.id for t in scene.targets), default=0) + 1
    floor = Target(
        id=next_id,
        kind=TargetKind.FLOOR,
        center=Vec3(0.0, height, 0.0),
        half_width=extent / 2.0,
        half_height=extent / 2.0,
        normal=Vec3(0.0, 1.0, 0.0),
        u=Vec3(1.0, 0.0, 0.0),
        v=Vec3(0.0, 0.0, 1.0),
    )
    grid = None
    if scene.grid is not None:
        grid = GridSpec(
            scene.grid.rows,
            scene.grid.cols,
            scene.grid.cell_width_m,
            scene.grid.cell_height_m,
            scene.grid.gap_m,
            scene.grid.distance_m,
            floor=FloorSpec(height_m=height, extent_m=extent),
        )
    return Scene(targets=scene.targets + (floor,), eye=scene.eye, grid=grid)


def raycast(scene: Scene, orientation: UnitQuat) -> Optional[Hit]:
    """Nearest front-facing target hit by the gaze ray, or None.

    Ties break by smaller distance, then smaller id. Roll about the look
    axis never changes the result since the ray only depends on the look
    direction.
    """
    d = look_direction(orientation)
    best: Optional[tuple[float, int, Vec3]] = None
    for t in scene.targets:
        denom = d.dot(t.normal)
        if denom >= -_EPS_PARALLEL:
            continue  # back-facing or parallel
        dist = (t.center - scene.eye).dot(t.normal) / denom
        if dist <= _EPS_DISTANCE:
            continue
        p = scene.eye + d.scaled(dist)
        rel = p - t.center
        if abs(rel.dot(t.u)) > t.half_width or abs(rel.dot(t.v)) > t.half_height:
            continue
        if best is None or (dist, t.id) < (best[0], best[1]):
            best = (dist, t.id, p)
    if best is None:
        return None
    return Hit(target_id=best[1], point=best[2], distance=best[0])


# ---------------------------------------------------------------------------
# JSON description (grid scenes only)

_GRID_KEYS = {"rows", "cols", "cell_width_m", "cell_height_m", "gap_m", "distance_m", "floor"}


def scene_to_json(scene: Scene) -> str:
    """Serialize a grid-built scene to its JSON description."""
    if scene.grid is None:
        raise InvalidScene("only grid-built scenes have a JSON description")
    g = scene.grid
    doc: dict = {
        "rows": g.rows,
        "cols": g.cols,
        "cell_width_m": g.cell_width_m,
        "cell_height_m": g.cell_height_m,
        "gap_m": g.gap_m,
        "distance_m": g.distance_m,
    }
    if g.floor is not None:
        doc["floor"] = {"height_m": g.floor.height_m, "extent_m": g.floor.extent_m}
    return json.dumps(doc)


def scene_from_json(text: str) -> Scene:
    """Rebuild a scene from its JSON description."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidScene(f"bad scene JSON: {e}") from e
    if not isinstance(doc, dict):
        raise InvalidScene("scene JSON must be an object")
    missing = {"rows", "cols", "cell_width_m", "cell_height_m", "gap_m", "distance_m"} - doc.keys()
    if missing:
        raise InvalidScene(f"scene JSON missing fields: {sorted(missing)}")
    scene = build_grid(
        rows=int(doc["rows"]),
        cols=int(doc["cols"]),
        cell_width=float(doc["cell_width_m"]),
        cell_height=float(doc["cell_height_m"]),
        gap=float(doc["gap_m"]),
        distance=float(doc["distance_m"]),
    )
    floor = doc.get("floor")
    if floor is not None:
        if not isinstance(floor, dict) or {"height_m", "extent_m"} - floor.keys():
            raise InvalidScene("floor needs height_m and extent_m")
        scene = add_floor(scene, float(floor["height_m"]), float(floor["extent_m"]))
    return scene


def default_grid() -> Scene:
    """The standard 4x4 selection grid: 0.35 m square buttons, 0.10 m gaps,
    2 m in front of the eye (each button subtends about 10 degrees)."""
    return build_grid(4, 4, 0.35, 0.35, 0.10, 2.0)
