"""Live session service: pose samples in, frame state and events out.

Wire protocol (one JSON object per WebSocket text message, newline
terminated; the same records written to files are newline-delimited):

Client -> server
    {"type": "pose", "t_ms": 123.0, "quat": [w, x, y, z]}
    {"type": "set_method", "method": "dwell" | "twist_binary" |
                                     "twist_directional" | "twist_continuous"}
    {"type": "set_config", <any engine config field>...}
    {"type": "start_task"}
    {"type": "reset"}

Server -> client
    {"type": "state", ...frame fields..., "expected_button": id | null,
     "buttons": {"1": "red" | "gray" | "black", ...}}
    {"type": "event", ...}          one per interaction event
    {"type": "task_result", ...}    once, when the sequence completes
    {"type": "error", "code": ..., "detail": ...}

Timestamps always come from the client and must strictly increase within
a session, which keeps live sessions replayable offline: streaming a
stored trace produces the same events as the offline task runner. Each
connection owns one engine and task state; sessions never share state.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, fields, replace
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from .engine import Engine, EngineConfig, ContinuousConfig, InvalidConfig, Method, PoseSample
from .harness import TaskRunner, TaskSpec
from .orientation import UnitQuat
from .scene import Scene, default_grid, scene_to_json

CLIENT_TYPES = {"pose", "set_method", "set_config", "start_task", "reset"}
QUAT_NORM_TOLERANCE = 1e-3


class DecodeError(ValueError):
    def __init__(self, code: str, detail: str):
        super().__init__(detail)
        self.code = code
        self.detail = detail


@dataclass(frozen=True)
class SessionConfig:
    host: str = "127.0.0.1"
    port: int = 8787
    method: Method = Method.DWELL
    engine_config: EngineConfig = None  # type: ignore[assignment]
    scene: Scene = None  # type: ignore[assignment]
    sequence: tuple[int, ...] = ()
    task_enabled: bool = True
    static_dir: Optional[str] = None

    def __post_init__(self):
        if self.engine_config is None:
            object.__setattr__(self, "engine_config", EngineConfig())
        if self.scene is None:
            object.__setattr__(self, "scene", default_grid())
        if not self.sequence:
            object.__setattr__(self, "sequence", tuple(self.scene.button_ids()))


def decode_client(line: str) -> dict:
    """Parse and structurally validate one client message line."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as e:
        raise DecodeError("bad_json", f"malformed JSON: {e}") from e
    if not isinstance(msg, dict):
        raise DecodeError("bad_json", "message must be a JSON object")
    mtype = msg.get("type")
    if mtype not in CLIENT_TYPES:
        raise DecodeError("bad_type", f"unknown message type {mtype!r}")
    if mtype == "pose":
        if "t_ms" not in msg or "quat" not in msg:
            raise DecodeError("missing_field", "pose needs t_ms and quat")
        if not isinstance(msg["t_ms"], (int, float)) or not math.isfinite(msg["t_ms"]):
            raise DecodeError("bad_value", "t_ms must be a finite number")
        q = msg["quat"]
        if (
            not isinstance(q, list)
            or len(q) != 4
            or not all(isinstance(c, (int, float)) and math.isfinite(c) for c in q)
        ):
            raise DecodeError("bad_quat", "quat must be four finite numbers [w, x, y, z]")
    elif mtype == "set_method":
        if "method" not in msg:
            raise DecodeError("missing_field", "set_method needs method")
    return msg


def encode_message(msg: dict) -> str:
    return json.dumps(msg) + "\n"


def _error(code: str, detail: str) -> dict:
    return {"type": "error", "code": code, "detail": detail}


_CONFIG_FIELDS = {f.name for f in fields(EngineConfig)} - {"continuous"}
_CONT_FIELDS = {f.name for f in fields(ContinuousConfig)}


def _merge_config(base: EngineConfig, msg: dict) -> EngineConfig:
    updates = {k: msg[k] for k in _CONFIG_FIELDS if k in msg}
    cont = msg.get("continuous")
    if isinstance(cont, dict):
        cont_updates = {k: cont[k] for k in _CONT_FIELDS if k in cont}
        updates["continuous"] = replace(base.continuous, **cont_updates)
    return replace(base, **updates).validate()


class Session:
    """One client's engine and task state, driven by decoded messages.

    Transport-independent: ``handle`` maps one client message to the list
    of server messages it produces, in order.
    """

    def __init__(self, config: SessionConfig):
        self.scene = config.scene
        self.sequence = config.sequence
        self.method = config.method
        self.engine_config = config.engine_config.validate()
        self.task_enabled = config.task_enabled
        self.engine = Engine(self.method, self.engine_config)
        self.runner: Optional[TaskRunner] = None
        self._result_sent = False
        self._last_t: Optional[float] = None

    def handle_line(self, line: str) -> list[str]:
        try:
            msg = decode_client(line)
        except DecodeError as e:
            return [encode_message(_error(e.code, e.detail))]
        return [encode_message(m) for m in self.handle(msg)]

    def handle(self, msg: dict) -> list[dict]:
        mtype = msg["type"]
        if mtype == "pose":
            return self._handle_pose(msg)
        if mtype == "set_method":
            try:
                self.method = Method.from_wire(msg["method"])
            except ValueError:
                return [_error("bad_method", f"unknown method {msg['method']!r}")]
            self._apply_settings()
            return []
        if mtype == "set_config":
            try:
                self.engine_config = _merge_config(self.engine_config, msg)
            except (InvalidConfig, TypeError) as e:
                return [_error("invalid_config", str(e))]
            self._apply_settings()
            return []
        if mtype == "start_task":
            if not self.task_enabled:
                return [_error("task_disabled", "this session is practice-only")]
            self._start_task()
            return []
        if mtype == "reset":
            self.runner = None
            self._result_sent = False
            self.engine = Engine(self.method, self.engine_config)
            return []
        raise AssertionError(mtype)

    def _apply_settings(self) -> None:
        """Method or config changed: engine resets; a running task restarts."""
        self.engine = Engine(self.method, self.engine_config)
        if self.runner is not None:
            self._start_task()

    def _start_task(self) -> None:
        spec = TaskSpec(
            sequence=self.sequence,
            scene=self.scene,
            method=self.method,
            config=self.engine_config,
        )
        self.runner = TaskRunner(spec)
        self.engine = self.runner.engine
        self._result_sent = False

    def _handle_pose(self, msg: dict) -> list[dict]:
        w, x, y, z = msg["quat"]
        norm = math.sqrt(w * w + x * x + y * y + z * z)
        if abs(norm - 1.0) > QUAT_NORM_TOLERANCE:
            return [_error("bad_quat", f"quaternion norm {norm:.6g} too far from 1")]
        t = float(msg["t_ms"])
        if self._last_t is not None and t <= self._last_t:
            return [_error("trace_order", f"t_ms {t} not after {self._last_t}")]
        self._last_t = t
        sample = PoseSample(t_ms=t, orientation=UnitQuat.from_components(w, x, y, z))

        out: list[dict] = []
        if self.runner is not None:
            frame, _, logs = self.runner.feed(sample)
            for rec in logs:
                out.append({"type": "event", **rec})
            if self.runner.completed and not self._result_sent:
                out.append(self._task_result())
                self._result_sent = True
        else:
            frame, events = self.engine.step(self.scene, sample)
            for ev in events:
                out.append(self._practice_event(ev))
        out.append(self._state_message(frame))
        return out

    def _practice_event(self, ev) -> dict:
        rec = {
            "type": "event",
            "t_ms": ev.t_ms,
            "method": self.method.value,
            "kind": ev.kind.value,
            "button": ev.target_id,
        }
        if ev.direction is not None:
            rec["direction"] = ev.direction.value
        if ev.value is not None:
            rec["value"] = ev.value
        if ev.point is not None:
            rec["point"] = [ev.point.x, ev.point.y, ev.point.z]
        return rec

    def _button_states(self) -> dict[str, str]:
        pressed = self.runner.pressed_buttons() if self.runner is not None else set()
        expected = self.runner.expected_button if self.runner is not None else None
        states = {}
        for tid in self.scene.button_ids():
            if tid == expected:
                states[str(tid)] = "red"
            elif tid in pressed:
                states[str(tid)] = "gray"
            else:
                states[str(tid)] = "black"
        return states

    def _state_message(self, frame) -> dict:
        return {
            "type": "state",
            "t_ms": frame.t_ms,
            "gaze_target": frame.gaze_target,
            "twist_deg": frame.twist_deg,
            "indicator_deg": frame.indicator_deg,
            "indicator_visible": frame.indicator_visible,
            "indicator_red": frame.indicator_red,
            "dwell_progress": frame.dwell_progress,
            "dwell_indicator_visible": frame.dwell_indicator_visible,
            "continuous_value": frame.continuous_value,
            "expected_button": self.runner.expected_button if self.runner else None,
            "buttons": self._button_states(),
        }

    def _task_result(self) -> dict:
        result = self.runner.result()
        return {
            "type": "task_result",
            "records": [
                {
                    "button": r.button,
                    "t_ms": r.t_ms,
                    "elapsed_ms": r.elapsed_ms,
                    "counted": r.counted,
                }
                for r in result.records
            ],
            "false_positives": result.false_positives,
            "mean_ms": result.mean_ms,
            "sd_ms": result.sd_ms,
            "completed": result.completed,
        }


def create_app(config: SessionConfig) -> FastAPI:
    """ASGI app: /ws session endpoint, /scene geometry, optional static UI."""
    app = FastAPI(title="twistsel session service")

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        session = Session(config)
        try:
            while True:
                line = await websocket.receive_text()
                for out in session.handle_line(line):
                    await websocket.send_text(out)
        except WebSocketDisconnect:
            pass

    @app.get("/scene")
    async def scene_doc():
        return JSONResponse(json.loads(scene_to_json(config.scene)))

    @app.get("/defaults")
    async def defaults():
        return JSONResponse(
            {
                "method": config.method.value,
                "sequence": list(config.sequence),
                "threshold_deg": config.engine_config.threshold_deg,
                "dwell_ms": config.engine_config.dwell_ms,
                "indicator_max_deg": config.engine_config.indicator_max_deg,
            }
        )

    static_dir = config.static_dir
    if static_dir is None and os.path.isdir(os.path.join("frontend", "dist")):
        static_dir = os.path.join("frontend", "dist")
    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="playground")
    return app


def serve(config: SessionConfig) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
