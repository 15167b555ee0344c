/**
 * Playground wiring: pointer lock + wheel/keys drive the head pose, a
 * WebSocket session supplies all interaction state, the canvas renders
 * grid + crosshairs from the last server state only.
 */

import { hudFromState, HudModel, NEUTRAL_HUD } from "./hud.js";
import { DEFAULT_MAPPING, HeadState } from "./input.js";
import {
  decodeServer,
  encodeClient,
  MethodName,
  METHODS,
  SceneDescription,
  TaskResultMessage,
} from "./protocol.js";
import { SessionRecorder } from "./recorder.js";
import { drawScene } from "./render.js";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const status = document.getElementById("status")!;
const results = document.getElementById("results")!;

const head = new HeadState({ ...DEFAULT_MAPPING });
const recorder = new SessionRecorder();

let scene: SceneDescription | null = null;
let hud: HudModel = NEUTRAL_HUD;
let method: MethodName = "dwell";
let taskRunning = false;
let ws: WebSocket | null = null;
const keysDown = new Set<string>();
let lastFrame = performance.now();

function send(msg: Parameters<typeof encodeClient>[0]): void {
  if (ws && ws.readyState === WebSocket.OPEN) {
    ws.send(encodeClient(msg));
  }
}

function setMethod(m: MethodName): void {
  method = m;
  send({ type: "set_method", method: m });
  updateBanner();
}

function updateBanner(): void {
  const mode = taskRunning ? "TASK" : "practice";
  banner.textContent = `${method} — ${mode} (space: switch method, T: start task, R: reset)`;
}

function connect(): void {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  ws = new WebSocket(`${proto}://${location.host}/ws`);
  ws.onopen = () => {
    status.textContent = "connected";
    send({ type: "set_method", method });
  };
  ws.onclose = () => {
    status.textContent = "disconnected — retrying";
    setTimeout(connect, 1000);
  };
  ws.onmessage = (ev) => {
    const msg = decodeServer(String(ev.data));
    if (msg.type === "state") {
      hud = hudFromState(msg);
    } else if (msg.type === "task_result") {
      taskRunning = false;
      showResults(msg);
      updateBanner();
    } else if (msg.type === "error") {
      status.textContent = `server error: ${msg.code}`;
    }
  };
}

function showResults(r: TaskResultMessage): void {
  const counted = r.records.filter((rec) => rec.counted);
  const mean = r.mean_ms === null ? "n/a" : (r.mean_ms / 1000).toFixed(4);
  const sd = r.sd_ms === null ? "n/a" : (r.sd_ms / 1000).toFixed(4);
  results.innerHTML =
    `<h2>Task complete</h2>` +
    `<p>${counted.length} counted selections — mean ${mean}s, SD ${sd}s, ` +
    `false positives ${r.false_positives}</p>` +
    `<p>${counted.map((rec) => `#${rec.button}: ${(rec.elapsed_ms / 1000).toFixed(2)}s`).join(" · ")}</p>` +
    `<p>(click to dismiss)</p>`;
  results.style.display = "block";
  results.onclick = () => {
    results.style.display = "none";
  };
}

function downloadTrace(): void {
  const blob = new Blob([recorder.toTraceCsv()], { type: "text/csv" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "session_trace.csv";
  a.click();
  URL.revokeObjectURL(a.href);
}

function frame(now: number): void {
  const dt = Math.min(0.1, (now - lastFrame) / 1000);
  lastFrame = now;
  if (keysDown.has("KeyQ")) head.applyRollKey(-1, dt);
  if (keysDown.has("KeyE")) head.applyRollKey(1, dt);

  if (ws && ws.readyState === WebSocket.OPEN) {
    const pose = head.pose(now);
    recorder.record(pose);
    ws.send(encodeClient(pose));
  }

  if (scene) {
    drawScene(ctx, scene, head.orientation(), hud, {
      width: canvas.width,
      height: canvas.height,
      fovYDeg: 60,
    });
  }
  requestAnimationFrame(frame);
}

function resize(): void {
  canvas.width = window.innerWidth;
  canvas.height = window.innerHeight;
}

function bindSettings(): void {
  const bind = (id: string, apply: (v: number) => void) => {
    const el = document.getElementById(id) as HTMLInputElement | null;
    if (el) {
      el.addEventListener("input", () => apply(parseFloat(el.value)));
    }
  };
  bind("sens-yawpitch", (v) => {
    head.mapping.yawPerPixel = v;
    head.mapping.pitchPerPixel = v;
  });
  bind("sens-roll", (v) => {
    head.mapping.rollPerTick = v;
  });
  const invert = document.getElementById("invert-pitch") as HTMLInputElement | null;
  if (invert) {
    invert.addEventListener("change", () => {
      head.mapping.invertPitch = invert.checked;
    });
  }
}

async function init(): Promise<void> {
  resize();
  window.addEventListener("resize", resize);

  scene = (await (await fetch("/scene")).json()) as SceneDescription;
  const defaults = (await (await fetch("/defaults")).json()) as { method: MethodName };
  method = defaults.method;
  updateBanner();
  connect();

  canvas.addEventListener("click", () => canvas.requestPointerLock());
  document.addEventListener("mousemove", (ev) => {
    if (document.pointerLockElement === canvas) {
      head.applyMouse(ev.movementX, ev.movementY);
    }
  });
  document.addEventListener(
    "wheel",
    (ev) => {
      if (document.pointerLockElement === canvas) {
        head.applyWheel(Math.sign(ev.deltaY));
        ev.preventDefault();
      }
    },
    { passive: false },
  );
  document.addEventListener("keydown", (ev) => {
    if (ev.code === "KeyQ" || ev.code === "KeyE") keysDown.add(ev.code);
    if (ev.code === "Space") {
      const next = METHODS[(METHODS.indexOf(method) + 1) % METHODS.length];
      setMethod(next);
      ev.preventDefault();
    }
    if (ev.code === "KeyT") {
      taskRunning = true;
      results.style.display = "none";
      send({ type: "start_task" });
      updateBanner();
    }
    if (ev.code === "KeyR") {
      taskRunning = false;
      send({ type: "reset" });
      head.recenterRoll();
      updateBanner();
    }
    if (ev.code === "KeyD") downloadTrace();
  });
  document.addEventListener("keyup", (ev) => keysDown.delete(ev.code));

  const dl = document.getElementById("download");
  if (dl) dl.addEventListener("click", downloadTrace);
  const start = document.getElementById("start-task");
  if (start)
    start.addEventListener("click", () => {
      taskRunning = true;
      results.style.display = "none";
      send({ type: "start_task" });
      updateBanner();
    });
  bindSettings();

  requestAnimationFrame(frame);
}

init();
