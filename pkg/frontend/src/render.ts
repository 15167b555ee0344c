/**
 * Canvas renderer: the button grid seen from the current head pose, and
 * the head-locked dual-crosshair indicator at screen center.
 */

import { HudModel } from "./hud.js";
import { conjugate, Quat, rotate, Vec3 } from "./math.js";
import { ButtonColor, SceneDescription } from "./protocol.js";

export interface ButtonRect {
  id: number;
  center: Vec3;
  halfW: number;
  halfH: number;
}

/** Grid layout; must agree with the server's scene builder. */
export function gridButtons(scene: SceneDescription): ButtonRect[] {
  const pitchX = scene.cell_width_m + scene.gap_m;
  const pitchY = scene.cell_height_m + scene.gap_m;
  const out: ButtonRect[] = [];
  for (let r = 0; r < scene.rows; r++) {
    for (let c = 0; c < scene.cols; c++) {
      out.push({
        id: r * scene.cols + c + 1,
        center: {
          x: (c - (scene.cols - 1) / 2) * pitchX,
          y: ((scene.rows - 1) / 2 - r) * pitchY,
          z: -scene.distance_m,
        },
        halfW: scene.cell_width_m / 2,
        halfH: scene.cell_height_m / 2,
      });
    }
  }
  return out;
}

export interface Viewport {
  width: number;
  height: number;
  fovYDeg: number;
}

/**
 * Perspective-project a world point into the head's view. Returns null
 * when the point is behind the viewer.
 */
export function project(q: Quat, p: Vec3, vp: Viewport): { x: number; y: number } | null {
  const v = rotate(conjugate(q), p);
  if (v.z > -1e-6) return null;
  const f = vp.height / 2 / Math.tan(((vp.fovYDeg * Math.PI) / 180) / 2);
  return {
    x: vp.width / 2 + (f * v.x) / -v.z,
    y: vp.height / 2 - (f * v.y) / -v.z,
  };
}

const BUTTON_FILL: Record<ButtonColor, string> = {
  red: "#c0392b",
  gray: "#7f8c8d",
  black: "#1c1c24",
};

export function drawScene(
  ctx: CanvasRenderingContext2D,
  scene: SceneDescription,
  pose: Quat,
  hud: HudModel,
  vp: Viewport,
): void {
  ctx.clearRect(0, 0, vp.width, vp.height);
  ctx.fillStyle = "#0b0b12";
  ctx.fillRect(0, 0, vp.width, vp.height);

  for (const b of gridButtons(scene)) {
    const corners = [
      { x: b.center.x - b.halfW, y: b.center.y - b.halfH, z: b.center.z },
      { x: b.center.x + b.halfW, y: b.center.y - b.halfH, z: b.center.z },
      { x: b.center.x + b.halfW, y: b.center.y + b.halfH, z: b.center.z },
      { x: b.center.x - b.halfW, y: b.center.y + b.halfH, z: b.center.z },
    ].map((c) => project(pose, c, vp));
    if (corners.some((c) => c === null)) continue;
    const pts = corners as { x: number; y: number }[];

    ctx.beginPath();
    ctx.moveTo(pts[0].x, pts[0].y);
    for (const p of pts.slice(1)) ctx.lineTo(p.x, p.y);
    ctx.closePath();
    const color = hud.buttons[String(b.id)] ?? "black";
    ctx.fillStyle = BUTTON_FILL[color];
    ctx.fill();
    ctx.strokeStyle = b.id === hud.gazeTarget ? "#f5f5f5" : "#3a3a46";
    ctx.lineWidth = b.id === hud.gazeTarget ? 2.5 : 1;
    ctx.stroke();

    const center = project(pose, b.center, vp);
    if (center) {
      ctx.fillStyle = "#ececec";
      ctx.font = "16px system-ui, sans-serif";
      ctx.textAlign = "center";
      ctx.textBaseline = "middle";
      ctx.fillText(String(b.id), center.x, center.y);
    }
  }

  drawCrosshairs(ctx, hud, vp);
}

function ticks(
  ctx: CanvasRenderingContext2D,
  cx: number,
  cy: number,
  rInner: number,
  rOuter: number,
  offsetDeg: number,
  color: string,
): void {
  ctx.strokeStyle = color;
  ctx.lineWidth = 3;
  for (let k = 0; k < 4; k++) {
    const a = ((offsetDeg + 90 * k) * Math.PI) / 180;
    ctx.beginPath();
    ctx.moveTo(cx + rInner * Math.sin(a), cy - rInner * Math.cos(a));
    ctx.lineTo(cx + rOuter * Math.sin(a), cy - rOuter * Math.cos(a));
    ctx.stroke();
  }
}

/**
 * Two overlapping circular crosshairs with lines every 90 degrees: the
 * outer one fixed, the inner one rotated by the server's indicator
 * angle, aligning exactly when the trigger threshold is reached.
 */
export function drawCrosshairs(
  ctx: CanvasRenderingContext2D,
  hud: HudModel,
  vp: Viewport,
): void {
  const cx = vp.width / 2;
  const cy = vp.height / 2;
  const R = 42;

  // central dot, always visible, doubles as the gaze cursor
  ctx.fillStyle = "#ececec";
  ctx.beginPath();
  ctx.arc(cx, cy, 2.5, 0, 2 * Math.PI);
  ctx.fill();

  if (hud.dwellVisible) {
    ctx.strokeStyle = "#f1c40f";
    ctx.lineWidth = 5;
    ctx.beginPath();
    ctx.arc(cx, cy, R * 0.55, -Math.PI / 2, -Math.PI / 2 + 2 * Math.PI * hud.dwellFill);
    ctx.stroke();
  }

  if (!hud.crosshairVisible) return;

  const ringColor = hud.red ? "#e74c3c" : "#2ecc71";
  ctx.strokeStyle = ringColor;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(cx, cy, R, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.beginPath();
  ctx.arc(cx, cy, R * 0.72, 0, 2 * Math.PI);
  ctx.stroke();

  // fixed target lines on the outer ring; moving lines on the inner one
  ticks(ctx, cx, cy, R * 0.92, R * 1.18, hud.fixedCrosshairDeg, ringColor);
  ticks(ctx, cx, cy, R * 0.55, R * 0.85, hud.movingCrosshairDeg, "#f5f5f5");

  if (hud.continuousValue !== 0) {
    ctx.fillStyle = "#9b59b6";
    ctx.fillRect(cx - 50, cy + R + 16, 100 * ((hud.continuousValue + 1) / 2), 6);
    ctx.strokeStyle = "#555";
    ctx.strokeRect(cx - 50, cy + R + 16, 100, 6);
  }
}
