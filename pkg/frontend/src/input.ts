/**
 * Mouse-as-head input: pointer deltas drive yaw/pitch, wheel or held
 * Q/E keys drive roll (desk stand-in for tilting a tracked headset).
 */

import { fromYawPitchRoll, Quat, wrapDeg } from "./math.js";
import { PoseMessage, poseMessage } from "./protocol.js";

export interface InputMapping {
  yawPerPixel: number; // degrees per pixel of horizontal mouse travel
  pitchPerPixel: number; // degrees per pixel of vertical mouse travel
  rollPerTick: number; // degrees per wheel tick
  rollPerSecond: number; // degrees per second while Q/E held
  invertYaw: boolean;
  invertPitch: boolean;
  invertRoll: boolean;
}

export const DEFAULT_MAPPING: InputMapping = {
  yawPerPixel: 0.08,
  pitchPerPixel: 0.08,
  rollPerTick: 1.5,
  rollPerSecond: 45,
  invertYaw: false,
  invertPitch: false,
  invertRoll: false,
};

const PITCH_LIMIT = 89;

export class HeadState {
  yawDeg = 0;
  pitchDeg = 0;
  rollDeg = 0;
  private lastT = -Infinity;

  constructor(public mapping: InputMapping = { ...DEFAULT_MAPPING }) {}

  /** Pointer-lock movementX/movementY, pixels. */
  applyMouse(dx: number, dy: number): void {
    const sYaw = this.mapping.invertYaw ? 1 : -1;
    const sPitch = this.mapping.invertPitch ? 1 : -1;
    this.yawDeg = wrapDeg(this.yawDeg + sYaw * dx * this.mapping.yawPerPixel);
    this.pitchDeg = clamp(
      this.pitchDeg + sPitch * dy * this.mapping.pitchPerPixel,
      -PITCH_LIMIT,
      PITCH_LIMIT,
    );
  }

  /** Wheel ticks; positive ticks roll clockwise (rightward head tilt). */
  applyWheel(ticks: number): void {
    const s = this.mapping.invertRoll ? -1 : 1;
    this.rollDeg = wrapDeg(this.rollDeg + s * ticks * this.mapping.rollPerTick);
  }

  /** Held roll keys: direction -1 (Q, leftward) or +1 (E, rightward). */
  applyRollKey(direction: -1 | 1, dtSeconds: number): void {
    const s = this.mapping.invertRoll ? -1 : 1;
    this.rollDeg = wrapDeg(this.rollDeg + s * direction * this.mapping.rollPerSecond * dtSeconds);
  }

  recenterRoll(): void {
    this.rollDeg = 0;
  }

  orientation(): Quat {
    return fromYawPitchRoll(this.yawDeg, this.pitchDeg, this.rollDeg);
  }

  /**
   * Stamp a pose with a client-monotonic time. Callers pass a clock value
   * (performance.now()); identical or backwards clocks get nudged forward
   * so the server's strict ordering always holds.
   */
  pose(clockMs: number): PoseMessage {
    const t = clockMs > this.lastT ? clockMs : this.lastT + 1e-3;
    this.lastT = t;
    const q = this.orientation();
    return poseMessage(t, [q.w, q.x, q.y, q.z]);
  }
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}
