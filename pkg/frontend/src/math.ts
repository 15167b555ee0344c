/**
 * Head-pose quaternion math, mirroring the server's conventions exactly:
 * wxyz components, right-handed, +y up, forward -z, canonical sign w >= 0,
 * intrinsic yaw (+y) -> pitch (+x) -> roll (about forward). Positive roll
 * twists clockwise from the wearer's viewpoint.
 *
 * The client composes poses from input; it never re-derives interaction
 * state (twist angle, progress, arming) — that all comes from the server.
 */

export type Quat = { w: number; x: number; y: number; z: number };
export type Vec3 = { x: number; y: number; z: number };

export const IDENTITY: Quat = { w: 1, x: 0, y: 0, z: 0 };

export function axisAngle(axis: Vec3, angleDeg: number): Quat {
  const n = Math.sqrt(axis.x * axis.x + axis.y * axis.y + axis.z * axis.z);
  const h = ((angleDeg * Math.PI) / 180) / 2;
  const s = Math.sin(h) / n;
  return canonical({ w: Math.cos(h), x: axis.x * s, y: axis.y * s, z: axis.z * s });
}

export function mul(a: Quat, b: Quat): Quat {
  return {
    w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
    x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
    y: a.w * b.y + a.y * b.w + a.z * b.x - a.x * b.z,
    z: a.w * b.z + a.z * b.w + a.x * b.y - a.y * b.x,
  };
}

export function canonical(q: Quat): Quat {
  if (q.w < 0 || (q.w === 0 && (q.x < 0 || (q.x === 0 && (q.y < 0 || (q.y === 0 && q.z < 0)))))) {
    // + 0 turns any -0 component into +0
    return { w: -q.w + 0, x: -q.x + 0, y: -q.y + 0, z: -q.z + 0 };
  }
  return q;
}

export function normalize(q: Quat): Quat {
  const n = Math.sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  return canonical({ w: q.w / n, x: q.x / n, y: q.y / n, z: q.z / n });
}

/** b first, then a; renormalized with canonical sign. */
export function compose(a: Quat, b: Quat): Quat {
  return normalize(mul(a, b));
}

export function fromYawPitchRoll(yawDeg: number, pitchDeg: number, rollDeg: number): Quat {
  const qy = axisAngle({ x: 0, y: 1, z: 0 }, yawDeg);
  const qx = axisAngle({ x: 1, y: 0, z: 0 }, pitchDeg);
  const qf = axisAngle({ x: 0, y: 0, z: -1 }, rollDeg);
  return compose(compose(qy, qx), qf);
}

export function conjugate(q: Quat): Quat {
  return { w: q.w, x: -q.x, y: -q.y, z: -q.z };
}

export function rotate(q: Quat, v: Vec3): Vec3 {
  const ux = q.y * v.z - q.z * v.y;
  const uy = q.z * v.x - q.x * v.z;
  const uz = q.x * v.y - q.y * v.x;
  return {
    x: v.x + 2 * (q.w * ux + q.y * uz - q.z * uy),
    y: v.y + 2 * (q.w * uy + q.z * ux - q.x * uz),
    z: v.z + 2 * (q.w * uz + q.x * uy - q.y * ux),
  };
}

export function lookDirection(q: Quat): Vec3 {
  return rotate(q, { x: 0, y: 0, z: -1 });
}

/** Wrap an angle to (-180, 180]. */
export function wrapDeg(a: number): number {
  let r = a % 360;
  if (r <= -180) r += 360;
  if (r > 180) r -= 360;
  return r;
}
