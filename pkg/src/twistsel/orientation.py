"""Quaternion math for head pose: composition, look axis, swing-twist.

Conventions (fixed for the whole package)
-----------------------------------------
- Right-handed coordinates, +y up, forward = -z in the head's local frame.
- Quaternions are wxyz, unit norm, canonical sign w >= 0.
- ``compose(a, b)`` applies b first, then a (Hamilton product a*b).
- Positive twist = head rolling clockwise from the wearer's viewpoint
  (right ear toward right shoulder), i.e. a right-handed rotation about
  the local forward axis (0, 0, -1).
- Angles are degrees at every public interface; radians internally.

Two distinct notions of "twist" live here and must not be conflated:

``swing_twist(q, axis)``
    The exact algebraic decomposition q = swing * twist with twist about
    ``axis`` and swing about an axis orthogonal to it. Singularity-free.

``twist_angle_deg(q)``
    The head-roll angle: how far the head's right vector is rotated about
    the current look axis away from the horizon-referenced (zero-roll)
    right vector. This is the quantity a roll-to-confirm trigger reads,
    and it round-trips ``from_yaw_pitch_roll`` exactly. It differs from
    the algebraic twist component for combined large yaw+pitch poses,
    where composing yaw and pitch alone already carries algebraic twist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class InvalidAngle(ValueError):
    """Raised when an angle argument is not a finite number."""


@dataclass(frozen=True, slots=True)
class Vec3:
    x: float
    y: float
    z: float

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)


FORWARD = Vec3(0.0, 0.0, -1.0)
UP = Vec3(0.0, 1.0, 0.0)
RIGHT = Vec3(1.0, 0.0, 0.0)


@dataclass(frozen=True, slots=True)
class UnitQuat:
    w: float
    x: float
    y: float
    z: float

    @staticmethod
    def identity() -> "UnitQuat":
        return UnitQuat(1.0, 0.0, 0.0, 0.0)

    @staticmethod
    def from_axis_angle(axis: Vec3, angle_deg: float) -> "UnitQuat":
        a = axis.normalized()
        h = math.radians(angle_deg) / 2.0
        s = math.sin(h)
        return UnitQuat(math.cos(h), a.x * s, a.y * s, a.z * s).canonical()

    @staticmethod
    def from_components(w: float, x: float, y: float, z: float) -> "UnitQuat":
        """Build from raw components, renormalizing only if measurably off unit.

        The skip keeps already-unit inputs byte-identical through file
        round trips.
        """
        n2 = w * w + x * x + y * y + z * z
        if n2 == 0.0 or not math.isfinite(n2):
            raise ValueError("quaternion components must be finite and nonzero")
        if abs(n2 - 1.0) > 1e-12:
            n = math.sqrt(n2)
            w, x, y, z = w / n, x / n, y / n, z / n
        return UnitQuat(w, x, y, z).canonical()

    def canonical(self) -> "UnitQuat":
        """Canonical sign: w >= 0; if w == 0, first nonzero component > 0."""
        w, x, y, z = self.w, self.x, self.y, self.z
        if w < 0.0 or (w == 0.0 and (x < 0.0 or (x == 0.0 and (y < 0.0 or (y == 0.0 and z < 0.0))))):
            return UnitQuat(-w, -x, -y, -z)
        return self

    def normalized(self) -> "UnitQuat":
        n = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        return UnitQuat(self.w / n, self.x / n, self.y / n, self.z / n).canonical()

    def inverse(self) -> "UnitQuat":
        return UnitQuat(self.w, -self.x, -self.y, -self.z)

    def dot(self, other: "UnitQuat") -> float:
        return self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z

    def rotate(self, v: Vec3) -> Vec3:
        # q v q* expanded; avoids two full Hamilton products.
        w, qx, qy, qz = self.w, self.x, self.y, self.z
        ux = qy * v.z - qz * v.y
        uy = qz * v.x - qx * v.z
        uz = qx * v.y - qy * v.x
        return Vec3(
            v.x + 2.0 * (w * ux + qy * uz - qz * uy),
            v.y + 2.0 * (w * uy + qz * ux - qx * uz),
            v.z + 2.0 * (w * uz + qx * uy - qy * ux),
        )

    def angle_deg(self) -> float:
        """Rotation angle in [0, 180]."""
        vn = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        return math.degrees(2.0 * math.atan2(vn, abs(self.w)))

    def axis(self) -> Vec3:
        """Rotation axis; arbitrary (forward) for the identity."""
        vn = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        if vn < 1e-15:
            return FORWARD
        return Vec3(self.x / vn, self.y / vn, self.z / vn)


@dataclass(frozen=True, slots=True)
class SwingTwist:
    swing: UnitQuat
    twist: UnitQuat


def _mul(a: UnitQuat, b: UnitQuat) -> UnitQuat:
    return UnitQuat(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y + a.y * b.w + a.z * b.x - a.x * b.z,
        a.w * b.z + a.z * b.w + a.x * b.y - a.y * b.x,
    )


def compose(a: UnitQuat, b: UnitQuat) -> UnitQuat:
    """Rotation that applies b first, then a. Renormalized, canonical sign."""
    return _mul(a, b).normalized()


def from_yaw_pitch_roll(yaw_deg: float, pitch_deg: float, roll_deg: float) -> UnitQuat:
    """Intrinsic yaw (about +y), then pitch (about local +x), then roll
    (about local forward). Positive pitch looks up; positive roll twists
    clockwise from the wearer's viewpoint.
    """
    for v in (yaw_deg, pitch_deg, roll_deg):
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise InvalidAngle(f"angle must be finite, got {v!r}")
    qy = UnitQuat.from_axis_angle(UP, yaw_deg)
    qx = UnitQuat.from_axis_angle(RIGHT, pitch_deg)
    qf = UnitQuat.from_axis_angle(FORWARD, roll_deg)
    return compose(compose(qy, qx), qf)


def look_direction(q: UnitQuat) -> Vec3:
    """Unit vector the head is facing: q applied to (0, 0, -1)."""
    return q.rotate(FORWARD)


def swing_twist(q: UnitQuat, axis: Vec3) -> SwingTwist:
    """Decompose q = compose(swing, twist), twist about ``axis``.

    The twist is the normalized projection of q's vector part onto the
    axis (kept with w); the swing is what remains and rotates about an
    axis orthogonal to ``axis``. When q's vector part is orthogonal to
    the axis the twist degenerates to the identity and swing = q.
    """
    a = axis.normalized()
    d = q.x * a.x + q.y * a.y + q.z * a.z
    if abs(d) <= 1e-12:
        return SwingTwist(swing=q, twist=UnitQuat.identity())
    twist = UnitQuat(q.w, d * a.x, d * a.y, d * a.z).normalized()
    swing = compose(q, twist.inverse())
    return SwingTwist(swing=swing, twist=twist)


def twist_component_angle_deg(q: UnitQuat, axis: Vec3) -> float:
    """Signed angle of the algebraic twist of q about ``axis``, in (-180, 180]."""
    a = axis.normalized()
    d = q.x * a.x + q.y * a.y + q.z * a.z
    ang = math.degrees(2.0 * math.atan2(d, q.w))
    if ang <= -180.0:
        ang += 360.0
    return ang


def twist_angle_deg(q: UnitQuat) -> float:
    """Signed head-roll angle about the current look axis, in (-180, 180].

    Zero-roll reference: the right vector of the yaw/pitch-only pose with
    the same look direction (horizontal, since yaw and pitch alone never
    tip the head sideways). Positive = clockwise from the wearer's view.
    Degenerates when looking straight up or down; falls back to the
    algebraic twist about the body forward axis there.
    """
    f = look_direction(q)
    r0 = f.cross(UP)
    n = r0.norm()
    if n < 1e-9:
        return twist_component_angle_deg(q, FORWARD)
    r0 = r0.scaled(1.0 / n)
    r = q.rotate(RIGHT)
    s = r0.cross(r).dot(f)
    c = r0.dot(r)
    ang = math.degrees(math.atan2(s, c))
    if ang <= -180.0:
        ang += 360.0
    return ang
