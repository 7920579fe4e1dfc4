"""Quaternion helpers. Components are [w, x, y, z], Hamilton product convention."""

from __future__ import annotations

import math

import numpy as np


def identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def normalize(q: np.ndarray) -> np.ndarray:
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if n < 1e-12:
        raise ValueError("cannot normalize a near-zero quaternion")
    return q / n


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector v by q (body-to-world q maps body vectors into world)."""
    w = q[0]
    qv = np.array([q[1], q[2], q[3]])
    t = 2.0 * np.cross(qv, v)
    return v + w * t + np.cross(qv, t)


def to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    xx, yy, zz = x * x, y * y, z * z
    wx, wy, wz = w * x, w * y, w * z
    xy, xz, yz = x * y, x * z, y * z
    return np.array([
        [1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)],
        [2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)],
        [2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)],
    ])


def from_matrix(R: np.ndarray) -> np.ndarray:
    """Rotation matrix to quaternion (Shepperd's method), canonical w >= 0."""
    t = R[0, 0] + R[1, 1] + R[2, 2]
    if t > 0.0:
        s = math.sqrt(t + 1.0) * 2.0
        q = np.array([0.25 * s,
                      (R[2, 1] - R[1, 2]) / s,
                      (R[0, 2] - R[2, 0]) / s,
                      (R[1, 0] - R[0, 1]) / s])
    elif R[0, 0] >= R[1, 1] and R[0, 0] >= R[2, 2]:
        s = math.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2]) * 2.0
        q = np.array([(R[2, 1] - R[1, 2]) / s,
                      0.25 * s,
                      (R[0, 1] + R[1, 0]) / s,
                      (R[0, 2] + R[2, 0]) / s])
    elif R[1, 1] >= R[2, 2]:
        s = math.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2]) * 2.0
        q = np.array([(R[0, 2] - R[2, 0]) / s,
                      (R[0, 1] + R[1, 0]) / s,
                      0.25 * s,
                      (R[1, 2] + R[2, 1]) / s])
    else:
        s = math.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1]) * 2.0
        q = np.array([(R[1, 0] - R[0, 1]) / s,
                      (R[0, 2] + R[2, 0]) / s,
                      (R[1, 2] + R[2, 1]) / s,
                      0.25 * s])
    if q[0] < 0.0:
        q = -q
    return normalize(q)


def from_rotation_vector(v: np.ndarray) -> np.ndarray:
    """Exponential map: rotation by |v| radians about v/|v|."""
    angle = math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    half = 0.5 * angle
    if angle < 1e-10:
        # sin(angle/2)/angle to second order
        s = 0.5 - angle * angle / 48.0
    else:
        s = math.sin(half) / angle
    return np.array([math.cos(half), s * v[0], s * v[1], s * v[2]])


def to_rotation_vector(q: np.ndarray) -> np.ndarray:
    """Log map, canonical branch: angle in [0, pi]."""
    w = q[0]
    qv = np.array([q[1], q[2], q[3]])
    if w < 0.0:
        w = -w
        qv = -qv
    vn = math.sqrt(qv[0] * qv[0] + qv[1] * qv[1] + qv[2] * qv[2])
    if vn < 1e-12:
        return 2.0 * qv
    angle = 2.0 * math.atan2(vn, w)
    return (angle / vn) * qv
