"""se(3) / SE(3) helpers in spatial coordinates, screws ordered (angular; linear).

Vector helpers are written against plain sequences so the same code runs on
exact rationals, polynomials and floats.  Poses have a float backend (numpy)
and an exact backend that is only ever needed at the zero configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exact import ONE, ZERO, Q

Screw = tuple


def screw(*values) -> Screw:
    """Exact screw from six rationals (or one 6-sequence)."""
    if len(values) == 1:
        values = tuple(values[0])
    if len(values) != 6:
        raise ValueError(f"screw needs 6 coordinates, got {len(values)}")
    return tuple(Q(v) for v in values)


def cross(a: Sequence, b: Sequence) -> tuple:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def bracket(s1: Sequence, s2: Sequence) -> tuple:
    """Lie bracket ``(w1 x w2 ; w1 x v2 + v1 x w2)``."""
    w1, v1 = s1[:3], s1[3:]
    w2, v2 = s2[:3], s2[3:]
    ww = cross(w1, w2)
    wv = cross(w1, v2)
    vw = cross(v1, w2)
    return ww + tuple(a + b for a, b in zip(wv, vw))


def scale(s: Sequence, k) -> tuple:
    return tuple(k * x for x in s)


def add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def hat(s: Sequence) -> list[list]:
    """4x4 homogeneous matrix of a twist."""
    wx, wy, wz, vx, vy, vz = s
    z = s[0] * 0
    return [
        [z, -wz, wy, vx],
        [wz, z, -wx, vy],
        [-wy, wx, z, vz],
        [z, z, z, z],
    ]


def vee(m) -> tuple:
    """Inverse of :func:`hat`; reads the skew part from the lower triangle."""
    return (m[2][1], m[0][2], m[1][0], m[0][3], m[1][3], m[2][3])


def skew3(w: Sequence) -> np.ndarray:
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


@dataclass(frozen=True)
class Pose:
    """Rigid displacement ``x -> R x + p``."""

    rotation: object
    translation: object
    backend: str = "float"

    @classmethod
    def identity(cls, backend: str = "float") -> "Pose":
        if backend == "exact":
            R = tuple(tuple(ONE if i == j else ZERO for j in range(3)) for i in range(3))
            return cls(R, (ZERO, ZERO, ZERO), "exact")
        return cls(np.eye(3), np.zeros(3), "float")

    def __matmul__(self, other: "Pose") -> "Pose":
        if self.backend == "exact" and other.backend == "exact":
            R1, R2 = self.rotation, other.rotation
            R = tuple(tuple(sum((R1[i][k] * R2[k][j] for k in range(3)), ZERO) for j in range(3)) for i in range(3))
            p = tuple(sum((R1[i][k] * other.translation[k] for k in range(3)), ZERO) + self.translation[i] for i in range(3))
            return Pose(R, p, "exact")
        a, b = self.as_float(), other.as_float()
        return Pose(a.rotation @ b.rotation, a.rotation @ b.translation + a.translation, "float")

    def inverse(self) -> "Pose":
        if self.backend == "exact":
            Rt = tuple(tuple(self.rotation[j][i] for j in range(3)) for i in range(3))
            p = tuple(-sum((Rt[i][k] * self.translation[k] for k in range(3)), ZERO) for i in range(3))
            return Pose(Rt, p, "exact")
        Rt = self.rotation.T
        return Pose(Rt, -Rt @ self.translation, "float")

    def as_float(self) -> "Pose":
        if self.backend == "float":
            return self
        R = np.array([[float(v) for v in r] for r in self.rotation])
        return Pose(R, np.array([float(v) for v in self.translation]), "float")

    def matrix(self) -> np.ndarray:
        g = self.as_float()
        out = np.eye(4)
        out[:3, :3] = g.rotation
        out[:3, 3] = g.translation
        return out


def exp_twist(Y: Sequence, theta) -> Pose:
    """SE(3) exponential of ``Y * theta``.

    Exact inputs are only accepted for ``theta == 0``; anything else goes
    through the float closed form (Rodrigues plus the usual V matrix).
    """
    if not isinstance(theta, float) and theta == 0:
        return Pose.identity("exact")
    Y = np.asarray([float(v) for v in Y])
    theta = float(theta)
    w, v = Y[:3], Y[3:]
    nw = np.linalg.norm(w)
    if nw < 1e-300:
        return Pose(np.eye(3), v * theta, "float")
    # helical motion with a possibly non-unit angular part: rescale
    phi = nw * theta
    k = w / nw
    K = skew3(k)
    R = np.eye(3) + np.sin(phi) * K + (1.0 - np.cos(phi)) * (K @ K)
    V = np.eye(3) * phi + (1.0 - np.cos(phi)) * K + (phi - np.sin(phi)) * (K @ K)
    p = V @ (v / nw)
    return Pose(R, p, "float")


def adjoint(g: Pose):
    """6x6 matrix ``[[R, 0], [[p]x R, R]]`` acting on (angular; linear)."""
    if g.backend == "exact":
        R, p = g.rotation, g.translation
        P = ((ZERO, -p[2], p[1]), (p[2], ZERO, -p[0]), (-p[1], p[0], ZERO))
        PR = [[sum((P[i][k] * R[k][j] for k in range(3)), ZERO) for j in range(3)] for i in range(3)]
        out = [[ZERO] * 6 for _ in range(6)]
        for i in range(3):
            for j in range(3):
                out[i][j] = R[i][j]
                out[i + 3][j + 3] = R[i][j]
                out[i + 3][j] = PR[i][j]
        return out
    R, p = g.rotation, g.translation
    out = np.zeros((6, 6))
    out[:3, :3] = R
    out[3:, 3:] = R
    out[3:, :3] = skew3(p) @ R
    return out


def apply_adjoint(g: Pose, s: Sequence):
    A = adjoint(g)
    if g.backend == "exact":
        return tuple(sum((A[i][j] * s[j] for j in range(6)), ZERO) for i in range(6))
    return A @ np.asarray(s, dtype=float)


def log_pose(g: Pose) -> np.ndarray:
    """Twist ``xi`` (float) with ``exp_twist(xi, 1) == g``, for rotations below pi."""
    g = g.as_float()
    R, p = g.rotation, g.translation
    cos_phi = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    # arccos is ill-conditioned near 0; recover the angle from the skew part
    W0 = 0.5 * (R - R.T)
    s_phi = np.linalg.norm([W0[2, 1], W0[0, 2], W0[1, 0]])
    phi = float(np.arctan2(s_phi, cos_phi))
    if phi < 1e-4:
        scale = 1.0 + phi**2 / 6.0
        a = 0.5 - phi**2 / 24.0
        b = 1.0 / 6.0 - phi**2 / 120.0
    else:
        scale = phi / np.sin(phi)
        a = (1.0 - np.cos(phi)) / phi**2
        b = (phi - np.sin(phi)) / phi**3
    W = scale * W0
    w = np.array([W[2, 1], W[0, 2], W[1, 0]])
    Wm = skew3(w)
    V = np.eye(3) + a * Wm + b * (Wm @ Wm)
    v = np.linalg.solve(V, p)
    return np.concatenate([w, v])
