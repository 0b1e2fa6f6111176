"""Minimal pose math shared by all kinematics modules.

Homogeneous transforms, Denavit-Hartenberg row evaluation and quadrant-aware
inverse trig. Angles are radians everywhere inside the library; degrees exist
only at CLI/API boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

ORTHONORMALITY_TOL = 1e-9


@dataclass(frozen=True)
class DhRow:
    """One Denavit-Hartenberg joint row: offset d (mm), joint angle theta (rad),
    common-normal length a (mm), twist alpha (rad)."""

    d: float
    theta: float
    a: float
    alpha: float


class HomTransform:
    """4x4 homogeneous transform with a proper-rotation block and position vector (mm).

    The last row is (0,0,0,1) by construction. Instances are value objects:
    never mutate the wrapped matrix.
    """

    __slots__ = ("m",)

    def __init__(self, matrix: np.ndarray):
        self.m = np.asarray(matrix, dtype=float)

    @classmethod
    def identity(cls) -> "HomTransform":
        return cls(np.eye(4))

    @classmethod
    def from_rp(cls, r: np.ndarray, p: np.ndarray) -> "HomTransform":
        m = np.eye(4)
        m[:3, :3] = r
        m[:3, 3] = p
        return cls(m)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "HomTransform":
        """Validating constructor for matrices arriving from outside the library."""
        m = np.asarray(matrix, dtype=float)
        if m.shape != (4, 4):
            raise DomainError(f"expected a 4x4 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix contains non-finite entries")
        if np.abs(m[3] - (0.0, 0.0, 0.0, 1.0)).max() > 1e-12:
            raise DomainError("last row must be (0,0,0,1)")
        t = cls(m)
        if not t.is_valid():
            raise DomainError("rotation block is not a proper rotation")
        return t

    @property
    def r(self) -> np.ndarray:
        return self.m[:3, :3]

    @property
    def p(self) -> np.ndarray:
        return self.m[:3, 3]

    def is_valid(self, tol: float = ORTHONORMALITY_TOL) -> bool:
        r = self.r
        return (
            np.abs(r.T @ r - np.eye(3)).max() <= tol
            and abs(np.linalg.det(r) - 1.0) <= tol
        )

    def inverse(self) -> "HomTransform":
        rt = self.r.T
        return HomTransform.from_rp(rt, -rt @ self.p)

    def __matmul__(self, other: "HomTransform") -> "HomTransform":
        return HomTransform(self.m @ other.m)

    def __repr__(self) -> str:
        return f"HomTransform(p={np.array2string(self.p, precision=4)})"


def dh_transform(row: DhRow) -> HomTransform:
    """Evaluate the link transform for one DH row.

    Equivalent to rot_z(theta) * trans_z(d) * trans_x(a) * rot_x(alpha).
    """
    ct, st = math.cos(row.theta), math.sin(row.theta)
    ca, sa = math.cos(row.alpha), math.sin(row.alpha)
    return HomTransform(np.array([
        [ct, -ca * st, sa * st, row.a * ct],
        [st, ca * ct, -sa * ct, row.a * st],
        [0.0, sa, ca, row.d],
        [0.0, 0.0, 0.0, 1.0],
    ]))


def compose(chain: list[HomTransform]) -> HomTransform:
    """Left-to-right product of a nonempty transform chain."""
    if not chain:
        raise DomainError("compose needs at least one transform")
    m = chain[0].m
    for t in chain[1:]:
        m = m @ t.m
    return HomTransform(m)


def atan2q(y: float, x: float) -> float:
    """Quadrant-aware arctangent, range (-pi, pi].

    Raises DomainError when both arguments are zero (direction undefined).
    """
    if x == 0.0 and y == 0.0:
        raise DomainError("atan2q(0, 0): direction undefined")
    angle = math.atan2(y, x)
    if angle == -math.pi:
        angle = math.pi
    return angle


def wrap_angle(angle: float) -> float:
    """Wrap to the principal range (-pi, pi]."""
    wrapped = math.remainder(angle, math.tau)
    if wrapped == -math.pi:
        wrapped = math.pi
    return wrapped


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
