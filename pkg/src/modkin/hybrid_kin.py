"""Position analysis of the hybrid serial stacks of five-bar modules.

Two modules stacked perpendicular form a 4-DOF chain that simplifies to an
RPRP serial manipulator; three modules form a 6-DOF RPRPRP chain. Both are
implemented from their closed-form transform entries and cross-checked in the
tests against the raw DH matrix product.

DH tables (angles in degrees here, radians in code):

    RPRP:    (d=0,  th=th1, a=0,  al=90), (d=d2, th=90, a=L2, al=0),
             (d=0,  th=th3, a=0,  al=90), (d=d4, th=0,  a=0,  al=0)
    RPRPRP:  rows 1-3 as above, then (d=d4, th=90, a=0, al=90),
             (d=0,  th=th5, a=0,  al=-90), (d=d6, th=0, a=0, al=0)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_math import DhRow, HomTransform, atan2q, compose, dh_transform
from .errors import OrientationSingularityError, UnreachablePoseError
from .module_kin import ModuleGeometry, actuators_to_serial, serial_to_actuators

IK_RESIDUAL_TOL = 1e-6
_SING_EPS = 1e-12


@dataclass(frozen=True)
class SerialJointVector4:
    """Joint values of the simplified RPRP chain: angles rad, lengths mm."""

    theta1: float
    d2: float
    theta3: float
    d4: float


@dataclass(frozen=True)
class SerialJointVector6:
    """Joint values of the simplified RPRPRP chain: angles rad, lengths mm."""

    theta1: float
    d2: float
    theta3: float
    d4: float
    theta5: float
    d6: float


@dataclass(frozen=True)
class HybridGeometry:
    """Inter-module structural offset L2 (mm) plus the stacked module geometries."""

    l2: float
    modules: tuple[ModuleGeometry, ...]

    def __post_init__(self):
        if self.l2 < 0.0:
            raise ValueError(f"L2 must be non-negative, got {self.l2}")
        if len(self.modules) not in (2, 3):
            raise ValueError("hybrid stacks take exactly 2 or 3 modules")


def dh_rows_rprp(j: SerialJointVector4, g: HybridGeometry) -> list[DhRow]:
    h = math.pi / 2.0
    return [
        DhRow(0.0, j.theta1, 0.0, h),
        DhRow(j.d2, h, g.l2, 0.0),
        DhRow(0.0, j.theta3, 0.0, h),
        DhRow(j.d4, 0.0, 0.0, 0.0),
    ]


def dh_rows_rprprp(j: SerialJointVector6, g: HybridGeometry) -> list[DhRow]:
    h = math.pi / 2.0
    return [
        DhRow(0.0, j.theta1, 0.0, h),
        DhRow(j.d2, h, g.l2, 0.0),
        DhRow(0.0, j.theta3, 0.0, h),
        DhRow(j.d4, h, 0.0, h),
        DhRow(0.0, j.theta5, 0.0, -h),
        DhRow(j.d6, 0.0, 0.0, 0.0),
    ]


def fk_rprp(j: SerialJointVector4, g: HybridGeometry) -> HomTransform:
    """End pose of the 4-DOF chain from its closed-form entries."""
    c1, s1 = math.cos(j.theta1), math.sin(j.theta1)
    c3, s3 = math.cos(j.theta3), math.sin(j.theta3)
    return HomTransform(np.array([
        [-c1 * s3, s1, c1 * c3, j.d4 * c1 * c3 + j.d2 * s1],
        [-s1 * s3, -c1, s1 * c3, j.d4 * s1 * c3 - j.d2 * c1],
        [c3, 0.0, s3, j.d4 * s3 + g.l2],
        [0.0, 0.0, 0.0, 1.0],
    ]))


def ik_rprp(t: HomTransform, g: HybridGeometry) -> SerialJointVector4:
    """Joint values of the 4-DOF chain for a reachable pose.

    theta1 comes from the a-column direction, so it is undefined where
    a_x = a_y = 0 (theta3 at +-90 deg).
    """
    ax, ay, az = t.m[0, 2], t.m[1, 2], t.m[2, 2]
    px, py, pz = t.m[0, 3], t.m[1, 3], t.m[2, 3]
    if math.hypot(ax, ay) < _SING_EPS:
        raise OrientationSingularityError(
            "a_x = a_y = 0: base rotation theta1 is undefined for this orientation"
        )
    theta1 = atan2q(ay, ax)
    c1, s1 = math.cos(theta1), math.sin(theta1)
    theta3 = atan2q(az, ay * s1 + ax * c1)
    c3, s3 = math.cos(theta3), math.sin(theta3)
    d2 = px * s1 - py * c1
    d4 = (pz - g.l2) * s3 + (px * c1 + py * s1) * c3
    j = SerialJointVector4(theta1, d2, theta3, d4)
    residual = np.abs(fk_rprp(j, g).m - t.m).max()
    if residual > IK_RESIDUAL_TOL:
        raise UnreachablePoseError(
            f"pose is not reachable by the RPRP chain (residual {residual:.3e})"
        )
    return j


def fk_rprprp(j: SerialJointVector6, g: HybridGeometry) -> HomTransform:
    """End pose of the 6-DOF chain from its closed-form entries."""
    c1, s1 = math.cos(j.theta1), math.sin(j.theta1)
    c3, s3 = math.cos(j.theta3), math.sin(j.theta3)
    c5, s5 = math.cos(j.theta5), math.sin(j.theta5)
    reach = j.d6 * c5 + j.d4          # distance along the bent limb pair
    swing = j.d2 - j.d6 * s5
    return HomTransform(np.array([
        [c1 * c3 * s5 + s1 * c5, c1 * s3, c1 * c3 * c5 - s1 * s5,
         s1 * swing + c1 * c3 * reach],
        [s1 * c3 * s5 - c1 * c5, s1 * s3, c1 * s5 + s1 * c3 * c5,
         s1 * c3 * reach - c1 * swing],
        [s3 * s5, -c3, s3 * c5, s3 * reach + g.l2],
        [0.0, 0.0, 0.0, 1.0],
    ]))


def ik_rprprp(t: HomTransform, d6: float, g: HybridGeometry) -> SerialJointVector6:
    """Joint values of the 6-DOF chain given the pose and an externally
    measured d6 (the last prismatic value cannot be decoupled analytically).

    Where o_x = o_y = 0 (sin(theta3) = 0) the base rotation is unobservable;
    the convention theta1 = 0 is returned and the remaining joints absorb the
    difference, so the pose itself is still reproduced exactly.
    """
    ox, oy, oz = t.m[0, 1], t.m[1, 1], t.m[2, 1]
    nx, ny = t.m[0, 0], t.m[1, 0]
    ax, ay = t.m[0, 2], t.m[1, 2]
    px, py, pz = t.m[0, 3], t.m[1, 3], t.m[2, 3]

    degenerate = math.hypot(ox, oy) < _SING_EPS
    theta1 = 0.0 if degenerate else atan2q(oy, ox)
    c1, s1 = math.cos(theta1), math.sin(theta1)
    theta3 = atan2q(oy * s1 + ox * c1, -oz)
    c3, s3 = math.cos(theta3), math.sin(theta3)
    theta5 = atan2q(ay * c1 - ax * s1, nx * s1 - ny * c1)
    c5, s5 = math.cos(theta5), math.sin(theta5)
    d2 = d6 * s5 + px * s1 - py * c1
    # eliminate d4 from (A_1^0)^-1 * T: the rotated position gives
    # c3*(d6 c5 + d4) and s3*(d6 c5 + d4) as separate components, so the
    # combination below is division-free and valid on the whole joint space.
    reach = (c1 * px + s1 * py) * c3 + (pz - g.l2) * s3
    d4 = reach - d6 * c5
    j = SerialJointVector6(theta1, d2, theta3, d4, theta5, d6)
    residual = np.abs(fk_rprprp(j, g).m - t.m).max()
    if residual > IK_RESIDUAL_TOL:
        if degenerate:
            raise OrientationSingularityError(
                "o_x = o_y = 0 and no joint vector reproduces the pose "
                f"(residual {residual:.3e})"
            )
        raise UnreachablePoseError(
            f"pose is not reachable by the RPRPRP chain (residual {residual:.3e})"
        )
    return j


def d4_printed_formula(t: HomTransform, d6: float, theta1: float, theta3: float,
                       theta5: float, l2: float) -> float:
    """The d4 expression as printed in the source derivation, kept verbatim as a
    comparison path for the discrepancy report. Its second fraction uses p_z
    where the derivation pattern calls for p_x; see reports.d4_discrepancy."""
    py, pz = t.m[1, 3], t.m[2, 3]
    return ((pz - l2) / (2.0 * math.sin(theta3)) - d6 * math.cos(theta5)
            + (py * math.sin(theta1) + pz * math.cos(theta1))
            / (2.0 * math.cos(theta3)))


def d4_derived_formula(t: HomTransform, d6: float, theta1: float, theta3: float,
                       theta5: float, l2: float) -> float:
    """Division-free d4 elimination used by ik_rprprp, exposed for the report."""
    px, py, pz = t.m[0, 3], t.m[1, 3], t.m[2, 3]
    c1, s1 = math.cos(theta1), math.sin(theta1)
    c3, s3 = math.cos(theta3), math.sin(theta3)
    return (c1 * px + s1 * py) * c3 + (pz - l2) * s3 - d6 * math.cos(theta5)


def _to_serial(actuators, g: HybridGeometry):
    if len(actuators) != len(g.modules):
        raise ValueError(
            f"expected {len(g.modules)} actuator pairs, got {len(actuators)}"
        )
    vals = []
    for (tr1, tr2), geom in zip(actuators, g.modules):
        theta, d = actuators_to_serial(tr1, tr2, geom)
        vals.extend((theta, d))
    return vals


def hybrid_actuators_fk(actuators, g: HybridGeometry) -> HomTransform:
    """End pose from per-module actuator angle pairs (radians)."""
    vals = _to_serial(actuators, g)
    if len(g.modules) == 2:
        return fk_rprp(SerialJointVector4(*vals), g)
    return fk_rprprp(SerialJointVector6(*vals), g)


def hybrid_actuators_ik(t: HomTransform, g: HybridGeometry,
                        d6: float | None = None) -> list[tuple[float, float]]:
    """Per-module actuator pairs for a reachable pose; d6 is required for the
    three-module stack (sensor-supplied in the physical build)."""
    if len(g.modules) == 2:
        j4 = ik_rprp(t, g)
        serial = [(j4.theta1, j4.d2), (j4.theta3, j4.d4)]
    else:
        if d6 is None:
            raise ValueError("the 6-DOF chain needs the measured d6 value")
        j6 = ik_rprprp(t, d6, g)
        serial = [(j6.theta1, j6.d2), (j6.theta3, j6.d4), (j6.theta5, j6.d6)]
    return [serial_to_actuators(theta, d, geom)
            for (theta, d), geom in zip(serial, g.modules)]


def serial_from_actuators(actuators, g: HybridGeometry):
    """Actuator pairs -> SerialJointVector4 or SerialJointVector6."""
    vals = _to_serial(actuators, g)
    if len(g.modules) == 2:
        return SerialJointVector4(*vals)
    return SerialJointVector6(*vals)


def fk_oracle(j, g: HybridGeometry) -> HomTransform:
    """Raw DH matrix product for either chain (test oracle, not the fast path)."""
    rows = (dh_rows_rprp(j, g) if isinstance(j, SerialJointVector4)
            else dh_rows_rprprp(j, g))
    return compose([dh_transform(r) for r in rows])
