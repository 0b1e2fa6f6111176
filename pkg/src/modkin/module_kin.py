"""Forward/inverse kinematics of the 2-DOF five-bar module.

The module is two equal-length RR chains driving a central passive RP limb:
the actuator mean angle steers the limb, the actuator separation sets the
prismatic length l = 2a*cos(separation/2). An extension c beyond the platform
joint carries the end effector, so the total limb length is l_t = l + c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core_math import atan2q
from .errors import ActuatorSeparationError, WorkspaceError

# Link length that makes l = 200.000 mm at a 1 degree actuator separation.
DEFAULT_LINK_A = 100.0038078
DEFAULT_EXTENSION_C = 50.0
DEFAULT_THETA_DIFF_MAX = math.radians(170.0)

ARCCOS_CLAMP_SLACK = 1e-9


@dataclass(frozen=True)
class ModuleGeometry:
    """Five-bar module constants: link length a (mm), end-effector extension c (mm),
    maximum actuator separation (rad) and the module base point in its plane (mm)."""

    a: float = DEFAULT_LINK_A
    c: float = DEFAULT_EXTENSION_C
    theta_diff_max: float = DEFAULT_THETA_DIFF_MAX
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (self.a > 0.0):
            raise ValueError(f"link length a must be positive, got {self.a}")
        if self.c < 0.0:
            raise ValueError(f"extension c must be non-negative, got {self.c}")
        if not (0.0 < self.theta_diff_max < math.pi):
            raise ValueError("theta_diff_max must lie in (0, pi)")

    @property
    def lt_min(self) -> float:
        return self.c + 2.0 * self.a * math.cos(self.theta_diff_max / 2.0)

    @property
    def lt_max(self) -> float:
        return self.c + 2.0 * self.a


@dataclass(frozen=True)
class ModuleState:
    """Solved module configuration: actuator angles, RP-limb angle theta,
    total limb length l_t (mm) and the planar tip point (mm)."""

    theta_r1: float
    theta_r2: float
    theta: float
    l_t: float
    tip: tuple[float, float]


def module_fk(theta_r1: float, theta_r2: float, geom: ModuleGeometry) -> ModuleState:
    """Tip position from the two actuator angles (radians)."""
    diff = theta_r2 - theta_r1
    if abs(diff) > geom.theta_diff_max:
        raise ActuatorSeparationError(
            f"actuator separation {math.degrees(abs(diff)):.3f} deg exceeds "
            f"the limit {math.degrees(geom.theta_diff_max):.3f} deg"
        )
    theta = (theta_r1 + theta_r2) / 2.0
    l_t = 2.0 * geom.a * math.cos(diff / 2.0) + geom.c
    x = l_t * math.cos(theta) + geom.origin[0]
    y = l_t * math.sin(theta) + geom.origin[1]
    return ModuleState(theta_r1, theta_r2, theta, l_t, (x, y))


def _split_actuators(theta: float, l_t: float, geom: ModuleGeometry,
                     branch: int) -> tuple[float, float]:
    """Invert l_t = 2a*cos(diff/2) + c and theta = mean(actuators)."""
    lo, hi = geom.lt_min, geom.lt_max
    if not (lo - ARCCOS_CLAMP_SLACK <= l_t <= hi + ARCCOS_CLAMP_SLACK):
        raise WorkspaceError(
            f"limb length {l_t:.6f} mm outside the reachable range "
            f"[{lo:.6f}, {hi:.6f}] mm"
        )
    ratio = (l_t - geom.c) / (2.0 * geom.a)
    if ratio > 1.0:
        # numeric overshoot only; anything real was caught by the range check
        ratio = 1.0
    diff = branch * 2.0 * math.acos(ratio)
    return theta - diff / 2.0, theta + diff / 2.0


def module_ik(tip: tuple[float, float], geom: ModuleGeometry,
              branch: int = 1) -> tuple[float, float]:
    """Actuator angles (radians) that place the tip at the given planar point.

    Branch convention theta_r2 >= theta_r1 (branch=+1); pass branch=-1 for the
    mirrored solution.
    """
    dx = tip[0] - geom.origin[0]
    dy = tip[1] - geom.origin[1]
    l_t = math.hypot(dx, dy)
    theta = atan2q(dy, dx)
    return _split_actuators(theta, l_t, geom, branch)


def serial_to_actuators(theta: float, d: float, geom: ModuleGeometry,
                        branch: int = 1) -> tuple[float, float]:
    """Map simplified serial coordinates (RP angle, total limb length) to actuators."""
    return _split_actuators(theta, d, geom, branch)


def actuators_to_serial(theta_r1: float, theta_r2: float,
                        geom: ModuleGeometry) -> tuple[float, float]:
    """Map actuator angles to simplified serial coordinates (theta, d=l_t)."""
    diff = theta_r2 - theta_r1
    if abs(diff) > geom.theta_diff_max:
        raise ActuatorSeparationError(
            f"actuator separation {math.degrees(abs(diff)):.3f} deg exceeds "
            f"the limit {math.degrees(geom.theta_diff_max):.3f} deg"
        )
    theta = (theta_r1 + theta_r2) / 2.0
    d = 2.0 * geom.a * math.cos(diff / 2.0) + geom.c
    return theta, d
