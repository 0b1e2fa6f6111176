"""Robot-level operations shared by the CLI and the HTTP service.

All angles cross this boundary in degrees and all lengths in mm; matrices are
row-major 16-element lists. Keeping one code path here is what makes the
service responses bit-identical to direct library calls.
"""

from __future__ import annotations

import math

import numpy as np

from .core_math import HomTransform
from .errors import UnreachablePoseError
from .hybrid_kin import (
    SerialJointVector4,
    SerialJointVector6,
    hybrid_actuators_fk,
    ik_rprp,
    ik_rprprp,
    serial_to_actuators,
)
from .mobility import grubler, load_fixture, mechanism_dof
from .module_kin import actuators_to_serial, module_fk, module_ik
from .parallel_kin import (
    PlatformPose,
    constraint_residuals,
    home_pose,
    limb_actuators,
    parallel_fk,
    parallel_ik,
)
from .robot_config import RobotDefinition


def _pairs_rad(defn: RobotDefinition, actuators_deg) -> list[tuple[float, float]]:
    values = [math.radians(float(v)) for v in actuators_deg]
    want = 2 * len(defn.modules)
    if len(values) != want:
        raise ValueError(
            f"robot {defn.name!r} takes {want} actuator values, got {len(values)}")
    return [(values[i], values[i + 1]) for i in range(0, len(values), 2)]


def _matrix_list(t: HomTransform) -> list[float]:
    return [float(v) for v in t.m.ravel()]


def _matrix_from_list(values) -> HomTransform:
    m = np.asarray([float(v) for v in values], dtype=float)
    if m.size != 16:
        raise ValueError(f"matrix_row_major needs 16 values, got {m.size}")
    return HomTransform.from_matrix(m.reshape(4, 4))


def _pose_matrix(pose: PlatformPose) -> HomTransform:
    return HomTransform.from_rp(pose.rot, pose.pos)


def robot_fk(defn: RobotDefinition, actuators_deg,
             seed: PlatformPose | None = None) -> dict:
    """Forward kinematics from a flat actuator vector (degrees)."""
    pairs = _pairs_rad(defn, actuators_deg)
    if defn.kind == "module":
        state = module_fk(pairs[0][0], pairs[0][1], defn.module_geometries()[0])
        return {
            "kind": "module",
            "tip_mm": [state.tip[0], state.tip[1]],
            "theta_deg": math.degrees(state.theta),
            "l_t_mm": state.l_t,
        }
    if defn.kind in ("hybrid4", "hybrid6"):
        g = defn.hybrid_geometry()
        serial = []
        for pair, geom in zip(pairs, g.modules):
            theta, d = actuators_to_serial(pair[0], pair[1], geom)
            serial.extend([math.degrees(theta), d])
        t = hybrid_actuators_fk(pairs, g)
        return {
            "kind": defn.kind,
            "matrix_row_major": _matrix_list(t),
            "position_mm": [float(v) for v in t.p],
            "serial_joints": serial,
        }
    g = defn.parallel_geometry()
    q, q_bar = [], []
    for pair, geom in zip(pairs, g.limbs):
        theta, d = actuators_to_serial(pair[0], pair[1], geom)
        q.append(theta)
        q_bar.append(d)
    q, q_bar = np.array(q), np.array(q_bar)
    poses = parallel_fk(q, q_bar, g, seed=seed)
    if not poses:
        edge = constraint_residuals(
            np.asarray([b + qb * (math.cos(qi) * ih + math.sin(qi) * kh)
                        for b, qb, qi, ih, kh in
                        zip(g.base_points, q_bar, q, g.i_hat, g.k_hat)]),
            q_bar, g)[6:]
        raise UnreachablePoseError(
            "actuator command does not close the platform loop "
            f"(max edge residual {float(np.abs(edge).max()):.6g} mm^2)")
    pose = poses[0]
    residuals = constraint_residuals(pose.corners(g), q_bar, g)
    t = _pose_matrix(pose)
    return {
        "kind": "parallel",
        "matrix_row_major": _matrix_list(t),
        "position_mm": [float(v) for v in t.p],
        "limb_q_deg": [math.degrees(float(v)) for v in q],
        "limb_q_bar_mm": [float(v) for v in q_bar],
        "diagnostics": {
            "residuals": [float(v) for v in residuals],
            "max_abs_residual": float(np.abs(residuals).max()),
            "solution_count": len(poses),
        },
    }


def robot_ik(defn: RobotDefinition, payload: dict) -> dict:
    """Inverse kinematics from a kind-specific target payload."""
    if defn.kind == "module":
        tip = payload.get("tip_mm")
        if tip is None or len(tip) != 2:
            raise ValueError("module IK needs tip_mm: [x, y]")
        tr1, tr2 = module_ik((float(tip[0]), float(tip[1])),
                             defn.module_geometries()[0])
        return {"kind": "module",
                "actuators_deg": [math.degrees(tr1), math.degrees(tr2)]}

    if "matrix_row_major" not in payload:
        raise ValueError(f"{defn.kind} IK needs matrix_row_major: [16 floats]")
    t = _matrix_from_list(payload["matrix_row_major"])

    if defn.kind == "hybrid4":
        g = defn.hybrid_geometry()
        j = ik_rprp(t, g)
        serial = [(j.theta1, j.d2), (j.theta3, j.d4)]
    elif defn.kind == "hybrid6":
        if payload.get("d6_mm") is None:
            raise ValueError("hybrid6 IK needs the measured d6_mm value")
        g = defn.hybrid_geometry()
        j = ik_rprprp(t, float(payload["d6_mm"]), g)
        serial = [(j.theta1, j.d2), (j.theta3, j.d4), (j.theta5, j.d6)]
    else:
        g = defn.parallel_geometry()
        pose = PlatformPose(t.r.copy(), t.p.copy())
        states = parallel_ik(pose, g)
        actuators = []
        for i, s in enumerate(states):
            tr1, tr2 = limb_actuators(s, g, i)
            actuators.extend([math.degrees(tr1), math.degrees(tr2)])
        return {
            "kind": "parallel",
            "actuators_deg": actuators,
            "limb_q_deg": [math.degrees(s.q) for s in states],
            "limb_q_bar_mm": [s.q_bar for s in states],
        }

    actuators = []
    serial_out = []
    for (theta, d), geom in zip(serial, g.modules):
        tr1, tr2 = serial_to_actuators(theta, d, geom)
        actuators.extend([math.degrees(tr1), math.degrees(tr2)])
        serial_out.extend([math.degrees(theta), d])
    return {"kind": defn.kind, "actuators_deg": actuators,
            "serial_joints": serial_out}


def robot_dof(defn: RobotDefinition) -> dict:
    """Mobility summary from the robot's topology fixture."""
    t = load_fixture(defn.topology_fixture())
    out = {
        "dof": mechanism_dof(t),
        "method": "poc_loop_equations",
        "joint_freedom_total": t.total_freedom,
        "independent_equations": t.total_freedom - mechanism_dof(t),
    }
    if defn.kind == "module":
        out["grubler"] = grubler(t.links, t.joint_count, t.grounded)
    return out


def initial_actuators_deg(defn: RobotDefinition) -> list[float]:
    """A feasible starting actuator vector for a jog session."""
    if defn.kind != "parallel":
        return [0.0] * (2 * len(defn.modules))
    g = defn.parallel_geometry()
    states = parallel_ik(home_pose(g), g)
    out = []
    for i, s in enumerate(states):
        tr1, tr2 = limb_actuators(s, g, i)
        out.extend([math.degrees(tr1), math.degrees(tr2)])
    return out


def pose_from_fk_result(defn: RobotDefinition, result: dict) -> PlatformPose | None:
    """Recover the continuity seed from a parallel FK result."""
    if defn.kind != "parallel":
        return None
    t = _matrix_from_list(result["matrix_row_major"])
    return PlatformPose(t.r.copy(), t.p.copy())
