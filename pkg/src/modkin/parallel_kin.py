"""Position analysis of the three-limb parallel platform.

Each limb is one five-bar module acting as an RP chain inside a fixed plane:
the plane passes through the base anchor b_i perpendicular to the passive
base-revolute axis u_i. The limb tip carries a spherical joint at the platform
corner c_i. Three constraint families govern the corners:

    plane:   (c_i - b_i) . u_i = 0                  (mm)
    length:  (c_i - b_i) . (c_i - b_i) = q_bar_i^2  (mm^2)
    edge:    (c_i - c_j) . (c_i - c_j) = e^2        (mm^2), cyclic pairs

Inverse kinematics is closed-form. Forward kinematics runs a damped Newton
iteration on the nine corner coordinates against the nine residuals above,
multi-started so all assembly modes of the length-driven system can be
enumerated; the commanded limb angles then select the consistent mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_math import atan2q, wrap_angle
from .errors import (
    CollinearPointsError,
    ConstraintViolationError,
    DegenerateDirectionError,
    LimbStrokeError,
    NoConvergenceError,
)
from .module_kin import ModuleGeometry, serial_to_actuators

RESIDUAL_TOL = 1e-8          # acceptance bound on all nine residuals
PLANE_TOL = 1e-6             # reachability tolerance on the plane constraint
DEDUP_DISTANCE = 1e-4        # pose-distance threshold between distinct solutions
STEP_TOL = 1e-10             # Newton convergence: step norm below this
MAX_ITER = 200
N_RANDOM_STARTS = 64
_START_SEED = 20260810       # fixed so multi-start is deterministic
FK_MATCH_TOL = 1e-6          # limb angle/length agreement for a returned pose


@dataclass(eq=False)
class ParallelGeometry:
    """Fixed platform geometry.

    base_points: (3,3) rows b_i, world frame (mm).
    base_axes:   (3,3) rows u_i, unit axes of the passive base revolutes.
    platform_points: (3,3) rows d_i, corner offsets in the moving frame (mm).
    edge: platform triangle edge length e (mm).
    limbs: one ModuleGeometry per limb.
    """

    base_points: np.ndarray
    base_axes: np.ndarray
    platform_points: np.ndarray
    edge: float
    limbs: tuple[ModuleGeometry, ModuleGeometry, ModuleGeometry]

    def __post_init__(self):
        self.base_points = np.asarray(self.base_points, dtype=float).reshape(3, 3)
        self.base_axes = np.asarray(self.base_axes, dtype=float).reshape(3, 3)
        self.platform_points = np.asarray(self.platform_points, dtype=float).reshape(3, 3)
        norms = np.linalg.norm(self.base_axes, axis=1)
        if np.abs(norms - 1.0).max() > 1e-12:
            raise ValueError("base axes u_i must be unit vectors")
        for i in range(3):
            j = (i + 1) % 3
            d = np.linalg.norm(self.platform_points[i] - self.platform_points[j])
            if abs(d - self.edge) > 1e-9:
                raise ValueError(
                    f"platform corners {i} and {j} are {d:.9f} mm apart, "
                    f"expected the edge length {self.edge:.9f} mm"
                )
        if np.abs(self.base_axes[:, 2]).max() > 1.0 - 1e-9:
            raise ValueError("base axes must not be vertical (limb plane undefined)")

    @property
    def i_hat(self) -> np.ndarray:
        """Per-limb in-plane horizontal direction (rows): u_i x z, normalized."""
        z = np.array([0.0, 0.0, 1.0])
        v = np.cross(self.base_axes, z)
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    @property
    def k_hat(self) -> np.ndarray:
        """Per-limb in-plane elevation direction (rows): i_hat x u_i."""
        return np.cross(self.i_hat, self.base_axes)


@dataclass(eq=False)
class LimbState:
    """One solved limb: base-plane angle q (rad), limb length q_bar (mm) and
    the world-frame spherical-joint point c (mm)."""

    q: float
    q_bar: float
    c: np.ndarray


@dataclass(eq=False)
class PlatformPose:
    """Moving-platform pose: rotation matrix and center position (mm)."""

    rot: np.ndarray
    pos: np.ndarray

    def corners(self, g: ParallelGeometry) -> np.ndarray:
        return (self.rot @ g.platform_points.T).T + self.pos


def pose_distance(a: PlatformPose, b: PlatformPose) -> float:
    """Combined metric: position gap (mm) plus rotation gap (Frobenius)."""
    return float(np.linalg.norm(a.pos - b.pos)
                 + np.linalg.norm(a.rot - b.rot))


def constraint_residuals(c: np.ndarray, q_bar: np.ndarray,
                         g: ParallelGeometry) -> np.ndarray:
    """Nine residuals ordered (plane x3, length x3, edge x3).

    Accepts a single (3,3) corner set or a batch (..:,3,3); the edge pairs are
    the cyclic (1,2), (2,3), (3,1).
    """
    c = np.asarray(c, dtype=float)
    q_bar = np.asarray(q_bar, dtype=float)
    d = c - g.base_points
    r_plane = np.einsum('...ij,ij->...i', d, g.base_axes)
    r_len = np.einsum('...ij,...ij->...i', d, d) - q_bar ** 2
    e = c - np.roll(c, -1, axis=-2)
    r_edge = np.einsum('...ij,...ij->...i', e, e) - g.edge ** 2
    return np.concatenate([r_plane, r_len, r_edge], axis=-1)


def _jacobian(c: np.ndarray, g: ParallelGeometry) -> np.ndarray:
    """Batched (N,9,9) Jacobian of constraint_residuals wrt the corner coords."""
    n = c.shape[0]
    jac = np.zeros((n, 9, 9))
    d = c - g.base_points
    for i in range(3):
        jac[:, i, 3 * i:3 * i + 3] = g.base_axes[i]
        jac[:, 3 + i, 3 * i:3 * i + 3] = 2.0 * d[:, i, :]
        j = (i + 1) % 3
        e = c[:, i, :] - c[:, j, :]
        jac[:, 6 + i, 3 * i:3 * i + 3] = 2.0 * e
        jac[:, 6 + i, 3 * j:3 * j + 3] = -2.0 * e
    return jac


def _newton(starts: np.ndarray, q_bar: np.ndarray,
            g: ParallelGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton on all starts simultaneously.

    Returns the final corner sets (N,3,3) and a converged mask. Damping is a
    backtracking halving of the Newton step whenever it fails to shrink the
    residual norm.
    """
    c = np.array(starts, dtype=float).reshape(-1, 3, 3)
    n = c.shape[0]
    active = np.ones(n, dtype=bool)
    converged = np.zeros(n, dtype=bool)
    for _ in range(MAX_ITER):
        idx = np.where(active)[0]
        if idx.size == 0:
            break
        f = constraint_residuals(c[idx], q_bar, g)
        jac = _jacobian(c[idx], g)
        try:
            delta = np.linalg.solve(jac, -f[..., None])[..., 0]
        except np.linalg.LinAlgError:
            # singular starts (e.g. collinear corners): regularize lightly
            jac = jac + 1e-9 * np.eye(9)
            delta = np.linalg.solve(jac, -f[..., None])[..., 0]
        base = np.linalg.norm(f, axis=1)
        flat = c[idx].reshape(-1, 9)
        t = np.ones(idx.size)
        for _ in range(12):
            trial = flat + t[:, None] * delta
            norm = np.linalg.norm(
                constraint_residuals(trial.reshape(-1, 3, 3), q_bar, g), axis=1)
            worse = ~np.isfinite(norm) | (norm > base * (1.0 - 1e-4 * t))
            if not worse.any():
                break
            t[worse] *= 0.5
        flat = flat + t[:, None] * delta
        c[idx] = flat.reshape(-1, 3, 3)
        step = np.linalg.norm(t[:, None] * delta, axis=1)
        done = (step < STEP_TOL) | ~np.isfinite(step)
        converged[idx[step < STEP_TOL]] = True
        active[idx[done]] = False
    final = constraint_residuals(c, q_bar, g)
    ok = converged & (np.max(np.abs(final), axis=1) < RESIDUAL_TOL)
    return c, ok


def pose_from_corners(c: np.ndarray, g: ParallelGeometry) -> PlatformPose:
    """Rigid pose mapping the moving-frame corners onto the given world corners.

    The frame is built from the triangle by centroid plus Gram-Schmidt on the
    two edge vectors; the corners must therefore form a triangle congruent to
    the platform (true for any corner set satisfying the edge constraints).
    """
    c = np.asarray(c, dtype=float).reshape(3, 3)

    def frame(points):
        v1 = points[1] - points[0]
        v2 = points[2] - points[0]
        normal = np.cross(v1, v2)
        n1, n2 = np.linalg.norm(v1), np.linalg.norm(normal)
        if n1 < 1e-12 or n2 < 1e-9 * max(n1, 1.0):
            raise CollinearPointsError("corner points are collinear")
        e1 = v1 / n1
        e2 = v2 - (v2 @ e1) * e1
        e2 /= np.linalg.norm(e2)
        return np.stack([e1, e2, np.cross(e1, e2)], axis=1)

    rot = frame(c) @ frame(g.platform_points).T
    pos = c.mean(axis=0) - rot @ g.platform_points.mean(axis=0)
    pose = PlatformPose(rot, pos)
    err = np.abs(pose.corners(g) - c).max()
    if err > 1e-9:
        raise ConstraintViolationError(
            f"corners are not congruent with the platform triangle "
            f"(reprojection error {err:.3e} mm)"
        )
    return pose


def _limb_coordinates(c: np.ndarray, g: ParallelGeometry):
    """(q, q_bar) per limb from corner points, without validity checks."""
    d = c - g.base_points
    q_bar = np.linalg.norm(d, axis=-1)
    proj_i = np.einsum('...ij,ij->...i', d, g.i_hat)
    proj_k = np.einsum('...ij,ij->...i', d, g.k_hat)
    q = np.arctan2(proj_k, proj_i)
    return q, q_bar, proj_i, proj_k


def parallel_ik(pose: PlatformPose, g: ParallelGeometry) -> tuple[LimbState, ...]:
    """Closed-form limb states for a platform pose.

    The pose must respect the base-revolute planes: any corner off its plane
    by more than PLANE_TOL makes the pose unreachable.
    """
    c = pose.corners(g)
    plane = np.einsum('ij,ij->i', c - g.base_points, g.base_axes)
    worst = int(np.argmax(np.abs(plane)))
    if abs(plane[worst]) > PLANE_TOL:
        raise ConstraintViolationError(
            f"limb {worst + 1} corner is {plane[worst]:.3e} mm off its "
            "base-revolute plane; pose is unreachable"
        )
    q, q_bar, proj_i, proj_k = _limb_coordinates(c, g)
    states = []
    for i in range(3):
        geom = g.limbs[i]
        if not (geom.lt_min - 1e-9 <= q_bar[i] <= geom.lt_max + 1e-9):
            raise LimbStrokeError(
                f"limb {i + 1} length {q_bar[i]:.6f} mm outside the stroke "
                f"[{geom.lt_min:.6f}, {geom.lt_max:.6f}] mm"
            )
        if math.hypot(proj_i[i], proj_k[i]) < 1e-12:
            raise DegenerateDirectionError(
                f"limb {i + 1} direction is undefined (corner at the anchor)"
            )
        states.append(LimbState(float(q[i]), float(q_bar[i]), c[i].copy()))
    return tuple(states)


def direct_corners(q: np.ndarray, q_bar: np.ndarray,
                   g: ParallelGeometry) -> np.ndarray:
    """Corners implied directly by the limb coordinates (plane and length
    constraints hold by construction; the edge residuals decide feasibility)."""
    q = np.asarray(q, dtype=float)
    q_bar = np.asarray(q_bar, dtype=float)
    return (g.base_points
            + q_bar[:, None] * (np.cos(q)[:, None] * g.i_hat
                                + np.sin(q)[:, None] * g.k_hat))


def home_pose(g: ParallelGeometry) -> PlatformPose:
    """Nominal identity-rotation pose with the platform lifted so the limbs sit
    near mid-stroke; used as the multi-start anchor."""
    heights = []
    for i in range(3):
        v = g.platform_points[i] - g.base_points[i]
        mid = 0.5 * (g.limbs[i].lt_min + g.limbs[i].lt_max)
        disc = v[2] ** 2 - (v @ v) + mid ** 2
        heights.append(-v[2] + math.sqrt(disc) if disc > 0.0 else mid)
    return PlatformPose(np.eye(3), np.array([0.0, 0.0, float(np.mean(heights))]))


def _perturbation_starts(g: ParallelGeometry, n: int) -> np.ndarray:
    rng = np.random.default_rng(_START_SEED)
    anchor = home_pose(g).corners(g)
    scale = 0.3 * float(np.mean([geom.lt_max for geom in g.limbs]))
    return anchor[None] + rng.normal(0.0, scale, size=(n, 3, 3))


def _check_stroke(q_bar: np.ndarray, g: ParallelGeometry) -> None:
    for i in range(3):
        geom = g.limbs[i]
        if not (geom.lt_min - 1e-9 <= q_bar[i] <= geom.lt_max + 1e-9):
            raise LimbStrokeError(
                f"limb {i + 1} commanded length {q_bar[i]:.6f} mm outside the "
                f"stroke [{geom.lt_min:.6f}, {geom.lt_max:.6f}] mm"
            )


def _collect_poses(c_batch: np.ndarray, ok: np.ndarray,
                   g: ParallelGeometry) -> list[PlatformPose]:
    poses = []
    for c in c_batch[ok]:
        try:
            pose = pose_from_corners(c, g)
        except (CollinearPointsError, ConstraintViolationError):
            continue
        if all(pose_distance(pose, p) > DEDUP_DISTANCE for p in poses):
            poses.append(pose)
    return poses


def _canonical_sort(poses: list[PlatformPose],
                    seed: PlatformPose | None) -> list[PlatformPose]:
    if seed is not None:
        return sorted(poses, key=lambda p: pose_distance(p, seed))
    return sorted(poses, key=lambda p: (tuple(np.round(p.pos, 9)),
                                        tuple(np.round(p.rot.ravel(), 9))))


def assembly_modes(q_bar, g: ParallelGeometry,
                   seed: PlatformPose | None = None) -> list[PlatformPose]:
    """All distinct platform poses found for the given limb lengths.

    This is the length-driven problem whose solution count is bounded by 16;
    multi-start Newton enumerates the real assembly modes it can reach from
    the deterministic start set (plus the optional seed).
    """
    q_bar = np.asarray(q_bar, dtype=float)
    _check_stroke(q_bar, g)
    starts = [_perturbation_starts(g, N_RANDOM_STARTS)]
    if seed is not None:
        starts.insert(0, seed.corners(g)[None])
    c_batch, ok = _newton(np.concatenate(starts, axis=0), q_bar, g)
    return _canonical_sort(_collect_poses(c_batch, ok, g), seed)


def _matches_command(pose: PlatformPose, q: np.ndarray, q_bar: np.ndarray,
                     g: ParallelGeometry) -> bool:
    qs, qbs, _, _ = _limb_coordinates(pose.corners(g), g)
    ang = max(abs(wrap_angle(float(qs[i] - q[i]))) for i in range(3))
    return ang <= FK_MATCH_TOL and float(np.abs(qbs - q_bar).max()) <= FK_MATCH_TOL


def parallel_fk(q, q_bar, g: ParallelGeometry,
                seed: PlatformPose | None = None) -> list[PlatformPose]:
    """Platform poses consistent with the commanded limb angles and lengths.

    Starts are tried in a ladder: the caller's seed (jog continuity), then the
    corners implied directly by (q, q_bar), then the deterministic multi-start
    set. Because the limb coordinates pin the corners, the result is a single
    pose when the command closes the platform loop and an empty list when the
    edge residuals certify that it cannot.
    """
    q = np.asarray(q, dtype=float)
    q_bar = np.asarray(q_bar, dtype=float)
    _check_stroke(q_bar, g)

    direct = direct_corners(q, q_bar, g)
    ladder = [direct[None]]
    if seed is not None:
        ladder.insert(0, seed.corners(g)[None])
    c_batch, ok = _newton(np.concatenate(ladder, axis=0), q_bar, g)
    poses = [p for p in _collect_poses(c_batch, ok, g)
             if _matches_command(p, q, q_bar, g)]
    any_converged = bool(ok.any())

    if not poses:
        c_batch, ok = _newton(_perturbation_starts(g, N_RANDOM_STARTS), q_bar, g)
        any_converged = any_converged or bool(ok.any())
        poses = [p for p in _collect_poses(c_batch, ok, g)
                 if _matches_command(p, q, q_bar, g)]

    if not poses:
        # the direct corners satisfy the plane and length constraints exactly,
        # so a consistent pose exists iff the edge residuals vanish there
        edge = constraint_residuals(direct, q_bar, g)[6:]
        if np.abs(edge).max() > RESIDUAL_TOL:
            return []
        if not any_converged:
            raise NoConvergenceError(
                "forward solve converged from no start although the command "
                "appears feasible"
            )
        return []
    return _canonical_sort(poses, seed)


def limb_actuators(limb: LimbState, g: ParallelGeometry,
                   limb_index: int) -> tuple[float, float]:
    """Module actuator angles realizing one limb state."""
    return serial_to_actuators(limb.q, limb.q_bar, g.limbs[limb_index])


def parallel_actuators_fk(actuators, g: ParallelGeometry,
                          seed: PlatformPose | None = None) -> list[PlatformPose]:
    """Platform poses from the three module actuator pairs (radians)."""
    from .module_kin import actuators_to_serial
    if len(actuators) != 3:
        raise ValueError(f"expected 3 actuator pairs, got {len(actuators)}")
    q, q_bar = [], []
    for (tr1, tr2), geom in zip(actuators, g.limbs):
        theta, d = actuators_to_serial(tr1, tr2, geom)
        q.append(theta)
        q_bar.append(d)
    return parallel_fk(np.array(q), np.array(q_bar), g, seed=seed)


def parallel_actuators_ik(pose: PlatformPose,
                          g: ParallelGeometry) -> list[tuple[float, float]]:
    """Module actuator pairs (radians) realizing a reachable platform pose."""
    states = parallel_ik(pose, g)
    return [limb_actuators(s, g, i) for i, s in enumerate(states)]
