"""Shared fixtures and the generate-first oracles used across the suite."""

from __future__ import annotations

import math

import numpy as np
import pytest

from modkin.module_kin import ModuleGeometry
from modkin.parallel_kin import ParallelGeometry, PlatformPose, pose_from_corners
from modkin.robot_config import load_preset

PAPER_A = 100.0038078
PAPER_C = 50.0
PAPER_L2 = 50.0

# A_4^0 as printed for theta_r = (22, 23, 22, 23) deg with the constants above
PAPER_MATRIX = np.array([
    [-0.3535, 0.3827, 0.8535, 309.059],
    [-0.1464, -0.9239, 0.3535, -142.581],
    [0.9239, 0.0, 0.3827, 145.67],
    [0.0, 0.0, 0.0, 1.0],
])


@pytest.fixture(scope="session")
def paper_module() -> ModuleGeometry:
    return ModuleGeometry(a=PAPER_A, c=PAPER_C)


@pytest.fixture(scope="session")
def parallel_geometry() -> ParallelGeometry:
    return load_preset("paper-parallel").parallel_geometry()


def random_reachable_corners(rng: np.random.Generator,
                             g: ParallelGeometry) -> np.ndarray:
    """Corner triple on the three limb planes forming an edge-e triangle.

    Built constructively: place corner 1 from random limb coordinates, slide
    corner 2 along its plane ray until the edge closes, then intersect the two
    remaining edge spheres with plane 3. Retries until all limb strokes hold.
    """
    i_hat, k_hat, b = g.i_hat, g.k_hat, g.base_points
    e2 = g.edge ** 2
    for _ in range(500):
        lo1, hi1 = g.limbs[0].lt_min + 20.0, g.limbs[0].lt_max - 20.0
        q1 = rng.uniform(math.radians(95.0), math.radians(155.0))
        qb1 = rng.uniform(lo1, hi1)
        c1 = b[0] + qb1 * (math.cos(q1) * i_hat[0] + math.sin(q1) * k_hat[0])

        q2 = rng.uniform(math.radians(95.0), math.radians(155.0))
        w2 = math.cos(q2) * i_hat[1] + math.sin(q2) * k_hat[1]
        v = c1 - b[1]
        half = float(v @ w2)
        disc = half * half - float(v @ v) + e2
        if disc <= 0.0:
            continue
        roots = [half + math.sqrt(disc), half - math.sqrt(disc)]
        roots = [r for r in roots
                 if g.limbs[1].lt_min + 1.0 < r < g.limbs[1].lt_max - 1.0]
        if not roots:
            continue
        c2 = b[1] + roots[0] * w2

        # corner 3: plane coordinates (al, be); subtracting the two sphere
        # equations leaves a line, substituted back into one sphere
        g1, g2 = b[2] - c1, b[2] - c2
        a1, b1 = 2.0 * float(i_hat[2] @ g1), 2.0 * float(k_hat[2] @ g1)
        k1 = float(g1 @ g1) - e2
        a2, b2 = 2.0 * float(i_hat[2] @ g2), 2.0 * float(k_hat[2] @ g2)
        k2 = float(g2 @ g2) - e2
        da, db, dk = a1 - a2, b1 - b2, k1 - k2
        if abs(db) < 1e-9:
            continue
        # be = -(da*al + dk)/db; plug into sphere 1
        qa = 1.0 + (da / db) ** 2
        qb = a1 + 2.0 * da * dk / db ** 2 - b1 * da / db
        qc = (dk / db) ** 2 - b1 * dk / db + k1
        disc3 = qb * qb - 4.0 * qa * qc
        if disc3 <= 0.0:
            continue
        for sign in (1.0, -1.0):
            al = (-qb + sign * math.sqrt(disc3)) / (2.0 * qa)
            be = -(da * al + dk) / db
            qb3 = math.hypot(al, be)
            if not (g.limbs[2].lt_min + 1.0 < qb3 < g.limbs[2].lt_max - 1.0):
                continue
            if be <= 0.0:
                continue  # keep the above-base assembly branch
            c3 = b[2] + al * i_hat[2] + be * k_hat[2]
            return np.stack([c1, c2, c3])
    raise RuntimeError("could not sample a reachable platform configuration")


def random_reachable_pose(rng: np.random.Generator,
                          g: ParallelGeometry) -> PlatformPose:
    return pose_from_corners(random_reachable_corners(rng, g), g)
