import math

import numpy as np
import pytest

from modkin.errors import OrientationSingularityError, UnreachablePoseError
from modkin.hybrid_kin import (
    HybridGeometry,
    SerialJointVector4,
    SerialJointVector6,
    d4_derived_formula,
    d4_printed_formula,
    fk_oracle,
    fk_rprp,
    fk_rprprp,
    hybrid_actuators_fk,
    hybrid_actuators_ik,
    ik_rprp,
    ik_rprprp,
    serial_from_actuators,
)
from modkin.module_kin import ModuleGeometry

from conftest import PAPER_L2, PAPER_MATRIX

DEG = math.radians


@pytest.fixture(scope="module")
def g4():
    m = ModuleGeometry()
    return HybridGeometry(l2=PAPER_L2, modules=(m, m))


@pytest.fixture(scope="module")
def g6():
    m = ModuleGeometry()
    return HybridGeometry(l2=PAPER_L2, modules=(m, m, m))


def random_joints4(rng, stroke=(60.0, 245.0)):
    return SerialJointVector4(
        theta1=rng.uniform(-math.pi, math.pi),
        d2=rng.uniform(*stroke),
        theta3=rng.uniform(-math.pi / 2 + 0.05, math.pi / 2 - 0.05),
        d4=rng.uniform(*stroke),
    )


def random_joints6(rng, stroke=(60.0, 245.0)):
    # theta3 stays off the sin/cos singular bands; both cos signs are covered
    theta3 = rng.uniform(0.1, math.pi / 2 - 0.1)
    if rng.random() < 0.5:
        theta3 = math.pi - theta3
    return SerialJointVector6(
        theta1=rng.uniform(-math.pi, math.pi),
        d2=rng.uniform(*stroke),
        theta3=theta3,
        d4=rng.uniform(*stroke),
        theta5=rng.uniform(-math.pi, math.pi),
        d6=rng.uniform(*stroke),
    )


class TestFkRprp:
    def test_paper_golden_matrix(self, g4):
        j = SerialJointVector4(DEG(22.5), 250.0, DEG(22.5), 250.0)
        assert np.abs(fk_rprp(j, g4).m - PAPER_MATRIX).max() < 1e-3

    def test_zero_joints(self, g4):
        t = fk_rprp(SerialJointVector4(0.0, 0.0, 0.0, 0.0), g4)
        assert np.abs(t.r - np.array([[0, 0, 1], [0, -1, 0], [1, 0, 0.0]])).max() \
            < 1e-12
        assert t.p == pytest.approx([0.0, 0.0, PAPER_L2], abs=1e-12)

    def test_matches_dh_product_oracle(self, g4):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            j = SerialJointVector4(rng.uniform(-math.pi, math.pi),
                                   rng.uniform(-300, 300),
                                   rng.uniform(-math.pi, math.pi),
                                   rng.uniform(-300, 300))
            assert np.abs(fk_rprp(j, g4).m - fk_oracle(j, g4).m).max() < 1e-12

    def test_output_is_valid_transform(self, g4):
        rng = np.random.default_rng(32)
        for _ in range(200):
            assert fk_rprp(random_joints4(rng), g4).is_valid()


class TestIkRprp:
    def test_paper_golden_inverse(self, g4):
        j_in = SerialJointVector4(DEG(22.5), 250.0, DEG(22.5), 250.0)
        j = ik_rprp(fk_rprp(j_in, g4), g4)
        assert math.degrees(j.theta1) == pytest.approx(22.5, abs=1e-9)
        assert j.d2 == pytest.approx(250.0, abs=1e-9)
        assert math.degrees(j.theta3) == pytest.approx(22.5, abs=1e-9)
        assert j.d4 == pytest.approx(250.0, abs=1e-9)

    def test_zero_joints(self, g4):
        j = ik_rprp(fk_rprp(SerialJointVector4(0, 0, 0, 0), g4), g4)
        assert j == SerialJointVector4(0.0, 0.0, 0.0, 0.0)

    def test_round_trip(self, g4):
        rng = np.random.default_rng(33)
        for _ in range(10_000):
            j = random_joints4(rng)
            r = ik_rprp(fk_rprp(j, g4), g4)
            assert r.theta1 == pytest.approx(j.theta1, abs=1e-9)
            assert r.d2 == pytest.approx(j.d2, abs=1e-9)
            assert r.theta3 == pytest.approx(j.theta3, abs=1e-9)
            assert r.d4 == pytest.approx(j.d4, abs=1e-9)

    def test_scaling_position_scales_only_lengths(self, g4):
        j = SerialJointVector4(0.4, 120.0, 0.7, 180.0)
        t = fk_rprp(j, g4)
        m = t.m.copy()
        m[:3, 3] = 3.0 * m[:3, 3] - np.array([0.0, 0.0, 2.0 * g4.l2])
        r = ik_rprp(type(t)(m), g4)
        assert r.theta1 == pytest.approx(j.theta1, abs=1e-9)
        assert r.theta3 == pytest.approx(j.theta3, abs=1e-9)
        assert r.d2 == pytest.approx(3.0 * j.d2, abs=1e-9)
        assert r.d4 == pytest.approx(3.0 * j.d4, abs=1e-9)

    def test_orientation_singularity(self, g4):
        t = fk_rprp(SerialJointVector4(0.3, 100.0, math.pi / 2, 150.0), g4)
        with pytest.raises(OrientationSingularityError):
            ik_rprp(t, g4)

    def test_unreachable_pose(self, g4):
        t = fk_rprp(SerialJointVector4(0.3, 100.0, DEG(30), 150.0), g4)
        m = t.m.copy()
        m[2, 3] += 1.0
        with pytest.raises(UnreachablePoseError):
            ik_rprp(type(t)(m), g4)


class TestFkRprprp:
    def test_zero_angles(self, g6):
        j = SerialJointVector6(0.0, 120.0, 0.0, 150.0, 0.0, 80.0)
        t = fk_rprprp(j, g6)
        assert t.p == pytest.approx([150.0 + 80.0, -120.0, PAPER_L2], abs=1e-12)
        assert np.abs(t.m - fk_oracle(j, g6).m).max() < 1e-12

    def test_matches_dh_product_oracle(self, g6):
        rng = np.random.default_rng(34)
        for _ in range(1000):
            j = SerialJointVector6(rng.uniform(-math.pi, math.pi),
                                   rng.uniform(-300, 300),
                                   rng.uniform(-math.pi, math.pi),
                                   rng.uniform(-300, 300),
                                   rng.uniform(-math.pi, math.pi),
                                   rng.uniform(-300, 300))
            assert np.abs(fk_rprprp(j, g6).m - fk_oracle(j, g6).m).max() < 1e-12

    def test_third_row_entries_at_right_angles(self, g6):
        t = fk_rprprp(SerialJointVector6(0.2, 100, math.pi / 2, 120,
                                         math.pi / 2, 90), g6)
        n_z, o_z, a_z = t.m[2, 0], t.m[2, 1], t.m[2, 2]
        assert n_z == pytest.approx(1.0, abs=1e-12)   # sin(t3) sin(t5)
        assert o_z == pytest.approx(0.0, abs=1e-12)   # -cos(t3)
        assert a_z == pytest.approx(0.0, abs=1e-12)   # sin(t3) cos(t5)


class TestIkRprprp:
    def test_round_trip(self, g6):
        rng = np.random.default_rng(35)
        for _ in range(10_000):
            j = random_joints6(rng)
            r = ik_rprprp(fk_rprprp(j, g6), j.d6, g6)
            assert r.theta1 == pytest.approx(j.theta1, abs=1e-6)
            assert r.d2 == pytest.approx(j.d2, abs=1e-6)
            assert r.theta3 == pytest.approx(j.theta3, abs=1e-6)
            assert r.d4 == pytest.approx(j.d4, abs=1e-6)
            assert r.theta5 == pytest.approx(j.theta5, abs=1e-6)
            assert r.d6 == j.d6

    def test_zero_pose_recovered_exactly(self, g6):
        j = SerialJointVector6(0.0, 110.0, 0.0, 140.0, 0.0, 95.0)
        r = ik_rprprp(fk_rprprp(j, g6), j.d6, g6)
        assert r == j

    def test_theta1_from_o_column(self, g6):
        j = SerialJointVector6(DEG(30), 130.0, DEG(40), 150.0, 0.6, 90.0)
        t = fk_rprprp(j, g6)
        assert t.m[0, 1] == pytest.approx(math.cos(DEG(30)) * math.sin(DEG(40)),
                                          abs=1e-12)
        assert t.m[1, 1] == pytest.approx(math.sin(DEG(30)) * math.sin(DEG(40)),
                                          abs=1e-12)
        r = ik_rprprp(t, j.d6, g6)
        assert math.degrees(r.theta1) == pytest.approx(30.0, abs=1e-9)

    def test_gimbal_band_reproduces_pose_with_zero_theta1(self, g6):
        # sin(theta3) = 0 makes theta1 unobservable; the convention theta1=0
        # must still reproduce the pose itself exactly
        j = SerialJointVector6(0.7, 120.0, 0.0, 160.0, -0.4, 85.0)
        t = fk_rprprp(j, g6)
        r = ik_rprprp(t, j.d6, g6)
        assert r.theta1 == 0.0
        assert np.abs(fk_rprprp(r, g6).m - t.m).max() < 1e-9

    def test_unreachable_pose(self, g6):
        t = fk_rprprp(SerialJointVector6(0.3, 100, 0.8, 150, 0.2, 90), g6)
        m = t.m.copy()
        m[0, 3] += 2.0
        with pytest.raises(UnreachablePoseError):
            ik_rprprp(type(t)(m), 90.0, g6)

    def test_d6_coupling_shifts_other_prismatics(self, g6):
        # the pose alone determines only (d2 - d6 sin t5) and (d4 + d6 cos t5),
        # which is why d6 must be sensed: a different d6 still reproduces the
        # pose, with d2 and d4 absorbing the change
        j = SerialJointVector6(0.3, 100.0, 0.8, 150.0, 0.2, 90.0)
        t = fk_rprprp(j, g6)
        r = ik_rprprp(t, 140.0, g6)
        assert r.d6 == 140.0
        assert r.d2 != pytest.approx(j.d2, abs=1e-3)
        assert np.abs(fk_rprprp(r, g6).m - t.m).max() < 1e-9


class TestD4Formulas:
    def test_printed_formula_disagrees_with_joint_value(self, g6):
        # the published back-solve for d4 carries a position-component mix-up;
        # the derived elimination is exact (full comparison in the report)
        rng = np.random.default_rng(36)
        printed_err, derived_err = [], []
        for _ in range(200):
            j = random_joints6(rng)
            t = fk_rprprp(j, g6)
            printed_err.append(abs(
                d4_printed_formula(t, j.d6, j.theta1, j.theta3, j.theta5, g6.l2)
                - j.d4))
            derived_err.append(abs(
                d4_derived_formula(t, j.d6, j.theta1, j.theta3, j.theta5, g6.l2)
                - j.d4))
        assert max(derived_err) < 1e-9
        assert max(printed_err) > 1.0


class TestActuatorChains:
    def test_paper_actuators_reproduce_golden_matrix(self, g4):
        actuators = [(DEG(22), DEG(23)), (DEG(22), DEG(23))]
        t = hybrid_actuators_fk(actuators, g4)
        assert np.abs(t.m - PAPER_MATRIX).max() < 1e-3

    def test_zero_actuators_fully_extended(self, g4):
        t = hybrid_actuators_fk([(0.0, 0.0), (0.0, 0.0)], g4)
        ext = g4.modules[0].lt_max
        assert t.p == pytest.approx([ext, -ext, PAPER_L2], abs=1e-9)

    def test_actuator_round_trip_4dof(self, g4):
        rng = np.random.default_rng(37)
        for _ in range(1000):
            pairs = []
            for geom in g4.modules:
                mean = rng.uniform(-math.pi / 2 + 0.1, math.pi / 2 - 0.1)
                half = rng.uniform(0.05, geom.theta_diff_max / 2 - 0.05)
                pairs.append((mean - half, mean + half))
            t = hybrid_actuators_fk(pairs, g4)
            back = hybrid_actuators_ik(t, g4)
            assert np.abs(np.array(back) - np.array(pairs)).max() < 1e-6

    def test_actuator_round_trip_6dof(self, g6):
        rng = np.random.default_rng(38)
        for _ in range(1000):
            pairs = []
            for k, geom in enumerate(g6.modules):
                if k == 1:  # theta3 away from its singular bands
                    mean = rng.uniform(0.15, math.pi / 2 - 0.15)
                else:
                    mean = rng.uniform(-math.pi / 2 + 0.1, math.pi / 2 - 0.1)
                half = rng.uniform(0.05, geom.theta_diff_max / 2 - 0.05)
                pairs.append((mean - half, mean + half))
            j = serial_from_actuators(pairs, g6)
            t = hybrid_actuators_fk(pairs, g6)
            back = hybrid_actuators_ik(t, g6, d6=j.d6)
            assert np.abs(np.array(back) - np.array(pairs)).max() < 1e-6

    def test_six_dof_requires_d6(self, g6):
        t = hybrid_actuators_fk([(0.1, 0.2)] * 3, g6)
        with pytest.raises(ValueError):
            hybrid_actuators_ik(t, g6)

    def test_geometry_validation(self):
        with pytest.raises(ValueError):
            HybridGeometry(l2=-1.0, modules=(ModuleGeometry(), ModuleGeometry()))
        with pytest.raises(ValueError):
            HybridGeometry(l2=50.0, modules=(ModuleGeometry(),))
