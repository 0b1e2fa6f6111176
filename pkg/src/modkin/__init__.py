"""Kinematics engine for a reconfigurable manipulator built from 2-DOF
five-bar modules: the single module, the 4/6-DOF hybrid serial stacks, the
three-limb parallel platform, and mobility analysis."""

from .core_math import DhRow, HomTransform, atan2q, compose, dh_transform
from .hybrid_kin import (
    HybridGeometry,
    SerialJointVector4,
    SerialJointVector6,
    fk_rprp,
    fk_rprprp,
    hybrid_actuators_fk,
    hybrid_actuators_ik,
    ik_rprp,
    ik_rprprp,
)
from .mobility import (
    PocSet,
    TopologyGraph,
    driving_pair_check,
    grubler,
    loop_independent_eqs,
    mechanism_dof,
    poc_intersect,
    poc_union,
)
from .module_kin import (
    ModuleGeometry,
    ModuleState,
    actuators_to_serial,
    module_fk,
    module_ik,
    serial_to_actuators,
)
from .parallel_kin import (
    LimbState,
    ParallelGeometry,
    PlatformPose,
    assembly_modes,
    constraint_residuals,
    limb_actuators,
    parallel_fk,
    parallel_ik,
    pose_from_corners,
)
from .robot_config import RobotDefinition, load_definition, load_preset, save_definition

__version__ = "0.1.0"

__all__ = [
    "DhRow", "HomTransform", "atan2q", "compose", "dh_transform",
    "HybridGeometry", "SerialJointVector4", "SerialJointVector6",
    "fk_rprp", "fk_rprprp", "hybrid_actuators_fk", "hybrid_actuators_ik",
    "ik_rprp", "ik_rprprp",
    "PocSet", "TopologyGraph", "driving_pair_check", "grubler",
    "loop_independent_eqs", "mechanism_dof", "poc_intersect", "poc_union",
    "ModuleGeometry", "ModuleState", "actuators_to_serial", "module_fk",
    "module_ik", "serial_to_actuators",
    "LimbState", "ParallelGeometry", "PlatformPose", "assembly_modes",
    "constraint_residuals", "limb_actuators", "parallel_fk", "parallel_ik",
    "pose_from_corners",
    "RobotDefinition", "load_definition", "load_preset", "save_definition",
    "__version__",
]
