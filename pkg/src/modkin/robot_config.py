"""Robot definitions: schema, validation, persistence and shipped presets.

Definitions are YAML with explicit units in the field names (lengths in mm,
angles in degrees). A definition holds plain Python values so serialization
round-trips to an identical object; the kinematics geometry objects are built
on demand through the accessor methods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from importlib import resources

import numpy as np
import yaml

from .errors import ConfigParseError, ConfigValidationError
from .hybrid_kin import HybridGeometry
from .module_kin import (
    DEFAULT_EXTENSION_C,
    DEFAULT_LINK_A,
    ModuleGeometry,
)
from .parallel_kin import ParallelGeometry

SCHEMA_VERSION = 1
KINDS = ("module", "hybrid4", "hybrid6", "parallel")
MODULE_COUNT = {"module": 1, "hybrid4": 2, "hybrid6": 3, "parallel": 3}

DEFAULT_L2 = 50.0
DEFAULT_THETA_DIFF_MAX_DEG = 170.0
DEFAULT_ACTUATOR_LIMIT_DEG = (-170.0, 170.0)
# preset platform proportions; the source mechanism never states them
DEFAULT_BASE_RADIUS = 200.0
DEFAULT_PLATFORM_EDGE = 150.0

PRESET_NAMES = ("paper-module", "paper-hybrid4", "paper-hybrid6", "paper-parallel")


@dataclass(frozen=True)
class ModuleSpec:
    """Serializable five-bar module constants and its actuator limits."""

    link_a_mm: float = DEFAULT_LINK_A
    extension_c_mm: float = DEFAULT_EXTENSION_C
    theta_diff_max_deg: float = DEFAULT_THETA_DIFF_MAX_DEG
    origin_xy_mm: tuple[float, float] = (0.0, 0.0)
    actuator_limits_deg: tuple[tuple[float, float], tuple[float, float]] = (
        DEFAULT_ACTUATOR_LIMIT_DEG, DEFAULT_ACTUATOR_LIMIT_DEG)

    def geometry(self) -> ModuleGeometry:
        return ModuleGeometry(
            a=self.link_a_mm,
            c=self.extension_c_mm,
            theta_diff_max=math.radians(self.theta_diff_max_deg),
            origin=tuple(self.origin_xy_mm),
        )


@dataclass(frozen=True)
class ParallelSpec:
    """Serializable parallel-platform layout."""

    base_radius_mm: float = DEFAULT_BASE_RADIUS
    platform_edge_mm: float = DEFAULT_PLATFORM_EDGE
    base_azimuth_deg: tuple[float, float, float] = (0.0, 120.0, 240.0)
    base_points_mm: tuple | None = None   # explicit override of the circle layout
    base_axes: tuple | None = None        # unit axes; default tangential
    platform_points_mm: tuple | None = None


@dataclass(frozen=True)
class RobotDefinition:
    """Validated robot description: kind, module geometries and layout."""

    name: str
    kind: str
    modules: tuple[ModuleSpec, ...]
    offset_l2_mm: float = DEFAULT_L2
    mount: str = "floor"  # floor | wall (wall = base-frame pre-rotation)
    parallel: ParallelSpec | None = None
    schema_version: int = SCHEMA_VERSION

    # -- derived geometry -------------------------------------------------
    def module_geometries(self) -> tuple[ModuleGeometry, ...]:
        return tuple(m.geometry() for m in self.modules)

    def hybrid_geometry(self) -> HybridGeometry:
        if self.kind not in ("hybrid4", "hybrid6"):
            raise ConfigValidationError("kind", f"{self.kind!r} has no hybrid geometry")
        return HybridGeometry(l2=self.offset_l2_mm, modules=self.module_geometries())

    def base_transform(self) -> np.ndarray:
        """World pre-transform for the mount; wall mounting tips the base frame
        so the first joint axis runs horizontally."""
        if self.mount == "floor":
            return np.eye(4)
        m = np.eye(4)
        m[:3, :3] = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])
        return m

    def parallel_geometry(self) -> ParallelGeometry:
        if self.kind != "parallel":
            raise ConfigValidationError("kind", f"{self.kind!r} has no parallel geometry")
        spec = self.parallel or ParallelSpec()
        az = np.radians(np.asarray(spec.base_azimuth_deg, dtype=float))
        if spec.base_points_mm is not None:
            b = np.asarray(spec.base_points_mm, dtype=float)
        else:
            b = np.stack([spec.base_radius_mm * np.cos(az),
                          spec.base_radius_mm * np.sin(az),
                          np.zeros(3)], axis=1)
        if spec.base_axes is not None:
            u = np.asarray(spec.base_axes, dtype=float)
            u = u / np.linalg.norm(u, axis=1, keepdims=True)
        else:
            u = np.stack([-np.sin(az), np.cos(az), np.zeros(3)], axis=1)
        if spec.platform_points_mm is not None:
            d = np.asarray(spec.platform_points_mm, dtype=float)
        else:
            rho = spec.platform_edge_mm / math.sqrt(3.0)
            d = np.stack([rho * np.cos(az), rho * np.sin(az), np.zeros(3)], axis=1)
        edge = (spec.platform_edge_mm if spec.platform_points_mm is None
                else float(np.linalg.norm(d[0] - d[1])))
        return ParallelGeometry(
            base_points=b, base_axes=u, platform_points=d, edge=edge,
            limbs=self.module_geometries(),
        )

    def actuator_limits_deg(self) -> list[tuple[float, float]]:
        """Flat per-actuator limits in module order."""
        return [tuple(lim) for m in self.modules for lim in m.actuator_limits_deg]

    def topology_fixture(self) -> str:
        return {"module": "module", "hybrid4": "hybrid4",
                "hybrid6": "hybrid6", "parallel": "parallel"}[self.kind]


# ------------------------------------------------------------------ validation

def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ConfigValidationError(path, message)


def _validate(d: RobotDefinition) -> RobotDefinition:
    _expect(d.kind in KINDS, "kind", f"must be one of {KINDS}, got {d.kind!r}")
    _expect(d.schema_version == SCHEMA_VERSION, "schema_version",
            f"unsupported version {d.schema_version}")
    _expect(d.mount in ("floor", "wall"), "mount",
            f"must be floor or wall, got {d.mount!r}")
    want = MODULE_COUNT[d.kind]
    _expect(len(d.modules) == want, "modules",
            f"kind {d.kind!r} needs exactly {want} modules, got {len(d.modules)}")
    _expect(d.offset_l2_mm >= 0.0, "offset_l2_mm", "must be non-negative")
    for i, m in enumerate(d.modules):
        _expect(m.link_a_mm > 0.0, f"modules[{i}].link_a_mm", "must be positive")
        _expect(m.extension_c_mm >= 0.0, f"modules[{i}].extension_c_mm",
                "must be non-negative")
        _expect(0.0 < m.theta_diff_max_deg < 180.0,
                f"modules[{i}].theta_diff_max_deg", "must lie in (0, 180)")
        _expect(len(m.origin_xy_mm) == 2, f"modules[{i}].origin_xy_mm",
                "needs exactly two values")
        _expect(len(m.actuator_limits_deg) == 2,
                f"modules[{i}].actuator_limits_deg", "needs one pair per actuator")
        for k, lim in enumerate(m.actuator_limits_deg):
            _expect(len(lim) == 2 and lim[0] < lim[1],
                    f"modules[{i}].actuator_limits_deg[{k}]",
                    "limit interval must be nonempty (min < max)")
    if d.kind == "parallel":
        spec = d.parallel or ParallelSpec()
        _expect(spec.base_radius_mm > 0.0, "parallel.base_radius_mm",
                "must be positive")
        _expect(spec.platform_edge_mm > 0.0, "parallel.platform_edge_mm",
                "must be positive")
        try:
            d.parallel_geometry()
        except ValueError as exc:
            raise ConfigValidationError("parallel", str(exc)) from exc
    return d


# --------------------------------------------------------------- serialization

def _tupled(value):
    if isinstance(value, (list, tuple)):
        return tuple(_tupled(v) for v in value)
    return value


def definition_from_dict(data: dict) -> RobotDefinition:
    if not isinstance(data, dict):
        raise ConfigParseError("definition document must be a mapping")
    known = {"schema_version", "name", "kind", "modules", "offset_l2_mm",
             "mount", "parallel"}
    unknown = set(data) - known
    if unknown:
        raise ConfigValidationError(sorted(unknown)[0], "unknown field")
    try:
        modules = tuple(
            ModuleSpec(**{k: _tupled(v) for k, v in m.items()})
            for m in data.get("modules", [{}] * MODULE_COUNT.get(data.get("kind"), 1))
        )
        parallel = None
        if data.get("parallel") is not None:
            parallel = ParallelSpec(
                **{k: _tupled(v) for k, v in data["parallel"].items()})
        d = RobotDefinition(
            name=str(data.get("name", "")),
            kind=data.get("kind"),
            modules=modules,
            offset_l2_mm=float(data.get("offset_l2_mm", DEFAULT_L2)),
            mount=str(data.get("mount", "floor")),
            parallel=parallel,
            schema_version=int(data.get("schema_version", SCHEMA_VERSION)),
        )
    except TypeError as exc:
        raise ConfigParseError(f"bad definition structure: {exc}") from exc
    return _validate(d)


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def definition_to_dict(d: RobotDefinition) -> dict:
    out = {
        "schema_version": d.schema_version,
        "name": d.name,
        "kind": d.kind,
        "modules": [{k: _plain(v) for k, v in asdict(m).items()}
                    for m in d.modules],
        "offset_l2_mm": d.offset_l2_mm,
        "mount": d.mount,
    }
    if d.parallel is not None:
        out["parallel"] = {k: _plain(v) for k, v in asdict(d.parallel).items()
                           if v is not None}
    return out


def load_definition(source) -> RobotDefinition:
    """Parse and validate a robot definition from YAML bytes/str/file object."""
    try:
        data = yaml.safe_load(source)
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"bad definition YAML: {exc}") from exc
    return definition_from_dict(data)


def save_definition(d: RobotDefinition) -> bytes:
    """Serialize a definition; load_definition(save_definition(d)) == d."""
    return yaml.safe_dump(definition_to_dict(d), sort_keys=False).encode()


def load_preset(name: str) -> RobotDefinition:
    if name not in PRESET_NAMES:
        raise ConfigValidationError("preset", f"unknown preset {name!r}; "
                                    f"available: {', '.join(PRESET_NAMES)}")
    ref = resources.files("modkin").joinpath(f"data/presets/{name}.yaml")
    return load_definition(ref.read_text())


def all_presets() -> dict[str, RobotDefinition]:
    return {name: load_preset(name) for name in PRESET_NAMES}
