"""Mobility analysis: Grubler's planar criterion and the loop-equation method
over position-and-orientation-characteristic (POC) sets.

The POC calculus here is deliberately restricted to the rule set the shipped
mechanism fixtures need: planar R/P branches annotated with a shared axis
group, the along-prismatic marker that narrows a translation plane to a line
under intersection, the composite-direction union for rotations, and
hard-coded dimension contributions for a lone revolute or spherical joint
inside a platform limb. Anything else raises UnsupportedPocRuleError rather
than guessing.

Topologies are data: a small YAML format (see data/topologies/) describes the
links, joints, branches and their declared POC sets, so the four shipped
mechanisms are fixtures, not code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable

import yaml

from .errors import (
    AnnotationMismatchError,
    ConfigParseError,
    ConfigValidationError,
    UnknownJointError,
    UnsupportedPocRuleError,
)

JOINT_DOF = {"R": 1, "P": 1, "S": 3}

# dimension a lone joint contributes to a platform limb's serial dimension;
# these reproduce the worked limb sums and are not a general POC rule
LONE_JOINT_CONTRIBUTION = {"R": 2, "S": 2}


def grubler(links: int, joints: int, grounded: int) -> int:
    """Planar mobility M = 3L - 2J - 3G (may be <= 0; returned as-is)."""
    if links < 0 or joints < 0 or grounded < 0:
        raise ValueError("link/joint/grounded counts must be non-negative")
    return 3 * links - 2 * joints - 3 * grounded


@dataclass(frozen=True)
class PocSet:
    """Translation/rotation capability of a chain's end link.

    t_perp: axis-group labels whose perpendicular plane carries the translations.
    t_along: prismatic joint names singling out translation directions.
    r_par: axis-group labels the rotation directions are parallel to.
    """

    t_dim: int
    r_dim: int
    t_perp: frozenset = frozenset()
    t_along: frozenset = frozenset()
    r_par: frozenset = frozenset()

    def __post_init__(self):
        if not (0 <= self.t_dim <= 3 and 0 <= self.r_dim <= 3):
            raise ValueError("POC dimensions must lie in 0..3")

    @property
    def dim(self) -> int:
        return self.t_dim + self.r_dim


def poc_union(a: PocSet, b: PocSet) -> PocSet:
    """Componentwise union: max dimensions, direction sets merged.

    Two rotation sets about different axis groups merge into the composite
    direction set while the counted dimension stays the componentwise max,
    matching the worked loop arithmetic.
    """
    return PocSet(
        t_dim=max(a.t_dim, b.t_dim),
        r_dim=max(a.r_dim, b.r_dim),
        t_perp=a.t_perp | b.t_perp,
        t_along=a.t_along | b.t_along,
        r_par=a.r_par | b.r_par,
    )


def poc_intersect(a: PocSet, b: PocSet) -> PocSet:
    """Componentwise compatible minimum.

    Rotations must share an axis group. A translation plane meets a set whose
    annotations single out a prismatic direction in just that line, which is
    what narrows the module's platform motion to one translation.
    """
    if a.r_dim > 0 and b.r_dim > 0:
        shared = a.r_par & b.r_par
        if not shared:
            raise AnnotationMismatchError(
                f"rotation direction vocabularies {sorted(a.r_par)} and "
                f"{sorted(b.r_par)} are disjoint; no intersection rule applies"
            )
        r_dim, r_par = min(a.r_dim, b.r_dim), frozenset(shared)
    else:
        r_dim, r_par = 0, frozenset()

    if a.t_dim > 0 and b.t_dim > 0:
        if a.t_perp and b.t_perp and not (a.t_perp & b.t_perp):
            raise AnnotationMismatchError(
                f"translation plane vocabularies {sorted(a.t_perp)} and "
                f"{sorted(b.t_perp)} are disjoint; no intersection rule applies"
            )
        t_dim = min(a.t_dim, b.t_dim)
        if a.t_along != b.t_along:
            t_dim = min(t_dim, 1)
        t_perp = (a.t_perp & b.t_perp) if (a.t_perp and b.t_perp) \
            else (a.t_perp | b.t_perp)
        t_along = a.t_along | b.t_along
    else:
        t_dim, t_perp, t_along = 0, frozenset(), frozenset()
    return PocSet(t_dim=t_dim, r_dim=r_dim, t_perp=t_perp,
                  t_along=t_along, r_par=r_par)


def loop_independent_eqs(branches: Iterable[PocSet]) -> list[int]:
    """Independent displacement equations per loop.

    Branch j+1 closes loop j against the sub-mechanism of the first j
    branches: xi_j = dim((intersection of branches 1..j) union branch j+1).
    """
    branches = list(branches)
    if len(branches) < 2:
        raise ValueError("at least two branches are needed to form a loop")
    running = branches[0]
    xis = []
    for nxt in branches[1:]:
        xis.append(poc_union(running, nxt).dim)
        running = poc_intersect(running, nxt)
    return xis


@dataclass(frozen=True)
class Joint:
    name: str
    kind: str  # R | P | S

    @property
    def dof(self) -> int:
        return JOINT_DOF[self.kind]


@dataclass(frozen=True)
class Branch:
    name: str
    joints: tuple[Joint, ...]
    poc: PocSet


@dataclass(frozen=True)
class ModuleUnit:
    """One five-bar module: three branches forming two independent loops."""

    branches: tuple[Branch, ...]

    @property
    def joints(self) -> tuple[Joint, ...]:
        return tuple(j for b in self.branches for j in b.joints)

    def xi_values(self) -> list[int]:
        return loop_independent_eqs([b.poc for b in self.branches])


@dataclass(frozen=True)
class LimbElement:
    """Either a lone joint or a module inside a platform limb."""

    lone: Joint | None = None
    module: ModuleUnit | None = None

    @property
    def joints(self) -> tuple[Joint, ...]:
        return (self.lone,) if self.lone is not None else self.module.joints


@dataclass(frozen=True)
class TopologyGraph:
    """Declarative mechanism topology: serial stack of modules, or a platform
    with limbs of (lone joint | module) elements."""

    name: str
    structure: str  # serial_stack | platform
    links: int
    grounded: int
    modules: tuple[ModuleUnit, ...] = ()
    limbs: tuple[tuple[LimbElement, ...], ...] = field(default=())

    @property
    def joints(self) -> tuple[Joint, ...]:
        if self.structure == "serial_stack":
            return tuple(j for m in self.modules for j in m.joints)
        return tuple(j for limb in self.limbs for el in limb for j in el.joints)

    @property
    def joint_count(self) -> int:
        return len(self.joints)

    @property
    def total_freedom(self) -> int:
        return sum(j.dof for j in self.joints)

    @property
    def loops(self) -> int:
        return self.joint_count - self.links + 1


def limb_dimension(limb: tuple[LimbElement, ...]) -> int:
    """Serial dimension of a platform limb: hard-coded lone-joint
    contributions plus the loop equations of each module."""
    total = 0
    for el in limb:
        if el.lone is not None:
            try:
                total += LONE_JOINT_CONTRIBUTION[el.lone.kind]
            except KeyError:
                raise UnsupportedPocRuleError(
                    f"no dimension contribution rule for a lone "
                    f"{el.lone.kind} joint ({el.lone.name})"
                ) from None
        else:
            total += sum(el.module.xi_values())
    return total


def independent_equation_total(t: TopologyGraph) -> int:
    if t.structure == "serial_stack":
        return sum(sum(m.xi_values()) for m in t.modules)
    return sum(limb_dimension(limb) for limb in t.limbs)


def mechanism_dof(t: TopologyGraph) -> int:
    """F = (sum of joint freedoms) - (sum of independent loop equations)."""
    return t.total_freedom - independent_equation_total(t)


def driving_pair_check(t: TopologyGraph, fixed_joints: list[str]) -> bool:
    """True iff freezing the named joints leaves zero mobility (valid drivers)."""
    by_name = {j.name: j for j in t.joints}
    frozen_dof = 0
    for name in fixed_joints:
        if name not in by_name:
            raise UnknownJointError(f"joint {name!r} is not in topology {t.name!r}")
        frozen_dof += by_name[name].dof
    return (t.total_freedom - frozen_dof) - independent_equation_total(t) == 0


# ---------------------------------------------------------------- file format

def _parse_poc(raw: dict, path: str) -> PocSet:
    try:
        return PocSet(
            t_dim=int(raw["t"]),
            r_dim=int(raw["r"]),
            t_perp=frozenset(raw.get("t_perp", [])),
            t_along=frozenset(raw.get("t_along", [])),
            r_par=frozenset(raw.get("r_par", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigValidationError(path, f"bad POC set: {exc}") from exc


def _parse_joint(raw: dict, path: str) -> Joint:
    kind = raw.get("kind")
    if kind not in JOINT_DOF:
        raise ConfigValidationError(f"{path}.kind", f"unknown joint kind {kind!r}")
    name = raw.get("name")
    if not name:
        raise ConfigValidationError(f"{path}.name", "joint needs a name")
    return Joint(name=str(name), kind=kind)


def _parse_module(raw: dict, path: str) -> ModuleUnit:
    branches = []
    for bi, braw in enumerate(raw.get("branches", [])):
        bpath = f"{path}.branches[{bi}]"
        joints = tuple(_parse_joint(jraw, f"{bpath}.joints[{ji}]")
                       for ji, jraw in enumerate(braw.get("joints", [])))
        if not joints:
            raise ConfigValidationError(bpath, "branch has no joints")
        branches.append(Branch(
            name=str(braw.get("name", f"branch{bi + 1}")),
            joints=joints,
            poc=_parse_poc(braw.get("poc", {}), f"{bpath}.poc"),
        ))
    if len(branches) < 2:
        raise ConfigValidationError(path, "a module needs at least two branches")
    return ModuleUnit(branches=tuple(branches))


def parse_topology(data: dict) -> TopologyGraph:
    if not isinstance(data, dict):
        raise ConfigParseError("topology document must be a mapping")
    name = str(data.get("name", ""))
    structure = data.get("structure")
    if structure not in ("serial_stack", "platform"):
        raise ConfigValidationError("structure",
                                    f"unknown structure {structure!r}")
    links = int(data.get("links", 0))
    grounded = int(data.get("grounded", 0))

    modules: tuple[ModuleUnit, ...] = ()
    limbs: tuple[tuple[LimbElement, ...], ...] = ()
    if structure == "serial_stack":
        modules = tuple(_parse_module(m, f"modules[{i}]")
                        for i, m in enumerate(data.get("modules", [])))
        if not modules:
            raise ConfigValidationError("modules", "serial_stack needs modules")
    else:
        parsed_limbs = []
        for li, lraw in enumerate(data.get("limbs", [])):
            elements = []
            for ei, eraw in enumerate(lraw.get("elements", [])):
                epath = f"limbs[{li}].elements[{ei}]"
                if "lone_joint" in eraw:
                    elements.append(LimbElement(
                        lone=_parse_joint(eraw["lone_joint"], f"{epath}.lone_joint")))
                elif "module" in eraw:
                    elements.append(LimbElement(
                        module=_parse_module(eraw["module"], f"{epath}.module")))
                else:
                    raise ConfigValidationError(
                        epath, "element must hold lone_joint or module")
            if not elements:
                raise ConfigValidationError(f"limbs[{li}]", "limb has no elements")
            parsed_limbs.append(tuple(elements))
        limbs = tuple(parsed_limbs)
        if not limbs:
            raise ConfigValidationError("limbs", "platform needs limbs")

    graph = TopologyGraph(name=name, structure=structure, links=links,
                          grounded=grounded, modules=modules, limbs=limbs)
    names = [j.name for j in graph.joints]
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise ConfigValidationError("joints",
                                    f"joint names appear twice: {sorted(dupes)}")
    known = set(names)
    for m in (graph.modules or
              tuple(el.module for limb in graph.limbs for el in limb
                    if el.module is not None)):
        for b in m.branches:
            missing = b.poc.t_along - known
            if missing:
                raise ConfigValidationError(
                    f"branch {b.name}",
                    f"t_along references unknown joints {sorted(missing)}")
    if graph.loops < 0:
        raise ConfigValidationError("links",
                                    "more links than joints+1: negative loop count")
    return graph


def load_topology(stream) -> TopologyGraph:
    """Parse a topology from a YAML string/bytes/file object."""
    try:
        data = yaml.safe_load(stream)
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"bad topology YAML: {exc}") from exc
    return parse_topology(data)


FIXTURE_NAMES = ("module", "hybrid4", "hybrid6", "parallel")


def load_fixture(name: str) -> TopologyGraph:
    """Load one of the shipped mechanism topologies."""
    if name not in FIXTURE_NAMES:
        raise ConfigValidationError("fixture", f"unknown topology fixture {name!r}")
    ref = resources.files("modkin").joinpath(f"data/topologies/{name}.yaml")
    return load_topology(ref.read_text())
