"""Exception hierarchy shared by the kinematics modules, config layer and service."""


class ModkinError(Exception):
    """Base class for all package errors."""


class KinematicsError(ModkinError):
    """A requested computation is outside the mechanism's capability."""


class DomainError(KinematicsError):
    """Mathematically undefined input (e.g. atan2 of the zero vector)."""


class WorkspaceError(KinematicsError):
    """Target point lies outside the reachable workspace annulus."""


class ActuatorSeparationError(KinematicsError):
    """Actuator angles would fold the five-bar past its separation limit."""


class UnreachablePoseError(KinematicsError):
    """Pose is not producible by any valid joint vector."""


class OrientationSingularityError(KinematicsError):
    """Pose orientation sits on a band where a joint angle is undefined."""


class LimbStrokeError(KinematicsError):
    """Required limb length exceeds the module's prismatic stroke."""


class ConstraintViolationError(KinematicsError):
    """Pose violates a structural constraint (e.g. the base revolute plane)."""


class DegenerateDirectionError(KinematicsError):
    """A direction needed for an angle computation has vanished."""


class CollinearPointsError(KinematicsError):
    """Platform corner points are collinear; no frame can be built."""


class NoConvergenceError(KinematicsError):
    """The numerical forward-kinematics solver converged from no start."""


class UnknownJointError(ModkinError):
    """A named joint does not exist in the topology."""


class AnnotationMismatchError(ModkinError):
    """POC direction annotations are incomparable and no combination rule applies."""


class UnsupportedPocRuleError(ModkinError):
    """Topology uses a POC construct outside the supported rule set."""


class ConfigError(ModkinError):
    """Base class for robot-definition loading problems."""


class ConfigParseError(ConfigError):
    """Definition source is not well-formed."""


class ConfigValidationError(ConfigError):
    """Definition violates an invariant; carries the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
