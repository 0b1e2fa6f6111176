"""HTTP service exposing the kinematics engine and jog-session state.

Endpoint table (JSON bodies; angles deg, lengths mm, matrices row-major 16):

    GET    /api/robots                       -> {"robots": [names]}
    GET    /api/robots/{name}                -> definition + limits + geometry
    PUT    /api/robots/{name}                -> register/replace a definition
    POST   /api/robots/{name}/fk             -> {"actuators_deg": [...]}
    POST   /api/robots/{name}/ik             -> kind-specific target payload
    GET    /api/robots/{name}/dof            -> mobility summary
    POST   /api/sessions                     -> {"robot": name, "actuators_deg"?}
    PATCH  /api/sessions/{id}/actuators      -> {"actuators_deg": [...]}
    GET    /api/sessions/{id}/state          -> actuators + last solved pose

Status codes: 400 malformed request, 404 unknown robot/session, 422
kinematics failure (machine-readable reason). Compute endpoints are stateless
and pure; sessions serialize writers per session and keep the last parallel
solution as the continuity seed for the next jog.
"""

from __future__ import annotations

import threading
import uuid

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import ops
from .errors import ConfigError, KinematicsError
from .robot_config import (
    RobotDefinition,
    all_presets,
    definition_from_dict,
    definition_to_dict,
)


class Session:
    """Jog-session state: one writer at a time, last solution kept as seed."""

    def __init__(self, robot: RobotDefinition, actuators_deg: list[float]):
        self.robot = robot
        self.lock = threading.Lock()
        self._check_limits(actuators_deg)
        self.actuators_deg = list(actuators_deg)
        self.last_result = ops.robot_fk(robot, self.actuators_deg)
        self.seed_pose = ops.pose_from_fk_result(robot, self.last_result)

    def _check_limits(self, actuators_deg: list[float]) -> None:
        limits = self.robot.actuator_limits_deg()
        if len(actuators_deg) != len(limits):
            raise ValueError(
                f"expected {len(limits)} actuator values, got {len(actuators_deg)}")
        for i, (v, (lo, hi)) in enumerate(zip(actuators_deg, limits)):
            if not (lo <= v <= hi):
                raise KinematicsError(
                    f"actuator {i + 1} value {v:.4f} deg outside its limits "
                    f"[{lo:.1f}, {hi:.1f}] deg")

    def state(self) -> dict:
        return {
            "robot": self.robot.name,
            "kind": self.robot.kind,
            "actuators_deg": list(self.actuators_deg),
            "limits_deg": [list(l) for l in self.robot.actuator_limits_deg()],
            "pose": self.last_result,
        }

    def jog(self, actuators_deg: list[float]) -> dict:
        with self.lock:
            self._check_limits(actuators_deg)
            result = ops.robot_fk(self.robot, actuators_deg, seed=self.seed_pose)
            # only commit after a successful solve: failed jogs leave state as-is
            self.actuators_deg = list(actuators_deg)
            self.last_result = result
            seed = ops.pose_from_fk_result(self.robot, result)
            if seed is not None:
                self.seed_pose = seed
            return self.state()


def _geometry_summary(defn: RobotDefinition) -> dict:
    out = {
        "modules": [{
            "link_a_mm": m.link_a_mm,
            "extension_c_mm": m.extension_c_mm,
            "theta_diff_max_deg": m.theta_diff_max_deg,
            "lt_min_mm": m.geometry().lt_min,
            "lt_max_mm": m.geometry().lt_max,
        } for m in defn.modules],
        "offset_l2_mm": defn.offset_l2_mm,
    }
    if defn.kind == "parallel":
        g = defn.parallel_geometry()
        out["parallel"] = {
            "base_points_mm": g.base_points.tolist(),
            "base_axes": g.base_axes.tolist(),
            "platform_points_mm": g.platform_points.tolist(),
            "edge_mm": g.edge,
        }
    return out


def create_app(extra_robots: list[RobotDefinition] | None = None) -> FastAPI:
    app = FastAPI(title="modkin service", version="0.1.0")
    robots: dict[str, RobotDefinition] = all_presets()
    for defn in extra_robots or []:
        robots[defn.name] = defn
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def _error(status: int, reason: str, category: str) -> JSONResponse:
        return JSONResponse(status_code=status,
                            content={"error": category, "reason": reason})

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return _error(400, str(exc), "malformed")

    @app.exception_handler(KinematicsError)
    async def kin_failure(request: Request, exc: KinematicsError):
        return _error(422, str(exc), type(exc).__name__)

    @app.exception_handler(ValueError)
    async def bad_value(request: Request, exc: ValueError):
        return _error(400, str(exc), "malformed")

    def _robot(name: str) -> RobotDefinition:
        defn = robots.get(name)
        if defn is None:
            raise LookupError(name)
        return defn

    @app.exception_handler(LookupError)
    async def missing(request: Request, exc: LookupError):
        return _error(404, f"unknown robot or session {exc.args[0]!r}", "not_found")

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise ValueError("request body is not valid JSON")
        if not isinstance(body, dict):
            raise ValueError("request body must be a JSON object")
        return body

    @app.get("/api/robots")
    def list_robots():
        return {"robots": sorted(robots)}

    @app.get("/api/robots/{name}")
    def get_robot(name: str):
        defn = _robot(name)
        return {"definition": definition_to_dict(defn),
                "limits_deg": [list(l) for l in defn.actuator_limits_deg()],
                "geometry": _geometry_summary(defn)}

    @app.put("/api/robots/{name}")
    async def put_robot(name: str, request: Request):
        body = await _json_body(request)
        try:
            defn = definition_from_dict(body)
        except ConfigError as exc:
            return _error(400, str(exc), "invalid_definition")
        if defn.name != name:
            return _error(400, f"definition name {defn.name!r} does not match "
                          f"URL name {name!r}", "invalid_definition")
        with registry_lock:
            robots[name] = defn
        return {"registered": name}

    @app.post("/api/robots/{name}/fk")
    async def fk(name: str, request: Request):
        defn = _robot(name)
        body = await _json_body(request)
        actuators = body.get("actuators_deg")
        if actuators is None:
            raise ValueError("fk needs actuators_deg: [..]")
        return ops.robot_fk(defn, actuators)

    @app.post("/api/robots/{name}/ik")
    async def ik(name: str, request: Request):
        defn = _robot(name)
        body = await _json_body(request)
        return ops.robot_ik(defn, body)

    @app.get("/api/robots/{name}/dof")
    def dof(name: str):
        return ops.robot_dof(_robot(name))

    @app.post("/api/sessions")
    async def create_session(request: Request):
        body = await _json_body(request)
        robot_name = body.get("robot")
        if robot_name is None:
            raise ValueError("session needs robot: <name>")
        defn = _robot(robot_name)
        actuators = body.get("actuators_deg") or ops.initial_actuators_deg(defn)
        session = Session(defn, [float(v) for v in actuators])
        sid = uuid.uuid4().hex
        with registry_lock:
            sessions[sid] = session
        return {"session_id": sid, "state": session.state()}

    def _session(sid: str) -> Session:
        s = sessions.get(sid)
        if s is None:
            raise LookupError(sid)
        return s

    @app.patch("/api/sessions/{sid}/actuators")
    async def jog(sid: str, request: Request):
        body = await _json_body(request)
        actuators = body.get("actuators_deg")
        if actuators is None:
            raise ValueError("jog needs actuators_deg: [..]")
        return _session(sid).jog([float(v) for v in actuators])

    @app.get("/api/sessions/{sid}/state")
    def state(sid: str):
        return _session(sid).state()

    return app
