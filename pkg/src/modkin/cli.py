"""Command-line interface: batch FK/IK/DOF computations, the diagnostic
report path and the HTTP jog service.

Exit codes: 0 success, 2 usage, 3 invalid configuration, 4 kinematics error
(out of workspace, singular orientation, no convergence).
"""

from __future__ import annotations

import json
import math
import os
import sys

import click

from .errors import ConfigError, KinematicsError
from . import ops
from .mobility import load_topology, mechanism_dof
from .robot_config import (
    PRESET_NAMES,
    RobotDefinition,
    all_presets,
    load_definition,
)

EXIT_CONFIG = 3
EXIT_KINEMATICS = 4


def _load_robot(config: str | None, robot: str | None) -> RobotDefinition:
    registry = all_presets()
    if config is not None:
        try:
            with open(config, "rb") as fh:
                defn = load_definition(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {config!r}: {exc}") from exc
        registry[defn.name] = defn
        if robot is None or robot == defn.name:
            return defn
    if robot is None:
        raise ConfigError("no robot selected: pass --robot or --config")
    if robot not in registry:
        raise ConfigError(
            f"unknown robot {robot!r}; presets: {', '.join(PRESET_NAMES)}")
    return registry[robot]


def _parse_floats(text: str, label: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise click.UsageError(f"bad {label}: {exc}") from exc


def _angles_in(values: list[float], radians: bool) -> list[float]:
    return [math.degrees(v) for v in values] if radians else values


def _radianize(result: dict) -> dict:
    """Convert the angle fields of an ops result to radians for --radians."""
    out = dict(result)
    for key in ("theta_deg", "actuators_deg", "limb_q_deg"):
        if key in out:
            val = out.pop(key)
            rad = (math.radians(val) if isinstance(val, float)
                   else [math.radians(v) for v in val])
            out[key.replace("_deg", "_rad")] = rad
    if "serial_joints" in out:
        out["serial_joints"] = [
            math.radians(v) if i % 2 == 0 else v
            for i, v in enumerate(out["serial_joints"])]
        out["serial_joints_units"] = "rad,mm"
    return out


def _emit(result: dict, fmt: str, radians: bool) -> None:
    if radians:
        result = _radianize(result)
    if fmt == "structured":
        click.echo(json.dumps(result, indent=2))
        return
    for key, value in result.items():
        if key == "matrix_row_major":
            click.echo("pose matrix (row-major):")
            for r in range(4):
                row = value[4 * r:4 * r + 4]
                click.echo("  " + "  ".join(f"{v: 12.6f}" for v in row))
        elif isinstance(value, dict):
            click.echo(f"{key}:")
            for k, v in value.items():
                click.echo(f"  {k}: {v}")
        elif isinstance(value, list):
            click.echo(f"{key}: " + ", ".join(f"{v:.6f}" if isinstance(v, float)
                                              else str(v) for v in value))
        else:
            click.echo(f"{key}: {value}")


def _guarded(fn):
    try:
        fn()
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except KinematicsError as exc:
        click.echo(f"kinematics error: {exc}", err=True)
        sys.exit(EXIT_KINEMATICS)


@click.group()
def main():
    """Kinematics for the reconfigurable five-bar-module manipulator."""


_common = [
    click.option("--config", type=click.Path(), default=None,
                 help="Robot definition YAML (overrides the preset registry)."),
    click.option("--robot", default=None,
                 help="Robot name (a preset or the --config definition)."),
    click.option("--format", "fmt", type=click.Choice(["text", "structured"]),
                 default="text", show_default=True),
    click.option("--degrees/--radians", "degrees", default=True,
                 help="Angle units for input and output (degrees by default)."),
]


def _with_common(fn):
    for deco in reversed(_common):
        fn = deco(fn)
    return fn


@main.command()
@_with_common
@click.option("--actuators", required=True,
              help="Flat actuator values, two per module, e.g. '22,23,22,23'.")
def fk(config, robot, fmt, degrees, actuators):
    """Forward kinematics from actuator values."""
    def run():
        defn = _load_robot(config, robot)
        values = _angles_in(_parse_floats(actuators, "--actuators"), not degrees)
        _emit(ops.robot_fk(defn, values), fmt, not degrees)
    _guarded(run)


@main.command()
@_with_common
@click.option("--tip", default=None, help="Module target tip 'x,y' in mm.")
@click.option("--pose", default=None,
              help="Target pose: 16 row-major matrix values.")
@click.option("--d6", type=float, default=None,
              help="Measured d6 (mm), required for hybrid6.")
def ik(config, robot, fmt, degrees, tip, pose, d6):
    """Inverse kinematics to actuator values."""
    def run():
        defn = _load_robot(config, robot)
        payload: dict = {}
        if tip is not None:
            payload["tip_mm"] = _parse_floats(tip, "--tip")
        if pose is not None:
            payload["matrix_row_major"] = _parse_floats(pose, "--pose")
        if d6 is not None:
            payload["d6_mm"] = d6
        if not payload:
            raise click.UsageError("pass --tip (module) or --pose (chains/platform)")
        try:
            result = ops.robot_ik(defn, payload)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
        _emit(result, fmt, not degrees)
    _guarded(run)


@main.command()
@_with_common
@click.option("--topology", type=click.Path(), default=None,
              help="Explicit topology YAML instead of the robot's fixture.")
def dof(config, robot, fmt, degrees, topology):
    """Mobility (degrees of freedom) of the selected mechanism."""
    def run():
        if topology is not None:
            try:
                with open(topology) as fh:
                    graph = load_topology(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read topology: {exc}") from exc
            result = {"dof": mechanism_dof(graph), "method": "poc_loop_equations"}
        else:
            result = ops.robot_dof(_load_robot(config, robot))
        _emit(result, fmt, not degrees)
    _guarded(run)


@main.command()
@click.option("--out", type=click.Path(), default="reports", show_default=True,
              help="Output directory for the CSV and figures.")
@click.option("--samples", type=int, default=2000, show_default=True)
def report(out, samples):
    """Generate the d4 back-solve discrepancy report (CSV + figures)."""
    from .report import d4_discrepancy_report
    summary = d4_discrepancy_report(out, samples=samples)
    click.echo(f"samples: {summary.samples}")
    click.echo(f"published-formula |d4 error|: max {summary.max_abs_printed_error:.6g} mm, "
               f"mean {summary.mean_abs_printed_error:.6g} mm")
    click.echo(f"derived-elimination |d4 error|: max {summary.max_abs_derived_error:.6g} mm")
    click.echo(f"csv: {summary.csv_path}")
    for p in summary.figure_paths:
        click.echo(f"figure: {p}")


@main.command()
@click.option("--host", default=None, help="Bind address (env MODKIN_HOST).")
@click.option("--port", type=int, default=None, help="Bind port (env MODKIN_PORT).")
@click.option("--config", type=click.Path(), default=None,
              help="Extra robot definition YAML to register.")
def serve(host, port, config):
    """Run the HTTP kinematics/jog service."""
    import uvicorn
    from .service import create_app

    def run():
        extra = None
        if config is not None:
            with open(config, "rb") as fh:
                extra = load_definition(fh)
        app = create_app([extra] if extra else None)
        uvicorn.run(app,
                    host=host or os.environ.get("MODKIN_HOST", "127.0.0.1"),
                    port=port or int(os.environ.get("MODKIN_PORT", "8023")))
    _guarded(run)


if __name__ == "__main__":
    main()
