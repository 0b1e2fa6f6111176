"""Diagnostic report generation.

The one shipped report compares the published closed-form d4 expression for
the six-joint chain against the algebraic elimination the solver actually
uses. The published form divides by sin(theta3) and cos(theta3) and carries a
position-component mismatch in its second fraction, so the two paths disagree
away from a measure-zero set; the report samples the joint space, writes the
per-sample comparison as CSV and renders summary figures next to it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hybrid_kin import (
    HybridGeometry,
    SerialJointVector6,
    d4_derived_formula,
    d4_printed_formula,
    fk_rprprp,
)
from .module_kin import ModuleGeometry

_BAND = 0.1  # keep samples away from sin(theta3)*cos(theta3) = 0


@dataclass(frozen=True)
class D4ReportSummary:
    samples: int
    max_abs_printed_error: float
    mean_abs_printed_error: float
    max_abs_derived_error: float
    csv_path: Path
    figure_paths: tuple[Path, ...]


def _sample_joints(rng, geom: ModuleGeometry):
    lo, hi = geom.lt_min + 1.0, geom.lt_max - 1.0
    theta1 = rng.uniform(-math.pi, math.pi)
    theta3 = rng.uniform(_BAND, math.pi / 2.0 - _BAND)
    if rng.random() < 0.5:
        theta3 = math.pi - theta3  # cover the cos(theta3) < 0 half as well
    theta5 = rng.uniform(-math.pi, math.pi)
    d2, d4, d6 = rng.uniform(lo, hi, 3)
    return SerialJointVector6(theta1, d2, theta3, d4, theta5, d6)


def d4_discrepancy_report(out_dir, samples: int = 2000,
                          seed: int = 7) -> D4ReportSummary:
    """Sample the 6-DOF joint space and compare both d4 back-solves against
    the known joint value. Writes d4_discrepancy.csv plus PNG figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    geom = ModuleGeometry()
    g = HybridGeometry(l2=50.0, modules=(geom, geom, geom))
    rng = np.random.default_rng(seed)

    rows = []
    for _ in range(samples):
        j = _sample_joints(rng, geom)
        t = fk_rprprp(j, g)
        printed = d4_printed_formula(t, j.d6, j.theta1, j.theta3, j.theta5, g.l2)
        derived = d4_derived_formula(t, j.d6, j.theta1, j.theta3, j.theta5, g.l2)
        rows.append((j.theta1, j.theta3, j.theta5, j.d2, j.d4, j.d6,
                     printed, derived,
                     printed - j.d4, derived - j.d4))

    csv_path = out / "d4_discrepancy.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta1_rad", "theta3_rad", "theta5_rad",
                         "d2_mm", "d4_mm", "d6_mm",
                         "d4_printed_mm", "d4_derived_mm",
                         "printed_error_mm", "derived_error_mm"])
        writer.writerows(rows)

    data = np.asarray(rows)
    printed_err = np.abs(data[:, 8])
    derived_err = np.abs(data[:, 9])
    figures = _render_figures(out, data[:, 1], printed_err, derived_err)
    return D4ReportSummary(
        samples=samples,
        max_abs_printed_error=float(printed_err.max()),
        mean_abs_printed_error=float(printed_err.mean()),
        max_abs_derived_error=float(derived_err.max()),
        csv_path=csv_path,
        figure_paths=figures,
    )


def _render_figures(out: Path, theta3, printed_err, derived_err) -> tuple[Path, ...]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    hist_path = out / "d4_error_histogram.png"
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(printed_err, bins=60, color="#c44", alpha=0.8,
            label="published formula")
    ax.set_xlabel("|d4 error| (mm)")
    ax.set_ylabel("samples")
    ax.set_title("Back-solved d4 error against the known joint value")
    ax.legend()
    fig.tight_layout()
    fig.savefig(hist_path, dpi=120)
    plt.close(fig)

    scatter_path = out / "d4_error_vs_theta3.png"
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.scatter(np.degrees(theta3), printed_err, s=4, color="#c44",
               label="published formula")
    ax.scatter(np.degrees(theta3), derived_err, s=4, color="#2a7",
               label="derived elimination")
    ax.set_yscale("symlog", linthresh=1e-12)
    ax.set_xlabel("theta3 (deg)")
    ax.set_ylabel("|d4 error| (mm)")
    ax.set_title("d4 back-solve error across the sampled joint space")
    ax.legend()
    fig.tight_layout()
    fig.savefig(scatter_path, dpi=120)
    plt.close(fig)
    return (hist_path, scatter_path)
