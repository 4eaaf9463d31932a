"""Metric tables and trajectory plots for the ``eval`` command."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path


from .errors import ParameterError
from .trajectory import (
    MAX_DT,
    MetricsReport,
    Trajectory,
    associate,
    evaluate,
    trajectory_length,
    umeyama_align,
)

MIN_ASSOCIATION = 0.5


@dataclass
class Row:
    name: str
    report: MetricsReport


def evaluate_all(estimates: dict[str, Trajectory], reference: Trajectory, delta_frames: int,
                 align: bool = True, max_dt: float = MAX_DT) -> list[Row]:
    rows = [Row("reference", MetricsReport(0.0, 0.0, trajectory_length(reference), len(reference)))]
    for name, est in estimates.items():
        i, _ = associate(est, reference, max_dt)
        frac = len(i) / max(len(est), 1)
        if frac < MIN_ASSOCIATION:
            raise ParameterError(
                f"{name}: only {frac:.0%} of poses associate with the reference within {max_dt} s"
            )
        rows.append(Row(name, evaluate(est, reference, delta_frames, align, max_dt)))
    return rows


def format_csv(rows: list[Row]) -> str:
    out = ["name,length_m,poses,ate_m,rte_m\n"]
    for r in rows:
        m = r.report
        out.append(f"{r.name},{m.length:.6f},{m.pose_count},{m.ate_rmse:.6f},{m.rte_rmse:.6f}\n")
    return "".join(out)


def format_table(rows: list[Row]) -> str:
    width = max(len("trajectory"), *(len(r.name) for r in rows))
    head = f"{'trajectory':<{width}}  {'Length (m)':>11}  {'# poses':>8}  {'ATE (m)':>9}  {'RTE (m)':>9}"
    lines = [head, "-" * len(head)]
    for r in rows:
        m = r.report
        lines.append(f"{r.name:<{width}}  {m.length:>11.4f}  {m.pose_count:>8d}  "
                     f"{m.ate_rmse:>9.4f}  {m.rte_rmse:>9.4f}")
    return "\n".join(lines) + "\n"


def plot_trajectories(estimates: dict[str, Trajectory], reference: Trajectory, out_dir: str | os.PathLike,
                      align: bool = True) -> list[Path]:
    """Write the x-y overlay and the per-axis plots as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "uwvo"
    out_dir = Path(out_dir)
    curves = {"reference": reference}
    for name, est in estimates.items():
        curves[name] = umeyama_align(est, reference).apply_trajectory(est) if align else est

    fig, ax = plt.subplots(figsize=(5, 5))
    for name, tr in curves.items():
        ax.plot(tr.positions[:, 0], tr.positions[:, 1], "--" if name == "reference" else "-", label=name)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend()
    xy = out_dir / "trajectory_xy.svg"
    fig.savefig(xy, metadata={"Date": None})
    plt.close(fig)

    fig, axes = plt.subplots(3, 1, figsize=(6, 6), sharex=True)
    for name, tr in curves.items():
        for a, axis in enumerate("xyz"):
            axes[a].plot(tr.timestamps, tr.positions[:, a], "--" if name == "reference" else "-", label=name)
            axes[a].set_ylabel(f"{axis} (m)")
    axes[-1].set_xlabel("time (s)")
    axes[0].legend(fontsize="small")
    xyz = out_dir / "trajectory_xyz.svg"
    fig.savefig(xyz, metadata={"Date": None})
    plt.close(fig)
    return [xy, xyz]
