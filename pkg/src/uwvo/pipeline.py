"""Frame-sequence visual odometry built from per-pair motion estimates."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import io as uio
from .config import RunConfig
from .errors import ParameterError, UwvoError
from .flow import estimate_flow
from .geometry import CameraIntrinsics, RelativeMotion, estimate_pair
from .trajectory import Trajectory, compose_trajectory

log = logging.getLogger(__name__)


@dataclass
class PairRecord:
    index: int
    status: str
    inlier_ratio: float = float("nan")
    correspondences: int = 0
    sigma: float = float("nan")
    weight_min: float = float("nan")
    weight_max: float = float("nan")


@dataclass
class RunResult:
    trajectory: Trajectory
    motions: list[RelativeMotion]
    records: list[PairRecord]

    @property
    def failures(self) -> int:
        return sum(r.status != "ok" for r in self.records)


def pair_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def find_frames(sequence_dir: str | os.PathLike, config: RunConfig) -> list[Path]:
    """Lexicographically ordered frame files, looking inside ``frames/`` when present."""
    root = Path(sequence_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"sequence directory not found: {root}")
    if (root / "frames").is_dir():
        root = root / "frames"
    paths = sorted(root.glob(config.frame_glob))
    paths = paths[config.start:config.stop]
    if len(paths) < 2:
        raise ParameterError(f"need at least 2 frames matching {config.frame_glob!r} in {root}")
    return paths


def load_timestamps(sequence_dir: str | os.PathLike, count: int, config: RunConfig) -> np.ndarray:
    """Per-frame times from ``timestamps.txt`` if present, else from the frame rate."""
    path = Path(sequence_dir) / "timestamps.txt"
    if path.exists():
        ts = np.loadtxt(path, ndmin=1)[config.start:]
        if len(ts) < count:
            raise ParameterError(f"{path} lists {len(ts)} times for {count} frames")
        return ts[:count]
    return np.arange(config.start, config.start + count) / config.frame_rate


def _solve_pair(args) -> tuple[RelativeMotion, PairRecord]:
    index, frame_a, frame_b, k, config, flow = args
    if isinstance(frame_a, (str, Path)):
        frame_a = uio.read_image(frame_a)
    if isinstance(frame_b, (str, Path)):
        frame_b = uio.read_image(frame_b)
    ransac = replace(config.ransac, seed=pair_seed(config.ransac.seed, index))
    try:
        res = estimate_pair(frame_a, frame_b, k, config.normalization, config.flow, config.mode,
                            ransac, config.stride, config.patch, flow=flow)
    except UwvoError as exc:
        return RelativeMotion.identity(), PairRecord(index, f"failed: {type(exc).__name__}: {exc}")
    rec = PairRecord(index, "ok", res.inlier_ratio, res.correspondences, res.sigma,
                     res.weight_min, res.weight_max)
    return res.motion, rec


def run_frames(frames, k: CameraIntrinsics, config: RunConfig, timestamps=None,
               flow_cache: dict | None = None) -> RunResult:
    """Estimate a trajectory from in-memory frames or frame paths.

    ``flow_cache`` (single worker only) memoizes flow per pair index so that
    several configurations can share one flow computation per pair.
    """
    n = len(frames)
    if n < 2:
        raise ParameterError("need at least 2 frames")
    if timestamps is None:
        timestamps = np.arange(n) / config.frame_rate
    jobs = []
    for i in range(n - 1):
        flow = None
        if flow_cache is not None and config.workers == 1:
            flow = flow_cache.get(i)
            if flow is None:
                a = frames[i] if not isinstance(frames[i], (str, Path)) else uio.read_image(frames[i])
                b = frames[i + 1] if not isinstance(frames[i + 1], (str, Path)) else uio.read_image(frames[i + 1])
                flow = flow_cache[i] = estimate_flow(a, b, config.flow)
        jobs.append((i, frames[i], frames[i + 1], k, config, flow))

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_solve_pair, jobs, chunksize=1))
    else:
        results = [_solve_pair(job) for job in jobs]

    motions = [m for m, _ in results]
    records = [r for _, r in results]
    for r in records:
        if r.status == "ok":
            log.info("pair %d: inliers %.3f sigma %.4f weights [%.4f, %.4f]",
                     r.index, r.inlier_ratio, r.sigma, r.weight_min, r.weight_max)
        else:
            log.warning("pair %d %s; identity motion used", r.index, r.status)
    return RunResult(compose_trajectory(motions, timestamps), motions, records)


def run_sequence(sequence_dir: str | os.PathLike, config: RunConfig, k: CameraIntrinsics | None = None,
                 flow_cache: dict | None = None) -> RunResult:
    paths = find_frames(sequence_dir, config)
    k = k or config.intrinsics
    if k is None:
        raise ParameterError("camera intrinsics missing: set [camera] in the config or provide a manifest")
    for p in paths:
        if not p.exists():
            raise FileNotFoundError(f"frame not found: {p}")
    timestamps = load_timestamps(sequence_dir, len(paths), config)
    return run_frames(paths, k, config, timestamps, flow_cache)


def write_pair_log(path: str | os.PathLike, records: list[PairRecord]) -> None:
    lines = ["pair,status,inlier_ratio,correspondences,sigma,weight_min,weight_max\n"]
    for r in records:
        status = r.status.replace(",", ";")
        lines.append(f"{r.index},{status},{r.inlier_ratio:.6f},{r.correspondences},{r.sigma:.6f},"
                     f"{r.weight_min:.6f},{r.weight_max:.6f}\n")
    Path(path).write_text("".join(lines))
