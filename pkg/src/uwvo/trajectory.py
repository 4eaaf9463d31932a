"""Trajectories, similarity alignment and the ATE/RTE/length metrics.

A :class:`Trajectory` stores camera-to-world poses: positions are camera
centres and quaternions are (x, y, z, w), the TUM convention.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import ParameterError, ParseError, RankDeficiencyError, ShapeError
from .geometry import RelativeMotion

log = logging.getLogger(__name__)

MAX_DT = 0.02
DEFAULT_DELTA_FRAMES = 50


@dataclass(frozen=True)
class Pose:
    timestamp: float
    rotation: np.ndarray
    position: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = Rotation.from_quat(self.rotation).as_matrix()
        T[:3, 3] = self.position
        return T


class Trajectory:
    """Ordered poses with strictly increasing timestamps."""

    def __init__(self, timestamps, positions, quaternions=None):
        ts = np.asarray(timestamps, dtype=np.float64).reshape(-1)
        pos = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
        if quaternions is None:
            quat = np.tile([0.0, 0.0, 0.0, 1.0], (len(ts), 1))
        else:
            quat = np.asarray(quaternions, dtype=np.float64).reshape(-1, 4)
        if not (len(ts) == len(pos) == len(quat)):
            raise ShapeError("timestamps, positions and quaternions differ in length")
        if not (np.all(np.isfinite(ts)) and np.all(np.isfinite(pos)) and np.all(np.isfinite(quat))):
            raise ParameterError("trajectory contains non-finite values")
        if len(ts) > 1 and np.any(np.diff(ts) <= 0):
            raise ParameterError("timestamps must be strictly increasing")
        norms = np.linalg.norm(quat, axis=1)
        if np.any(norms == 0):
            raise ParameterError("zero quaternion")
        self.timestamps = ts
        self.positions = pos
        self.quaternions = quat / norms[:, None]

    @classmethod
    def from_matrices(cls, timestamps, matrices) -> "Trajectory":
        mats = np.asarray(matrices, dtype=np.float64)
        quats = Rotation.from_matrix(mats[:, :3, :3]).as_quat()
        return cls(timestamps, mats[:, :3, 3], quats)

    def __len__(self) -> int:
        return len(self.timestamps)

    def __getitem__(self, i) -> Pose:
        return Pose(float(self.timestamps[i]), self.quaternions[i], self.positions[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def rotations(self) -> np.ndarray:
        return Rotation.from_quat(self.quaternions).as_matrix()

    @property
    def matrices(self) -> np.ndarray:
        T = np.tile(np.eye(4), (len(self), 1, 1))
        T[:, :3, :3] = self.rotations
        T[:, :3, 3] = self.positions
        return T

    def select(self, idx) -> "Trajectory":
        return Trajectory(self.timestamps[idx], self.positions[idx], self.quaternions[idx])

    def transformed(self, scale: float, rotation: np.ndarray, translation) -> "Trajectory":
        """Apply the similarity x -> s*R*x + t to positions and R to orientations."""
        pos = scale * self.positions @ rotation.T + np.asarray(translation)
        rots = rotation @ self.rotations
        return Trajectory(self.timestamps, pos, Rotation.from_matrix(rots).as_quat())


@dataclass(frozen=True)
class AlignmentResult:
    scale: float
    rotation: np.ndarray
    translation: np.ndarray

    def apply(self, points: np.ndarray) -> np.ndarray:
        return self.scale * np.asarray(points) @ self.rotation.T + self.translation

    def apply_trajectory(self, traj: Trajectory) -> Trajectory:
        return traj.transformed(self.scale, self.rotation, self.translation)


@dataclass(frozen=True)
class MetricsReport:
    ate_rmse: float
    rte_rmse: float
    length: float
    pose_count: int


def compose_trajectory(motions: Sequence[RelativeMotion], timestamps) -> Trajectory:
    """Chain relative motions into absolute poses starting from the identity.

    Each unit translation is applied at step length 1; the true scale is
    recovered later by similarity alignment.
    """
    if len(motions) == 0:
        raise ParameterError("need at least one relative motion")
    timestamps = np.asarray(timestamps, dtype=np.float64)
    if len(timestamps) != len(motions) + 1:
        raise ParameterError(f"expected {len(motions) + 1} timestamps, got {len(timestamps)}")
    T = np.eye(4)
    mats = [T.copy()]
    for m in motions:
        step = np.eye(4)
        step[:3, :3] = m.matrix
        step[:3, 3] = m.translation
        T = T @ step
        mats.append(T.copy())
    return Trajectory.from_matrices(timestamps, np.array(mats))


def associate(est: Trajectory, ref: Trajectory, max_dt: float = MAX_DT) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-timestamp matching; returns index arrays into ``est`` and ``ref``.

    Each reference pose is used at most once.
    """
    ref_t = ref.timestamps
    pos = np.searchsorted(ref_t, est.timestamps)
    lo = np.clip(pos - 1, 0, len(ref_t) - 1)
    hi = np.clip(pos, 0, len(ref_t) - 1)
    pick = np.where(np.abs(ref_t[lo] - est.timestamps) <= np.abs(ref_t[hi] - est.timestamps), lo, hi)
    dt = np.abs(ref_t[pick] - est.timestamps)
    ok = dt <= max_dt
    est_idx = np.flatnonzero(ok)
    ref_idx = pick[ok]
    # drop duplicate reference matches, keeping the closest
    order = np.lexsort((dt[ok], ref_idx))
    _, first = np.unique(ref_idx[order], return_index=True)
    keep = np.sort(order[first])
    dropped = len(est) - len(keep)
    if dropped:
        log.warning("association dropped %d of %d estimated poses", dropped, len(est))
    return est_idx[keep], ref_idx[keep]


def matched(est: Trajectory, ref: Trajectory, max_dt: float = MAX_DT) -> tuple[Trajectory, Trajectory]:
    if len(est) == len(ref) and np.array_equal(est.timestamps, ref.timestamps):
        return est, ref
    i, j = associate(est, ref, max_dt)
    return est.select(i), ref.select(j)


def umeyama(src: np.ndarray, dst: np.ndarray, with_scale: bool = True) -> AlignmentResult:
    """Least-squares similarity minimizing sum ||s*R*src + t - dst||^2."""
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 3:
        raise ShapeError("umeyama needs two (N, 3) point sets of equal size")
    n = len(src)
    if n < 3:
        raise ParameterError("alignment needs at least 3 points")
    mu_s = src.mean(axis=0)
    mu_d = dst.mean(axis=0)
    xs = src - mu_s
    xd = dst - mu_d
    sv = np.linalg.svd(xs, compute_uv=False)
    if sv[1] <= 1e-9 * max(sv[0], 1e-300):
        raise RankDeficiencyError("points are collinear; rotation about their line is undetermined")
    cov = xd.T @ xs / n
    u, d, vt = np.linalg.svd(cov)
    S = np.eye(3)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        S[2, 2] = -1.0
    R = u @ S @ vt
    if with_scale:
        var_s = (xs ** 2).sum() / n
        s = float(np.trace(np.diag(d) @ S) / var_s)
    else:
        s = 1.0
    t = mu_d - s * R @ mu_s
    return AlignmentResult(s, R, t)


def umeyama_align(estimate: Trajectory, reference: Trajectory, with_scale: bool = True,
                  max_dt: float = MAX_DT) -> AlignmentResult:
    est, ref = matched(estimate, reference, max_dt)
    return umeyama(est.positions, ref.positions, with_scale)


def _check_pair(est: Trajectory, ref: Trajectory):
    if len(est) < 2 or len(est) != len(ref):
        raise ParameterError(f"need >= 2 matched poses, got {len(est)}")


def ate(estimate: Trajectory, reference: Trajectory, align: bool = True, with_scale: bool = True,
        max_dt: float = MAX_DT) -> float:
    """RMSE of position residuals after optional similarity alignment."""
    est, ref = matched(estimate, reference, max_dt)
    _check_pair(est, ref)
    pos = est.positions
    if align:
        pos = umeyama(est.positions, ref.positions, with_scale).apply(pos)
    err = pos - ref.positions
    return float(np.sqrt(np.mean(np.sum(err ** 2, axis=1))))


def rte(estimate: Trajectory, reference: Trajectory, delta_frames: int = DEFAULT_DELTA_FRAMES,
        max_dt: float = MAX_DT) -> float:
    """RMSE over all windows [i, i+delta] of the endpoint error after rigidly
    aligning each estimated window to the reference at its first pose."""
    est, ref = matched(estimate, reference, max_dt)
    _check_pair(est, ref)
    n = len(est)
    if delta_frames < 1 or delta_frames >= n:
        raise ParameterError(f"delta_frames must lie in [1, {n - 1}], got {delta_frames}")
    Re = est.rotations
    Rr = ref.rotations
    de = est.positions[delta_frames:] - est.positions[:-delta_frames]
    dr = ref.positions[delta_frames:] - ref.positions[:-delta_frames]
    le = np.einsum("nji,nj->ni", Re[:-delta_frames], de)
    lr = np.einsum("nji,nj->ni", Rr[:-delta_frames], dr)
    return float(np.sqrt(np.mean(np.sum((le - lr) ** 2, axis=1))))


def trajectory_length(traj: Trajectory) -> float:
    if len(traj) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(traj.positions, axis=0), axis=1)))


def evaluate(estimate: Trajectory, reference: Trajectory, delta_frames: int = DEFAULT_DELTA_FRAMES,
             align: bool = True, max_dt: float = MAX_DT) -> MetricsReport:
    """Table-style metrics; RTE is measured on the similarity-aligned estimate."""
    est, ref = matched(estimate, reference, max_dt)
    _check_pair(est, ref)
    if align:
        est = umeyama(est.positions, ref.positions, True).apply_trajectory(est)
    delta = min(delta_frames, len(est) - 1)
    return MetricsReport(
        ate_rmse=ate(est, ref, align=False),
        rte_rmse=rte(est, ref, delta),
        length=trajectory_length(estimate),
        pose_count=len(estimate),
    )


def format_tum(traj: Trajectory) -> str:
    lines = []
    for ts, p, q in zip(traj.timestamps, traj.positions, traj.quaternions):
        vals = " ".join(f"{v:.9g}" for v in (*p, *q))
        lines.append(f"{ts:.9f} {vals}\n")
    return "".join(lines)


def save_tum(path: str | os.PathLike, traj: Trajectory, header: str | None = None) -> None:
    text = format_tum(traj)
    if header:
        text = "".join(f"# {line}\n" for line in header.splitlines()) + text
    Path(path).write_text(text)


def parse_tum(lines: Iterable[str], path=None) -> Trajectory:
    rows = []
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.replace(",", " ").split()
        if len(parts) != 8:
            raise ParseError(f"expected 8 fields, found {len(parts)}", path, lineno)
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise ParseError(f"non-numeric field ({exc})", path, lineno) from None
    if not rows:
        raise ParseError("no poses found", path)
    data = np.array(rows)
    try:
        return Trajectory(data[:, 0], data[:, 1:4], data[:, 4:8])
    except ParameterError as exc:
        raise ParseError(str(exc), path) from None


def load_tum(path: str | os.PathLike) -> Trajectory:
    path = Path(path)
    with open(path) as fh:
        return parse_tum(fh, path)
