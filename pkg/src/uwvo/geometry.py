"""Relative camera motion from dense flow through a weighted essential matrix.

Conventions: an essential matrix ``E = [t]x R`` maps normalized points of
frame a to epipolar lines in frame b, i.e. ``x_b^T E x_a = 0`` where
``X_b = R X_a + t``. :class:`RelativeMotion` instead stores the pose of
camera b expressed in camera a (rotation ``R^T``, direction of ``-R^T t``)
so that motions chain by right-multiplication onto absolute poses.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.spatial.transform import Rotation

from .errors import (
    CheiralityError,
    DegenerateGeometryError,
    DegenerateInputError,
    ParameterError,
    ShapeError,
)

MIN_CORRESPONDENCES = 8
# relative singular-value floor below which a design matrix is rank deficient
RANK_TOL = 1e-10
# relative weights are snapped to this grid so that a global rescale of the
# weights cannot perturb any downstream floating-point result
WEIGHT_QUANTUM = 2.0 ** -32
# preemptive RANSAC: hypotheses are ranked on this many correspondences first
PROBE_SIZE = 256
FULL_SCORE_COUNT = 20
SCREEN_NFEV = 10


class PoseBackendMode(enum.Enum):
    SCALED_FLOW = "scaled"
    CONFIDENCE_WEIGHTED = "confidence"

    @classmethod
    def parse(cls, value) -> "PoseBackendMode":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower().replace("-", "_")
        aliases = {
            "scaled": cls.SCALED_FLOW,
            "scaled_flow": cls.SCALED_FLOW,
            "scaledflow": cls.SCALED_FLOW,
            "confidence": cls.CONFIDENCE_WEIGHTED,
            "confidence_weighted": cls.CONFIDENCE_WEIGHTED,
            "confidenceweighted": cls.CONFIDENCE_WEIGHTED,
        }
        if text not in aliases:
            raise ParameterError(f"unknown backend mode {value!r}; expected 'scaled' or 'confidence'")
        return aliases[text]


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ParameterError("focal lengths must be positive")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def check_image(self, width: int, height: int) -> None:
        if not (0 <= self.cx < width and 0 <= self.cy < height):
            raise ParameterError(
                f"principal point ({self.cx}, {self.cy}) lies outside a {width}x{height} image"
            )

    def normalize(self, pts: np.ndarray) -> np.ndarray:
        """Pixel (N, 2) points to normalized image coordinates."""
        pts = np.asarray(pts, dtype=np.float64)
        return np.column_stack([(pts[:, 0] - self.cx) / self.fx, (pts[:, 1] - self.cy) / self.fy])

    def project(self, pts_cam: np.ndarray) -> np.ndarray:
        pts_cam = np.asarray(pts_cam, dtype=np.float64)
        z = pts_cam[:, 2]
        return np.column_stack([self.fx * pts_cam[:, 0] / z + self.cx, self.fy * pts_cam[:, 1] / z + self.cy])


@dataclass(frozen=True)
class RansacParams:
    """``threshold`` bounds the Sampson distance (not its square), in normalized
    image units; 1e-3 is a quarter pixel at a 250 px focal length."""

    iterations: int = 1000
    threshold: float = 1e-3
    seed: int = 42

    def __post_init__(self):
        if self.iterations < 1:
            raise ParameterError("RANSAC needs at least one iteration")
        if not self.threshold > 0:
            raise ParameterError("RANSAC threshold must be positive")


@dataclass(frozen=True)
class CorrespondenceSet:
    x1: np.ndarray
    x2: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x1 = np.asarray(self.x1, dtype=np.float64)
        x2 = np.asarray(self.x2, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if x1.ndim != 2 or x1.shape[1] != 2 or x1.shape != x2.shape or w.shape != (len(x1),):
            raise ShapeError("correspondences need (N, 2) points and (N,) weights")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ParameterError("correspondence weights must be finite and > 0")
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.x1)

    def subset(self, mask: np.ndarray) -> "CorrespondenceSet":
        return CorrespondenceSet(self.x1[mask], self.x2[mask], self.weights[mask])


@dataclass(frozen=True)
class RelativeMotion:
    """Pose of the second camera in the frame of the first.

    ``translation`` is a unit vector, or exactly zero for the identity
    fallback used when a frame pair cannot be solved.
    """

    rotation: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 0.0, 1.0]))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        q = np.asarray(self.rotation, dtype=np.float64)
        t = np.asarray(self.translation, dtype=np.float64)
        if q.shape != (4,) or t.shape != (3,):
            raise ShapeError("rotation must be a quaternion (x, y, z, w) and translation a 3-vector")
        q = q / np.linalg.norm(q)
        n = np.linalg.norm(t)
        if n > 0:
            t = t / n
        object.__setattr__(self, "rotation", q)
        object.__setattr__(self, "translation", t)

    @classmethod
    def from_matrix(cls, rot: np.ndarray, translation) -> "RelativeMotion":
        return cls(Rotation.from_matrix(rot).as_quat(), translation)

    @classmethod
    def from_essential_pose(cls, rot: np.ndarray, t: np.ndarray) -> "RelativeMotion":
        """Convert ``X_b = R X_a + t`` into the pose of camera b in camera a."""
        return cls.from_matrix(rot.T, -rot.T @ t)

    @classmethod
    def identity(cls) -> "RelativeMotion":
        return cls()

    @property
    def matrix(self) -> np.ndarray:
        return Rotation.from_quat(self.rotation).as_matrix()

    @property
    def is_identity(self) -> bool:
        return not np.any(self.translation) and np.allclose(self.rotation, [0, 0, 0, 1])

    def essential_pose(self) -> tuple[np.ndarray, np.ndarray]:
        """(R, t) with ``X_b = R X_a + t``."""
        r_ab = self.matrix
        return r_ab.T, -r_ab.T @ self.translation


def skew(v) -> np.ndarray:
    x, y, z = np.asarray(v, dtype=np.float64)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def flow_to_correspondences(flow: np.ndarray, weights: np.ndarray | None = None, stride: int = 8,
                            mode: PoseBackendMode = PoseBackendMode.CONFIDENCE_WEIGHTED,
                            border: int = 0) -> CorrespondenceSet:
    """Grid-sample a flow field into point correspondences.

    In scaled-flow mode the weight map multiplies the flow vectors and every
    correspondence gets weight 1; in confidence mode the flow is used as is
    and the weight map becomes the correspondence confidence.
    """
    mode = PoseBackendMode.parse(mode)
    if stride < 1:
        raise ParameterError("stride must be >= 1")
    flow = np.asarray(flow, dtype=np.float64)
    h, w = flow.shape[:2]
    if weights is None:
        weights = np.ones((h, w))
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (h, w):
        raise ShapeError("weight map does not match flow")
    rows = np.arange(border, h - border, stride)
    cols = np.arange(border, w - border, stride)
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    rr = rr.ravel()
    cc = cc.ravel()
    f = flow[rr, cc]
    wt = weights[rr, cc]
    if mode is PoseBackendMode.SCALED_FLOW:
        f = f * wt[:, None]
        wt = np.ones_like(wt)
    x1 = np.column_stack([cc, rr]).astype(np.float64)
    x2 = x1 + f
    keep = (x2[:, 0] >= 0) & (x2[:, 0] <= w - 1) & (x2[:, 1] >= 0) & (x2[:, 1] <= h - 1)
    keep &= np.all(np.isfinite(x2), axis=1)
    if keep.sum() < MIN_CORRESPONDENCES:
        raise DegenerateInputError(f"only {int(keep.sum())} correspondences remain inside the image")
    return CorrespondenceSet(x1[keep], x2[keep], wt[keep])


def _hartley(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Similarity transforms moving each batch of points to centroid 0, mean distance sqrt(2).

    ``pts`` is (B, N, 2); returns normalized points and (B, 3, 3) transforms.
    """
    centroid = pts.mean(axis=1, keepdims=True)
    d = pts - centroid
    mean_dist = np.sqrt((d ** 2).sum(axis=2)).mean(axis=1)
    scale = np.sqrt(2.0) / np.maximum(mean_dist, 1e-300)
    T = np.zeros((pts.shape[0], 3, 3))
    T[:, 0, 0] = scale
    T[:, 1, 1] = scale
    T[:, 0, 2] = -scale * centroid[:, 0, 0]
    T[:, 1, 2] = -scale * centroid[:, 0, 1]
    T[:, 2, 2] = 1.0
    return d * scale[:, None, None], T


def _design(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    x1, y1 = p1[..., 0], p1[..., 1]
    x2, y2 = p2[..., 0], p2[..., 1]
    one = np.ones_like(x1)
    return np.stack([x2 * x1, x2 * y1, x2, y2 * x1, y2 * y1, y2, x1, y1, one], axis=-1)


def _solve_eight_point(p1: np.ndarray, p2: np.ndarray, w: np.ndarray):
    """Batched weighted 8-point solve.

    Returns essential matrices (B, 3, 3) with singular values (1, 1, 0) and a
    (B,) flag marking rank-deficient systems.
    """
    n1, T1 = _hartley(p1)
    n2, T2 = _hartley(p2)
    A = _design(n1, n2) * w[..., None]
    # minimal 8-row systems need the full V to expose the null vector
    _, s, vt = np.linalg.svd(A, full_matrices=A.shape[1] < 9)
    F = vt[:, -1, :].reshape(-1, 3, 3)
    # a one-dimensional null space needs the 8th singular value well above zero
    degenerate = s[:, 7] <= RANK_TOL * s[:, 0]
    E = np.transpose(T2, (0, 2, 1)) @ F @ T1
    u, _, vt = np.linalg.svd(E)
    E = u @ np.diag([1.0, 1.0, 0.0]) @ vt
    return E, degenerate


def _homog(p: np.ndarray) -> np.ndarray:
    return np.concatenate([p, np.ones(p.shape[:-1] + (1,))], axis=-1)


def sampson_error(E: np.ndarray, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Squared Sampson distance of normalized correspondences.

    ``E`` may be a single (3, 3) matrix or a (B, 3, 3) stack; the result is
    (N,) or (B, N) accordingly.
    """
    h1 = _homog(p1)
    h2 = _homog(p2)
    Eb = E.reshape(-1, 3, 3)
    # each term as an (N, 3) @ (3, B) product
    ex0 = h1 @ Eb[:, 0, :].T
    ex1 = h1 @ Eb[:, 1, :].T
    ex2 = h1 @ Eb[:, 2, :].T
    etx0 = h2 @ Eb[:, :, 0].T
    etx1 = h2 @ Eb[:, :, 1].T
    num = (h2[:, 0:1] * ex0 + h2[:, 1:2] * ex1 + h2[:, 2:3] * ex2) ** 2
    den = ex0 ** 2 + ex1 ** 2 + etx0 ** 2 + etx1 ** 2
    err = (num / np.maximum(den, 1e-300)).T
    return err[0] if E.ndim == 2 else err


def relative_weights(w: np.ndarray) -> np.ndarray:
    """Weights divided by their maximum and snapped to a fixed binary grid."""
    rel = np.asarray(w, dtype=np.float64) / np.max(w)
    rel = np.round(rel / WEIGHT_QUANTUM) * WEIGHT_QUANTUM
    return np.maximum(rel, WEIGHT_QUANTUM)


@dataclass
class EssentialEstimate:
    E: np.ndarray
    inliers: np.ndarray

    @property
    def inlier_ratio(self) -> float:
        return float(self.inliers.mean()) if self.inliers.size else 0.0


def estimate_essential(cs: CorrespondenceSet, k: CameraIntrinsics,
                       ransac: RansacParams | None = None, batch: int = 250,
                       refits: int = 10, polish: bool = True, candidates: int = 5) -> EssentialEstimate:
    """Seeded RANSAC around a weighted, Hartley-normalized 8-point solver.

    Minimal samples are drawn with probability proportional to weight, and a
    hypothesis scores the summed weight of its inliers (Sampson distance
    below the threshold), first on a fixed random subset and then, for the
    best few, on all correspondences. The ``candidates`` best hypotheses are each refit
    on their inliers until the inlier set is stable and optionally polished
    by robust nonlinear least squares; the one with the lowest robust cost
    over all correspondences wins. Short baselines make single minimal
    samples unreliable, so one lucky hypothesis is not trusted on its own.
    """
    ransac = ransac or RansacParams()
    n = len(cs)
    if n < MIN_CORRESPONDENCES:
        raise DegenerateInputError(f"need >= {MIN_CORRESPONDENCES} correspondences, got {n}")
    p1 = k.normalize(cs.x1)
    p2 = k.normalize(cs.x2)
    w = relative_weights(cs.weights)
    prob = w / w.sum()
    thr_sq = ransac.threshold ** 2
    rng = np.random.default_rng(ransac.seed)

    # preemptive scoring: every hypothesis is scored on a fixed subset, and
    # only the most promising ones on all correspondences
    probe = np.arange(n) if n <= PROBE_SIZE else np.sort(rng.choice(n, PROBE_SIZE, replace=False))
    scored: list[tuple[float, int, np.ndarray]] = []
    done = 0
    while done < ransac.iterations:
        b = min(batch, ransac.iterations - done)
        # Gumbel top-k: a weighted sample without replacement per row
        keys = np.log(prob)[None, :] - np.log(-np.log(rng.random((b, n))))
        idx = np.argpartition(-keys, MIN_CORRESPONDENCES - 1, axis=1)[:, :MIN_CORRESPONDENCES]
        idx.sort(axis=1)
        E, degenerate = _solve_eight_point(p1[idx], p2[idx], w[idx])
        probe_scores = (sampson_error(E, p1[probe], p2[probe]) < thr_sq).astype(np.float64) @ w[probe]
        probe_scores[degenerate] = -1.0
        for j in np.flatnonzero(~degenerate):
            scored.append((float(probe_scores[j]), done + int(j), E[j]))
        done += b
    scored.sort(key=lambda item: (-item[0], item[1]))
    shortlist = scored[:FULL_SCORE_COUNT]
    pool: list[tuple[float, int, np.ndarray]] = []
    if shortlist:
        masks = sampson_error(np.stack([e for _, _, e in shortlist]), p1, p2) < thr_sq
        scores = masks.astype(np.float64) @ w
        for j in np.argsort(-scores, kind="stable"):
            if masks[j].sum() >= MIN_CORRESPONDENCES and len(pool) < candidates:
                pool.append((float(scores[j]), shortlist[j][1], masks[j]))
    if not pool:
        raise DegenerateGeometryError("no non-degenerate essential-matrix hypothesis found")

    best = None
    seen: list[np.ndarray] = []
    for _, _, mask in pool:
        E, final_mask = _refit(p1, p2, w, mask, thr_sq, refits)
        if E is None or any(np.array_equal(final_mask, m) for m in seen):
            continue
        seen.append(final_mask)
        if polish:
            # a short screening polish is enough to tell the basins apart
            E = _polish(E, p1, p2, w, ransac.threshold, max_nfev=SCREEN_NFEV)
        cost = _robust_cost(E, p1, p2, w, ransac.threshold)
        if best is None or cost < best[0]:
            best = (cost, E)
    if best is None:
        raise DegenerateGeometryError("inlier set does not constrain the essential matrix (zero baseline?)")
    if polish:
        best = (best[0], _polish(best[1], p1, p2, w, ransac.threshold))
    E = best[1]
    return EssentialEstimate(E, sampson_error(E, p1, p2) < thr_sq)


def _refit(p1, p2, w, mask, thr_sq, refits):
    """Refit on the inlier set while that does not lose inlier weight; returns (E, inlier mask)."""
    E = None
    score = -1.0
    for _ in range(refits):
        E_new, degenerate = _solve_eight_point(p1[mask][None], p2[mask][None], w[mask][None])
        if degenerate[0]:
            break
        new_mask = sampson_error(E_new[0], p1, p2) < thr_sq
        new_score = float(new_mask @ w)
        if new_score < score or new_mask.sum() < MIN_CORRESPONDENCES:
            break
        E, score = E_new[0], new_score
        if np.array_equal(new_mask, mask):
            break
        mask = new_mask
    return E, mask


def _robust_cost(E, p1, p2, w, scale) -> float:
    r = _signed_sampson(E, p1, p2) / scale
    return float(np.sum(w * np.log1p(r * r)))


def _signed_sampson(E: np.ndarray, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    return _signed_sampson_h(E[None], _homog(p1), _homog(p2))[0]


def _signed_sampson_h(E: np.ndarray, h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    """Signed Sampson distances for a (B, 3, 3) stack and homogeneous points; (B, N)."""
    Ex1 = h1 @ np.transpose(E, (0, 2, 1))
    Etx2 = h2 @ E
    num = np.sum(h2 * Ex1, axis=-1)
    den = Ex1[..., 0] ** 2 + Ex1[..., 1] ** 2 + Etx2[..., 0] ** 2 + Etx2[..., 1] ** 2
    return num / np.sqrt(np.maximum(den, 1e-300))


def _rodrigues(v: np.ndarray) -> np.ndarray:
    theta = np.linalg.norm(v)
    K = skew(v)
    if theta < 1e-12:
        return np.eye(3) + K
    return np.eye(3) + np.sin(theta) / theta * K + (1.0 - np.cos(theta)) / theta ** 2 * (K @ K)


_DIFF_STEP = 1e-7


def _polish(E: np.ndarray, p1: np.ndarray, p2: np.ndarray, w: np.ndarray, scale: float,
            max_nfev: int = 100) -> np.ndarray:
    """Cauchy-robust minimization of weighted Sampson distances over (R, t).

    Starts from the cheirality-consistent decomposition of ``E``; rotation is
    updated multiplicatively and the unit translation moves in its tangent plane.
    """
    R0, t0 = _select_candidate(E, p1, p2)
    if R0 is None:
        return E
    # tangent basis of the unit sphere at t0
    b1 = np.cross(t0, [1.0, 0.0, 0.0])
    if np.linalg.norm(b1) < 0.1:
        b1 = np.cross(t0, [0.0, 1.0, 0.0])
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(t0, b1)
    sw = np.sqrt(w)
    h1 = _homog(p1)
    h2 = _homog(p2)

    def essential(x):
        t = t0 + x[3] * b1 + x[4] * b2
        return skew(t / np.linalg.norm(t)) @ _rodrigues(x[:3]) @ R0

    def residuals(x):
        return sw * _signed_sampson_h(essential(x)[None], h1, h2)[0]

    def jacobian(x):
        # forward differences, all five columns in one batched evaluation
        xs = np.tile(x, (6, 1))
        xs[1:] += _DIFF_STEP * np.eye(5)
        r = sw * _signed_sampson_h(np.stack([essential(v) for v in xs]), h1, h2)
        return ((r[1:] - r[0]) / _DIFF_STEP).T

    sol = least_squares(residuals, np.zeros(5), jac=jacobian, loss="cauchy", f_scale=scale, method="trf",
                        x_scale=1e-3, max_nfev=max_nfev)
    if not np.all(np.isfinite(sol.x)):
        return E
    E = essential(sol.x)
    u, _, vt = np.linalg.svd(E)
    return u @ np.diag([1.0, 1.0, 0.0]) @ vt


def _motion_candidates(E: np.ndarray):
    u, _, vt = np.linalg.svd(E)
    if np.linalg.det(u) < 0:
        u = -u
    if np.linalg.det(vt) < 0:
        vt = -vt
    W = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    t = u[:, 2]
    for R in (u @ W @ vt, u @ W.T @ vt):
        for sign in (1.0, -1.0):
            yield R, sign * t


def triangulate_midpoint(R: np.ndarray, t: np.ndarray, p1: np.ndarray, p2: np.ndarray):
    """Midpoint triangulation; returns depths of each point in both cameras."""
    d1 = _homog(p1)
    # ray of camera b expressed in frame a: origin c = -R^T t, direction R^T d2
    d2 = _homog(p2) @ R
    c = -R.T @ t
    a11 = np.einsum("ij,ij->i", d1, d1)
    a12 = np.einsum("ij,ij->i", d1, d2)
    a22 = np.einsum("ij,ij->i", d2, d2)
    b1 = d1 @ c
    b2 = d2 @ c
    det = a11 * a22 - a12 * a12
    det = np.where(np.abs(det) < 1e-15, np.nan, det)
    lam1 = (b1 * a22 - a12 * b2) / det
    lam2 = (a12 * b1 - a11 * b2) / det
    X = 0.5 * (lam1[:, None] * d1 + (c + lam2[:, None] * d2))
    z1 = X[:, 2]
    z2 = (X @ R.T + t)[:, 2]
    return z1, z2


def _select_candidate(E: np.ndarray, p1: np.ndarray, p2: np.ndarray):
    """Candidate (R, t) with most points in front of both cameras, and that count."""
    best = (None, None)
    best_count = -1
    for R, t in _motion_candidates(E):
        z1, z2 = triangulate_midpoint(R, t, p1, p2)
        count = int(np.sum((z1 > 0) & (z2 > 0)))
        if count > best_count:
            best, best_count = (R, t), count
    if best_count <= 0.5 * len(p1):
        return None, best_count
    return best


def decompose_essential(E: np.ndarray, cs: CorrespondenceSet, k: CameraIntrinsics,
                        mask: np.ndarray | None = None) -> RelativeMotion:
    """Pick the (R, t) candidate with the most points in front of both cameras."""
    E = np.asarray(E, dtype=np.float64)
    s = np.linalg.svd(E, compute_uv=False)
    s = s / s[0]
    if abs(s[1] - 1.0) > 1e-6 or abs(s[2]) > 1e-6:
        raise ParameterError(f"essential matrix singular values {s} are not (1, 1, 0)")
    sub = cs if mask is None else cs.subset(mask)
    p1 = k.normalize(sub.x1)
    p2 = k.normalize(sub.x2)
    R, t = _select_candidate(E, p1, p2)
    if R is None:
        raise CheiralityError(f"best candidate has {t}/{len(sub)} points in front of both cameras")
    return RelativeMotion.from_essential_pose(R, t / np.linalg.norm(t))


def rotation_error_deg(r_est: np.ndarray, r_ref: np.ndarray) -> float:
    """Geodesic angle between two rotation matrices in degrees."""
    c = (np.trace(r_est.T @ r_ref) - 1.0) / 2.0
    return float(np.degrees(np.arccos(np.clip(c, -1.0, 1.0))))


def direction_error_deg(a: np.ndarray, b: np.ndarray) -> float:
    c = np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.degrees(np.arccos(np.clip(c, -1.0, 1.0))))


@dataclass
class PairResult:
    motion: RelativeMotion
    inlier_ratio: float
    correspondences: int
    sigma: float
    weight_min: float
    weight_max: float


def estimate_pair(frame_a, frame_b, k: CameraIntrinsics, normalization=None, flow_params=None,
                  mode: PoseBackendMode = PoseBackendMode.CONFIDENCE_WEIGHTED,
                  ransac: RansacParams | None = None, stride: int = 8, patch: int = 15,
                  flow: np.ndarray | None = None) -> PairResult:
    """Transmission -> weights -> flow -> correspondences -> essential -> motion.

    ``normalization=None`` runs the unweighted baseline (all weights 1).
    A precomputed ``flow`` for the pair may be supplied to skip estimation.
    """
    from .flow import FlowParams, estimate_flow
    from .imaging import estimate_ambient, estimate_transmission, invert, normalization_offset, \
        normalize_transmission

    flow_params = flow_params or FlowParams()
    mode = PoseBackendMode.parse(mode)
    frame_a = np.asarray(frame_a, dtype=np.float64)
    h, w = frame_a.shape[:2]
    k.check_image(w, h)
    if normalization is None:
        weights = np.ones((h, w))
        sigma = 0.0
    else:
        t = estimate_transmission(frame_a, estimate_ambient(frame_a, patch), patch)
        t_inv = invert(t)
        sigma = normalization_offset(t_inv, normalization)
        weights = normalize_transmission(t_inv, normalization)
    if flow is None:
        flow = estimate_flow(frame_a, frame_b, flow_params)
    cs = flow_to_correspondences(flow, weights, stride, mode, border=flow_params.border)
    est = estimate_essential(cs, k, ransac)
    motion = decompose_essential(est.E, cs, k, est.inliers)
    return PairResult(motion, est.inlier_ratio, len(cs), sigma, float(weights.min()), float(weights.max()))


def recover_motion(frame_a, frame_b, k: CameraIntrinsics, normalization=None, flow_params=None,
                   mode: PoseBackendMode = PoseBackendMode.CONFIDENCE_WEIGHTED,
                   ransac: RansacParams | None = None, stride: int = 8) -> RelativeMotion:
    return estimate_pair(frame_a, frame_b, k, normalization, flow_params, mode, ransac, stride).motion
