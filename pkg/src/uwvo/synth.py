"""Synthetic underwater sequences with exact ground truth.

The world is z-up. A scene is a textured seabed (the plane z = 0, or any
list of planes) plus partly buried spheres acting as boulders, so that the
structure is not a single plane. Surfaces carry a seeded solid value-noise
texture, which keeps appearance consistent across viewpoints. Cameras use
the usual optical frame (x right, y down, z forward) and poses are
camera-to-world.
"""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import tomli_w

from . import io as uio
from .errors import ParameterError
from .geometry import CameraIntrinsics
from .imaging import HazeParams, apply_degradation
from .trajectory import Trajectory, load_tum, save_tum

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger(__name__)

MAX_STEP_ROTATION_DEG = 5.0
MAX_STEP_TRANSLATION_FRACTION = 0.2


@dataclass(frozen=True)
class Plane:
    point: tuple[float, float, float]
    normal: tuple[float, float, float]


@dataclass(frozen=True)
class Sphere:
    center: tuple[float, float, float]
    radius: float


@dataclass(frozen=True)
class Scene:
    planes: tuple[Plane, ...] = (Plane((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)),)
    spheres: tuple[Sphere, ...] = ()
    texture_seed: int = 0
    # albedo range of the texture; a narrow range gives low contrast
    albedo_lo: float = 0.05
    albedo_hi: float = 0.95
    cell_size: float = 0.25
    octaves: int = 4

    def __post_init__(self):
        if not 0.0 <= self.albedo_lo < self.albedo_hi <= 1.0:
            raise ParameterError("need 0 <= albedo_lo < albedo_hi <= 1")
        for s in self.spheres:
            if s.radius <= 0:
                raise ParameterError("sphere radius must be positive")


def seabed_scene(seed: int, extent: tuple[float, float, float, float], density: float = 0.15,
                 radius: tuple[float, float] = (0.25, 0.8), **texture) -> Scene:
    """Seabed plane strewn with partly buried boulders inside ``extent`` (xmin, xmax, ymin, ymax)."""
    rng = np.random.default_rng(seed)
    xmin, xmax, ymin, ymax = extent
    count = rng.poisson(density * (xmax - xmin) * (ymax - ymin))
    r = rng.uniform(radius[0], radius[1], count)
    cx = rng.uniform(xmin, xmax, count)
    cy = rng.uniform(ymin, ymax, count)
    cz = r * rng.uniform(-0.6, 0.2, count)
    spheres = tuple(Sphere((float(a), float(b), float(c)), float(d)) for a, b, c, d in zip(cx, cy, cz, r))
    return Scene(spheres=spheres, texture_seed=seed, **texture)


# --- solid value noise -------------------------------------------------------------

_PRIMES = np.array([73856093, 19349663, 83492791], dtype=np.uint64)


def _lattice(seed: int, ix, iy, iz) -> np.ndarray:
    h = (ix.astype(np.uint64) * _PRIMES[0]) ^ (iy.astype(np.uint64) * _PRIMES[1]) \
        ^ (iz.astype(np.uint64) * _PRIMES[2]) ^ np.uint64((seed * 0x9E3779B1) & 0xFFFFFFFF)
    # xorshift-multiply finalizer
    h ^= h >> np.uint64(33)
    h *= np.uint64(0xFF51AFD7ED558CCD)
    h ^= h >> np.uint64(33)
    h *= np.uint64(0xC4CEB9FE1A85EC53)
    h ^= h >> np.uint64(33)
    return (h >> np.uint64(11)).astype(np.float64) / float(1 << 53)


def value_noise(points: np.ndarray, seed: int) -> np.ndarray:
    """Trilinear value noise with smoothstep easing, one lattice cell per unit."""
    fl = np.floor(points)
    f = points - fl
    i = fl.astype(np.int64)
    f = f * f * (3.0 - 2.0 * f)
    out = np.zeros(len(points))
    for dx in (0, 1):
        wx = f[:, 0] if dx else 1.0 - f[:, 0]
        for dy in (0, 1):
            wy = f[:, 1] if dy else 1.0 - f[:, 1]
            for dz in (0, 1):
                wz = f[:, 2] if dz else 1.0 - f[:, 2]
                out += wx * wy * wz * _lattice(seed, i[:, 0] + dx, i[:, 1] + dy, i[:, 2] + dz)
    return out


def texture_albedo(scene: Scene, points: np.ndarray, footprint: np.ndarray) -> np.ndarray:
    """RGB albedo at world points; octaves finer than the pixel footprint fade out."""
    lum = np.zeros(len(points))
    total = np.zeros(len(points))
    cell = scene.cell_size
    amp = 1.0
    for o in range(scene.octaves):
        # full weight once a cell spans >= 4 footprints, none below 2
        fade = np.clip(cell / (2.0 * footprint) - 1.0, 0.0, 1.0)
        if o == 0:
            fade = np.ones_like(fade)
        lum += amp * fade * (value_noise(points / cell, scene.texture_seed + 7919 * o) - 0.5)
        total += amp * fade
        cell *= 0.5
        amp *= 0.6
    lum = np.clip(0.5 + 1.8 * lum / total, 0.0, 1.0)
    hue = value_noise(points / (scene.cell_size * 3.0), scene.texture_seed + 104729)
    sand = np.array([0.95, 0.85, 0.65])
    weed = np.array([0.35, 0.75, 0.45])
    tint = sand + (weed - sand) * hue[:, None]
    albedo = scene.albedo_lo + (scene.albedo_hi - scene.albedo_lo) * lum
    return albedo[:, None] * tint


# --- camera paths ----------------------------------------------------------------------


def camera_rotation(heading: float, pitch: float, roll: float = 0.0) -> np.ndarray:
    """Camera-to-world rotation for a camera looking along ``heading`` (rad,
    from +x towards +y), tilted down by ``pitch`` and rolled by ``roll``."""
    f = np.array([np.cos(heading), np.sin(heading), 0.0])
    forward = np.cos(pitch) * f + np.array([0.0, 0.0, -np.sin(pitch)])
    right = np.array([np.sin(heading), -np.cos(heading), 0.0])
    down = np.cross(forward, right)
    R = np.column_stack([right, down, forward])
    if roll:
        c, s = np.cos(roll), np.sin(roll)
        R = R @ np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return R


@dataclass(frozen=True)
class CameraPath:
    kind: str = "lawnmower"
    frames: int = 120
    step: float = 0.05
    altitude: float = 1.8
    pitch_deg: float = 40.0
    leg: float = 2.0
    radius: float = 0.6
    # gentle sinusoidal wobble so the motion is not confined to a plane
    wobble_altitude: float = 0.1
    wobble_pitch_deg: float = 2.0
    wobble_roll_deg: float = 1.5
    wobble_period: int = 60
    fps: float = 20.0

    def __post_init__(self):
        if self.kind not in ("lawnmower", "arc", "line", "static"):
            raise ParameterError(f"unknown path kind {self.kind!r}")
        if self.frames < 2:
            raise ParameterError("a path needs at least 2 frames")
        if self.altitude <= 0:
            raise ParameterError("camera altitude must be positive")

    def _planar(self, s: np.ndarray):
        if self.kind == "static":
            return np.zeros_like(s), np.zeros_like(s), np.zeros_like(s)
        if self.kind == "line":
            return s, np.zeros_like(s), np.zeros_like(s)
        if self.kind == "arc":
            phi = s / self.radius
            return self.radius * np.sin(phi), self.radius * (1 - np.cos(phi)), phi
        L, r = self.leg, self.radius
        turn_end = L + np.pi * r
        phi = np.clip((s - L) / r, 0.0, np.pi)
        x = np.where(s <= L, s, np.where(s <= turn_end, L + r * np.sin(phi), L - (s - turn_end)))
        y = np.where(s <= L, 0.0, np.where(s <= turn_end, r * (1 - np.cos(phi)), 2 * r))
        return x, y, phi

    def poses(self) -> tuple[np.ndarray, np.ndarray]:
        """Timestamps (N,) and camera-to-world matrices (N, 4, 4)."""
        n = np.arange(self.frames)
        step = 0.0 if self.kind == "static" else self.step
        x, y, heading = self._planar(n * step)
        if self.kind == "static":
            wob = np.zeros(self.frames)
        else:
            wob = np.sin(2 * np.pi * n / self.wobble_period)
        z = self.altitude + self.wobble_altitude * wob
        pitch = np.radians(self.pitch_deg + self.wobble_pitch_deg * wob)
        roll = np.radians(self.wobble_roll_deg) * np.cos(2 * np.pi * n / self.wobble_period) \
            if self.kind != "static" else np.zeros(self.frames)
        T = np.tile(np.eye(4), (self.frames, 1, 1))
        for i in range(self.frames):
            T[i, :3, :3] = camera_rotation(heading[i], pitch[i], roll[i])
            T[i, :3, 3] = (x[i], y[i], z[i])
        return n / self.fps, T


def check_path_smoothness(mats: np.ndarray, mean_depth: float) -> None:
    for a, b in zip(mats[:-1], mats[1:]):
        rel = np.linalg.inv(a) @ b
        angle = np.degrees(np.arccos(np.clip((np.trace(rel[:3, :3]) - 1) / 2, -1, 1)))
        if angle >= MAX_STEP_ROTATION_DEG:
            raise ParameterError(f"per-frame rotation {angle:.2f} deg exceeds {MAX_STEP_ROTATION_DEG}")
        if np.linalg.norm(rel[:3, 3]) >= MAX_STEP_TRANSLATION_FRACTION * mean_depth:
            raise ParameterError("per-frame translation exceeds 0.2 of the mean scene depth")


# --- rendering ---------------------------------------------------------------------------


def _pixel_rays(k: CameraIntrinsics, width: int, height: int, supersample: int) -> np.ndarray:
    """Camera-frame rays with unit z, one per (sub)pixel sample, shape (H, W, S*S, 3)."""
    offs = (np.arange(supersample) + 0.5) / supersample - 0.5
    ou, ov = np.meshgrid(offs, offs, indexing="xy")
    u = np.arange(width)[None, :, None] + ou.ravel()[None, None, :]
    v = np.arange(height)[:, None, None] + ov.ravel()[None, None, :]
    u, v = np.broadcast_arrays(u, v)
    return np.stack([(u - k.cx) / k.fx, (v - k.cy) / k.fy, np.ones_like(u, dtype=np.float64)], axis=-1)


def _intersect(scene: Scene, origin: np.ndarray, dirs: np.ndarray):
    """Nearest hit along ``origin + lam*dirs``: returns lam (inf on miss) and normals."""
    lam = np.full(len(dirs), np.inf)
    normal = np.zeros_like(dirs)
    for pl in scene.planes:
        n = np.asarray(pl.normal, dtype=np.float64)
        n = n / np.linalg.norm(n)
        denom = dirs @ n
        num = (np.asarray(pl.point) - origin) @ n
        with np.errstate(divide="ignore", invalid="ignore"):
            l = num / denom
        hit = (np.abs(denom) > 1e-12) & (l > 1e-9) & (l < lam)
        lam = np.where(hit, l, lam)
        normal[hit] = n
    if scene.spheres:
        centers = np.array([s.center for s in scene.spheres])
        radii = np.array([s.radius for s in scene.spheres])
        oc = origin - centers
        far = np.linalg.norm(oc, axis=1) - radii
        # cull spheres beyond the current farthest hit or behind the camera
        mean_dir = dirs.mean(axis=0)
        mean_dir /= np.linalg.norm(mean_dir)
        ahead = (-oc @ mean_dir) > -radii
        finite = lam[np.isfinite(lam)]
        horizon = finite.max() * np.linalg.norm(dirs, axis=1).max() if finite.size else np.inf
        dd = np.einsum("ij,ij->i", dirs, dirs)
        for j in np.flatnonzero(ahead & (far < horizon)):
            b = dirs @ oc[j]
            c = oc[j] @ oc[j] - radii[j] ** 2
            disc = b * b - dd * c
            ok = disc > 0
            if not ok.any():
                continue
            l = np.full(len(dirs), np.inf)
            l[ok] = (-b[ok] - np.sqrt(disc[ok])) / dd[ok]
            hit = (l > 1e-9) & (l < lam)
            if hit.any():
                lam = np.where(hit, l, lam)
                p = origin + l[hit, None] * dirs[hit]
                normal[hit] = (p - centers[j]) / radii[j]
    return lam, normal


def render_frame(scene: Scene, pose: np.ndarray, k: CameraIntrinsics, width: int, height: int,
                 supersample: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Render one clean RGB frame and its per-pixel z-depth."""
    R = pose[:3, :3]
    origin = pose[:3, 3]
    for pl in scene.planes:
        n = np.asarray(pl.normal, dtype=np.float64)
        if abs((origin - np.asarray(pl.point)) @ n) < 1e-6:
            raise ParameterError("camera lies on a scene plane")
    for s in scene.spheres:
        if np.linalg.norm(origin - np.asarray(s.center)) <= s.radius:
            raise ParameterError("camera lies inside a boulder")

    rays = _pixel_rays(k, width, height, supersample).reshape(-1, 3)
    dirs = rays @ R.T
    lam, normal = _intersect(scene, origin, dirs)
    if not np.all(np.isfinite(lam)):
        raise ParameterError("some pixels see no surface; lower the horizon or add geometry")
    points = origin + lam[:, None] * dirs
    norm_d = np.linalg.norm(dirs, axis=1)
    cos_inc = np.abs(np.einsum("ij,ij->i", normal, dirs)) / norm_d
    # world size of one pixel on the surface, stretched at grazing incidence
    footprint = lam * norm_d / (0.5 * (k.fx + k.fy)) / np.maximum(cos_inc, 0.1)
    rgb = texture_albedo(scene, points, footprint)
    rgb = rgb.reshape(height, width, supersample * supersample, 3).mean(axis=2)

    centre = _pixel_rays(k, width, height, 1).reshape(-1, 3) @ R.T
    depth, _ = _intersect(scene, origin, centre)
    return np.clip(rgb, 0.0, 1.0), depth.reshape(height, width)


def render_sequence(scene: Scene, path: CameraPath, k: CameraIntrinsics, width: int, height: int,
                    supersample: int = 2):
    """Render clean frames, z-depth maps and the ground-truth trajectory."""
    k.check_image(width, height)
    ts, mats = path.poses()
    frames = np.empty((len(ts), height, width, 3))
    depths = np.empty((len(ts), height, width))
    for i, T in enumerate(mats):
        frames[i], depths[i] = render_frame(scene, T, k, width, height, supersample)
    return frames, depths, Trajectory.from_matrices(ts, mats)


def ground_truth_flow(pose_a: np.ndarray, pose_b: np.ndarray, depth_a: np.ndarray, k: CameraIntrinsics):
    """Reprojection flow of every pixel of frame a into frame b.

    Returns ``(flow, valid)``; pixels whose point falls behind camera b are
    marked invalid and carry zero flow.
    """
    h, w = depth_a.shape
    v, u = np.mgrid[0:h, 0:w].astype(np.float64)
    Xa = np.stack([(u - k.cx) / k.fx * depth_a, (v - k.cy) / k.fy * depth_a, depth_a], axis=-1)
    rel = np.linalg.inv(pose_b) @ pose_a
    Xb = Xa @ rel[:3, :3].T + rel[:3, 3]
    valid = Xb[..., 2] > 1e-9
    z = np.where(valid, Xb[..., 2], 1.0)
    flow = np.stack([k.fx * Xb[..., 0] / z + k.cx - u, k.fy * Xb[..., 1] / z + k.cy - v], axis=-1)
    flow[~valid] = 0.0
    return flow, valid


def degrade_sequence(frames: np.ndarray, depths: np.ndarray, haze: HazeParams, noise_std: float = 0.0,
                     seed: int = 0):
    """Apply the per-channel haze model; returns degraded frames and channel-mean transmission."""
    if np.any(np.asarray(depths) <= 0):
        raise ParameterError("depth must be positive")
    rng = np.random.default_rng(seed)
    out = np.empty_like(frames)
    trans = np.empty(depths.shape)
    for i, (frame, depth) in enumerate(zip(frames, depths)):
        t_c = haze.transmission(depth)
        img = apply_degradation(frame, t_c, haze.ambient)
        if noise_std > 0:
            img = np.clip(img + rng.normal(0.0, noise_std, img.shape), 0.0, 1.0)
        out[i] = img
        trans[i] = t_c.mean(axis=2)
    return out, trans


# --- datasets -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SynthConfig:
    name: str = "custom"
    seed: int = 1
    width: int = 320
    height: int = 240
    fx: float = 250.0
    fy: float = 250.0
    cx: float = 159.5
    cy: float = 119.5
    path: CameraPath = field(default_factory=CameraPath)
    attenuation: tuple[float, float, float] = (0.07, 0.05, 0.04)
    ambient: tuple[float, float, float] = (0.10, 0.42, 0.50)
    albedo_lo: float = 0.05
    albedo_hi: float = 0.95
    boulder_density: float = 0.5
    noise_std: float = 0.0
    supersample: int = 1

    @property
    def intrinsics(self) -> CameraIntrinsics:
        return CameraIntrinsics(self.fx, self.fy, self.cx, self.cy)

    @property
    def haze(self) -> HazeParams:
        return HazeParams(self.attenuation, self.ambient)

    def scene(self) -> Scene:
        _, mats = self.path.poses()
        pos = mats[:, :3, 3]
        margin = 12.0
        extent = (pos[:, 0].min() - margin, pos[:, 0].max() + margin,
                  pos[:, 1].min() - margin, pos[:, 1].max() + margin)
        return seabed_scene(self.seed, extent, self.boulder_density,
                            albedo_lo=self.albedo_lo, albedo_hi=self.albedo_hi)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["attenuation"] = list(self.attenuation)
        d["ambient"] = list(self.ambient)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        d = dict(d)
        path = CameraPath(**d.pop("path", {}))
        for key in ("attenuation", "ambient"):
            if key in d:
                d[key] = tuple(float(v) for v in d[key])
        return cls(path=path, **d)


def _spectral(beta: float) -> tuple[float, float, float]:
    # red attenuates fastest; the nominal coefficient is the green channel's
    return (1.4 * beta, beta, 0.8 * beta)


PRESETS: dict[str, SynthConfig] = {
    "clear-01": SynthConfig(
        name="clear-01", seed=11,
        path=CameraPath(kind="arc", radius=2.5, step=0.1),
        attenuation=_spectral(0.05),
    ),
    "haze-heavy-01": SynthConfig(
        name="haze-heavy-01", seed=21,
        path=CameraPath(kind="lawnmower", leg=1.2, radius=0.6, step=0.03, altitude=1.0),
        attenuation=_spectral(0.8),
        albedo_lo=0.3, albedo_hi=0.65,
    ),
    "clear-02": SynthConfig(
        name="clear-02", seed=12,
        path=CameraPath(kind="lawnmower", leg=4.0, radius=1.5, step=0.1),
        attenuation=_spectral(0.05),
    ),
    "haze-heavy-02": SynthConfig(
        name="haze-heavy-02", seed=22,
        path=CameraPath(kind="arc", radius=1.5, step=0.03, altitude=1.0),
        attenuation=_spectral(0.8),
        albedo_lo=0.3, albedo_hi=0.65,
    ),
}


def preset(name: str) -> SynthConfig:
    if name not in PRESETS:
        raise ParameterError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return PRESETS[name]


@dataclass
class SyntheticDataset:
    config: SynthConfig
    frames: np.ndarray
    clean_frames: np.ndarray
    gt_trajectory: Trajectory
    gt_flow: np.ndarray
    gt_flow_valid: np.ndarray
    gt_depth: np.ndarray
    gt_transmission: np.ndarray

    @property
    def haze(self) -> HazeParams:
        return self.config.haze

    @property
    def intrinsics(self) -> CameraIntrinsics:
        return self.config.intrinsics


def generate(config: SynthConfig) -> SyntheticDataset:
    k = config.intrinsics
    scene = config.scene()
    clean, depths, traj = render_sequence(scene, config.path, k, config.width, config.height,
                                          config.supersample)
    check_path_smoothness(traj.matrices, float(depths.mean()))
    frames, trans = degrade_sequence(clean, depths, config.haze, config.noise_std, config.seed)
    mats = traj.matrices
    flows = np.empty((len(frames) - 1, config.height, config.width, 2))
    valid = np.empty((len(frames) - 1, config.height, config.width), dtype=bool)
    for i in range(len(frames) - 1):
        flows[i], valid[i] = ground_truth_flow(mats[i], mats[i + 1], depths[i], k)
    return SyntheticDataset(config, frames, clean, traj, flows, valid, depths, trans)


def emit_dataset(ds: SyntheticDataset, out_dir: str | os.PathLike) -> Path:
    """Write the dataset directory: frames, clean frames, depth, flow, transmission, TUM, manifest."""
    out = Path(out_dir)
    try:
        for sub in ("frames", "clean", "flow", "transmission", "depth"):
            (out / sub).mkdir(parents=True, exist_ok=True)
        for i, (f, c, d, t) in enumerate(zip(ds.frames, ds.clean_frames, ds.gt_depth, ds.gt_transmission)):
            uio.write_image(out / "frames" / f"{i:06d}.png", f)
            uio.write_image(out / "clean" / f"{i:06d}.png", c)
            uio.write_pfm(out / "depth" / f"{i:06d}.pfm", d)
            uio.write_pfm(out / "transmission" / f"{i:06d}.pfm", t)
        for i, fl in enumerate(ds.gt_flow):
            uio.write_flo(out / "flow" / f"{i:06d}.flo", fl)
        np.savetxt(out / "timestamps.txt", ds.gt_trajectory.timestamps, fmt="%.9f")
        save_tum(out / "groundtruth.tum", ds.gt_trajectory,
                 header="timestamp tx ty tz qx qy qz qw (camera-to-world)")
        manifest = {
            "dataset": {"name": ds.config.name, "seed": ds.config.seed,
                        "frames": len(ds.frames), "width": ds.config.width, "height": ds.config.height},
            "intrinsics": {"fx": ds.config.fx, "fy": ds.config.fy, "cx": ds.config.cx, "cy": ds.config.cy},
            "haze": {"attenuation": list(ds.config.attenuation), "ambient": list(ds.config.ambient)},
            "config": ds.config.to_dict(),
        }
        (out / "manifest.toml").write_text(tomli_w.dumps(manifest))
    except OSError as exc:
        raise OSError(f"failed writing dataset to {out}: {exc}") from exc
    return out


def read_manifest(ds_dir: str | os.PathLike) -> dict:
    with open(Path(ds_dir) / "manifest.toml", "rb") as fh:
        return tomllib.load(fh)


def load_dataset(ds_dir: str | os.PathLike) -> SyntheticDataset:
    """Read an emitted dataset back; PNG frames come back 8-bit quantized."""
    ds_dir = Path(ds_dir)
    config = SynthConfig.from_dict(read_manifest(ds_dir)["config"])
    frame_paths = sorted((ds_dir / "frames").glob("*.png"))
    frames = np.stack([uio.read_image(p) for p in frame_paths])
    clean = np.stack([uio.read_image(p) for p in sorted((ds_dir / "clean").glob("*.png"))])
    depth = np.stack([uio.read_pfm(p) for p in sorted((ds_dir / "depth").glob("*.pfm"))])
    trans = np.stack([uio.read_pfm(p) for p in sorted((ds_dir / "transmission").glob("*.pfm"))])
    flows = np.stack([uio.read_flo(p) for p in sorted((ds_dir / "flow").glob("*.flo"))])
    valid = np.ones(flows.shape[:3], dtype=bool)
    traj = load_tum(ds_dir / "groundtruth.tum")
    return SyntheticDataset(config, frames, clean, traj, flows, valid, depth, trans)


def file_digest(ds_dir: str | os.PathLike, patterns=("flow/*.flo", "transmission/*.pfm")) -> str:
    h = hashlib.sha256()
    for pattern in patterns:
        for p in sorted(Path(ds_dir).glob(pattern)):
            h.update(p.name.encode())
            h.update(p.read_bytes())
    return h.hexdigest()


def with_overrides(config: SynthConfig, **kwargs) -> SynthConfig:
    path_keys = {k: kwargs.pop(k) for k in list(kwargs) if k in CameraPath.__dataclass_fields__}
    if path_keys:
        kwargs["path"] = replace(config.path, **path_keys)
    return replace(config, **kwargs)
