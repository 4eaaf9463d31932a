"""Run configuration: a TOML file plus command-line overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ParameterError
from .flow import FlowParams
from .geometry import CameraIntrinsics, PoseBackendMode, RansacParams
from .imaging import NormalizationParams

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


@dataclass(frozen=True)
class RunConfig:
    intrinsics: CameraIntrinsics | None = None
    # None runs the unweighted baseline
    normalization: NormalizationParams | None = field(default_factory=NormalizationParams)
    flow: FlowParams = field(default_factory=FlowParams)
    ransac: RansacParams = field(default_factory=RansacParams)
    mode: PoseBackendMode = PoseBackendMode.CONFIDENCE_WEIGHTED
    stride: int = 8
    patch: int = 15
    frame_glob: str = "*.png"
    start: int = 0
    stop: int | None = None
    frame_rate: float = 20.0
    workers: int = 1

    def __post_init__(self):
        if self.stride < 1:
            raise ParameterError("stride must be >= 1")
        if self.patch < 3 or self.patch % 2 == 0:
            raise ParameterError("patch must be odd and >= 3")
        if self.frame_rate <= 0:
            raise ParameterError("frame_rate must be positive")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        if self.start < 0 or (self.stop is not None and self.stop <= self.start):
            raise ParameterError("invalid frame range")

    @property
    def seed(self) -> int:
        return self.ransac.seed

    def with_overrides(self, seed=None, alpha=None, beta_bias=None, mode=None, baseline=False,
                       workers=None) -> "RunConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, ransac=replace(cfg.ransac, seed=int(seed)))
        if alpha is not None or beta_bias is not None:
            base = cfg.normalization or NormalizationParams()
            cfg = replace(cfg, normalization=NormalizationParams(
                base.alpha if alpha is None else float(alpha),
                base.beta_bias if beta_bias is None else float(beta_bias)))
        if baseline:
            cfg = replace(cfg, normalization=None)
        if mode is not None:
            cfg = replace(cfg, mode=PoseBackendMode.parse(mode))
        if workers is not None:
            cfg = replace(cfg, workers=int(workers))
        return cfg


def _section(data: dict, name: str, allowed: set[str]) -> dict:
    sec = data.get(name, {})
    if not isinstance(sec, dict):
        raise ParameterError(f"[{name}] must be a table")
    unknown = set(sec) - allowed
    if unknown:
        raise ParameterError(f"unknown keys in [{name}]: {', '.join(sorted(unknown))}")
    return sec


def config_from_dict(data: dict) -> RunConfig:
    """Build a validated :class:`RunConfig`; every precondition is checked here."""
    unknown = set(data) - {"camera", "normalization", "flow", "ransac", "pose", "sequence", "run"}
    if unknown:
        raise ParameterError(f"unknown config sections: {', '.join(sorted(unknown))}")
    cam = _section(data, "camera", {"fx", "fy", "cx", "cy"})
    norm = _section(data, "normalization", {"alpha", "beta_bias", "enabled"})
    flow = _section(data, "flow", {"pyramid_levels", "iterations_per_level", "window"})
    ransac = _section(data, "ransac", {"iterations", "threshold", "seed"})
    pose = _section(data, "pose", {"mode", "stride", "patch"})
    seq = _section(data, "sequence", {"glob", "start", "stop", "frame_rate"})
    run = _section(data, "run", {"workers"})
    try:
        intrinsics = None
        if cam:
            missing = {"fx", "fy", "cx", "cy"} - set(cam)
            if missing:
                raise ParameterError(f"[camera] is missing {', '.join(sorted(missing))}")
            intrinsics = CameraIntrinsics(float(cam["fx"]), float(cam["fy"]), float(cam["cx"]), float(cam["cy"]))
        normalization = None
        if norm.get("enabled", True):
            normalization = NormalizationParams(float(norm.get("alpha", 0.25)), float(norm.get("beta_bias", 4.0)))
        return RunConfig(
            intrinsics=intrinsics,
            normalization=normalization,
            flow=FlowParams(**{k: int(v) for k, v in flow.items()}),
            ransac=RansacParams(int(ransac.get("iterations", 1000)), float(ransac.get("threshold", 1e-3)),
                                int(ransac.get("seed", 42))),
            mode=PoseBackendMode.parse(pose.get("mode", "confidence")),
            stride=int(pose.get("stride", 8)),
            patch=int(pose.get("patch", 15)),
            frame_glob=str(seq.get("glob", "*.png")),
            start=int(seq.get("start", 0)),
            stop=None if seq.get("stop") is None else int(seq["stop"]),
            frame_rate=float(seq.get("frame_rate", 20.0)),
            workers=int(run.get("workers", 1)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"invalid config value: {exc}") from None


def load_config(path: str | os.PathLike | None) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(Path(path), "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ParameterError(f"{path}: {exc}") from None
    return config_from_dict(data)
