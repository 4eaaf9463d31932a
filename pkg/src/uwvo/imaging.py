"""Underwater image formation, dark-channel estimators and transmission weighting.

Images are float64 arrays of shape (H, W, 3) with values in [0, 1].
Transmission maps are (H, W) arrays with values in [EPS_T, 1]; per-channel
maps of shape (H, W, 3) are accepted by the forward model only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ParameterError, ShapeError

EPS_T = 1e-3
OMEGA = 0.95
MIN_SIZE = 8
AMBIENT_FRACTION = 0.001


def as_image(img, clamp: bool = False) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ShapeError(f"image must have shape (H, W, 3), got {img.shape}")
    if img.shape[0] < MIN_SIZE or img.shape[1] < MIN_SIZE:
        raise ShapeError(f"image must be at least {MIN_SIZE}x{MIN_SIZE}, got {img.shape[:2]}")
    if not np.all(np.isfinite(img)):
        raise ParameterError("image contains non-finite values")
    if clamp:
        return np.clip(img, 0.0, 1.0)
    if img.min() < 0.0 or img.max() > 1.0:
        raise ParameterError("image values must lie in [0, 1]")
    return img


def as_transmission(t, clamp: bool = False) -> np.ndarray:
    """Validate (or clamp into) the transmission range [EPS_T, 1]."""
    t = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(t)):
        raise ParameterError("transmission contains non-finite values")
    if clamp:
        return np.clip(t, EPS_T, 1.0)
    if t.min() < EPS_T or t.max() > 1.0:
        raise ParameterError(f"transmission must lie in [{EPS_T}, 1]")
    return t


def as_ambient(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    if a.size == 1:
        a = np.repeat(a, 3)
    if a.shape != (3,):
        raise ShapeError("ambient light needs three channels")
    if np.any(a < 0.0) or np.any(a > 1.0):
        raise ParameterError("ambient light components must lie in [0, 1]")
    return a


@dataclass(frozen=True)
class NormalizationParams:
    """Spread ``alpha`` and bias ``beta_bias`` of the transmission weight map.

    Since transmission never exceeds 1, the offset ``max(alpha*t)/beta_bias``
    is at most ``alpha/beta_bias``; requiring that to stay below 1 keeps every
    weight strictly positive for any map.
    """

    alpha: float = 0.25
    beta_bias: float = 4.0

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ParameterError(f"alpha must be >= 0, got {self.alpha}")
        if not np.isfinite(self.beta_bias) or self.beta_bias <= 0:
            raise ParameterError(f"beta_bias must be > 0, got {self.beta_bias}")
        if self.alpha / self.beta_bias >= 1.0:
            raise ParameterError(
                f"alpha/beta_bias = {self.alpha / self.beta_bias:g} >= 1 would allow non-positive weights"
            )


@dataclass(frozen=True)
class HazeParams:
    attenuation: tuple[float, float, float]
    ambient: tuple[float, float, float]

    def __post_init__(self):
        att = np.asarray(self.attenuation, dtype=np.float64).reshape(-1)
        if att.size == 1:
            att = np.repeat(att, 3)
        if att.shape != (3,) or np.any(att < 0) or not np.all(np.isfinite(att)):
            raise ParameterError("attenuation needs three non-negative finite components")
        object.__setattr__(self, "attenuation", tuple(float(v) for v in att))
        object.__setattr__(self, "ambient", tuple(float(v) for v in as_ambient(self.ambient)))

    def transmission(self, depth: np.ndarray) -> np.ndarray:
        """Per-channel transmission exp(-beta_c * depth), shape (H, W, 3)."""
        depth = np.asarray(depth, dtype=np.float64)
        return np.exp(-depth[..., None] * np.asarray(self.attenuation))


def _broadcast_t(t: np.ndarray, shape) -> np.ndarray:
    if t.ndim == 2:
        t = t[..., None]
    if t.shape[:2] != tuple(shape[:2]) or t.shape[2] not in (1, 3):
        raise ShapeError(f"transmission shape {t.shape} does not match image {tuple(shape)}")
    return t


def apply_degradation(radiance, t, ambient) -> np.ndarray:
    """Forward model I = D*t + A*(1 - t), per channel when ``t`` is (H, W, 3)."""
    radiance = as_image(radiance)
    t = np.asarray(t, dtype=np.float64)
    if t.min() <= 0.0 or t.max() > 1.0:
        raise ParameterError("transmission must lie in (0, 1]")
    t = _broadcast_t(t, radiance.shape)
    a = as_ambient(ambient)
    out = radiance * t + a * (1.0 - t)
    return np.clip(out, 0.0, 1.0)


def restore_radiance(observed, t, ambient) -> np.ndarray:
    observed = as_image(observed)
    t = _broadcast_t(as_transmission(t), observed.shape)
    a = as_ambient(ambient)
    return np.clip((observed - a * (1.0 - t)) / t, 0.0, 1.0)


def dark_channel(img: np.ndarray, patch: int) -> np.ndarray:
    return ndimage.minimum_filter(img.min(axis=2), size=patch, mode="nearest")


def estimate_ambient(observed, patch: int = 15) -> np.ndarray:
    """Mean colour of the brightest 0.1% of the dark channel."""
    observed = as_image(observed)
    dark = dark_channel(observed, patch).ravel()
    n = max(1, int(np.floor(dark.size * AMBIENT_FRACTION)))
    idx = np.argsort(dark, kind="stable")[-n:]
    a = observed.reshape(-1, 3)[idx].mean(axis=0)
    return np.clip(a, 0.0, 1.0)


def estimate_transmission(observed, ambient, patch: int = 15, omega: float = OMEGA) -> np.ndarray:
    observed = as_image(observed)
    if patch < 3 or patch % 2 == 0:
        raise ParameterError(f"patch must be odd and >= 3, got {patch}")
    a = as_ambient(ambient)
    if np.any(a <= 0.0):
        raise ParameterError("ambient light components must be > 0 for transmission estimation")
    t = 1.0 - omega * dark_channel(observed / a, patch)
    return np.clip(t, EPS_T, 1.0)


def invert(t) -> np.ndarray:
    return 1.0 / as_transmission(t)


def normalization_offset(t_inv, params: NormalizationParams) -> float:
    t = 1.0 / np.asarray(t_inv, dtype=np.float64)
    return float(np.max(params.alpha * t)) / params.beta_bias


def normalize_transmission(t_inv, params: NormalizationParams) -> np.ndarray:
    """Affine weight map alpha*t + 1 - sigma from an inverse transmission map.

    ``sigma = max(alpha * t) / beta_bias`` places the weights in
    ``[1 - sigma, alpha*max(t) + 1 - sigma]``; weights below 1 shrink the
    flow at hazy pixels and weights above 1 amplify it at clear ones.
    """
    t_inv = np.asarray(t_inv, dtype=np.float64)
    if not np.all(np.isfinite(t_inv)) or t_inv.min() < 1.0:
        raise ParameterError("inverse transmission must be finite and >= 1")
    t = 1.0 / t_inv
    sigma = float(np.max(params.alpha * t)) / params.beta_bias
    if sigma >= 1.0:
        raise ParameterError(f"normalization offset sigma={sigma:g} >= 1")
    return params.alpha * t + 1.0 - sigma


def luminance(img: np.ndarray) -> np.ndarray:
    return img[..., 0] * 0.299 + img[..., 1] * 0.587 + img[..., 2] * 0.114
