"""Dense pyramidal Lucas-Kanade flow and transmission-weighted flow.

Flow fields are float64 arrays of shape (H, W, 2) holding (u, v): u is the
column displacement and v the row displacement, positive right/down, such
that ``frame_a[y, x] ~ frame_b[y + v, x + u]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ParameterError, ShapeError
from .imaging import luminance


@dataclass(frozen=True)
class FlowParams:
    pyramid_levels: int = 4
    iterations_per_level: int = 10
    window: int = 15
    # Tikhonov damping on the 2x2 normal equations, relative to window area
    damping: float = 1e-4

    def __post_init__(self):
        if self.pyramid_levels < 1:
            raise ParameterError("pyramid_levels must be >= 1")
        if self.iterations_per_level < 1:
            raise ParameterError("iterations_per_level must be >= 1")
        if self.window < 5 or self.window % 2 == 0:
            raise ParameterError("window must be odd and >= 5")
        if self.damping < 0:
            raise ParameterError("damping must be >= 0")

    @property
    def border(self) -> int:
        return self.window // 2


def _gray(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim == 3:
        return luminance(frame)
    if frame.ndim == 2:
        return frame
    raise ShapeError(f"frame must be (H, W) or (H, W, 3), got {frame.shape}")


def _pyramid(img: np.ndarray, levels: int) -> list[np.ndarray]:
    pyr = [img]
    for _ in range(levels - 1):
        blurred = ndimage.gaussian_filter(pyr[-1], 1.0, mode="nearest")
        pyr.append(blurred[::2, ::2])
    return pyr


def _sample(img: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    return ndimage.map_coordinates(img, [rows, cols], order=1, mode="nearest")


def _upsample_flow(flow: np.ndarray, shape) -> np.ndarray:
    h, w = shape
    ch, cw = flow.shape[:2]
    rows = (np.arange(h) + 0.5) * (ch / h) - 0.5
    cols = (np.arange(w) + 0.5) * (cw / w) - 0.5
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    out = np.empty((h, w, 2))
    out[..., 0] = _sample(flow[..., 0], rr, cc) * (w / cw)
    out[..., 1] = _sample(flow[..., 1], rr, cc) * (h / ch)
    return out


def _refine(a: np.ndarray, b: np.ndarray, flow: np.ndarray, params: FlowParams) -> np.ndarray:
    h, w = a.shape
    rr, cc = np.mgrid[0:h, 0:w].astype(np.float64)
    gy_a, gx_a = np.gradient(a)
    gy_b, gx_b = np.gradient(b)
    win = params.window
    lam = params.damping
    for _ in range(params.iterations_per_level):
        rows = rr + flow[..., 1]
        cols = cc + flow[..., 0]
        bw = _sample(b, rows, cols)
        # samples that fell outside frame b carry no information
        valid = (rows >= 0) & (rows <= h - 1) & (cols >= 0) & (cols <= w - 1)
        gx = np.where(valid, 0.5 * (gx_a + _sample(gx_b, rows, cols)), 0.0)
        gy = np.where(valid, 0.5 * (gy_a + _sample(gy_b, rows, cols)), 0.0)
        # linearize every window pixel about its own current flow, then solve
        # for the single displacement shared by the window
        rhs = gx * flow[..., 0] + gy * flow[..., 1] - (bw - a)
        sxx = ndimage.uniform_filter(gx * gx, win, mode="nearest") + lam
        syy = ndimage.uniform_filter(gy * gy, win, mode="nearest") + lam
        sxy = ndimage.uniform_filter(gx * gy, win, mode="nearest")
        bx = ndimage.uniform_filter(gx * rhs, win, mode="nearest") + lam * flow[..., 0]
        by = ndimage.uniform_filter(gy * rhs, win, mode="nearest") + lam * flow[..., 1]
        det = sxx * syy - sxy * sxy
        flow[..., 0] = (syy * bx - sxy * by) / det
        flow[..., 1] = (sxx * by - sxy * bx) / det
        np.clip(flow[..., 0], -w, w, out=flow[..., 0])
        np.clip(flow[..., 1], -h, h, out=flow[..., 1])
    return flow


def estimate_flow(frame_a, frame_b, params: FlowParams | None = None) -> np.ndarray:
    """Coarse-to-fine iterative Lucas-Kanade over a Gaussian pyramid."""
    params = params or FlowParams()
    a = _gray(frame_a)
    b = _gray(frame_b)
    if a.shape != b.shape:
        raise ShapeError(f"frame sizes differ: {a.shape} vs {b.shape}")
    min_side = 2 ** (params.pyramid_levels - 1) * params.window
    if min(a.shape) < min_side:
        raise ParameterError(
            f"frames of {a.shape[1]}x{a.shape[0]} are too small for {params.pyramid_levels} "
            f"levels with window {params.window} (need >= {min_side} px per side)"
        )
    pa = _pyramid(a, params.pyramid_levels)
    pb = _pyramid(b, params.pyramid_levels)
    flow = np.zeros(pa[-1].shape + (2,))
    for level in range(params.pyramid_levels - 1, -1, -1):
        if flow.shape[:2] != pa[level].shape:
            flow = _upsample_flow(flow, pa[level].shape)
        flow = _refine(pa[level], pb[level], flow, params)
    return flow


def weight_flow(flow, weights) -> np.ndarray:
    """Hadamard product of each flow component with a per-pixel weight map."""
    flow = np.asarray(flow, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if flow.ndim != 3 or flow.shape[2] != 2 or weights.shape != flow.shape[:2]:
        raise ShapeError(f"flow {flow.shape} and weights {weights.shape} disagree")
    return flow * weights[..., None]


def warp_image(frame, flow) -> np.ndarray:
    """Backward bilinear warp: out(x) = frame(x + flow(x)), border clamped."""
    frame = np.asarray(frame, dtype=np.float64)
    flow = np.asarray(flow, dtype=np.float64)
    h, w = frame.shape[:2]
    if flow.shape != (h, w, 2):
        raise ShapeError(f"flow {flow.shape} does not match frame {frame.shape}")
    rr, cc = np.mgrid[0:h, 0:w].astype(np.float64)
    rows = rr + flow[..., 1]
    cols = cc + flow[..., 0]
    if frame.ndim == 2:
        return _sample(frame, rows, cols)
    return np.stack([_sample(frame[..., c], rows, cols) for c in range(frame.shape[2])], axis=-1)


def interior_mask(shape, border: int) -> np.ndarray:
    mask = np.zeros(shape[:2], dtype=bool)
    mask[border:shape[0] - border, border:shape[1] - border] = True
    return mask


def flow_epe(estimate, truth, mask=None) -> float:
    estimate = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimate.shape != truth.shape:
        raise ShapeError(f"flow shapes differ: {estimate.shape} vs {truth.shape}")
    err = np.sqrt(np.sum((estimate - truth) ** 2, axis=-1))
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != err.shape:
            raise ShapeError("mask shape does not match flow")
        err = err[mask]
    if err.size == 0:
        raise ParameterError("EPE mask selects no pixels")
    return float(err.mean())


def _make_colorwheel() -> np.ndarray:
    # Middlebury colour wheel segment lengths
    ry, yg, gc, cb, bm, mr = 15, 6, 4, 11, 13, 6
    wheel = np.zeros((ry + yg + gc + cb + bm + mr, 3))
    col = 0
    wheel[col:col + ry, 0] = 255
    wheel[col:col + ry, 1] = np.floor(255 * np.arange(ry) / ry)
    col += ry
    wheel[col:col + yg, 0] = 255 - np.floor(255 * np.arange(yg) / yg)
    wheel[col:col + yg, 1] = 255
    col += yg
    wheel[col:col + gc, 1] = 255
    wheel[col:col + gc, 2] = np.floor(255 * np.arange(gc) / gc)
    col += gc
    wheel[col:col + cb, 1] = 255 - np.floor(255 * np.arange(cb) / cb)
    wheel[col:col + cb, 2] = 255
    col += cb
    wheel[col:col + bm, 2] = 255
    wheel[col:col + bm, 0] = np.floor(255 * np.arange(bm) / bm)
    col += bm
    wheel[col:col + mr, 2] = 255 - np.floor(255 * np.arange(mr) / mr)
    wheel[col:col + mr, 0] = 255
    return wheel


COLORWHEEL = _make_colorwheel()


def flow_to_color(flow, max_radius: float | None = None) -> np.ndarray:
    """Middlebury colour coding, returned as a float RGB image in [0, 1].

    Pass a shared ``max_radius`` to compare several fields on one scale.
    Zero flow maps to white.
    """
    flow = np.asarray(flow, dtype=np.float64)
    u, v = flow[..., 0], flow[..., 1]
    rad = np.sqrt(u * u + v * v)
    if max_radius is None:
        max_radius = float(rad.max())
    if max_radius > 0:
        u = u / max_radius
        v = v / max_radius
        rad = rad / max_radius
    ncols = COLORWHEEL.shape[0]
    angle = np.arctan2(-v, -u) / np.pi
    fk = (angle + 1) / 2 * (ncols - 1)
    k0 = np.floor(fk).astype(int)
    k1 = (k0 + 1) % ncols
    f = (fk - k0)[..., None]
    col = ((1 - f) * COLORWHEEL[k0] + f * COLORWHEEL[k1]) / 255.0
    r = np.minimum(rad, 1.0)[..., None]
    col = 1 - r * (1 - col)
    col[rad > 1] *= 0.75
    return np.clip(col, 0.0, 1.0)
