"""Readers and writers for images, scalar maps (PFM/PGM) and Middlebury .flo files."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .errors import ParseError

FLO_MAGIC = b"PIEH"


def to_uint8(img: np.ndarray) -> np.ndarray:
    return np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)


def quantize(img: np.ndarray) -> np.ndarray:
    """Round-trip a [0,1] image through 8-bit storage."""
    return to_uint8(img).astype(np.float64) / 255.0


def read_image(path: str | os.PathLike) -> np.ndarray:
    """Load PNG/PPM/PGM as float64 RGB in [0,1], shape (H, W, 3)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"image not found: {path}")
    with PILImage.open(path) as im:
        im = im.convert("RGB")
        arr = np.asarray(im, dtype=np.uint8)
    return arr.astype(np.float64) / 255.0


def write_image(path: str | os.PathLike, img: np.ndarray) -> None:
    """Save a [0,1] image as 8-bit PNG, PPM or PGM depending on the suffix.

    Grayscale (H, W) arrays are written as single-channel files.
    """
    path = Path(path)
    data = to_uint8(img)
    mode = "L" if data.ndim == 2 else "RGB"
    suffix = path.suffix.lower()
    if suffix == ".pgm" and data.ndim == 3:
        raise ValueError("PGM output needs a single-channel array")
    fmt = {".png": "PNG", ".ppm": "PPM", ".pgm": "PPM", ".pnm": "PPM"}.get(suffix)
    if fmt is None:
        raise ValueError(f"unsupported image suffix {path.suffix!r}")
    PILImage.fromarray(data, mode=mode).save(path, format=fmt)


def write_pgm_map(path: str | os.PathLike, values: np.ndarray, lo: float | None = None,
                  hi: float | None = None) -> None:
    """Quick-look PGM of a scalar map, linearly stretched from [lo, hi] to [0, 255]."""
    values = np.asarray(values, dtype=np.float64)
    lo = float(values.min()) if lo is None else lo
    hi = float(values.max()) if hi is None else hi
    span = hi - lo if hi > lo else 1.0
    write_image(path, (values - lo) / span)


def pfm_bytes(values: np.ndarray) -> bytes:
    values = np.asarray(values)
    if values.ndim != 2:
        raise ValueError("PFM writer expects a single-channel (H, W) map")
    h, w = values.shape
    header = f"Pf\n{w} {h}\n-1.0\n".encode("ascii")
    # PFM stores rows bottom-to-top
    body = np.ascontiguousarray(values[::-1], dtype="<f4").tobytes()
    return header + body


def write_pfm(path: str | os.PathLike, values: np.ndarray) -> None:
    Path(path).write_bytes(pfm_bytes(values))


def read_pfm(path: str | os.PathLike) -> np.ndarray:
    path = Path(path)
    raw = path.read_bytes()
    parts = []
    pos = 0
    # three whitespace-terminated header tokens: type, "w h", scale
    for _ in range(3):
        end = raw.index(b"\n", pos)
        parts.append(raw[pos:end].decode("ascii").strip())
        pos = end + 1
    kind, dims, scale = parts
    if kind not in ("Pf", "PF"):
        raise ParseError(f"bad PFM type {kind!r}", path)
    w, h = (int(v) for v in dims.split())
    scale = float(scale)
    channels = 1 if kind == "Pf" else 3
    dtype = "<f4" if scale < 0 else ">f4"
    data = np.frombuffer(raw, dtype=dtype, offset=pos, count=w * h * channels)
    shape = (h, w) if channels == 1 else (h, w, 3)
    return data.reshape(shape)[::-1].astype(np.float32)


def flo_bytes(flow: np.ndarray) -> bytes:
    flow = np.asarray(flow)
    if flow.ndim != 3 or flow.shape[2] != 2:
        raise ValueError("flow must have shape (H, W, 2)")
    h, w = flow.shape[:2]
    header = FLO_MAGIC + np.array([w, h], dtype="<i4").tobytes()
    return header + np.ascontiguousarray(flow, dtype="<f4").tobytes()


def write_flo(path: str | os.PathLike, flow: np.ndarray) -> None:
    Path(path).write_bytes(flo_bytes(flow))


def read_flo(path: str | os.PathLike) -> np.ndarray:
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] != FLO_MAGIC:
        raise ParseError("invalid .flo magic", path)
    w, h = np.frombuffer(raw, dtype="<i4", count=2, offset=4)
    expected = 12 + int(w) * int(h) * 8
    if len(raw) != expected:
        raise ParseError(f"expected {expected} bytes, found {len(raw)}", path)
    data = np.frombuffer(raw, dtype="<f4", offset=12)
    return data.reshape(int(h), int(w), 2).astype(np.float32)
