"""Raster images, grid geometry and file I/O shared by the whole pipeline.

Conventions used everywhere in this package:

* arrays are indexed ``[y, x]`` (numpy row-major); a *point* is ``(x, y)``
* intensities live in ``[0, 1]``
* the grid spacing ``h`` is 1 pixel, so all physical quantities are in
  pixel units
* scalar fields are ``(H, W)`` float arrays, 2-vector fields ``(H, W, 2)``,
  symmetric 2x2 tensor fields ``(H, W, 3)`` storing ``(m11, m12, m22)``,
  region masks ``(H, W)`` bool arrays
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ParameterError


@dataclass(frozen=True)
class GridGeometry:
    """Pixel grid with the landmark point used as coordinate origin.

    ``origin`` is the landmark z in pixel coordinates; all cut-axis
    geometry is expressed relative to it.
    """

    width: int
    height: int
    spacing: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.spacing <= 0:
            raise ParameterError("grid spacing must be positive")
        ox, oy = self.origin
        if not (0 <= ox < self.width and 0 <= oy < self.height):
            raise ParameterError("grid origin must lie inside the grid")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def contains(self, x: float, y: float) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height


@dataclass(frozen=True)
class OrientedGridGeometry:
    """Orientation-lifted grid: base 2D grid x a periodic angle axis."""

    base: GridGeometry
    n_theta: int

    def __post_init__(self):
        if self.n_theta < 4:
            raise ParameterError("n_theta must be at least 4")

    @property
    def thetas(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    def theta_index(self, theta: float) -> int:
        k = int(round(theta / (2.0 * np.pi / self.n_theta)))
        return k % self.n_theta


@dataclass(frozen=True)
class Image:
    """Multi-channel raster with intensities normalized to [0, 1].

    ``data`` has shape (H, W, C) with C in {1, 3}.
    """

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim == 2:
            data = data[:, :, None]
        if data.ndim != 3 or data.shape[2] not in (1, 3):
            raise ParameterError("image data must be (H, W) or (H, W, {1|3})")
        if data.size and (data.min() < 0.0 or data.max() > 1.0):
            raise ParameterError("image intensities must lie in [0, 1]")
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def gray(self) -> np.ndarray:
        """Channel mean as an (H, W) array."""
        return self.data.mean(axis=2)

    def grid(self, origin: tuple[float, float] | None = None) -> GridGeometry:
        if origin is None:
            origin = (self.width // 2, self.height // 2)
        return GridGeometry(self.width, self.height, 1.0, origin)


# ---------------------------------------------------------------------------
# file I/O


def _read_pgm(raw: bytes) -> np.ndarray:
    # P5 binary with optional '#' comments in the header
    pos = 0
    fields: list[int] = []
    if not raw.startswith(b"P5"):
        raise FormatError("not a P5 PGM file")
    pos = 2
    while len(fields) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        try:
            fields.append(int(raw[start:pos]))
        except ValueError as exc:
            raise FormatError("malformed PGM header") from exc
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    if maxval != 255:
        raise FormatError(f"unsupported PGM bit depth (maxval={maxval})")
    need = width * height
    pixels = raw[pos : pos + need]
    if len(pixels) < need:
        raise FormatError("truncated PGM pixel data")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)


def load_image(path: str | os.PathLike) -> Image:
    """Load an 8-bit PGM (P5) or PNG (gray/RGB) image, scaled to [0, 1]."""
    with open(path, "rb") as fh:
        head = fh.read(2)
        fh.seek(0)
        raw = fh.read()
    if head == b"P5":
        arr = _read_pgm(raw)
        return Image(arr.astype(np.float64) / 255.0)
    if raw[:8] == b"\x89PNG\r\n\x1a\n":
        from PIL import Image as PILImage
        import io

        try:
            pil = PILImage.open(io.BytesIO(raw))
            pil.load()
        except Exception as exc:
            raise FormatError(f"unreadable PNG: {exc}") from exc
        if pil.mode == "L":
            arr = np.asarray(pil, dtype=np.float64) / 255.0
        elif pil.mode in ("RGB", "RGBA"):
            arr = np.asarray(pil.convert("RGB"), dtype=np.float64) / 255.0
        elif pil.mode == "P":
            arr = np.asarray(pil.convert("RGB"), dtype=np.float64) / 255.0
        else:
            raise FormatError(f"unsupported PNG mode {pil.mode!r} (8-bit gray/RGB only)")
        return Image(arr)
    raise FormatError("unsupported image format (PGM P5 or PNG expected)")


def save_pgm(path: str | os.PathLike, values: np.ndarray) -> None:
    """Write an (H, W) uint8 array as binary P5."""
    values = np.asarray(values, dtype=np.uint8)
    h, w = values.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(values.tobytes())


def save_mask(path: str | os.PathLike, mask: np.ndarray) -> None:
    """Region mask as 0/255 PGM."""
    mask = np.asarray(mask, dtype=bool)
    save_pgm(path, np.where(mask, 255, 0).astype(np.uint8))


def load_mask(path: str | os.PathLike) -> np.ndarray:
    img = load_image(path)
    return img.gray() > 0.5


def save_heatmap_pgm(path: str | os.PathLike, values: np.ndarray) -> None:
    """Scalar field normalized to its own finite min/max, as 8-bit PGM."""
    values = np.asarray(values, dtype=np.float64)
    finite = np.isfinite(values)
    out = np.zeros(values.shape, dtype=np.uint8)
    if finite.any():
        lo = values[finite].min()
        hi = values[finite].max()
        span = hi - lo if hi > lo else 1.0
        out[finite] = np.clip((values[finite] - lo) / span * 255.0, 0, 255).astype(np.uint8)
    save_pgm(path, out)


def contour_to_json(vertices: np.ndarray, closed: bool, lifted: bool = False) -> str:
    """Serialize a contour using the shared JSON schema."""
    vertices = np.asarray(vertices, dtype=np.float64)
    verts = [[float(c) for c in row] for row in vertices]
    return json.dumps({"closed": bool(closed), "lifted": bool(lifted), "vertices": verts})


def save_contour(path: str | os.PathLike, vertices: np.ndarray, closed: bool,
                 lifted: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(contour_to_json(vertices, closed, lifted))


def load_contour(path: str | os.PathLike) -> tuple[np.ndarray, bool, bool]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return np.asarray(doc["vertices"], dtype=np.float64), bool(doc["closed"]), bool(doc.get("lifted", False))


def save_field_f32(path: str | os.PathLike, values: np.ndarray) -> None:
    """Binary scalar-field format: uint32 LE width, uint32 LE height, then
    row-major float32 LE samples."""
    values = np.asarray(values, dtype=np.float32)
    h, w = values.shape
    with open(path, "wb") as fh:
        fh.write(np.array([w, h], dtype="<u4").tobytes())
        fh.write(values.astype("<f4").tobytes())


def field_f32_bytes(values: np.ndarray) -> bytes:
    values = np.asarray(values, dtype=np.float32)
    h, w = values.shape
    return np.array([w, h], dtype="<u4").tobytes() + values.astype("<f4").tobytes()


def load_field_f32(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as fh:
        header = np.frombuffer(fh.read(8), dtype="<u4")
        if header.size != 2:
            raise FormatError("truncated field header")
        w, h = int(header[0]), int(header[1])
        data = np.frombuffer(fh.read(4 * w * h), dtype="<f4")
    if data.size != w * h:
        raise FormatError("truncated field data")
    return data.reshape(h, w).astype(np.float64)


# ---------------------------------------------------------------------------
# smoothing


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled Gaussian truncated at radius ceil(3*sigma), renormalized."""
    if sigma <= 0:
        raise ParameterError("sigma must be positive")
    r = math.ceil(3.0 * sigma)
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _convolve_axis(arr: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    r = (len(kernel) - 1) // 2
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (r, r)
    padded = np.pad(arr, pad, mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, len(kernel), axis=axis)
    return windows @ kernel


def gaussian_smooth(img: Image | np.ndarray, sigma: float) -> Image | np.ndarray:
    """Per-channel separable Gaussian blur, edge-replicated at the border.

    Accepts either an Image (returns an Image) or a bare (H, W) array.
    """
    k = gaussian_kernel(sigma)
    if isinstance(img, Image):
        out = np.empty_like(img.data)
        for c in range(img.channels):
            out[:, :, c] = _convolve_axis(_convolve_axis(img.data[:, :, c], k, 0), k, 1)
        return Image(np.clip(out, 0.0, 1.0))
    arr = np.asarray(img, dtype=np.float64)
    return _convolve_axis(_convolve_axis(arr, k, 0), k, 1)


# ---------------------------------------------------------------------------
# rasterization helpers shared by the contour pipeline


def rasterize_polyline(vertices: np.ndarray, height: int, width: int) -> np.ndarray:
    """Pixels touched by a polyline, by dense sampling (~4 samples/pixel)."""
    vertices = np.asarray(vertices, dtype=np.float64)
    mask = np.zeros((height, width), dtype=bool)
    if len(vertices) == 0:
        return mask
    if len(vertices) == 1:
        x, y = int(round(vertices[0][0])), int(round(vertices[0][1]))
        if 0 <= x < width and 0 <= y < height:
            mask[y, x] = True
        return mask
    pts = []
    for p, q in zip(vertices[:-1], vertices[1:]):
        n = max(2, int(4 * np.hypot(*(q - p))) + 1)
        t = np.linspace(0.0, 1.0, n)[:, None]
        pts.append(p[None, :] * (1 - t) + q[None, :] * t)
    samples = np.vstack(pts)
    xs = np.clip(np.round(samples[:, 0]).astype(int), 0, width - 1)
    ys = np.clip(np.round(samples[:, 1]).astype(int), 0, height - 1)
    mask[ys, xs] = True
    return mask


def fill_polygon(vertices: np.ndarray, height: int, width: int) -> np.ndarray:
    """Even-odd scanline fill of a closed polygon over pixel centers."""
    vertices = np.asarray(vertices, dtype=np.float64)
    mask = np.zeros((height, width), dtype=bool)
    if len(vertices) < 3:
        return mask
    x1 = vertices[:, 0]
    y1 = vertices[:, 1]
    x2 = np.roll(x1, -1)
    y2 = np.roll(y1, -1)
    keep = y1 != y2
    x1, y1, x2, y2 = x1[keep], y1[keep], x2[keep], y2[keep]
    if len(x1) == 0:
        return mask
    for py in range(height):
        crosses = (y1 > py) != (y2 > py)
        if not crosses.any():
            continue
        t = (py - y1[crosses]) / (y2[crosses] - y1[crosses])
        xs = np.sort(x1[crosses] + t * (x2[crosses] - x1[crosses]))
        for i in range(0, len(xs) - 1, 2):
            lo = int(np.floor(xs[i])) + 1
            hi = int(np.ceil(xs[i + 1])) - 1
            if hi >= lo:
                mask[py, max(lo, 0) : min(hi, width - 1) + 1] = True
    return mask
