"""Jaccard scoring, synthetic test imagery and batch statistics."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .dualcut import DualCutConfig, segment
from .errors import GeosegError, ParameterError
from .imagecore import Image, gaussian_smooth


def jaccard(s: np.ndarray, gt: np.ndarray) -> float:
    """Intersection over union; two empty masks agree vacuously (1.0)."""
    s = np.asarray(s, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    if s.shape != gt.shape:
        raise ParameterError("mask shapes disagree")
    union = (s | gt).sum()
    if union == 0:
        return 1.0
    return float((s & gt).sum() / union)


# ---------------------------------------------------------------------------
# synthetic imagery


@dataclass(frozen=True)
class Shape:
    """Rasterizable primitive: kind in {'disk', 'ellipse', 'rect', 'capsule'}.

    params: disk (cx, cy, r); ellipse (cx, cy, rx, ry, angle_rad);
    rect (x0, y0, x1, y1); capsule (x0, y0, x1, y1, r).
    """

    kind: str
    params: tuple
    intensity: float
    is_target: bool = True


def _shape_mask(shape: Shape, h: int, w: int) -> np.ndarray:
    ys, xs = np.mgrid[0:h, 0:w]
    k, p = shape.kind, shape.params
    if k == "disk":
        cx, cy, r = p
        return (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r
    if k == "ellipse":
        cx, cy, rx, ry, ang = p
        ca, sa = math.cos(ang), math.sin(ang)
        u = (xs - cx) * ca + (ys - cy) * sa
        v = -(xs - cx) * sa + (ys - cy) * ca
        return (u / rx) ** 2 + (v / ry) ** 2 <= 1.0
    if k == "rect":
        x0, y0, x1, y1 = p
        return (xs >= x0) & (xs <= x1) & (ys >= y0) & (ys <= y1)
    if k == "capsule":
        x0, y0, x1, y1, r = p
        dx, dy = x1 - x0, y1 - y0
        denom = dx * dx + dy * dy
        if denom == 0:
            return (xs - x0) ** 2 + (ys - y0) ** 2 <= r * r
        t = np.clip(((xs - x0) * dx + (ys - y0) * dy) / denom, 0.0, 1.0)
        return (xs - (x0 + t * dx)) ** 2 + (ys - (y0 + t * dy)) ** 2 <= r * r
    raise ParameterError(f"unknown shape kind {k!r}")


def synth_image(shapes, size: tuple[int, int], background: float = 0.2,
                noise_sigma: float = 0.0, salt_pepper: float = 0.0,
                smooth_sigma: float = 0.0, seed: int = 0) -> tuple[Image, np.ndarray]:
    """Rasterize shapes over a constant background.

    Returns (image, ground-truth mask of the union of target shapes).
    Gaussian noise is additive with the given standard deviation, clamped
    to [0, 1]; salt-and-pepper flips pixels to 0/1 at the given rate.
    Randomness comes from numpy's seeded PCG64 generator.
    """
    h, w = size
    canvas = np.full((h, w), float(background))
    gt = np.zeros((h, w), dtype=bool)
    for s in shapes:
        m = _shape_mask(s, h, w)
        canvas[m] = s.intensity
        if s.is_target:
            gt |= m
    if smooth_sigma > 0:
        canvas = gaussian_smooth(canvas, smooth_sigma)
    rng = np.random.default_rng(seed)
    if noise_sigma > 0:
        canvas = canvas + rng.normal(0.0, noise_sigma, canvas.shape)
    if salt_pepper > 0:
        flip = rng.random(canvas.shape) < salt_pepper
        vals = rng.random(canvas.shape) < 0.5
        canvas = np.where(flip, vals.astype(float), canvas)
    return Image(np.clip(canvas, 0.0, 1.0)), gt


def disk_image(size: int = 128, r: float = 40.0, fg: float = 0.8,
               bg: float = 0.2, noise_sigma: float = 0.0,
               smooth_sigma: float = 1.0, seed: int = 0):
    c = size // 2
    return synth_image([Shape("disk", (c, c, r), fg)], (size, size),
                       background=bg, noise_sigma=noise_sigma,
                       smooth_sigma=smooth_sigma, seed=seed)


def two_region_image(size: int = 128, seed: int = 0, noise_sigma: float = 0.0):
    """Two disjoint regions over a mid background; the target occupies the
    bottom half and carries the highest gray level, with a nearby
    distractor region above it."""
    c = size // 2
    target = Shape("ellipse", (c, int(size * 0.68), size * 0.33, size * 0.21, 0.0), 0.9)
    distractor = Shape("ellipse", (c, int(size * 0.22), size * 0.3, size * 0.13, 0.0),
                       0.62, is_target=False)
    return synth_image([distractor, target], (size, size), background=0.35,
                       noise_sigma=noise_sigma, smooth_sigma=1.0, seed=seed)


def peanut_image(size: int = 128, seed: int = 0, noise_sigma: float = 0.0):
    """Union of two overlapping disks placed so the contour crosses the
    negative axis of the default landmark three times."""
    c = size // 2
    lobes = [Shape("disk", (c - 30, c - 12, 16.0), 0.85),
             Shape("disk", (c, c, 18.0), 0.85)]
    return synth_image(lobes, (size, size), background=0.15,
                       noise_sigma=noise_sigma, smooth_sigma=1.0, seed=seed)


# ---------------------------------------------------------------------------
# batch protocol


@dataclass(frozen=True)
class RunRecord:
    seed_x: int
    seed_y: int
    jaccard: float | None
    runtime_ms: float
    error: str | None = None


@dataclass(frozen=True)
class EvalReport:
    runs: tuple
    mean: float
    max: float
    min: float
    std: float

    def to_csv(self) -> str:
        lines = ["seed_x,seed_y,jaccard,runtime_ms"]
        for r in self.runs:
            j = "" if r.jaccard is None else f"{r.jaccard:.6f}"
            lines.append(f"{r.seed_x},{r.seed_y},{j},{r.runtime_ms:.3f}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "mean": self.mean, "max": self.max, "min": self.min,
            "std": self.std,
            "runs": [
                {"seed": [r.seed_x, r.seed_y], "jaccard": r.jaccard,
                 "runtime_ms": r.runtime_ms, "error": r.error}
                for r in self.runs
            ],
        }


def batch_run(img: Image, gt: np.ndarray, seeds, config: DualCutConfig | None = None,
              barriers: np.ndarray | None = None) -> EvalReport:
    """Run the dual-cut pipeline once per landmark seed and aggregate
    Jaccard statistics; per-run failures are recorded, not fatal."""
    records = []
    for sx, sy in sorted((int(s[0]), int(s[1])) for s in seeds):
        t0 = time.perf_counter()
        try:
            res = segment(img, (sx, sy), config, barriers)
            j = jaccard(res.region, gt)
            err = None
        except GeosegError as exc:
            j = None
            err = f"{type(exc).__name__}: {exc}"
        records.append(RunRecord(sx, sy, j, (time.perf_counter() - t0) * 1e3, err))
    scores = np.array([r.jaccard for r in records if r.jaccard is not None])
    if len(scores):
        agg = (float(scores.mean()), float(scores.max()), float(scores.min()),
               float(scores.std()))
    else:
        agg = (math.nan,) * 4
    return EvalReport(tuple(records), *agg)
