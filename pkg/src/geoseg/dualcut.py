"""Dual-cut closed-contour scheme and the VCGeo baseline.

Step I extracts a closed geodesic loop G_q through a point q on the
positive cut ray; Step II replaces the portion of G_q outside its first
and last negative-ray crossings (a, b) by a complementary geodesic
G_{b,a} that is forbidden to cross the negative ray or the enclosed set
A; the final contour is their concatenation.

All geometry uses z-centered logic with z at integer pixel coordinates;
points are (x, y) with y the row index, and closed curves are oriented
counter-clockwise in that frame (positive shoelace area).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (InitializationError, NumericalError, ParameterError,
                     TopologyError)
from .eikonal import (ConstraintSet, DistanceMap, GeodesicPath, backtrack,
                      solve)
from .features import (EdgeFeatures, anisotropy_tensor, compute_edge_features,
                       omega_from_varpi, orientation_potential)
from .imagecore import (GridGeometry, Image, fill_polygon, rasterize_polyline)
from .metrics import (MetricField, asym_quadratic_metric, compose_qz,
                      curvature_metric, riemannian_metric, vcgeo_metric)
from .region import HomogeneityField, RegionTermParams, homogeneity_field

METRIC_CHOICES = ("aq", "riem", "rsf", "elastica")


@dataclass(frozen=True)
class DualCutConfig:
    """Pipeline parameters; alpha values are magnitudes (the metric
    construction applies the negative sign internally)."""

    metric: str = "aq"
    alpha: float = 7.0
    alpha_tilde: float = 0.0
    lam: float = 2.0
    beta: float = 100.0
    n_theta: int = 60
    alpha_orient: float = 5.0
    mu: float = 0.1
    T: float = 0.5
    tau: float = 5.0
    tau_eps: float = 0.99
    sigma: float = 2.0
    stencil_radius: int = 2

    def __post_init__(self):
        if self.metric not in METRIC_CHOICES:
            raise ParameterError(f"metric must be one of {METRIC_CHOICES}")
        if self.alpha < 0 or self.alpha_orient <= 0:
            raise ParameterError("alpha magnitudes must be non-negative")
        if self.beta <= 0:
            raise ParameterError("beta must be positive")
        if self.n_theta < 4:
            raise ParameterError("n_theta must be >= 4")
        if self.sigma <= 0:
            raise ParameterError("sigma must be positive")
        if self.stencil_radius not in (2, 3):
            raise ParameterError("stencil_radius must be 2 or 3")
        RegionTermParams(self.mu, self.T, self.tau, self.tau_eps)

    @property
    def varsigma(self) -> float:
        return 0.5 if self.metric == "rsf" else 1.0

    def region_params(self) -> RegionTermParams:
        return RegionTermParams(self.mu, self.T, self.tau, self.tau_eps)


@dataclass(frozen=True)
class SegmentationResult:
    contour: GeodesicPath
    region: np.ndarray
    q: tuple
    a: tuple
    b: tuple
    gq: GeodesicPath
    gamma_ab: GeodesicPath
    gba: GeodesicPath
    theta_z: np.ndarray
    obstacle: np.ndarray
    hom: HomogeneityField | None
    config: DualCutConfig
    timings_ms: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# metric construction


def build_base_metric(feats: EdgeFeatures, config: DualCutConfig,
                      grid: GridGeometry, omega: np.ndarray | None = None) -> MetricField:
    """Finsler metric (without the region weight) per config.metric."""
    if config.metric in ("rsf", "elastica"):
        pot = orientation_potential(feats.w, -config.alpha_orient, config.n_theta)
        return curvature_metric(pot, config.beta, config.varsigma, grid)
    m = anisotropy_tensor(feats.w, feats.g, -config.alpha, config.alpha_tilde)
    if config.metric == "riem":
        return riemannian_metric(m, grid)
    if omega is None:
        raise ParameterError("asym_quadratic metric needs the omega field")
    return asym_quadratic_metric(m, omega, grid)


def omega_from_features(feats: EdgeFeatures, lam: float) -> np.ndarray:
    return omega_from_varpi(feats.varpi, lam)


# ---------------------------------------------------------------------------
# geometric steps


def pick_q(boundary: np.ndarray, z, grid: GridGeometry) -> tuple[int, int]:
    """Nearest intersection of the Theta_z outer boundary with the open
    positive ray {(x, zy): x > zx}, snapped to the ray's grid row."""
    zx, zy = float(z[0]), float(z[1])
    pts = np.asarray(boundary, dtype=np.float64)
    n = len(pts)
    best = math.inf
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        if y1 == zy and x1 > zx:
            best = min(best, x1)
        if (y1 - zy) * (y2 - zy) < 0:
            t = (zy - y1) / (y2 - y1)
            xc = x1 + t * (x2 - x1)
            if xc > zx:
                best = min(best, xc)
    if not math.isfinite(best):
        raise InitializationError(
            "the homogeneity boundary does not cross the positive axis; "
            "enlarge T or move the seed")
    qx = max(int(round(best)), int(round(zx)) + 1)
    if qx >= grid.width:
        raise InitializationError("positive-axis crossing falls outside the grid")
    return (qx, int(round(zy)))


def _stop_pixels(center, dy_sign: int, grid: GridGeometry) -> np.ndarray:
    """The paper's stopping set: pixels within sqrt(2)h of the center,
    strictly on the dy_sign side of the axis."""
    cx, cy = int(round(center[0])), int(round(center[1]))
    pts = [(cx + dx, cy + dy_sign) for dx in (-1, 0, 1)
           if 0 <= cx + dx < grid.width and 0 <= cy + dy_sign < grid.height]
    if not pts:
        raise TopologyError("stopping set falls outside the grid")
    return np.array(pts, dtype=np.int64)


def step1(metric: MetricField, q, grid: GridGeometry, config: DualCutConfig,
          barriers: np.ndarray | None = None,
          theta_q: float | None = None) -> tuple[GeodesicPath, DistanceMap]:
    """Closed loop through q: solve with the positive-ray cut, stop just
    below q, back-track and close across the cut by appending q."""
    stop = _stop_pixels(q, -1, grid)
    cons = ConstraintSet(cut="positive", barriers=barriers, stop_points=stop)
    if metric.is_lifted:
        src = [(q[0], q[1], theta_q)]
    else:
        src = [q]
    dmap = solve(metric, src, cons, config.stencil_radius)
    if dmap.reached is None:
        raise TopologyError(
            "step I: the front never returned below q (cut not enclosed)")
    if metric.is_lifted:
        x, y, k = dmap.reached
        start = (x, y, 2.0 * math.pi * k / metric.n_theta)
        closure = [q[0], q[1], theta_q]
    else:
        start = dmap.reached
        closure = [q[0], q[1]]
    path = backtrack(dmap, metric, start)
    verts = np.vstack([path.vertices, closure])
    return GeodesicPath(verts, closed=True, lifted=metric.is_lifted), dmap


def _ray_crossings(verts: np.ndarray, zx: float, zy: float):
    """Transversal crossings of the polyline with the open negative ray
    {(x, zy): x < zx}, in traversal order.

    Returns (crossings, augmented) where augmented is the vertex list with
    exact crossing points inserted and crossings holds indices into it.
    """
    ys = verts[:, 1] - zy
    aug: list[np.ndarray] = [verts[0]]
    cross_idx: list[int] = []
    last_side = 0.0 if ys[0] == 0 else math.copysign(1.0, ys[0])
    pending_touch = None  # vertex index in aug lying exactly on the line
    if ys[0] == 0.0:
        pending_touch = 0
    for i in range(1, len(verts)):
        yi = ys[i]
        v = verts[i]
        if yi == 0.0:
            aug.append(v)
            if pending_touch is None:
                pending_touch = len(aug) - 1
            continue
        side = math.copysign(1.0, yi)
        if pending_touch is not None:
            # run of on-axis vertices: a crossing if the sides differ
            if last_side != 0.0 and side != last_side:
                pv = aug[pending_touch]
                if pv[0] < zx:
                    cross_idx.append(pending_touch)
            pending_touch = None
            last_side = side
            aug.append(v)
            continue
        if last_side != 0.0 and side != last_side:
            prev = aug[-1]
            t = (zy - prev[1]) / (v[1] - prev[1])
            xc = prev[0] + t * (v[0] - prev[0])
            if xc < zx:
                cp = prev + t * (v - prev)
                cp[1] = zy
                aug.append(cp)
                cross_idx.append(len(aug) - 1)
        last_side = side
        aug.append(v)
    return cross_idx, np.array(aug)


def step2_points(gq: GeodesicPath, z) -> tuple:
    """First/last crossings of G_q with the negative ray and the retained
    sub-path Gamma_{a,b} (re-parameterized from a to b)."""
    zx, zy = float(z[0]), float(z[1])
    ring = gq.spatial()
    cross_idx, aug = _ray_crossings(ring, zx, zy)
    if not cross_idx:
        raise TopologyError("G_q never crosses the negative axis")
    ia, ib = cross_idx[0], cross_idx[-1]
    a = (float(aug[ia][0]), float(aug[ia][1]))
    b = (float(aug[ib][0]), float(aug[ib][1]))
    seg = np.hypot(*(np.diff(aug, axis=0).T))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1] if cum[-1] > 0 else 1.0
    u1, u2 = cum[ia] / total, cum[ib] / total
    gamma = GeodesicPath(aug[ia : ib + 1].copy(), closed=False)
    return a, b, u1, u2, gamma


def region_a(gamma: GeodesicPath, shape: tuple[int, int]) -> np.ndarray:
    """Union of regions enclosed by Gamma_{a,b} and the axis segment from
    b back to a (even-odd fill; strictly interior pixels only)."""
    verts = gamma.vertices[:, :2]
    if len(verts) < 3:
        return np.zeros(shape, dtype=bool)
    mask = fill_polygon(verts, shape[0], shape[1])
    if mask.any():
        border = rasterize_polyline(np.vstack([verts, verts[:1]]), shape[0], shape[1])
        mask &= ~border
    return mask


def step2(metric: MetricField, a, b, obstacle: np.ndarray | None,
          grid: GridGeometry, config: DualCutConfig,
          barriers: np.ndarray | None = None,
          theta_a: float | None = None,
          theta_b: float | None = None) -> tuple[GeodesicPath, DistanceMap]:
    """Complementary geodesic from b to a under the negative-ray cut with
    the set A as an obstacle; stops just above a and appends the exact a."""
    b_px = (int(round(b[0])), int(round(b[1])))
    obst = None
    if obstacle is not None and obstacle.any():
        obst = obstacle.copy()
        obst[b_px[1], b_px[0]] = False  # the source sits on A's boundary
    stop = _stop_pixels(a, +1, grid)
    cons = ConstraintSet(cut="negative", obstacle=obst, barriers=barriers,
                         stop_points=stop)
    if metric.is_lifted:
        src = [(b_px[0], b_px[1], theta_b)]
    else:
        src = [b_px]
    dmap = solve(metric, src, cons, config.stencil_radius)
    if dmap.reached is None:
        raise TopologyError(
            "step II: a is unreachable (A too large or barriers blocking)")
    if metric.is_lifted:
        x, y, k = dmap.reached
        start = (x, y, 2.0 * math.pi * k / metric.n_theta)
        closure = [a[0], a[1], theta_a]
    else:
        start = dmap.reached
        closure = [a[0], a[1]]
    path = backtrack(dmap, metric, start)
    verts = np.vstack([path.vertices, closure])
    verts[0, 0], verts[0, 1] = b[0], b[1]  # exact crossing replaces the pixel
    return GeodesicPath(verts, closed=False, lifted=metric.is_lifted), dmap


def concatenate(gamma: GeodesicPath, gba: GeodesicPath,
                spacing: float = 1.0) -> GeodesicPath:
    """C = Gamma_{a,b} followed by G_{b,a}; when a = b the second path is
    already the whole closed contour."""
    g1 = gamma.spatial()
    g2 = gba.spatial()
    if len(g1) < 2:
        return GeodesicPath(g2, closed=True)
    if np.hypot(*(g1[-1] - g2[0])) > spacing + 1e-6:
        raise NumericalError("concatenation endpoints disagree beyond h")
    if np.hypot(*(g1[0] - g2[-1])) > spacing + 1e-6:
        raise NumericalError("contour closure endpoints disagree beyond h")
    verts = np.vstack([g1, g2[1:]])
    return GeodesicPath(verts, closed=True)


def lift_endpoints(q, a, b, potential: np.ndarray, n_theta: int) -> tuple:
    """Orientations for the lifted solves: theta_q = argmin of P(q, .) over
    (0, pi); theta_a / theta_b over (-pi, 0); ties resolved toward the
    angle nearest pi/2 (resp. -pi/2)."""
    def argmin_theta(pt, lo, hi, pref):
        px = int(round(pt[0]))
        py = int(round(pt[1]))
        best = None
        for k in range(n_theta):
            th = 2.0 * math.pi * k / n_theta
            signed = th if th <= math.pi else th - 2.0 * math.pi
            if not (lo < signed < hi):
                continue
            key = (float(potential[py, px, k]), abs(signed - pref), k)
            if best is None or key < best[0]:
                best = (key, th)
        if best is None:
            raise ParameterError("empty orientation interval")
        return best[1]

    theta_q = argmin_theta(q, 0.0, math.pi, math.pi / 2)
    theta_a = argmin_theta(a, -math.pi, 0.0, -math.pi / 2)
    theta_b = argmin_theta(b, -math.pi, 0.0, -math.pi / 2)
    return theta_q, theta_a, theta_b


def winding_number(ring: np.ndarray, pt) -> int:
    """Winding number of a closed polyline around pt (positive shoelace
    orientation counts +1)."""
    x, y = float(pt[0]), float(pt[1])
    wn = 0
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        if y1 <= y:
            if y2 > y and (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) > 0:
                wn += 1
        elif y2 <= y and (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) < 0:
            wn -= 1
    return wn


# ---------------------------------------------------------------------------
# full pipelines


def _seed_to_z(seed) -> tuple:
    arr = np.atleast_2d(np.asarray(seed, dtype=np.float64))
    if arr.shape[0] == 1:
        return (int(round(arr[0, 0])), int(round(arr[0, 1]))), arr
    centroid = arr.mean(axis=0)
    d = np.hypot(arr[:, 0] - centroid[0], arr[:, 1] - centroid[1])
    zi = int(np.argmin(d))
    return (int(round(arr[zi, 0])), int(round(arr[zi, 1]))), arr


def segment(img: Image, seed, config: DualCutConfig | None = None,
            barriers: np.ndarray | None = None,
            feats: EdgeFeatures | None = None) -> SegmentationResult:
    """End-to-end dual-cut segmentation from a landmark point or a
    foreground scribble."""
    config = config or DualCutConfig()
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    z, seed_pts = _seed_to_z(seed)
    grid = GridGeometry(img.width, img.height, 1.0, z)
    if feats is None:
        feats = compute_edge_features(img, config.sigma)
    timings["features"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    hom = homogeneity_field(img, feats.g, seed_pts, config.region_params(),
                            grid, barriers)
    timings["region"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    omega = (omega_from_features(feats, config.lam)
             if config.metric == "aq" else None)
    base = build_base_metric(feats, config, grid, omega)
    qz = compose_qz(base, hom.psi)
    timings["metric"] = (time.perf_counter() - t0) * 1e3

    q = pick_q(hom.boundary, z, grid)
    theta_q = theta_a = theta_b = None

    t0 = time.perf_counter()
    if qz.is_lifted:
        theta_q = lift_endpoints(q, q, q, base.potential, config.n_theta)[0]
    gq, _ = step1(qz, q, grid, config, barriers, theta_q)
    timings["step1"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    a, b, u1, u2, gamma = step2_points(gq, z)
    obstacle = region_a(gamma, grid.shape)
    if qz.is_lifted:
        _, theta_a, theta_b = lift_endpoints(q, a, b, base.potential,
                                             config.n_theta)
    same_ab = np.hypot(a[0] - b[0], a[1] - b[1]) <= 1e-9
    gba, _ = step2(qz, a, b, None if same_ab else obstacle, grid, config,
                   barriers, theta_a, theta_b)
    timings["step2"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    if same_ab:
        contour = GeodesicPath(gba.spatial(), closed=True)
    else:
        contour = concatenate(gamma, gba)
    region = fill_polygon(contour.vertices, img.height, img.width)
    region |= rasterize_polyline(contour.vertices, img.height, img.width)
    timings["rasterize"] = (time.perf_counter() - t0) * 1e3

    if winding_number(contour.vertices, z) != 1:
        raise TopologyError("final contour does not wind once around z")
    return SegmentationResult(contour, region, q, a, b, gq, gamma, gba,
                              hom.theta_z, obstacle, hom, config, timings)


def vcgeo_segment(img: Image, z, a, b, config: DualCutConfig | None = None,
                  barriers: np.ndarray | None = None,
                  feats: EdgeFeatures | None = None) -> SegmentationResult:
    """Appendix baseline: balloon-weighted Riemannian metric, two
    complementary geodesics through the caller-supplied positive-ray
    points a and b (first/last ground-truth crossings)."""
    config = config or DualCutConfig(metric="riem")
    z = (int(round(z[0])), int(round(z[1])))
    grid = GridGeometry(img.width, img.height, 1.0, z)
    if feats is None:
        feats = compute_edge_features(img, config.sigma)
    m = anisotropy_tensor(feats.w, feats.g, -config.alpha, config.alpha_tilde)
    metric = vcgeo_metric(m, z, grid)

    a = (float(a[0]), float(a[1]))
    b = (float(b[0]), float(b[1]))
    for p in (a, b):
        if abs(p[1] - z[1]) > 0.5 or p[0] <= z[0]:
            raise ParameterError("VCGeo expects a and b on the positive ray")
    same_ab = np.hypot(a[0] - b[0], a[1] - b[1]) <= 1e-9

    b_px = (int(round(b[0])), int(round(b[1])))
    a_px = (int(round(a[0])), int(round(a[1])))
    stop_minus = _stop_pixels(a, -1, grid)
    cons_minus = ConstraintSet(cut="positive", barriers=barriers,
                               stop_points=stop_minus)
    dmap1 = solve(metric, [b_px], cons_minus, config.stencil_radius)
    if dmap1.reached is None:
        raise TopologyError("VCGeo: stop set below a unreachable")
    g_minus = backtrack(dmap1, metric, dmap1.reached)
    verts = np.vstack([g_minus.vertices, [a[0], a[1]]])
    verts[0, 0], verts[0, 1] = b
    g_minus = GeodesicPath(verts, closed=same_ab)

    if same_ab:
        contour = GeodesicPath(g_minus.spatial(), closed=True)
        gba = g_minus
        gamma = GeodesicPath(np.array([[a[0], a[1]]]))
    else:
        cons_plus = ConstraintSet(cut="negative", barriers=barriers,
                                  stop_points=np.array([b_px]))
        dmap2 = solve(metric, [a_px], cons_plus, config.stencil_radius)
        if dmap2.reached is None:
            raise TopologyError("VCGeo: b unreachable from a")
        g_plus = backtrack(dmap2, metric, dmap2.reached)
        verts2 = np.vstack([g_plus.vertices])
        verts2[0, 0], verts2[0, 1] = a
        verts2[-1, 0], verts2[-1, 1] = b
        g_plus = GeodesicPath(verts2, closed=False)
        contour = concatenate(g_minus, g_plus)
        gba = g_plus
        gamma = g_minus
    region = fill_polygon(contour.vertices, img.height, img.width)
    region |= rasterize_polyline(contour.vertices, img.height, img.width)
    if winding_number(contour.vertices, z) != 1:
        raise TopologyError("VCGeo contour does not wind once around z")
    empty = np.zeros(grid.shape, dtype=bool)
    return SegmentationResult(contour, region, a_px, a, b, g_minus, gamma,
                              gba, empty, empty, None, config, {})
