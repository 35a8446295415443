"""Constrained fast-marching solver and geodesic back-tracking.

The solver is a single-pass label-setting scheme (Dijkstra-like with
semi-Lagrangian simplex updates) over a fixed symmetric stencil of radius
2 (16 directions; radius 3 gives 32). On the orientation-lifted grid the
stencil holds the two forward integer directions nearest to n(theta_k) at
radii 1 and 2 plus in-place rotations.

Cut / obstacle / barrier constraints prune update edges; see
``_kernels.cut_ok`` for the exact ray-crossing rule.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import NumericalError, ParameterError
from .imagecore import GridGeometry, OrientedGridGeometry
from .metrics import MetricField

DEFAULT_STENCIL_RADIUS = 2


# ---------------------------------------------------------------------------
# stencils


def stencil_offsets(radius: int = DEFAULT_STENCIL_RADIUS) -> np.ndarray:
    """Coprime integer offsets with infinity-norm <= radius, sorted by angle."""
    if radius < 1:
        raise ParameterError("stencil radius must be >= 1")
    offs = []
    for dx in range(-radius, radius + 1):
        for dy in range(-radius, radius + 1):
            if dx == 0 and dy == 0:
                continue
            if math.gcd(abs(dx), abs(dy)) != 1:
                continue
            offs.append((dx, dy))
    offs.sort(key=lambda e: math.atan2(e[1], e[0]))
    return np.array(offs, dtype=np.int64)


_R1_DIRS = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
_R2_DIRS = [(2, 1), (1, 2), (-1, 2), (-2, 1), (-2, -1), (-1, -2), (1, -2), (2, -1)]


def _nearest_dir(theta: float, dirs) -> tuple[int, int]:
    best = dirs[0]
    best_d = math.inf
    for d in dirs:
        a = math.atan2(d[1], d[0])
        diff = abs((a - theta + math.pi) % (2.0 * math.pi) - math.pi)
        if diff < best_d - 1e-15:
            best_d = diff
            best = d
    return best


def lifted_spatial_offsets(n_theta: int) -> tuple[np.ndarray, np.ndarray]:
    """Forward integer directions nearest to n(theta_k), at radius 1 and 2."""
    e1 = np.empty((n_theta, 2), dtype=np.int64)
    e2 = np.empty((n_theta, 2), dtype=np.int64)
    for k in range(n_theta):
        th = 2.0 * math.pi * k / n_theta
        e1[k] = _nearest_dir(th, _R1_DIRS)
        e2[k] = _nearest_dir(th, _R2_DIRS)
    return e1, e2


@dataclass(frozen=True)
class Stencil:
    radius: int = DEFAULT_STENCIL_RADIUS
    offsets: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.offsets is None:
            object.__setattr__(self, "offsets", stencil_offsets(self.radius))


# ---------------------------------------------------------------------------
# constraints


_CUT_CODES = {None: 0, "positive": 1, "negative": 2}


@dataclass(frozen=True)
class ConstraintSet:
    """Cut half-axis, obstacle region, barrier pixels and stopping set."""

    cut: str | None = None                      # 'positive' | 'negative'
    obstacle: np.ndarray | None = None          # (H, W) bool
    barriers: np.ndarray | None = None          # (H, W) bool
    stop_points: np.ndarray | None = None       # (Q, 2) int spatial points

    def __post_init__(self):
        if self.cut not in _CUT_CODES:
            raise ParameterError("cut must be None, 'positive' or 'negative'")

    def blocked_mask(self, shape: tuple[int, int]) -> np.ndarray | None:
        m = None
        for part in (self.obstacle, self.barriers):
            if part is None:
                continue
            part = np.asarray(part, dtype=bool)
            if part.shape != shape:
                raise ParameterError("constraint mask shape mismatch")
            m = part if m is None else (m | part)
        return m


EMPTY_CONSTRAINTS = ConstraintSet()


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class DistanceMap:
    grid: GridGeometry
    values: np.ndarray                        # (H, W) or (H, W, K)
    state: np.ndarray                         # matching uint8, 2 = accepted
    sources: np.ndarray                       # (S, 2) or (S, 3) float points
    constraints: ConstraintSet
    stencil_radius: int
    oriented: OrientedGridGeometry | None = None
    reached: tuple | None = None              # first accepted stop point
    parent_a: np.ndarray | None = None        # flat minimizing-simplex data
    parent_b: np.ndarray | None = None
    parent_t: np.ndarray | None = None

    @property
    def lifted(self) -> bool:
        return self.values.ndim == 3

    def value_at(self, point) -> float:
        if self.lifted:
            x, y, theta = point
            k = self.oriented.theta_index(theta)
            return float(self.values[int(round(y)), int(round(x)), k])
        x, y = point
        return float(self.values[int(round(y)), int(round(x))])


@dataclass(frozen=True)
class GeodesicPath:
    """Polyline in continuous grid coordinates, parameterized over [0, 1]
    by cumulative spatial arc length."""

    vertices: np.ndarray            # (N, 2) or (N, 3)
    closed: bool = False
    lifted: bool = False

    @property
    def params(self) -> np.ndarray:
        v = self.vertices[:, :2]
        if len(v) < 2:
            return np.zeros(len(v))
        seg = np.hypot(*(np.diff(v, axis=0).T))
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        total = cum[-1]
        if total == 0.0:
            return np.linspace(0.0, 1.0, len(v))
        return cum / total

    @property
    def length(self) -> float:
        v = self.vertices[:, :2]
        if len(v) < 2:
            return 0.0
        return float(np.hypot(*(np.diff(v, axis=0).T)).sum())

    def spatial(self) -> np.ndarray:
        """(N, 2) projection with consecutive duplicates collapsed."""
        v = np.asarray(self.vertices[:, :2], dtype=np.float64)
        if len(v) < 2:
            return v
        keep = np.ones(len(v), dtype=bool)
        keep[1:] = (np.abs(np.diff(v, axis=0)) > 1e-12).any(axis=1)
        return v[keep]


# ---------------------------------------------------------------------------
# solve


def _metric_arrays_2d(metric: MetricField):
    h, w = metric.grid.shape
    n = h * w
    dummy = np.zeros(1)
    wgt = np.ones(n) if metric.weight is None else metric.weight.astype(np.float64).ravel()
    if metric.kind == "isotropic":
        return 0, metric.speed.astype(np.float64).ravel(), dummy, dummy, dummy, dummy, dummy, wgt
    m = metric.tensor.astype(np.float64)
    m11, m12, m22 = m[:, :, 0].ravel(), m[:, :, 1].ravel(), m[:, :, 2].ravel()
    if metric.kind == "riemannian":
        return 1, dummy, m11, m12, m22, dummy, dummy, wgt
    om = metric.omega.astype(np.float64)
    return 2, dummy, m11, m12, m22, om[:, :, 0].ravel(), om[:, :, 1].ravel(), wgt


def _prep_blocked(metric, constraints):
    h, w = metric.grid.shape
    blocked = constraints.blocked_mask((h, w))
    if blocked is None:
        return np.zeros(1, dtype=np.uint8), 0, None
    return blocked.astype(np.uint8).ravel(), 1, blocked


def _prep_stop(constraints, h, w):
    stop = np.zeros(h * w, dtype=np.uint8)
    early = 0
    if constraints.stop_points is not None and len(constraints.stop_points):
        pts = np.asarray(constraints.stop_points)
        for x, y in pts:
            xi, yi = int(round(x)), int(round(y))
            if 0 <= xi < w and 0 <= yi < h:
                stop[yi * w + xi] = 1
        if stop.any():
            early = 1
    return stop, early


def solve(metric: MetricField, sources, constraints: ConstraintSet | None = None,
          stencil_radius: int = DEFAULT_STENCIL_RADIUS,
          value_cap: float | None = None) -> DistanceMap:
    """Geodesic distance map from the source set under the given metric.

    ``sources`` is a sequence of (x, y) points, or (x, y, theta) for the
    curvature variant. Early termination fires when a stop point is
    accepted; ``value_cap`` halts once the front passes the given value.
    """
    constraints = constraints or EMPTY_CONSTRAINTS
    h, w = metric.grid.shape
    zx, zy = metric.grid.origin
    cut_code = _CUT_CODES[constraints.cut]
    blocked_flat, has_blocked, blocked2d = _prep_blocked(metric, constraints)
    stop_mask, early = _prep_stop(constraints, h, w)
    cap = -1.0 if value_cap is None else float(value_cap)

    srcs = np.atleast_2d(np.asarray(sources, dtype=np.float64))
    if srcs.size == 0:
        raise ParameterError("at least one source required")
    for p in srcs:
        if not metric.grid.contains(p[0], p[1]):
            raise ParameterError(f"source {tuple(p)} outside the grid")
        if blocked2d is not None and blocked2d[int(round(p[1])), int(round(p[0]))]:
            raise ParameterError("source lies in an obstacle/barrier pixel")

    if metric.is_lifted:
        if srcs.shape[1] != 3:
            raise ParameterError("lifted solve needs (x, y, theta) sources")
        kk = metric.n_theta
        og = OrientedGridGeometry(metric.grid, kk)
        src_idx = np.array(
            [(int(round(p[1])) * w + int(round(p[0]))) * kk + og.theta_index(p[2])
             for p in srcs], dtype=np.int64)
        e1, e2 = lifted_spatial_offsets(kk)
        wgt = (np.ones(h * w) if metric.weight is None
               else metric.weight.astype(np.float64).ravel())
        vs_code = 0 if metric.varsigma == 0.5 else 1
        dist, state, reached, pa, pb, pt = K.solve_lifted(
            h, w, kk, metric.potential.astype(np.float64).ravel(), wgt,
            float(metric.beta), vs_code, 2.0 * math.pi / kk, e1, e2, src_idx,
            cut_code, float(zx), float(zy), blocked_flat, has_blocked,
            stop_mask, early, cap)
        reached_pt = None
        if reached >= 0:
            sp, k = divmod(int(reached), kk)
            reached_pt = (sp % w, sp // w, k)
        return DistanceMap(metric.grid, dist.reshape(h, w, kk),
                           state.reshape(h, w, kk), srcs, constraints,
                           stencil_radius, oriented=og, reached=reached_pt,
                           parent_a=pa, parent_b=pb, parent_t=pt)

    if srcs.shape[1] != 2:
        raise ParameterError("2D solve needs (x, y) sources")
    variant, speed, m11, m12, m22, ox, oy, wgt = _metric_arrays_2d(metric)
    offs = stencil_offsets(stencil_radius)
    src_idx = np.array([int(round(p[1])) * w + int(round(p[0])) for p in srcs],
                       dtype=np.int64)
    dist, state, reached, pa, pb, pt = K.solve_2d(
        h, w, variant, speed, m11, m12, m22, ox, oy, wgt, offs, src_idx,
        cut_code, float(zx), float(zy), blocked_flat, has_blocked,
        stop_mask, early, cap)
    reached_pt = None
    if reached >= 0:
        reached_pt = (int(reached) % w, int(reached) // w)
    return DistanceMap(metric.grid, dist.reshape(h, w), state.reshape(h, w),
                       srcs, constraints, stencil_radius, reached=reached_pt,
                       parent_a=pa, parent_b=pb, parent_t=pt)


# ---------------------------------------------------------------------------
# Dijkstra oracle (exact shortest path on the identical pruned stencil graph)


def dijkstra_oracle(metric: MetricField, sources, constraints: ConstraintSet | None = None,
                    stencil_radius: int = DEFAULT_STENCIL_RADIUS) -> DistanceMap:
    if metric.is_lifted:
        raise ParameterError("oracle implemented for 2D metrics only")
    constraints = constraints or EMPTY_CONSTRAINTS
    h, w = metric.grid.shape
    zx, zy = metric.grid.origin
    cut_code = _CUT_CODES[constraints.cut]
    blocked_flat, has_blocked, blocked2d = _prep_blocked(metric, constraints)
    variant, speed, m11, m12, m22, ox, oy, wgt = _metric_arrays_2d(metric)
    offs = stencil_offsets(stencil_radius)
    srcs = np.atleast_2d(np.asarray(sources, dtype=np.float64))
    dist = np.full(h * w, np.inf)
    pa = np.full(h * w, -1, dtype=np.int64)
    heap = []
    for p in srcs:
        if blocked2d is not None and blocked2d[int(round(p[1])), int(round(p[0]))]:
            raise ParameterError("source lies in an obstacle/barrier pixel")
        i = int(round(p[1])) * w + int(round(p[0]))
        dist[i] = 0.0
        heapq.heappush(heap, (0.0, i))
    done = np.zeros(h * w, dtype=bool)
    while heap:
        v, i = heapq.heappop(heap)
        if done[i]:
            continue
        done[i] = True
        xi, yi = i % w, i // w
        for ex, ey in offs:
            xn, yn = xi + ex, yi + ey
            if not (0 <= xn < w and 0 <= yn < h):
                continue
            j = yn * w + xn
            if done[j]:
                continue
            if has_blocked and blocked_flat[j]:
                continue
            # the edge reads from (xi, yi) into (xn, yn): offset -e of j's stencil
            if not K.edge_ok_2d(xn, yn, -ex, -ey, w, h, cut_code, float(zx),
                                float(zy), blocked_flat, has_blocked):
                continue
            cand = v + K._cost_2d(variant, speed, m11, m12, m22, ox, oy, wgt,
                                  j, float(ex), float(ey))
            if cand < dist[j]:
                dist[j] = cand
                pa[j] = i
                heapq.heappush(heap, (cand, j))
    state = np.where(np.isfinite(dist), 2, 0).astype(np.uint8)
    return DistanceMap(metric.grid, dist.reshape(h, w), state.reshape(h, w),
                       srcs, constraints, stencil_radius,
                       parent_a=pa, parent_b=np.full(h * w, -1, dtype=np.int64),
                       parent_t=np.zeros(h * w))


# ---------------------------------------------------------------------------
# back-tracking


def _walk_chain(dmap: DistanceMap, start_idx: int, to_pos) -> list:
    """Walk the recorded minimizing-simplex chain from a flat index down to
    a source; emits the simplex support points (1-t) pos(a) + t pos(b)."""
    if dmap.parent_a is None:
        raise ParameterError("distance map carries no geodesic parents")
    pa, pb, pt = dmap.parent_a, dmap.parent_b, dmap.parent_t
    dist = dmap.values.ravel()
    verts = [to_pos(start_idx)]
    cur = start_idx
    guard = dist.size + 1
    while pa[cur] >= 0:
        guard -= 1
        if guard <= 0:
            raise NumericalError("geodesic parent chain does not terminate")
        a = int(pa[cur])
        b = int(pb[cur])
        t = float(pt[cur])
        if b >= 0 and 0.0 < t < 1.0:
            p1 = np.asarray(to_pos(a), dtype=np.float64)
            p2 = np.asarray(to_pos(b), dtype=np.float64)
            if len(p1) == 3:
                # unwrap the angular coordinate across the period
                d = (p2[2] - p1[2] + math.pi) % (2.0 * math.pi) - math.pi
                p2 = p2.copy()
                p2[2] = p1[2] + d
            sup = (1.0 - t) * p1 + t * p2
            verts.append(tuple(sup))
            # continue from the dominant simplex vertex when it still
            # descends; fall back to the smaller-value vertex otherwise
            dom = b if t >= 0.5 else a
            alt = a if dom == b else b
            cur = dom if dist[dom] < dist[cur] else alt
            # keep consecutive vertices within one stencil step
            nxt = np.asarray(to_pos(cur), dtype=np.float64)
            if np.hypot(nxt[0] - sup[0], nxt[1] - sup[1]) > 1e-9:
                verts.append(tuple(nxt))
        else:
            cur = a
            verts.append(to_pos(cur))
    last = np.asarray(verts[-1], dtype=np.float64)
    src_pos = np.asarray(to_pos(cur), dtype=np.float64)
    if np.abs(last[:2] - src_pos[:2]).max() > 1e-12:
        verts.append(tuple(src_pos))
    verts.reverse()
    return verts


def backtrack(dmap: DistanceMap, metric: MetricField, start) -> GeodesicPath:
    """Trace the geodesic from ``start`` back to the nearest source along
    the solver's recorded steepest-descent simplexes; the returned path
    runs source -> start and is parameterized over [0, 1]."""
    h, w = dmap.grid.shape
    if dmap.lifted:
        kk = dmap.oriented.n_theta
        xi, yi = int(round(start[0])), int(round(start[1]))
        k = dmap.oriented.theta_index(start[2])
        if not np.isfinite(dmap.values[yi, xi, k]):
            raise ParameterError("backtrack start has infinite distance")
        idx = (yi * w + xi) * kk + k

        def to_pos(i):
            sp, kq = divmod(int(i), kk)
            return (float(sp % w), float(sp // w), 2.0 * math.pi * kq / kk)

        verts = _walk_chain(dmap, idx, to_pos)
        return GeodesicPath(np.array(verts), closed=False, lifted=True)

    xi, yi = int(round(start[0])), int(round(start[1]))
    if not np.isfinite(dmap.values[yi, xi]):
        raise ParameterError("backtrack start has infinite distance")
    idx = yi * w + xi

    def to_pos(i):
        return (float(int(i) % w), float(int(i) // w))

    verts = _walk_chain(dmap, idx, to_pos)
    verts = _tighten_2d(np.array(verts), dmap, metric)
    return GeodesicPath(verts, closed=False, lifted=False)


def _tighten_2d(verts: np.ndarray, dmap: DistanceMap, metric: MetricField,
                max_passes: int = 8) -> np.ndarray:
    """Drop interior vertices whenever the direct chord is admissible, no
    longer than a stencil step, and cheaper under the metric; removes the
    staircase zigzag of the discrete descent without ever increasing the
    discrete path cost."""
    if len(verts) < 3:
        return verts
    h, w = dmap.grid.shape
    zx, zy = dmap.grid.origin
    cut_code = _CUT_CODES[dmap.constraints.cut]
    blocked = dmap.constraints.blocked_mask((h, w))
    max_step = math.sqrt(5.0) * dmap.grid.spacing + 1e-9

    def seg_cost(p, q):
        return metric.eval((q[0], q[1]), (q[0] - p[0], q[1] - p[1]))

    def admissible(p, q):
        if not K.cut_ok(p[0], p[1], q[0] - p[0], q[1] - p[1], cut_code,
                        float(zx), float(zy)):
            return False
        if blocked is not None:
            m = max(2, int(4 * np.abs(q - p).max()))
            for s in range(1, m + 1):
                t = s / m
                sx = int(round(p[0] + t * (q[0] - p[0])))
                sy = int(round(p[1] + t * (q[1] - p[1])))
                if blocked[min(max(sy, 0), h - 1), min(max(sx, 0), w - 1)]:
                    return False
        return True

    for _ in range(max_passes):
        changed = False
        kept = [verts[0]]
        i = 1
        n = len(verts)
        while i < n - 1:
            p = kept[-1]
            q = verts[i]
            r = verts[i + 1]
            if (np.hypot(*(r - p)) <= max_step and admissible(p, r)
                    and seg_cost(p, r) <= seg_cost(p, q) + seg_cost(q, r) - 1e-12):
                changed = True
                i += 1  # drop q; r becomes the next candidate vertex
                continue
            kept.append(q)
            i += 1
        kept.append(verts[-1])
        verts = np.array(kept)
        if not changed:
            break
    return verts


def path_cost(metric: MetricField, path: GeodesicPath) -> float:
    """Discrete line integral of the metric along a polyline. Fields are
    sampled at each segment's arrival vertex, matching the solver's
    update rule; the lifted case uses the solver's relaxed direction
    admissibility."""
    v = path.vertices
    total = 0.0
    if metric.is_lifted:
        h, w = metric.grid.shape
        pot = metric.potential.astype(np.float64).ravel()
        wgt = (np.ones(h * w) if metric.weight is None
               else metric.weight.astype(np.float64).ravel())
        vs_code = 0 if metric.varsigma == 0.5 else 1
        kk = metric.n_theta
        for a, b in zip(v[:-1], v[1:]):
            bx = min(max(int(round(b[0])), 0), w - 1)
            by = min(max(int(round(b[1])), 0), h - 1)
            j = by * w + bx
            kidx = int(round(b[2] / (2 * math.pi / kk))) % kk
            total += K._cost_lift(pot, wgt, kk, metric.beta, vs_code, j, kidx,
                                  float(b[0] - a[0]), float(b[1] - a[1]),
                                  _ang_diff(b[2], a[2]))
        return total
    for a, b in zip(v[:-1], v[1:]):
        total += metric.eval((b[0], b[1]), (b[0] - a[0], b[1] - a[1]))
    return total


def _ang_diff(b: float, a: float) -> float:
    return (b - a + math.pi) % (2.0 * math.pi) - math.pi
