"""Implicit region-homogeneity pipeline.

From a landmark point (or foreground scribble) the stages are: edge
indicator phi, initial shape R0 by thresholded isotropic front
propagation, piecewise-constants shape gradient xi at R0, the connected
sublevel set Theta_z, its outer boundary, the exact Euclidean distance
map D to that boundary, and the region weight psi_z.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DegenerateRegionError, ParameterError
from .eikonal import ConstraintSet, solve
from .imagecore import GridGeometry, Image
from .metrics import isotropic_metric

PSI_SENTINEL = 1e12


@dataclass(frozen=True)
class RegionTermParams:
    mu: float = 0.1
    T: float = 0.5
    tau: float = 5.0
    tau_eps: float = 0.99

    def __post_init__(self):
        if self.mu < 0:
            raise ParameterError("mu must be >= 0")
        if self.T <= 0:
            raise ParameterError("T must be positive")
        if self.tau <= 0:
            raise ParameterError("tau must be positive")
        if not 0.0 < self.tau_eps < 1.0:
            raise ParameterError("tau_eps must lie in (0, 1)")


def edge_indicator(g: np.ndarray, tau: float = 5.0, tau_eps: float = 0.99) -> np.ndarray:
    """phi = exp(tau * g) - tau_eps, strictly positive for tau_eps < 1."""
    if tau <= 0:
        raise ParameterError("tau must be positive")
    if not 0.0 < tau_eps < 1.0:
        raise ParameterError("tau_eps must lie in (0, 1)")
    return np.exp(tau * np.asarray(g, dtype=np.float64)) - tau_eps


def initial_shape(seed, phi: np.ndarray, T: float, grid: GridGeometry,
                  barriers: np.ndarray | None = None) -> np.ndarray:
    """R0 = {U_seed <= T} for the isotropic Eikonal PDE |grad U| = phi.

    ``seed`` is a single (x, y) point or a sequence of points (a scribble,
    all of which become zero-distance sources).
    """
    if T <= 0:
        raise ParameterError("T must be positive")
    seeds = np.atleast_2d(np.asarray(seed, dtype=np.float64))
    metric = isotropic_metric(phi, grid)
    cons = ConstraintSet(barriers=barriers)
    dmap = solve(metric, seeds, cons, value_cap=T)
    return dmap.values <= T


def shape_gradient_pc(img: Image, r0: np.ndarray) -> np.ndarray:
    """Piecewise-constants velocity xi = |I - c1|^2 - |I - c2|^2 with the
    channel means c1, c2 taken over R0 and its complement."""
    r0 = np.asarray(r0, dtype=bool)
    n_in = int(r0.sum())
    if n_in == 0 or n_in == r0.size:
        raise DegenerateRegionError("initial shape is empty or covers the grid")
    data = img.data
    c1 = data[r0].mean(axis=0)
    c2 = data[~r0].mean(axis=0)
    xi = ((data - c1) ** 2).sum(axis=2) - ((data - c2) ** 2).sum(axis=2)
    return xi


def theta_z(xi: np.ndarray, r0: np.ndarray, z) -> np.ndarray:
    """4-connected component of {xi <= 0} union R0 containing z."""
    zx, zy = int(round(z[0])), int(round(z[1]))
    cand = (np.asarray(xi) <= 0.0) | np.asarray(r0, dtype=bool)
    h, w = cand.shape
    if not (0 <= zx < w and 0 <= zy < h):
        raise ParameterError("z outside the grid")
    out = np.zeros_like(cand)
    if not cand[zy, zx]:
        # z always belongs to R0, but guard against inconsistent inputs
        out[zy, zx] = True
        return out
    stack = deque([(zx, zy)])
    out[zy, zx] = True
    while stack:
        x, y = stack.popleft()
        if x > 0 and cand[y, x - 1] and not out[y, x - 1]:
            out[y, x - 1] = True
            stack.append((x - 1, y))
        if x < w - 1 and cand[y, x + 1] and not out[y, x + 1]:
            out[y, x + 1] = True
            stack.append((x + 1, y))
        if y > 0 and cand[y - 1, x] and not out[y - 1, x]:
            out[y - 1, x] = True
            stack.append((x, y - 1))
        if y < h - 1 and cand[y + 1, x] and not out[y + 1, x]:
            out[y + 1, x] = True
            stack.append((x, y + 1))
    return out


_MOORE = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))


def outer_boundary(mask: np.ndarray) -> np.ndarray:
    """Outer boundary pixels of the mask's first component, as a closed
    pixel polyline oriented counter-clockwise (interior on the left);
    boundaries of interior holes are ignored.

    Moore-neighbor tracing: scan the 8-neighborhood clockwise starting
    just past the backtrack pixel; terminate when a (pixel -> pixel) move
    repeats.
    """
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    ys, xs = np.nonzero(mask)
    if len(ys) == 0:
        raise ParameterError("cannot trace the boundary of an empty mask")
    sy, sx = int(ys[0]), int(xs[0])  # topmost, then leftmost

    def at(p):
        return 0 <= p[0] < w and 0 <= p[1] < h and mask[p[1], p[0]]

    contour = [(sx, sy)]
    cur = (sx, sy)
    backtrack = (sx - 1, sy)  # the west neighbor is background by raster order
    seen_moves: set = set()
    while True:
        base = _MOORE.index((backtrack[0] - cur[0], backtrack[1] - cur[1]))
        nxt = None
        for d in range(1, 9):
            idx = (base + d) % 8
            cand = (cur[0] + _MOORE[idx][0], cur[1] + _MOORE[idx][1])
            if at(cand):
                nxt = cand
                pidx = (base + d - 1) % 8
                backtrack = (cur[0] + _MOORE[pidx][0], cur[1] + _MOORE[pidx][1])
                break
        if nxt is None:
            break  # isolated single pixel
        move = (cur, nxt)
        if move in seen_moves:
            break
        seen_moves.add(move)
        cur = nxt
        contour.append(cur)
    if len(contour) > 1 and contour[-1] == contour[0]:
        contour.pop()
    pts = np.array(contour, dtype=np.int64)
    if len(pts) >= 3:
        x, y = pts[:, 0], pts[:, 1]
        area2 = float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        if area2 < 0:
            pts = pts[::-1].copy()
    return pts


def distance_to_boundary(boundary: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Exact Euclidean distance from every pixel to the nearest boundary
    pixel (two-pass squared-distance transform)."""
    boundary = np.asarray(boundary)
    if boundary.size == 0:
        raise ParameterError("boundary must be non-empty")
    sites = np.zeros(shape, dtype=np.uint8)
    sites[boundary[:, 1].astype(int), boundary[:, 0].astype(int)] = 1
    return np.sqrt(K.edt_sq(sites))


def psi_weight(d: np.ndarray, z, mu: float, spacing: float = 1.0) -> np.ndarray:
    """psi_z = exp(mu * D) / max(|x - z|, h), with a large finite sentinel
    at the z pixel itself (the solver treats z as impassable)."""
    if mu < 0:
        raise ParameterError("mu must be >= 0")
    h, w = d.shape
    ys, xs = np.mgrid[0:h, 0:w]
    r = np.hypot(xs - z[0], ys - z[1])
    psi = np.exp(mu * np.asarray(d, dtype=np.float64)) / np.maximum(r, spacing)
    psi[int(round(z[1])), int(round(z[0]))] = PSI_SENTINEL
    return psi


@dataclass(frozen=True)
class HomogeneityField:
    """All region-pipeline intermediates, kept for inspection/UI."""

    phi: np.ndarray
    r0: np.ndarray
    xi: np.ndarray
    theta_z: np.ndarray
    boundary: np.ndarray
    d: np.ndarray
    psi: np.ndarray


def homogeneity_field(img: Image, g: np.ndarray, seed, params: RegionTermParams,
                      grid: GridGeometry,
                      barriers: np.ndarray | None = None) -> HomogeneityField:
    """Run the full region pipeline for landmark z = grid.origin."""
    phi = edge_indicator(g, params.tau, params.tau_eps)
    r0 = initial_shape(seed, phi, params.T, grid, barriers)
    xi = shape_gradient_pc(img, r0)
    th = theta_z(xi, r0, grid.origin)
    boundary = outer_boundary(th)
    d = distance_to_boundary(boundary, th.shape)
    psi = psi_weight(d, grid.origin, params.mu, grid.spacing)
    return HomogeneityField(phi, r0, xi, th, boundary, d, psi)
