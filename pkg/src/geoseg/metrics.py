"""The Finsler metric family used by the geodesic solvers.

Variants:

* ``isotropic``       cost(x, u) = speed(x) |u|
* ``riemannian``      cost(x, u) = sqrt(<u, M(x) u>)
* ``asym_quadratic``  cost(x, u) = sqrt(<u, M(x) u> + <omega(x), u>_+^2)
* ``curvature``       lifted cost(x, theta, (u, nu)) =
                      P(x, theta) (1 + beta nu^2/|u|^2)^varsigma |u|
                      when u is positively parallel to n(theta), else +inf

Every variant carries an optional positive spatial weight field (the
region term psi_z); the effective cost is weight(x) * cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError
from .imagecore import GridGeometry

VARIANTS = ("isotropic", "riemannian", "asym_quadratic", "curvature")


@dataclass(frozen=True)
class MetricField:
    kind: str
    grid: GridGeometry
    speed: np.ndarray | None = None       # (H, W) isotropic cost
    tensor: np.ndarray | None = None      # (H, W, 3) m11, m12, m22
    omega: np.ndarray | None = None       # (H, W, 2)
    potential: np.ndarray | None = None   # (H, W, K) orientation potential
    beta: float = 1.0
    varsigma: float = 0.5
    n_theta: int = 0
    weight: np.ndarray | None = None      # (H, W) psi_z, defaults to 1

    def __post_init__(self):
        if self.kind not in VARIANTS:
            raise ParameterError(f"unknown metric kind {self.kind!r}")
        if self.kind == "isotropic":
            if self.speed is None or (self.speed <= 0).any():
                raise ParameterError("isotropic metric needs a positive speed field")
        elif self.kind in ("riemannian", "asym_quadratic"):
            if self.tensor is None:
                raise ParameterError("tensor field required")
            det = self.tensor[:, :, 0] * self.tensor[:, :, 2] - self.tensor[:, :, 1] ** 2
            if (self.tensor[:, :, 0] <= 0).any() or (det <= 0).any():
                raise ParameterError("metric tensor must be positive-definite")
            if self.kind == "asym_quadratic" and self.omega is None:
                raise ParameterError("asym_quadratic metric needs omega")
        else:
            if self.potential is None or (self.potential <= 0).any():
                raise ParameterError("curvature metric needs a positive potential")
            if self.beta <= 0:
                raise ParameterError("beta must be positive")
            if self.varsigma not in (0.5, 1.0):
                raise ParameterError("varsigma must be 0.5 or 1.0")
            object.__setattr__(self, "n_theta", self.potential.shape[2])
        if self.weight is not None and (self.weight <= 0).any():
            raise ParameterError("weight field must be positive")

    # -- helpers ------------------------------------------------------------

    @property
    def is_lifted(self) -> bool:
        return self.kind == "curvature"

    def weight_at(self, ix: int, iy: int) -> float:
        return 1.0 if self.weight is None else float(self.weight[iy, ix])

    def _pixel(self, x: float, y: float) -> tuple[int, int]:
        ix = min(max(int(round(x)), 0), self.grid.width - 1)
        iy = min(max(int(round(y)), 0), self.grid.height - 1)
        return ix, iy

    # -- evaluation ---------------------------------------------------------

    def eval(self, point, u) -> float:
        """Metric cost of tangent u at a grid point.

        2D variants take point=(x, y), u=(ux, uy). The curvature variant
        takes point=(x, y, theta), u=(ux, uy, nu) and returns +inf for
        tangents whose spatial part is not positively parallel to n(theta).
        """
        if self.kind == "curvature":
            x, y, theta = point
            ux, uy, nu = u
            ix, iy = self._pixel(x, y)
            k = int(round(theta / (2.0 * math.pi / self.n_theta))) % self.n_theta
            w = self.weight_at(ix, iy) * float(self.potential[iy, ix, k])
            sn = math.hypot(ux, uy)
            if sn == 0.0:
                if nu == 0.0:
                    return 0.0
                if self.varsigma == 0.5:
                    return w * math.sqrt(self.beta) * abs(nu)
                return math.inf
            th = 2.0 * math.pi * k / self.n_theta
            cross = ux * math.sin(th) - uy * math.cos(th)
            dot = ux * math.cos(th) + uy * math.sin(th)
            if abs(cross) > 1e-9 * sn or dot <= 0.0:
                return math.inf
            if self.varsigma == 0.5:
                return w * math.sqrt(sn * sn + self.beta * nu * nu)
            return w * (sn + self.beta * nu * nu / sn)

        x, y = point
        ux, uy = u
        ix, iy = self._pixel(x, y)
        w = self.weight_at(ix, iy)
        if self.kind == "isotropic":
            return w * float(self.speed[iy, ix]) * math.hypot(ux, uy)
        m11, m12, m22 = self.tensor[iy, ix]
        q = m11 * ux * ux + 2.0 * m12 * ux * uy + m22 * uy * uy
        if self.kind == "asym_quadratic":
            d = float(self.omega[iy, ix, 0]) * ux + float(self.omega[iy, ix, 1]) * uy
            if d > 0.0:
                q += d * d
        return w * math.sqrt(q)

    # -- diagnostics ----------------------------------------------------------

    def symmetry_ratio(self, point, samples: int = 256) -> float:
        """max over sampled unit directions of F(x, u) / F(x, -u)."""
        ratios = []
        for ang in np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False):
            u = (math.cos(ang), math.sin(ang))
            f = self.eval(point, u)
            b = self.eval(point, (-u[0], -u[1]))
            if b > 0:
                ratios.append(f / b)
        return max(ratios)

    def anisotropy_ratio(self, point, samples: int = 256) -> float:
        """max/min of F over sampled unit directions."""
        vals = [self.eval(point, (math.cos(a), math.sin(a)))
                for a in np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)]
        return max(vals) / min(vals)

    def is_symmetric(self, point, samples: int = 256, tol: float = 1e-12) -> bool:
        return self.symmetry_ratio(point, samples) <= 1.0 + tol


# ---------------------------------------------------------------------------
# constructors


def isotropic_metric(speed: np.ndarray, grid: GridGeometry) -> MetricField:
    return MetricField("isotropic", grid, speed=np.asarray(speed, dtype=np.float64))


def riemannian_metric(tensor: np.ndarray, grid: GridGeometry) -> MetricField:
    return MetricField("riemannian", grid, tensor=np.asarray(tensor, dtype=np.float64))


def asym_quadratic_metric(tensor: np.ndarray, omega: np.ndarray,
                          grid: GridGeometry) -> MetricField:
    return MetricField("asym_quadratic", grid,
                       tensor=np.asarray(tensor, dtype=np.float64),
                       omega=np.asarray(omega, dtype=np.float64))


def curvature_metric(potential: np.ndarray, beta: float, varsigma: float,
                     grid: GridGeometry) -> MetricField:
    return MetricField("curvature", grid,
                       potential=np.asarray(potential, dtype=np.float64),
                       beta=float(beta), varsigma=float(varsigma))


def vcgeo_metric(tensor: np.ndarray, z: tuple[float, float],
                 grid: GridGeometry) -> MetricField:
    """Riemannian metric with the balloon weight 1/max(|x - z|, h)."""
    if not grid.contains(*z):
        raise ParameterError("z must lie inside the grid")
    ys, xs = np.mgrid[0 : grid.height, 0 : grid.width]
    r = np.hypot(xs - z[0], ys - z[1])
    w = 1.0 / np.maximum(r, grid.spacing)
    return MetricField("riemannian", grid,
                       tensor=np.asarray(tensor, dtype=np.float64), weight=w)


def compose_qz(base: MetricField, psi: np.ndarray) -> MetricField:
    """Attach (multiply in) the region weight psi_z."""
    psi = np.asarray(psi, dtype=np.float64)
    if (psi <= 0).any():
        raise ParameterError("psi must be positive")
    w = psi if base.weight is None else base.weight * psi
    return replace(base, weight=w)
