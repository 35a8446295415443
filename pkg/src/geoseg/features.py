"""Edge appearance, anisotropy and asymmetry features from image gradients.

All features derive from the Jacobian of the Gaussian-smoothed image:
the normalized gradient magnitude g, the structure tensor W = J J^T + Id,
the per-pixel anisotropy tensor M built from W's eigenvectors, the
asymmetry vector field omega, and the orientation potential P over the
lifted grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .imagecore import Image, gaussian_smooth

DEFAULT_SIGMA = 2.0


def jacobian(img: Image, sigma: float) -> np.ndarray:
    """Smoothed per-channel derivatives, shape (H, W, 2, C).

    Rows of the per-pixel 2xC matrix are the x- and y-derivatives of
    G_sigma * I_c (central differences, one-sided at the borders).
    """
    if sigma <= 0:
        raise ParameterError("sigma must be positive")
    smooth = gaussian_smooth(img, sigma)
    h, w, c = smooth.data.shape
    out = np.empty((h, w, 2, c))
    for k in range(c):
        dy, dx = np.gradient(smooth.data[:, :, k])
        out[:, :, 0, k] = dx
        out[:, :, 1, k] = dy
    return out


def edge_magnitude(jac: np.ndarray) -> np.ndarray:
    """Frobenius norm of the Jacobian, normalized so sup g = 1.

    A constant image (zero Jacobian everywhere) maps to g == 0.
    """
    tilde = np.sqrt((jac ** 2).sum(axis=(2, 3)))
    top = tilde.max()
    if top == 0.0:
        return np.zeros_like(tilde)
    return tilde / top


def structure_tensor(jac: np.ndarray) -> np.ndarray:
    """W = J J^T + Id per pixel, stored as (m11, m12, m22)."""
    jx = jac[:, :, 0, :]
    jy = jac[:, :, 1, :]
    w = np.empty(jac.shape[:2] + (3,))
    w[:, :, 0] = (jx * jx).sum(axis=2) + 1.0
    w[:, :, 1] = (jx * jy).sum(axis=2)
    w[:, :, 2] = (jy * jy).sum(axis=2) + 1.0
    return w


def _small_eigvec(w: np.ndarray) -> np.ndarray:
    """Unit eigenvector of each symmetric 2x2 tensor for the smaller
    eigenvalue; (1, 0) when the tensor is (numerically) isotropic."""
    a, b, c = w[:, :, 0], w[:, :, 1], w[:, :, 2]
    half_tr = 0.5 * (a + c)
    disc = np.sqrt(np.maximum(0.25 * (a - c) ** 2 + b * b, 0.0))
    lam_small = half_tr - disc
    # (b, c - lam_small) is orthogonal to the small-eigenvalue eigenvector
    vx = np.where(np.abs(b) > 1e-30, lam_small - c, np.where(a <= c, 1.0, 0.0))
    vy = np.where(np.abs(b) > 1e-30, b, np.where(a <= c, 0.0, 1.0))
    n = np.hypot(vx, vy)
    n = np.where(n == 0.0, 1.0, n)
    return np.stack([vx / n, vy / n], axis=-1)


def anisotropy_tensor(w: np.ndarray, g: np.ndarray, alpha: float,
                      alpha_tilde: float = 0.0) -> np.ndarray:
    """Tensor M = exp(alpha g) v_perp (x) v_perp + exp(alpha_tilde g) v (x) v,
    where v is W's small-eigenvalue eigenvector and v_perp its +90 deg
    rotation. Requires alpha_tilde >= alpha."""
    if alpha_tilde < alpha:
        raise ParameterError("alpha_tilde must be >= alpha")
    v = _small_eigvec(w)
    vx, vy = v[:, :, 0], v[:, :, 1]
    # v_perp = Rot(+pi/2) v = (-vy, vx)
    px, py = -vy, vx
    ea = np.exp(alpha * g)
    eat = np.exp(alpha_tilde * g)
    m = np.empty_like(w)
    m[:, :, 0] = ea * px * px + eat * vx * vx
    m[:, :, 1] = ea * px * py + eat * vx * vy
    m[:, :, 2] = ea * py * py + eat * vy * vy
    return m


def omega_from_varpi(varpi: np.ndarray, lam: float) -> np.ndarray:
    """omega = lam * Rot(pi/2) varpi/|varpi|, zero where varpi vanishes."""
    n = np.hypot(varpi[:, :, 0], varpi[:, :, 1])
    safe = np.where(n == 0.0, 1.0, n)
    omega = np.empty_like(varpi)
    omega[:, :, 0] = -lam * varpi[:, :, 1] / safe
    omega[:, :, 1] = lam * varpi[:, :, 0] / safe
    omega[n == 0.0] = 0.0
    return omega


def asym_vector(img: Image, sigma: float, lam: float) -> np.ndarray:
    """Asymmetry field from the channel-mean smoothed gradient varpi."""
    return omega_from_varpi(jacobian(img, sigma).mean(axis=3), lam)


def mean_gradient(img: Image, sigma: float) -> np.ndarray:
    """varpi: channel-mean of the smoothed gradients, shape (H, W, 2)."""
    return jacobian(img, sigma).mean(axis=3)


def orientation_potential(w: np.ndarray, alpha: float, n_theta: int) -> np.ndarray:
    """P(x, theta_k) = exp(alpha <n_perp, W n_perp>) over theta_k = 2 pi k / n,
    with n(theta) = (cos theta, sin theta); alpha must be negative."""
    if alpha >= 0:
        raise ParameterError("orientation potential requires alpha < 0")
    if n_theta < 4:
        raise ParameterError("n_theta must be at least 4")
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    # n_perp = (-sin, cos): score = s^2 w11 - 2 s c w12 + c^2 w22
    s, c = np.sin(thetas), np.cos(thetas)
    score = (w[:, :, 0, None] * s * s
             - 2.0 * w[:, :, 1, None] * s * c
             + w[:, :, 2, None] * c * c)
    return np.exp(alpha * score)


@dataclass(frozen=True)
class EdgeFeatures:
    """Bundle of the gradient-derived fields used by metric construction."""

    g: np.ndarray        # (H, W) normalized magnitude
    w: np.ndarray        # (H, W, 3) structure tensor
    varpi: np.ndarray    # (H, W, 2) mean smoothed gradient
    sigma: float


def compute_edge_features(img: Image, sigma: float = DEFAULT_SIGMA) -> EdgeFeatures:
    jac = jacobian(img, sigma)
    return EdgeFeatures(
        g=edge_magnitude(jac),
        w=structure_tensor(jac),
        varpi=jac.mean(axis=3),
        sigma=sigma,
    )
