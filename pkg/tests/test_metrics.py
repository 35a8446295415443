import math

import numpy as np
import pytest

from geoseg.errors import ParameterError
from geoseg.imagecore import GridGeometry
from geoseg.metrics import (MetricField, asym_quadratic_metric, compose_qz,
                            curvature_metric, isotropic_metric,
                            riemannian_metric, vcgeo_metric)


def _grid(w=8, h=8, origin=(4, 4)):
    return GridGeometry(w, h, 1.0, origin)


def _id_tensor(h, w):
    t = np.zeros((h, w, 3))
    t[:, :, 0] = 1.0
    t[:, :, 2] = 1.0
    return t


def test_asym_quadratic_positive_part():
    t = _id_tensor(8, 8)
    om = np.zeros((8, 8, 2))
    c = 1.5
    om[:, :, 0] = c
    m = asym_quadratic_metric(t, om, _grid())
    assert abs(m.eval((3, 3), (1.0, 0.0)) - math.sqrt(1 + c * c)) < 1e-15
    assert abs(m.eval((3, 3), (-1.0, 0.0)) - 1.0) < 1e-15


def test_asym_reduces_to_riemannian_with_zero_omega():
    rng = np.random.default_rng(0)
    t = _id_tensor(8, 8)
    t[:, :, 0] += rng.random((8, 8))
    t[:, :, 2] += rng.random((8, 8))
    aq = asym_quadratic_metric(t, np.zeros((8, 8, 2)), _grid())
    rm = riemannian_metric(t, _grid())
    for _ in range(50):
        x = tuple(rng.integers(0, 8, 2))
        u = tuple(rng.normal(0, 1, 2))
        assert aq.eval(x, u) == rm.eval(x, u)


def test_curvature_zero_nu_reduces_to_potential_norm():
    pot = np.full((8, 8, 16), 0.7)
    m = curvature_metric(pot, 5.0, 0.5, _grid())
    th = 2 * math.pi * 3 / 16
    u = (2.0 * math.cos(th), 2.0 * math.sin(th), 0.0)
    assert abs(m.eval((4, 4, th), u) - 0.7 * 2.0) < 1e-12


def test_curvature_inadmissible_direction_infinite():
    pot = np.full((4, 4, 8), 1.0)
    m = curvature_metric(pot, 2.0, 0.5, _grid(4, 4, (2, 2)))
    assert m.eval((1, 1, 0.0), (0.0, 1.0, 0.0)) == math.inf
    assert m.eval((1, 1, 0.0), (-1.0, 0.0, 0.0)) == math.inf


def test_curvature_elastica_pure_rotation_infinite():
    pot = np.full((4, 4, 8), 1.0)
    m_el = curvature_metric(pot, 2.0, 1.0, _grid(4, 4, (2, 2)))
    m_rs = curvature_metric(pot, 2.0, 0.5, _grid(4, 4, (2, 2)))
    assert m_el.eval((1, 1, 0.0), (0.0, 0.0, 0.5)) == math.inf
    assert abs(m_rs.eval((1, 1, 0.0), (0.0, 0.0, 0.5))
               - math.sqrt(2.0) * 0.5) < 1e-12


def test_one_homogeneity_all_variants():
    rng = np.random.default_rng(1)
    grid = _grid()
    spd = 0.5 + rng.random((8, 8))
    t = _id_tensor(8, 8)
    t[:, :, 0] += rng.random((8, 8))
    om = rng.normal(0, 1, (8, 8, 2))
    pot = 0.1 + rng.random((8, 8, 12))
    metrics = [isotropic_metric(spd, grid), riemannian_metric(t, grid),
               asym_quadratic_metric(t, om, grid),
               curvature_metric(pot, 3.0, 0.5, grid),
               curvature_metric(pot, 3.0, 1.0, grid)]
    for _ in range(1000):
        mi = metrics[rng.integers(0, len(metrics))]
        s = float(rng.random() * 5 + 1e-3)
        if mi.is_lifted:
            kk = rng.integers(0, 12)
            th = 2 * math.pi * kk / 12
            sp = float(rng.random() * 2)
            nu = float(rng.normal())
            x = (int(rng.integers(0, 8)), int(rng.integers(0, 8)), th)
            u = (sp * math.cos(th), sp * math.sin(th), nu)
            su = (s * u[0], s * u[1], s * u[2])
        else:
            x = (int(rng.integers(0, 8)), int(rng.integers(0, 8)))
            u = (float(rng.normal()), float(rng.normal()))
            su = (s * u[0], s * u[1])
        f = mi.eval(x, u)
        fs = mi.eval(x, su)
        if math.isinf(f):
            assert math.isinf(fs)
        else:
            assert abs(fs - s * f) <= 1e-12 * max(1.0, abs(s * f))


def test_triangle_inequality_spatial_variants():
    rng = np.random.default_rng(2)
    grid = _grid()
    t = _id_tensor(8, 8)
    t[:, :, 0] += rng.random((8, 8)) * 3
    om = rng.normal(0, 1, (8, 8, 2))
    m = asym_quadratic_metric(t, om, grid)
    for _ in range(300):
        x = tuple(rng.integers(0, 8, 2))
        u = rng.normal(0, 1, 2)
        v = rng.normal(0, 1, 2)
        assert m.eval(x, tuple(u + v)) <= m.eval(x, tuple(u)) + m.eval(x, tuple(v)) + 1e-12


def test_aq_lower_bound_and_equality_condition():
    rng = np.random.default_rng(3)
    grid = _grid()
    t = _id_tensor(8, 8)
    om = rng.normal(0, 2, (8, 8, 2))
    aq = asym_quadratic_metric(t, om, grid)
    rm = riemannian_metric(t, grid)
    for _ in range(300):
        x = tuple(int(v) for v in rng.integers(0, 8, 2))
        u = tuple(rng.normal(0, 1, 2))
        d = om[x[1], x[0], 0] * u[0] + om[x[1], x[0], 1] * u[1]
        fa, fr = aq.eval(x, u), rm.eval(x, u)
        assert fa >= fr - 1e-15
        if d <= 0:
            assert fa == fr


def test_curvature_monotone_in_nu_and_beta():
    rng = np.random.default_rng(4)
    grid = _grid()
    pot = 0.2 + rng.random((8, 8, 12))
    for vs in (0.5, 1.0):
        m1 = curvature_metric(pot, 2.0, vs, grid)
        m2 = curvature_metric(pot, 4.0, vs, grid)
        for _ in range(300):
            kk = rng.integers(0, 12)
            th = 2 * math.pi * kk / 12
            x = (int(rng.integers(0, 8)), int(rng.integers(0, 8)), th)
            sp = 0.2 + rng.random()
            nu1, nu2 = sorted(abs(rng.normal(0, 1, 2)))
            u1 = (sp * math.cos(th), sp * math.sin(th), nu1)
            u2 = (sp * math.cos(th), sp * math.sin(th), nu2)
            assert m1.eval(x, u2) >= m1.eval(x, u1) - 1e-12
            assert m2.eval(x, u1) >= m1.eval(x, u1) - 1e-12


def test_symmetry_and_anisotropy_diagnostics():
    grid = _grid()
    rm = riemannian_metric(_id_tensor(8, 8), grid)
    assert abs(rm.symmetry_ratio((4, 4)) - 1.0) < 1e-12
    assert abs(rm.anisotropy_ratio((4, 4)) - 1.0) < 1e-12
    assert rm.is_symmetric((4, 4))

    t = np.zeros((8, 8, 3))
    t[:, :, 0] = math.exp(-7.0)
    t[:, :, 2] = 1.0
    rm2 = riemannian_metric(t, grid)
    # sampled max/min ratio approaches e^{3.5}
    assert abs(rm2.anisotropy_ratio((4, 4), samples=720) - math.exp(3.5)) < 1e-2

    om = np.zeros((8, 8, 2))
    om[:, :, 0] = 2.0
    aq = asym_quadratic_metric(_id_tensor(8, 8), om, grid)
    assert abs(aq.symmetry_ratio((4, 4), samples=720) - math.sqrt(5.0)) < 1e-3
    assert not aq.is_symmetric((4, 4))


def test_vcgeo_metric_balloon_weight():
    grid = _grid(16, 16, (8, 8))
    m = vcgeo_metric(_id_tensor(16, 16), (8, 8), grid)
    assert abs(m.eval((12, 8), (0.0, 1.0)) - 0.25) < 1e-15
    assert abs(m.eval((8, 8), (1.0, 0.0)) - 1.0) < 1e-15  # pole regularized to 1/h
    # weight strictly decreasing along a ray beyond radius h
    vals = [m.eval((8 + r, 8), (1.0, 0.0)) for r in range(1, 7)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_compose_qz():
    rng = np.random.default_rng(5)
    grid = _grid()
    spd = 0.5 + rng.random((8, 8))
    base = isotropic_metric(spd, grid)
    assert compose_qz(base, np.ones((8, 8))).eval((3, 2), (1.0, 1.0)) == \
        base.eval((3, 2), (1.0, 1.0))
    doubled = compose_qz(base, np.full((8, 8), 2.0))
    psi = 0.1 + rng.random((8, 8))
    comp = compose_qz(base, psi)
    for _ in range(100):
        x = tuple(int(v) for v in rng.integers(0, 8, 2))
        u = tuple(rng.normal(0, 1, 2))
        assert abs(doubled.eval(x, u) - 2 * base.eval(x, u)) < 1e-12
        assert abs(comp.eval(x, u) - psi[x[1], x[0]] * base.eval(x, u)) < 1e-12


def test_metric_validation():
    grid = _grid()
    with pytest.raises(ParameterError):
        isotropic_metric(np.zeros((8, 8)), grid)
    bad = _id_tensor(8, 8)
    bad[3, 3] = [1.0, 2.0, 1.0]  # det < 0
    with pytest.raises(ParameterError):
        riemannian_metric(bad, grid)
    with pytest.raises(ParameterError):
        curvature_metric(np.ones((8, 8, 8)), 1.0, 0.7, grid)
    with pytest.raises(ParameterError):
        compose_qz(isotropic_metric(np.ones((8, 8)), grid), np.zeros((8, 8)))
