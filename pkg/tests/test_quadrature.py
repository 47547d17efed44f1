import math

import numpy as np
import pytest

from anihsi.errors import InputError
from anihsi.quadrature import (anisotropic_sphere_rule, gauss_legendre, lattice_breaks,
                               octant_sphere_rule, panel_rule, refine_breaks, sphere_rule)
from anihsi.radial import RadialSymbolIntegrator, difference_coefficients, symbol_profile

from oracles import diff_coeffs, symbol_constant_1d


def test_panel_rule_integrates_polynomials():
    x, w = panel_rule([0.0, 0.5, 2.0], 6)
    assert np.sum(w * x ** 11) == pytest.approx(2.0 ** 12 / 12, rel=1e-13)


@pytest.mark.parametrize("n,area", [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi)])
def test_sphere_rules_have_the_right_area(n, area):
    _, w = sphere_rule(n, 16)
    assert w.sum() == pytest.approx(area, rel=1e-13)
    if n > 1:
        _, w = octant_sphere_rule(n, 16)
        assert w.sum() == pytest.approx(area, rel=1e-12)


def test_sphere_rule_second_moments():
    for n in (2, 3):
        om, w = sphere_rule(n, 32)
        area = w.sum()
        for i in range(n):
            assert np.sum(w * om[:, i] ** 2) == pytest.approx(area / n, rel=1e-12)


def test_anisotropic_weights_keep_the_area():
    # sum_i lam_i omega_i^2 averages to 1 because sum lam = n
    _, w = anisotropic_sphere_rule(np.array([1.2, 0.8]), 64)
    assert w.sum() == pytest.approx(2 * math.pi, rel=1e-12)
    _, w = anisotropic_sphere_rule(np.array([1.5, 1.0, 0.5]), 32, graded=True)
    assert w.sum() == pytest.approx(4 * math.pi, rel=1e-10)


def test_lattice_is_global():
    a = lattice_breaks(0.3, 5.0, 2)
    b = lattice_breaks(0.3, 1.0, 2)
    c = lattice_breaks(1.0, 5.0, 2)
    assert np.allclose(np.concatenate([b, c[1:]]), a)
    r = refine_breaks([1.0, 2.0], lambda lo, hi: hi - lo, 0.1)
    assert np.all(np.diff(r) <= 0.1 + 1e-12)
    with pytest.raises(InputError):
        octant_sphere_rule(2, 6)


def test_difference_coefficients():
    for ell in (1, 2, 3, 6):
        d = difference_coefficients(ell)
        assert list(d) == diff_coeffs(ell)
        assert d[0] + 2 * d[1:].sum() == 0
    u = np.linspace(-7, 7, 41)
    d = diff_coeffs(2)
    direct = d[0] + 2 * sum(d[j] * np.cos(j * u) for j in (1, 2))
    assert np.allclose(symbol_profile(u, 2), direct, atol=1e-12)


@pytest.mark.parametrize("alpha,ell", [(0.5, 1), (1.5, 1), (1.9, 1), (1.2, 2), (3.3, 2)])
def test_radial_integral_matches_power_law(alpha, ell):
    # in 1-d the radial integral along omega = +1 is half the symbol constant
    rad = RadialSymbolIntegrator(np.array([1.0]), alpha, ell)
    for xi in (0.5, 1.0, 4.0):
        got = 2 * rad.raw(np.array([[xi]]))[0]
        assert got == pytest.approx(symbol_constant_1d(alpha, ell) * xi ** alpha, rel=1e-9)
        got = 2 * rad.normalized(np.array([[1.0]]))[0] * xi ** alpha
        assert got == pytest.approx(symbol_constant_1d(alpha, ell) * xi ** alpha, rel=1e-9)


def test_gauss_legendre_is_cached():
    assert gauss_legendre(12) is gauss_legendre(12)
