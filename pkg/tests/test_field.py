import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from anihsi import (GridFunction, GridSpec, bump_1d, constant, gaussian, polynomial, sample,
                    separable, tensor_bump, zero_mass_gaussian)
from anihsi.approx import kernel_mass
from anihsi.errors import InputError
from anihsi.spectral import dft


def test_gaussian_values():
    g = gaussian(1.0, 1)
    assert g(np.zeros(1)) == 1.0
    assert g.ft(np.zeros(1)) == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_gaussian_transform_matches_dft():
    grid = GridSpec(2, 12.0, 128)
    g = gaussian(0.5, 2)
    num = dft(sample(g, grid)).values
    ref = g.ft(grid.dual_points())
    assert np.abs(num - ref).max() / np.abs(ref).max() <= 1e-8


def test_zero_mass_gaussian():
    g = zero_mass_gaussian(1.0, 2)
    assert abs(g.ft(np.zeros(2))) <= 1e-15


def test_bump_1d_shape():
    b = bump_1d(1.0, 2.0)
    assert b(0.0) == 1.0 and b(1.0) == 1.0 and b(2.0) == 0.0 and b(5.0) == 0.0
    assert 0 < b(1.5) < 1
    h = 1e-4
    for edge in (1.0, 2.0):
        assert abs(b(edge + h) - b(edge - h)) / (2 * h) <= 1e-10
    r = np.linspace(0, 3, 301)
    assert np.all(np.diff(b(r)) <= 0)


def test_bump_1d_rejects_bad_interval():
    with pytest.raises(InputError):
        bump_1d(2.0, 1.0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_tensor_bump_has_unit_mass(n):
    assert kernel_mass(tensor_bump(n)) == pytest.approx(1.0, abs=1e-10)
    assert kernel_mass(tensor_bump(n, 0.5)) == pytest.approx(1.0, abs=1e-10)


def test_sample_examples():
    grid = GridSpec(2, 4.0, 16)
    assert np.all(sample(constant(1.0, 2), grid).values == 1.0)
    g = sample(gaussian(1.0, 2), grid)
    assert g.values[8, 8] == 1.0  # node x = 0
    u = lambda s: np.exp(-s * s)
    v = lambda s: np.cos(s)
    sep = sample(separable([u, v]), grid).values
    ax = grid.axis()
    assert np.array_equal(sep, np.outer(u(ax), v(ax)))


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_sample_is_linear(a, b):
    grid = GridSpec(1, 4.0, 16)
    f, g = gaussian(1.0, 1), polynomial({(2,): 1.0}, 1)
    lhs = sample(f.scaled(a) + g.scaled(b), grid).values
    rhs = a * sample(f, grid).values + b * sample(g, grid).values
    assert np.allclose(lhs, rhs, rtol=1e-14, atol=1e-14)


def test_polynomial_degree_is_tracked():
    assert polynomial({(2, 1): 1.0, (0, 0): 3.0}, 2).degree == 3
    assert constant(2.0, 3).degree == 0
    assert (constant(1.0, 1) + polynomial({(1,): 1.0}, 1)).degree == 1
    assert (constant(1.0, 1) + gaussian(1.0, 1)).degree is None


def test_grid_spec_and_csv_roundtrip(tmp_path):
    with pytest.raises(InputError):
        GridSpec(1, 1.0, 5)
    grid = GridSpec(2, 3.0, 8)
    assert grid.h == pytest.approx(0.75)
    dual = grid.dual_axis()
    assert dual[grid.N // 2] == pytest.approx(math.pi / grid.h)  # +Nyquist
    g = sample(gaussian(1.0, 2), grid)
    g.to_csv(tmp_path / "g.csv")
    back = GridFunction.from_csv(tmp_path / "g.csv")
    assert back.grid == grid and np.array_equal(back.values, g.values)


def test_grid_function_rejects_non_finite():
    with pytest.raises(InputError):
        GridFunction(GridSpec(1, 1.0, 4), np.array([0.0, np.nan, 0.0, 0.0]))
