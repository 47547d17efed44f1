import numpy as np
import pytest
from scipy.integrate import quad

from anihsi import (GridFunction, GridSpec, KernelSynthesisConfig, PotentialKernel, apply_symbol,
                    convolve, derive_profile, full_symbol_table, gaussian, inversion_residual,
                    kernel_table, sample, sobolev_exponents, sobolev_probe,
                    spectral_inversion_residual, zero_mass_gaussian)
from anihsi.errors import InputError, UnsupportedBranchError
from anihsi.potentials import normalized_bump
from anihsi.spectral import SymbolTable

from oracles import riesz_kernel_1d

ANISO = derive_profile([1.0, 1.5])


@pytest.fixture(scope="module")
def q2():
    return PotentialKernel(ANISO)


@pytest.fixture(scope="module")
def q1():
    return PotentialKernel(derive_profile([0.5]))


def _inverse_symbol(grid, profile):
    s = full_symbol_table(grid, profile).values
    inv = np.zeros_like(s)
    inv[s != 0] = 1.0 / s[s != 0]
    return SymbolTable(grid, inv), SymbolTable(grid, s)


def test_bump_normalization():
    phi = normalized_bump(1.0, 2.0)
    val, _ = quad(lambda t: phi(t) / t, 1.0, 2.0, epsabs=1e-15, epsrel=1e-13)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_one_dimensional_kernel_matches_riesz_form(q1):
    x = np.array([0.3, 1.0, -2.0, 5.0])
    ref = np.array([riesz_kernel_1d(v, 0.5) for v in x])
    assert np.max(np.abs(q1(x[:, None]) / ref - 1)) <= 5e-4


def test_homogeneity_and_evenness(q2):
    rng = np.random.default_rng(3)
    x = rng.uniform(-2, 2, (20, 2))
    base = q2(x)
    scaled = q2(2.0 ** ANISO.lam_array * x)
    assert np.max(np.abs(scaled / (base * 2.0 ** (ANISO.alpha_star - 2)) - 1)) <= 1e-2
    assert np.max(np.abs(q2(-x) / base - 1)) <= 1e-12
    assert np.max(np.abs(q2(x * [1, -1]) / base - 1)) <= 1e-12


def test_kernel_does_not_depend_on_the_bump(q2):
    other = PotentialKernel(ANISO, config=KernelSynthesisConfig(bump=(0.5, 3.0)))
    x = np.random.default_rng(4).uniform(-2, 2, (20, 2))
    assert np.max(np.abs(other(x) / q2(x) - 1)) <= 3e-2


def test_branch_guard_and_singular_point(q2):
    with pytest.raises(UnsupportedBranchError):
        PotentialKernel(derive_profile([1.0]))
    with pytest.raises(UnsupportedBranchError):
        PotentialKernel(derive_profile([2.0, 2.0]))
    with pytest.raises(InputError):
        q2(np.zeros(2))


def test_cell_average_of_one_dimensional_kernel(q1):
    h = 0.25
    exact = riesz_kernel_1d(1.0, 0.5) * 2 * (h / 2) ** 0.5 / 0.5 / h
    assert q1.cell_average(np.zeros(1), h) == pytest.approx(exact, rel=1e-4)


def test_convolution_of_zero_and_translation(q2):
    grid = GridSpec(2, 4.0, 16)
    table = kernel_table(q2, grid)
    zero = convolve(q2, GridFunction(grid, np.zeros(grid.shape)), table)
    assert np.all(zero.values == 0)
    vals = np.zeros(grid.shape)
    vals[5:8, 6:9] = np.random.default_rng(0).normal(size=(3, 3))
    shifted = np.roll(vals, (2, 1), axis=(0, 1))
    a = convolve(q2, GridFunction(grid, vals), table).values
    b = convolve(q2, GridFunction(grid, shifted), table).values
    # linear convolution: equivariant away from the box edge it would cross
    assert np.allclose(b[2:, 1:], a[:-2, :-1], rtol=0, atol=1e-12 * np.abs(a).max())


def test_convolution_is_linear(q2):
    grid = GridSpec(2, 4.0, 16)
    table = kernel_table(q2, grid)
    rng = np.random.default_rng(1)
    u, v = (GridFunction(grid, rng.normal(size=grid.shape)) for _ in range(2))
    lhs = convolve(q2, u * 2.0 + v, table).values
    rhs = 2.0 * convolve(q2, u, table).values + convolve(q2, v, table).values
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_kernel_synthesis_matches_inverse_symbol(q2):
    # Q * phi against F^-1((1/S) phi^) with the mean killed; phi has zero mass
    grid = GridSpec(2, 8.0, 64)
    phi = sample(zero_mass_gaussian(1.0, 2), grid)
    inv, _ = _inverse_symbol(grid, ANISO)
    ref = apply_symbol(phi, inv).values
    got = convolve(q2, phi).values
    assert np.abs(got - ref).max() / np.abs(ref).max() <= 5e-2


def test_operator_undoes_potential(q2):
    grid = GridSpec(2, 8.0, 64)
    phi = sample(zero_mass_gaussian(1.0, 2), grid)
    _, sym = _inverse_symbol(grid, ANISO)
    back = apply_symbol(convolve(q2, phi), sym).values
    inner = (slice(16, 48),) * 2
    assert np.abs(back - phi.values)[inner].max() / np.abs(phi.values).max() <= 5e-2


def test_potential_undoes_operator_small_box(q2):
    res = inversion_residual(gaussian(1.0, 2), ANISO, GridSpec(2, 8.0, 32), q2)
    assert res < 0.1


def test_spectral_inversion_is_exact():
    assert spectral_inversion_residual(gaussian(1.0, 2), ANISO, GridSpec(2, 8.0, 32)) <= 1e-10


# ---------------------------------------------------------------- exponents

def test_classical_one_dimensional_sobolev():
    prof = derive_profile([0.5])
    ex = sobolev_exponents(prof, [1.5], 0.5 - 1)
    assert ex.feasible
    assert 1 / ex.q[0] == pytest.approx(1 / 1.5 - 0.5, rel=1e-12)
    assert ex.q[0] == pytest.approx(6.0, rel=1e-12)


def test_boundary_is_infeasible():
    prof = derive_profile([0.5])
    # 1/(alpha p) = 1 exactly equals the deficit
    assert not sobolev_exponents(prof, [2.0], 0.5 - 1).feasible


@pytest.mark.parametrize("p", [(1.2, 1.2), (1.1, 1.6), (1.3, 1.05)])
def test_exponent_relation_holds(p):
    ex = sobolev_exponents(ANISO, p, ANISO.alpha_star - 2)
    assert ex.feasible
    alpha = ANISO.alpha_array
    lhs = np.sum(1 / (alpha * np.array(ex.q)))
    rhs = np.sum(1 / (alpha * np.array(p))) - 1
    assert lhs == pytest.approx(rhs, abs=1e-12)
    assert all(q > pi for q, pi in zip(ex.q, p))


def test_exponents_reject_infinite_p():
    with pytest.raises(InputError):
        sobolev_exponents(ANISO, [np.inf, 2.0], -0.8)


def test_sobolev_probe_dilation_invariance(q2):
    p = (1.2, 1.2)
    q = sobolev_exponents(ANISO, p, ANISO.alpha_star - 2).q
    grid = GridSpec(2, 8.0, 64)
    base = zero_mass_gaussian(1.0, 2)
    lam = ANISO.lam_array
    fixtures = [GridFunction(grid, base(s ** lam * grid.points())) for s in (1.0, 1.5, 2.0)]
    fixtures.append(GridFunction(grid, np.zeros(grid.shape)))
    rep = sobolev_probe(q2, p, q, fixtures)
    assert rep.skipped == 1
    r = np.array(rep.ratios)
    assert np.ptp(r) <= 1e-2 * r.mean()


def test_sobolev_probe_random_fixtures(q2):
    p = (1.2, 1.2)
    q = sobolev_exponents(ANISO, p, ANISO.alpha_star - 2).q
    grid = GridSpec(2, 6.0, 32)
    rng = np.random.default_rng(7)
    fixtures = []
    for _ in range(20):
        c = rng.uniform(-2, 2, 2)
        a = rng.uniform(0.5, 2.0)
        fixtures.append(sample(gaussian(a, 2, c), grid) * rng.normal())
    rep = sobolev_probe(q2, p, q, fixtures)
    assert len(rep.ratios) == 20 and np.isfinite(rep.max_ratio) and rep.max_ratio > 0
