import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from anihsi import InputError, check_admissibility, derive_profile

alphas = st.lists(st.floats(0.1, 8.0), min_size=1, max_size=4)


def test_isotropic_collapses():
    p = derive_profile([1.7, 1.7, 1.7])
    assert p.alpha_star == pytest.approx(1.7, abs=1e-15)
    assert p.lam == pytest.approx((1.0, 1.0, 1.0), abs=1e-15)
    assert p.theta == pytest.approx(1.0, abs=1e-15)
    assert p.is_isotropic


def test_two_orders_by_hand():
    p = derive_profile([1.0, 2.0])
    assert p.alpha_star == pytest.approx(4 / 3, rel=1e-15)
    assert p.lam == pytest.approx((4 / 3, 2 / 3), rel=1e-15)
    assert p.theta == pytest.approx(2 / 3, rel=1e-15)
    assert p.min_diff_order == 4


def test_mixed_orders_example():
    p = derive_profile([1.0, 1.5])
    assert p.alpha_star == pytest.approx(1.2, rel=1e-15)
    assert p.lam == pytest.approx((1.2, 0.8), rel=1e-15)
    assert p.default_ell == 1


@pytest.mark.parametrize("bad", [[], [0.0], [-1.0, 2.0], [math.inf], [math.nan]])
def test_rejects_bad_orders(bad):
    with pytest.raises(InputError):
        derive_profile(bad)


@given(alphas)
def test_lambda_sums_to_dimension(a):
    p = derive_profile(a)
    assert math.fsum(p.lam) == pytest.approx(len(a), rel=1e-14)
    assert all(v > 0 for v in p.lam)


@given(alphas)
def test_theta_and_lambda_ordering(a):
    p = derive_profile(a)
    assert p.theta == pytest.approx(p.alpha_star / max(a), rel=1e-14)
    if len(set(a)) > 1:
        assert p.theta <= 1 + 1e-14 <= max(p.lam) + 2e-14


@given(alphas)
def test_gamma_sign_matches_alpha_star(a):
    p = derive_profile(a)
    if abs(p.alpha_star - len(a)) > 1e-9:
        assert (p.gamma > 0) == (p.alpha_star > len(a))


@given(alphas)
def test_min_diff_order_is_smallest_even_above(a):
    p = derive_profile(a)
    m = p.min_diff_order
    assert m % 2 == 0 and m > max(a) and m - 2 <= max(a)


@given(alphas, st.randoms())
def test_permutation_covariance(a, rnd):
    perm = list(range(len(a)))
    rnd.shuffle(perm)
    p, q = derive_profile(a), derive_profile([a[i] for i in perm])
    assert q.lam == pytest.approx(tuple(p.lam[i] for i in perm), rel=1e-13)
    assert q.alpha_star == pytest.approx(p.alpha_star, rel=1e-13)
    assert q.theta == pytest.approx(p.theta, rel=1e-13)
    assert check_admissibility(q).valid == check_admissibility(p).valid


@given(alphas, st.floats(0.1, 10.0))
def test_scale_covariance(a, c):
    p, q = derive_profile(a), derive_profile([c * v for v in a])
    assert q.alpha_star == pytest.approx(c * p.alpha_star, rel=1e-12)
    assert q.lam == pytest.approx(p.lam, rel=1e-12)


def test_admissibility_examples():
    r = check_admissibility(derive_profile([3.0, 6.0]))
    assert not r.valid and r.violating_index == (1, 1)
    p = derive_profile([4.0, 4.0])
    assert p.m_cap == 2 and p.gamma == pytest.approx(2.0)
    assert check_admissibility(p).valid
    r = check_admissibility(derive_profile([1.0, 1.0]))
    assert r.valid and r.checked_orders == []


@given(alphas)
def test_violation_is_a_genuine_equality(a):
    p = derive_profile(a)
    r = check_admissibility(p)
    if p.m_cap <= 0:
        assert r.valid and r.checked_orders == []
    if not r.valid:
        k = r.violating_index
        assert sum(k) < p.m_cap
        assert abs(sum((1 + kj) / aj for kj, aj in zip(k, a)) - 1) <= 1e-12


def test_record_is_json_ready():
    rec = derive_profile([3.0, 6.0]).to_record()
    assert rec["valid"] is False and rec["violating_index"] == [1, 1]
    assert set(rec) >= {"alpha", "alpha_star", "lambda", "theta", "gamma", "m_cap",
                        "min_diff_order", "valid"}
    assert np.allclose(rec["lambda"], [4 / 3, 2 / 3])
