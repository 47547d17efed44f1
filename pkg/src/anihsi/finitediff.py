"""Centered and backward finite differences of arbitrary order on Fields.

    centered:     sum_k (-1)^k C(l,k) f(x + (l/2 - k) t)
    non-centered: sum_k (-1)^k C(l,k) f(x - k t)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distance import DEFAULT_SOLVER, rho_lam
from .errors import InputError
from .field import Field
from .profile import AnisotropyProfile

MAX_ORDER = 40


@dataclass(frozen=True)
class DifferenceStencil:
    order: int
    centered: bool
    coefficients: tuple
    multipliers: tuple  # offset = multiplier * t

    @classmethod
    def build(cls, order: int, centered: bool) -> "DifferenceStencil":
        if not isinstance(order, (int, np.integer)) or order < 1:
            raise InputError("difference order must be a positive integer")
        if order > MAX_ORDER:
            raise InputError(f"difference order {order} exceeds {MAX_ORDER}")
        coeffs = tuple((-1) ** k * math.comb(order, k) for k in range(order + 1))
        if centered:
            mult = tuple(order / 2 - k for k in range(order + 1))
        else:
            mult = tuple(-float(k) for k in range(order + 1))
        return cls(int(order), centered, coeffs, mult)


def _apply(stencil: DifferenceStencil, f: Field, t, x):
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    out = 0
    for c, m in zip(stencil.coefficients, stencil.multipliers):
        out = out + c * f(x + m * t)
    return out


def centered_diff(f: Field, t, ell: int, x):
    """Centered difference of order ``ell`` with vector step ``t`` at ``x``.

    ``t`` and ``x`` broadcast against each other (trailing axis n).
    """
    return _apply(DifferenceStencil.build(ell, True), f, t, x)


def noncentered_diff(f: Field, t, ell: int, x):
    """Backward difference sum_k (-1)^k C(ell,k) f(x - k t)."""
    return _apply(DifferenceStencil.build(ell, False), f, t, x)


def diff_bound_probe(a: Field, t, ell: int, x, profile: AnisotropyProfile):
    """|backward diff of a| / [rho^ell(t) / prod_k (1 + rho(x - k t))]^theta.

    The pointwise bound for compactly supported smooth ``a`` says this ratio
    stays bounded over all (x, t).
    """
    if a.support_radius is None:
        raise InputError("diff_bound_probe requires a compactly supported field")
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    lam = profile.lam_array
    num = np.abs(noncentered_diff(a, t, ell, x))
    rt = rho_lam(t, lam, DEFAULT_SOLVER)
    denom_log = ell * np.log(np.where(rt > 0, rt, 1.0))
    for k in range(ell + 1):
        denom_log = denom_log - np.log1p(rho_lam(x - k * t, lam, DEFAULT_SOLVER))
    denom = np.exp(profile.theta * denom_log)
    ratio = np.where(rt > 0, num / denom, 0.0)
    return float(ratio) if np.ndim(ratio) == 0 else ratio
