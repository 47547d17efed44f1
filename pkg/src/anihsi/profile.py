"""Anisotropy vector and the scalars derived from it.

All quantities follow from the orders ``alpha = (alpha_1, ..., alpha_n)``:

* ``alpha_star``  harmonic-type mean, ``1/alpha_star = mean(1/alpha_j)``
* ``lam``         dilation weights ``alpha_star / alpha_i`` (they sum to n)
* ``theta``       ``alpha_star / max(alpha)``
* ``gamma``       ``max(alpha) * (1 - sum(1/alpha_j))``
* ``m_cap``       ``floor(gamma)`` for positive gamma, else 0
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InputError

# guards floor() against gamma landing a few ulps below an integer
_FLOOR_SLACK = 1e-12


@dataclass(frozen=True)
class AnisotropyProfile:
    alpha: tuple
    alpha_star: float
    lam: tuple
    theta: float
    gamma: float
    m_cap: int
    min_diff_order: int

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def lam_array(self) -> np.ndarray:
        return np.asarray(self.lam, dtype=float)

    @property
    def alpha_array(self) -> np.ndarray:
        return np.asarray(self.alpha, dtype=float)

    @property
    def default_ell(self) -> int:
        """Half of the default (even) difference order."""
        return self.min_diff_order // 2

    def is_isotropic(self) -> bool:
        return len(set(self.alpha)) == 1

    def to_record(self, tolerance: float = 1e-12) -> dict:
        report = check_admissibility(self, tolerance)
        return {
            "alpha": list(self.alpha),
            "alpha_star": self.alpha_star,
            "lambda": list(self.lam),
            "theta": self.theta,
            "gamma": self.gamma,
            "m_cap": self.m_cap,
            "min_diff_order": self.min_diff_order,
            "valid": report.valid,
            "violating_index": (list(report.violating_index)
                                if report.violating_index is not None else None),
        }


@dataclass(frozen=True)
class AdmissibilityReport:
    valid: bool
    violating_index: Optional[tuple]
    checked_orders: list = field(default_factory=list)
    tolerance: float = 1e-12


def derive_profile(alpha: Sequence[float]) -> AnisotropyProfile:
    """Build the profile for the orders ``alpha``.

    Raises InputError for an empty vector or any nonpositive/non-finite entry.
    """
    a = [float(v) for v in alpha]
    if len(a) == 0:
        raise InputError("alpha must have at least one entry")
    if any(not math.isfinite(v) or v <= 0.0 for v in a):
        raise InputError(f"alpha entries must be finite and positive, got {a}")
    n = len(a)
    inv_sum = math.fsum(1.0 / v for v in a)
    alpha_star = n / inv_sum
    lam = tuple(alpha_star / v for v in a)
    amax = max(a)
    theta = alpha_star / amax
    gamma = amax * (1.0 - inv_sum)
    m_cap = int(math.floor(gamma + _FLOOR_SLACK)) if gamma > 0 else 0
    # smallest even integer strictly above max(alpha)
    two_ell = 2 * (int(math.floor(amax / 2.0)) + 1)
    return AnisotropyProfile(
        alpha=tuple(a),
        alpha_star=alpha_star,
        lam=lam,
        theta=theta,
        gamma=gamma,
        m_cap=m_cap,
        min_diff_order=two_ell,
    )


def _multi_indices(n: int, order: int):
    """All k in N^n with |k| == order, lexicographically ascending."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n), order):
        k = [0] * n
        for i in combo:
            k[i] += 1
        out.append(tuple(k))
    return sorted(out)


def check_admissibility(profile: AnisotropyProfile,
                        tolerance: float = 1e-12) -> AdmissibilityReport:
    """Test the non-resonance condition sum_j (1+k_j)/alpha_j != 1 for |k| < m_cap.

    The condition is vacuous when ``m_cap <= 0``. When violated, the
    lexicographically smallest offending multi-index is reported.
    """
    if tolerance <= 0:
        raise InputError("tolerance must be positive")
    if profile.m_cap <= 0:
        return AdmissibilityReport(True, None, [], tolerance)
    inv = [1.0 / a for a in profile.alpha]
    orders = list(range(profile.m_cap))
    violations = []
    for order in orders:
        for k in _multi_indices(profile.n, order):
            s = math.fsum((1 + kj) * ij for kj, ij in zip(k, inv))
            if abs(s - 1.0) <= tolerance:
                violations.append(k)
    if violations:
        return AdmissibilityReport(False, min(violations), orders, tolerance)
    return AdmissibilityReport(True, None, orders, tolerance)
