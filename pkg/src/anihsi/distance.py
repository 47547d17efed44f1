"""Anisotropic distance rho(x): the positive root of sum_i x_i^2 rho^(-2 lam_i) = 1.

The residual h(u) = sum_i x_i^2 exp(-2 lam_i u) - 1 in u = log(rho) is convex
and strictly decreasing, so Newton started from the lower bracket
max_i |x_i|^(1/lam_i) climbs monotonically onto the root. The upper bracket
n^(1/(2 min lam)) * max_i |x_i|^(1/lam_i) is kept as a safeguard.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .errors import InputError, SolverError
from .profile import AnisotropyProfile


@dataclass(frozen=True)
class DistanceSolverConfig:
    abs_tolerance: float = 1e-12
    max_iterations: int = 200

    def __post_init__(self):
        if not self.abs_tolerance > 0:
            raise InputError("abs_tolerance must be positive")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")


DEFAULT_SOLVER = DistanceSolverConfig()


def _log_bracket(x, lam):
    with np.errstate(divide="ignore"):
        logx = np.log(np.abs(x))
    lo = np.max(logx / lam, axis=-1)
    return logx, lo, lo + math.log(lam.size) / (2.0 * lam.min())


def rho_bracket(x, lam):
    """Lower/upper bracket of rho for points ``x`` (shape (..., n))."""
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float)
    _, lo, hi = _log_bracket(x, lam)
    return np.exp(lo), np.exp(hi)


def rho_lam(x, lam, config: DistanceSolverConfig = DEFAULT_SOLVER) -> np.ndarray:
    """Vectorized anisotropic distance for dilation weights ``lam``.

    ``x`` has shape (..., n); returns shape (...). rho(0) is 0 by convention.
    Newton runs on u = log rho with every term kept in log space, so
    subnormal and very large coordinates are handled without overflow.
    """
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if x.shape[-1] != lam.size:
        raise InputError(f"point dimension {x.shape[-1]} != profile dimension {lam.size}")
    logx, lo, hi = _log_bracket(x, lam)
    out = np.zeros(lo.shape)
    nz = np.isfinite(lo)
    if not np.any(nz):
        return out
    logx2 = 2.0 * logx[nz]
    if np.all(lam == lam[0]):
        # every weight equal: closed form
        ax = np.abs(x[nz])
        m = ax.max(axis=-1)
        norm = m * np.sqrt(((ax / m[:, None]) ** 2).sum(axis=-1))
        with np.errstate(over="ignore"):
            out[nz] = norm if lam[0] == 1.0 else norm ** (1.0 / lam[0])
        return out
    u = lo[nz]
    u_hi = hi[nz]
    active = np.ones(u.shape, dtype=bool)
    for _ in range(config.max_iterations):
        ua = u[active]
        e = np.exp(logx2[active] - 2.0 * lam * ua[:, None])
        h = e.sum(axis=-1) - 1.0
        dh = -2.0 * (e * lam).sum(axis=-1)
        step = -h / dh
        un = np.minimum(ua + step, u_hi[active])
        with np.errstate(over="ignore", invalid="ignore"):
            r_new = np.exp(un)
            done = np.abs(np.expm1(ua - un)) * r_new <= (config.abs_tolerance
                                                       + 4.0 * np.finfo(float).eps * r_new)
        # for large rho one ulp of log(rho) already exceeds the relative bound
        done |= np.abs(un - ua) <= 4.0 * np.finfo(float).eps * np.maximum(np.abs(un), 1.0)
        u[active] = un
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break
    else:
        raise SolverError(
            f"rho did not converge in {config.max_iterations} iterations",
            bracket=(float(np.exp(u[active]).min()), float(np.exp(u_hi[active]).max())),
        )
    with np.errstate(over="ignore"):
        # rho beyond the float range is reported as inf
        out[nz] = np.exp(u)
    return out


def rho(x, profile: AnisotropyProfile, config: DistanceSolverConfig = DEFAULT_SOLVER):
    """Anisotropic distance of ``x`` under ``profile``; scalar in, scalar out."""
    val = rho_lam(x, profile.lam_array, config)
    return float(val) if np.ndim(val) == 0 else val


def dilate(x, t, lam):
    """The anisotropic dilation t^lam x, i.e. componentwise t^{lam_i} x_i."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return x * t[..., None] ** np.asarray(lam, dtype=float)


def check_homogeneity(x, t: float, profile: AnisotropyProfile,
                      config: DistanceSolverConfig = DEFAULT_SOLVER) -> float:
    """Relative defect |rho(t^lam x) - t rho(x)| / (t rho(x))."""
    if not t > 0:
        raise InputError("t must be positive")
    base = rho_lam(x, profile.lam_array, config)
    if np.any(base == 0):
        raise InputError("x must be nonzero")
    scaled = rho_lam(dilate(x, t, profile.lam), profile.lam_array, config)
    defect = np.abs(scaled - t * base) / (t * base)
    return float(defect) if np.ndim(defect) == 0 else defect


def sample_points(rng: np.random.Generator, profile: AnisotropyProfile, count: int,
                  log_rho_range=(-3.0, 3.0)) -> np.ndarray:
    """Random points r^lam * omega with omega uniform on the sphere, log r uniform."""
    n = profile.n
    w = rng.standard_normal((count, n))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    r = np.exp(rng.uniform(*log_rho_range, size=count))
    return w * r[:, None] ** profile.lam_array


def estimate_quasi_triangle_constant(profile: AnisotropyProfile, sample_count: int = 10_000,
                                     seed: int = 42,
                                     config: DistanceSolverConfig = DEFAULT_SOLVER) -> float:
    """Largest C1 with rho(x - t) >= C1 rho(t) - rho(x) on a seeded sample of pairs.

    Equivalently min over pairs of (rho(x - t) + rho(x)) / rho(t). The sample
    always contains one x = 0 pair, which caps the estimate at 1.
    """
    if sample_count < 1:
        raise InputError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    x = sample_points(rng, profile, sample_count)
    t = sample_points(rng, profile, sample_count)
    x[0] = 0.0
    lam = profile.lam_array
    ratio = (rho_lam(x - t, lam, config) + rho_lam(x, lam, config)) / rho_lam(t, lam, config)
    return float(ratio.min())
