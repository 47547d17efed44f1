"""Truncated hypersingular integrals and their Fourier symbols.

    T_eps f(x) = int_{rho(t) > eps} Delta_t^{2l} f(x) / rho(t)^(n + alpha*) dt,
    Delta_t^{2l} f(x) = sum_{|j| <= l} d_|j| f(x + j t),

and the symbol S_eps(xi) = (-1)^l 4^l int_{rho(t) > eps} sin^{2l}(xi.t/2) / rho^(n+alpha*) dt,
so that F(T_eps f) = S_eps * F f.

Both integrals are done in anisotropic polar coordinates t = r^lam * omega
(see :mod:`anihsi.quadrature`): Gauss panels in r on a dyadic lattice, a
sphere rule in omega. Far from the origin the j = 0 term of the difference
integrates in closed form, so only the shifted samples f(x + j t) need
quadrature there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline, RegularGridInterpolator

from .distance import rho_lam
from .errors import ConvergenceDiagnostic, InputError, QuadratureConfigError
from .field import Field, GridFunction, GridSpec, sample
from .profile import AnisotropyProfile
from .quadrature import (anisotropic_sphere_rule, lattice_breaks, panel_rule,
                         power_variation, refine_breaks)
from .radial import RadialSymbolIntegrator, difference_coefficients
from .spectral import SymbolTable, dft, inverse_dft

_CHUNK = 1 << 21
_MAX_PANELS = 200_000


@dataclass(frozen=True)
class HsiQuadratureConfig:
    """Discretization knobs for the operator and the symbol.

    ``eps`` inner cutoff; ``R`` outer cutoff (None: chosen from ``tail_tol``,
    or from the field's decay radius when it has one). Radial panels follow
    the lattice 2^(k/annuli_per_octave) and are split further so that no
    sample point j*t moves more than ``max_step`` across a panel. The sphere
    rule has at least ``angular`` nodes and ``angular_density`` nodes per unit
    arc length of the largest shift. With eps = 0 the radial range starts at
    r_min with r_min^kappa = 10^-small_radius_digits, kappa = 2 l lam_min - alpha*,
    but never where the rounding noise of the difference, integrated against
    rho^(-n-alpha*), would exceed ``roundoff_tol`` * sup|f|; the missing piece
    is extrapolated from its power law.
    """
    eps: float = 0.0
    R: Optional[float] = None
    annuli_per_octave: int = 2
    gauss_order: int = 8
    tail_tol: float = 1e-8
    max_step: float = 0.5
    angular: int = 32
    angular_density: float = 3.0
    small_radius_digits: float = 7.0
    roundoff_tol: float = 1e-9
    r_split: float = 1.0
    symbol_angles: int = 256
    symbol_table_size: int = 2048
    radial_order: int = 10
    tail_radius: float = 1024.0

    def __post_init__(self):
        if not self.eps >= 0:
            raise InputError("eps must be >= 0")
        if self.R is not None and not self.R > self.eps:
            raise InputError("need 0 <= eps < R")
        for name in ("annuli_per_octave", "gauss_order", "angular", "symbol_angles",
                     "symbol_table_size", "radial_order"):
            if int(getattr(self, name)) < 1:
                raise InputError(f"{name} must be >= 1")
        if self.tail_tol <= 0 or self.max_step <= 0 or self.r_split <= 0:
            raise InputError("tolerances and step sizes must be positive")


DEFAULT_CONFIG = HsiQuadratureConfig()


@dataclass
class HsiValue:
    value: np.ndarray
    error: np.ndarray


def _ell_for(profile: AnisotropyProfile, ell: Optional[int]) -> int:
    ell = profile.default_ell if ell is None else int(ell)
    if not 2 * ell > max(profile.alpha):
        raise InputError(f"difference order 2l={2 * ell} must exceed max(alpha)={max(profile.alpha)}")
    return ell


def sphere_measure(profile: AnisotropyProfile, angular: int = 64) -> float:
    """sigma with int_{a < rho(t) <= b} rho^-n dt = sigma log(b/a).

    Evaluated as the quadrature of the polar Jacobian over the unit sphere;
    because the weights sum to n it equals the Euclidean sphere area.
    """
    _, w = anisotropic_sphere_rule(profile.lam_array, angular)
    return float(w.sum())


# ---------------------------------------------------------------------------
# operator

def _angular_count(cfg: HsiQuadratureConfig, lam, ell: int, r_hi: float,
                   reach: Optional[float]) -> int:
    span = ell * math.sqrt(float(np.sum(r_hi ** (2 * lam))))
    if reach is not None:
        span = min(span, reach)
    m = max(cfg.angular, math.ceil(cfg.angular_density * 2 * math.pi * span))
    return 4 * math.ceil(m / 4)


def _radial_groups(cfg: HsiQuadratureConfig, lam, ell: int, lo: float, hi: float,
                   reach: Optional[float] = None):
    """Radial pieces covering lo < rho(t) <= hi, grouped by sphere-rule size.

    Panel boundaries depend only on the global lattice, so integrals over
    adjacent ranges add up exactly. ``reach`` caps the sample distance that
    matters (beyond it the field is negligible) and hence the angular count.
    """
    per = cfg.annuli_per_octave
    span = ell * float(np.sum(hi ** lam))
    if span / cfg.max_step > _MAX_PANELS:
        raise QuadratureConfigError(
            f"outer radius {hi:.3g} needs more than {_MAX_PANELS} radial panels; "
            "give the field a decay radius, lower R or relax tail_tol")
    breaks = lattice_breaks(lo, hi, per)
    var = power_variation(ell * np.ones_like(lam), lam)
    groups = {}
    for a, b in zip(breaks[:-1], breaks[1:]):
        top = 2.0 ** (math.ceil(math.log2(b) * per - 1e-9) / per)
        m = _angular_count(cfg, lam, ell, top, reach)
        groups.setdefault(m, []).append(refine_breaks([a, b], var, cfg.max_step))
    return [(m, pieces) for m, pieces in sorted(groups.items())]


def _shell_nodes(cfg, lam, astar, m, pieces):
    """Nodes t and weights with the polar Jacobian and rho^(-n-alpha*) folded in."""
    r_parts, w_parts = [], []
    for br in pieces:
        r, w = panel_rule(br, cfg.gauss_order)
        r_parts.append(r)
        w_parts.append(w)
    r = np.concatenate(r_parts)
    wr = np.concatenate(w_parts) * r ** (-1.0 - astar)
    om, wo = anisotropic_sphere_rule(lam, m)
    t = (r[:, None, None] ** lam) * om[None, :, :]
    return t.reshape(-1, lam.size), (wr[:, None] * wo[None, :]).ravel()


def _tiles(pts, size):
    """Group points into boxes of side ``size``: (indices, center, radius)."""
    keys = np.floor(pts / size).astype(np.int64)
    _, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = inv.ravel()
    for k in range(inv.max() + 1):
        idx = np.nonzero(inv == k)[0]
        box = pts[idx]
        c = 0.5 * (box.min(axis=0) + box.max(axis=0))
        yield idx, c, float(np.max(np.linalg.norm(box - c, axis=-1)))


def _accumulate(f: Field, x, t, w, coef, full: bool, out):
    """out += sum_nodes w * D(x, t) for a block of points x.

    full=True uses the whole symmetric difference at each node (needed near
    the origin where it is O(|t|^2l) and cancellation matters); otherwise only
    the shifted terms j >= 1, doubled by the antipodal symmetry of the rule.
    """
    m = x.shape[0]
    step = max(1, _CHUNK // max(m, 1))
    ell = coef.size - 1
    fx = f(x) if full else None
    for k in range(0, t.shape[0], step):
        tb = t[None, k:k + step, :]
        wb = w[k:k + step]
        xb = x[:, None, :]
        if full:
            acc = coef[0] * fx[:, None]
            for j in range(1, ell + 1):
                acc = acc + coef[j] * (f(xb + j * tb) + f(xb - j * tb))
        else:
            acc = 0
            for j in range(1, ell + 1):
                acc = acc + 2 * coef[j] * f(xb + j * tb)
        out += acc @ wb


def _outer_radius(f: Field, x, profile, ell, cfg, r_b, sigma):
    """Return (R, tail error bound)."""
    lam = profile.lam_array
    astar = profile.alpha_star
    coef = difference_coefficients(ell)
    shifted = 2 * np.abs(coef[1:]).sum()  # = 4^l - C(2l, l)
    if cfg.R is None and f.decay_radius is not None:
        reach = float(np.max(np.linalg.norm(x, axis=-1))) + f.decay_radius
        R = max(r_b, max(reach ** (1 / li) for li in lam))
        sup = f.sup if f.sup is not None else 1.0
        return R, shifted * 1e-16 * sup * sigma * R ** (-astar) / astar
    if f.sup is None:
        raise QuadratureConfigError("field has no sup bound; cannot certify the tail")
    K = shifted * f.sup * sigma / astar
    if cfg.R is None:
        R = max(r_b, (K / cfg.tail_tol) ** (1 / astar))
        return R, K * R ** (-astar)
    R = max(cfg.R, r_b)
    bound = K * R ** (-astar)
    if bound > cfg.tail_tol:
        raise QuadratureConfigError(
            f"tail bound {bound:.3g} exceeds tail_tol {cfg.tail_tol:.3g}; raise R")
    return R, bound


def _prepare(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise InputError("point dimension mismatch")
    return x.reshape(-1, n), x.shape[:-1]


def _range_integral(f, pts, profile, ell, cfg, lo, hi, full):
    lam = profile.lam_array
    coef = difference_coefficients(ell)
    out = np.zeros(pts.shape[0], dtype=complex)
    decay = f.decay_radius
    reach = None
    if decay is not None:
        reach = float(np.max(np.linalg.norm(pts, axis=-1))) + decay
    shells = [_shell_nodes(cfg, lam, profile.alpha_star, m, pieces)
              for m, pieces in _radial_groups(cfg, lam, ell, lo, hi, reach)]
    if decay is None:
        for t, w in shells:
            _accumulate(f, pts, t, w, coef, full, out)
        return out
    # drop nodes whose shifted samples all fall where f is negligible
    for idx, c, rad in _tiles(pts, max(decay / 2, 1e-3)):
        part = np.zeros(idx.size, dtype=complex)
        for t, w in shells:
            near = np.zeros(t.shape[0], dtype=bool)
            for j in range(1, ell + 1):
                for sgn in ((1, -1) if full else (1,)):
                    near |= np.linalg.norm(c + sgn * j * t, axis=-1) <= decay + rad
            if full:
                # the j = 0 term is kept at every node; far nodes only carry it
                far = ~near
                part += coef[0] * f(pts[idx]) * w[far].sum()
            _accumulate(f, pts[idx], t[near], w[near], coef, full, part)
        out[idx] = part
    return out


def truncated_hsi(f: Field, x, profile: AnisotropyProfile, ell: Optional[int] = None,
                  config: HsiQuadratureConfig = DEFAULT_CONFIG) -> HsiValue:
    """T_eps f at one point or an array of points (..., n), eps = config.eps."""
    ell = _ell_for(profile, ell)
    if f.n != profile.n:
        raise InputError("field and profile dimensions differ")
    cfg = config
    pts, shape = _prepare(x, profile.n)
    if f.degree is not None and f.degree < 2 * ell:
        # Delta_t^{2l} annihilates polynomials of degree < 2l pointwise
        zero = np.zeros(pts.shape[0])
        return HsiValue(zero.reshape(shape), zero.reshape(shape))
    lam = profile.lam_array
    astar = profile.alpha_star
    coef = difference_coefficients(ell)
    sigma = sphere_measure(profile)
    kappa = 2 * ell * lam.min() - astar

    lo = cfg.eps
    if lo == 0:
        noise = 4 ** ell * np.finfo(float).eps * sigma / (astar * cfg.roundoff_tol)
        lo = max(10.0 ** (-cfg.small_radius_digits / kappa), noise ** (1 / astar))
    r_b = max(cfg.r_split, cfg.eps)
    R, err_tail = _outer_radius(f, pts, profile, ell, cfg, r_b, sigma)

    value = np.zeros(pts.shape[0], dtype=complex)
    err = np.full(pts.shape[0], err_tail)
    if lo < r_b:
        value += _range_integral(f, pts, profile, ell, cfg, lo, r_b, True)
        if cfg.eps == 0:
            # integrand ~ c r^(kappa-1) below the first lattice panel
            r1 = lattice_breaks(lo, r_b, cfg.annuli_per_octave)[1]
            first = _range_integral(f, pts, profile, ell, cfg, lo, r1, True)
            extra = first * lo ** kappa / (r1 ** kappa - lo ** kappa)
            value += extra
            err = err + 0.1 * np.abs(extra) + cfg.roundoff_tol * (f.sup or 1.0)
    if R > r_b:
        value += _range_integral(f, pts, profile, ell, cfg, r_b, R, False)
    value += coef[0] * f(pts) * sigma * r_b ** (-astar) / astar

    if np.all(np.abs(value.imag) <= 1e-14 * (np.abs(value.real) + 1e-300)) \
            and not np.iscomplexobj(f(pts[:1])):
        value = value.real
    return HsiValue(value.reshape(shape), err.reshape(shape))


def annulus_integral(f: Field, x, profile: AnisotropyProfile, lo: float, hi: float,
                     ell: Optional[int] = None,
                     config: HsiQuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """int_{lo < rho(t) <= hi} Delta_t^{2l} f(x) / rho^(n+alpha*) dt, 0 < lo < hi."""
    ell = _ell_for(profile, ell)
    if not 0 < lo < hi:
        raise InputError("need 0 < lo < hi")
    pts, shape = _prepare(x, profile.n)
    val = _range_integral(f, pts, profile, ell, config, lo, hi, True)
    if not np.iscomplexobj(f(pts[:1])):
        val = val.real
    return val.reshape(shape)


@dataclass
class ConvergenceReport:
    eps: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    limit: complex
    limit_error: float
    deltas: np.ndarray
    slope: float
    monotone: bool


def default_eps_sequence(eps0: float = 0.5, count: int = 8) -> np.ndarray:
    return eps0 * 0.5 ** np.arange(count)


def hsi_limit(f: Field, x, profile: AnisotropyProfile, ell: Optional[int] = None,
              eps_sequence: Optional[Sequence[float]] = None,
              config: HsiQuadratureConfig = DEFAULT_CONFIG,
              strict: bool = True) -> ConvergenceReport:
    """T_eps f(x) along a decreasing eps sequence, plus the eps = 0 value.

    Successive deltas should shrink like eps^(kappa) with
    kappa = 2 l lam_min - alpha*; a distance to the limit that grows beyond
    the combined error estimates signals an under-resolved quadrature and
    raises ConvergenceDiagnostic (the report rides along as ``.report``).
    """
    if f.tag not in ("smooth", "compactly-supported-smooth"):
        raise InputError("the eps -> 0 limit needs a smooth field")
    eps = np.asarray(default_eps_sequence() if eps_sequence is None else eps_sequence, float)
    if eps.ndim != 1 or eps.size < 2 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise InputError("eps sequence must be positive and strictly decreasing")
    x = np.asarray(x, dtype=float)
    vals, errs = [], []
    for e in eps:
        res = truncated_hsi(f, x, profile, ell, replace(config, eps=float(e)))
        vals.append(complex(res.value))
        errs.append(float(res.error))
    lim = truncated_hsi(f, x, profile, ell, replace(config, eps=0.0))
    vals = np.array(vals)
    errs = np.array(errs)
    limit = complex(lim.value)
    if np.all(vals.imag == 0) and limit.imag == 0:
        vals = vals.real
        limit = limit.real
    deltas = np.diff(vals)
    mags = np.abs(deltas)
    ok = mags > 0
    slope = float(np.polyfit(np.log(eps[:-1][ok]), np.log(mags[ok]), 1)[0]) if ok.sum() >= 2 else float("nan")
    dist = np.abs(vals - limit)
    tol = 10 * (errs + float(lim.error)) + 1e-12 * max(np.abs(vals).max(), abs(limit), 1e-300)
    monotone = bool(np.all(dist[1:] <= dist[:-1] + tol[1:]))
    report = ConvergenceReport(eps, vals, errs, limit, float(lim.error), deltas, slope, monotone)
    if strict and not monotone:
        exc = ConvergenceDiagnostic("truncations do not approach the eps = 0 value monotonically")
        exc.report = report
        raise exc
    return report


# ---------------------------------------------------------------------------
# symbol

def _integrator(profile, ell, cfg) -> RadialSymbolIntegrator:
    return RadialSymbolIntegrator(profile.lam_array, profile.alpha_star, ell,
                                  order=cfg.radial_order, tail_radius=cfg.tail_radius)


def _symbol_rule(profile, cfg):
    # graded per-orthant rule: xi * omega hits zero components on the axes
    return anisotropic_sphere_rule(profile.lam_array, 4 * math.ceil(cfg.symbol_angles / 4),
                                   graded=True)


class UnitSymbol:
    """Interpolant of I(u) = int_0^inf g(phi_u(r)) r^(-1-alpha*) dr for unit u.

    Since rho(u) = |u| = 1 on the Euclidean unit sphere, homogeneity gives
    I(a) = rho(a)^alpha* I(a / rho(a)^lam) for all a != 0.
    """

    def __init__(self, profile: AnisotropyProfile, ell: int, cfg: HsiQuadratureConfig):
        self.n = profile.n
        ri = _integrator(profile, ell, cfg)
        m = int(cfg.symbol_table_size)
        if self.n == 1:
            self._vals = ri.normalized(np.array([[1.0], [-1.0]]))
        elif self.n == 2:
            beta = np.arange(m) * (math.pi / m)
            u = np.stack([np.cos(beta), np.sin(beta)], axis=-1)
            v = ri.normalized(u)
            # I(-u) = I(u): period pi in the angle
            self._spline = CubicSpline(np.append(beta, math.pi), np.append(v, v[0]),
                                       bc_type="periodic")
        elif self.n == 3:
            mt = max(m // 32, 16)
            th = np.linspace(0, math.pi, mt + 1)
            ph = np.arange(2 * mt) * (math.pi / mt)
            T, P = np.meshgrid(th, ph, indexing="ij")
            u = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], -1)
            v = ri.normalized(u.reshape(-1, 3)).reshape(T.shape)
            pad = 3
            ph_ext = np.concatenate([ph[-pad:] - 2 * math.pi, ph, ph[:pad] + 2 * math.pi])
            v_ext = np.concatenate([v[:, -pad:], v, v[:, :pad]], axis=1)
            self._interp = RegularGridInterpolator((th, ph_ext), v_ext, method="cubic")
        else:
            raise InputError("only dimensions 1, 2 and 3 are supported")

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.n == 1:
            return np.where(u[..., 0] >= 0, self._vals[0], self._vals[1])
        if self.n == 2:
            beta = np.mod(np.arctan2(u[..., 1], u[..., 0]), math.pi)
            return self._spline(beta)
        th = np.arccos(np.clip(u[..., 2], -1, 1))
        ph = np.mod(np.arctan2(u[..., 1], u[..., 0]), 2 * math.pi)
        return self._interp(np.stack([th, ph], axis=-1))


@lru_cache(maxsize=16)
def _unit_symbol_cached(alpha: tuple, ell: int, cfg: HsiQuadratureConfig) -> UnitSymbol:
    from .profile import derive_profile
    return UnitSymbol(derive_profile(alpha), ell, cfg)


def _xi_array(xi, n):
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != n:
        raise InputError("frequency dimension mismatch")
    return xi.reshape(-1, n), xi.shape[:-1]


def full_symbol(xi, profile: AnisotropyProfile, ell: Optional[int] = None,
                config: HsiQuadratureConfig = DEFAULT_CONFIG, method: str = "table") -> np.ndarray:
    """S(xi) with eps = 0.

    method="table": homogeneity plus an interpolated unit-sphere table (fast).
    method="direct": every ray integral at its own scale, no homogeneity used.
    """
    ell = _ell_for(profile, ell)
    pts, shape = _xi_array(xi, profile.n)
    om, w = _symbol_rule(profile, config)
    lam = profile.lam_array
    out = np.zeros(pts.shape[0])
    step = max(1, (1 << 16) // om.shape[0])
    unit = _unit_symbol_cached(tuple(profile.alpha), ell, config) if method == "table" else None
    ri = _integrator(profile, ell, config) if method == "direct" else None
    if method not in ("table", "direct"):
        raise InputError("method must be 'table' or 'direct'")
    for k in range(0, pts.shape[0], step):
        a = pts[k:k + step, None, :] * om[None, :, :]
        flat = a.reshape(-1, profile.n)
        ra = rho_lam(flat, lam)
        vals = np.zeros(flat.shape[0])
        nz = ra > 0
        if method == "table":
            uhat = flat[nz] / ra[nz, None] ** lam
            vals[nz] = ra[nz] ** profile.alpha_star * unit(uhat)
        else:
            # outside [1e-30, 1e30] the ray breaks overflow; rescale those
            # points to rho = 1 by exact homogeneity
            far = nz & ((ra < 1e-30) | (ra > 1e30))
            near = nz & ~far
            vals[near] = ri.raw(flat[near])
            if far.any():
                vals[far] = ra[far] ** profile.alpha_star * ri.raw(flat[far] / ra[far, None] ** lam)
        out[k:k + step] = vals.reshape(a.shape[:2]) @ w
    return out.reshape(shape)


def _inner_symbol(pts, eps, profile, ell, config):
    """J_eps(xi) = int_{rho(t) <= eps} of the symbol integrand."""
    om, w = _symbol_rule(profile, config)
    lam = profile.lam_array
    ri = _integrator(profile, ell, config)
    out = np.zeros(pts.shape[0])
    step = max(1, (1 << 16) // om.shape[0])
    scale = eps ** lam
    for k in range(0, pts.shape[0], step):
        a = pts[k:k + step, None, :] * om[None, :, :] * scale
        vals = ri.span(a.reshape(-1, profile.n), 0.0, 1.0)
        out[k:k + step] = vals.reshape(a.shape[:2]) @ w
    return out * eps ** (-profile.alpha_star)


def truncated_symbol(xi, eps: float, profile: AnisotropyProfile, ell: Optional[int] = None,
                     config: HsiQuadratureConfig = DEFAULT_CONFIG,
                     method: str = "direct") -> np.ndarray:
    """S_eps(xi); real, with the sign (-1)^l."""
    ell = _ell_for(profile, ell)
    if eps < 0:
        raise InputError("eps must be >= 0")
    pts, shape = _xi_array(xi, profile.n)
    full = full_symbol(pts, profile, ell, config, method)
    if eps > 0:
        full = full - _inner_symbol(pts, eps, profile, ell, config)
    return full.reshape(shape)


def _quadrant(grid: GridSpec):
    """Nonnegative dual frequencies 0..N/2 per axis (N/2 is +Nyquist)."""
    k = np.arange(grid.N // 2 + 1) * grid.dual_spacing
    mesh = np.meshgrid(*([k] * grid.n), indexing="ij")
    return np.stack(mesh, axis=-1)


def _unfold(grid: GridSpec, quad: np.ndarray) -> np.ndarray:
    """Fill the full FFT-ordered table from the nonnegative quadrant by evenness."""
    N = grid.N
    idx = np.arange(N)
    mirror = np.minimum(idx, N - idx)
    return quad[np.ix_(*([mirror] * grid.n))]


def truncated_symbol_table(grid: GridSpec, eps: float, profile: AnisotropyProfile,
                           ell: Optional[int] = None,
                           config: HsiQuadratureConfig = DEFAULT_CONFIG) -> SymbolTable:
    """S_eps on every dual node; computed on one orthant, reflected per axis."""
    if grid.n != profile.n:
        raise InputError("grid and profile dimensions differ")
    quad = _quadrant(grid)
    vals = truncated_symbol(quad, eps, profile, ell, config, method="table")
    return SymbolTable(grid, _unfold(grid, vals), f"hsi-symbol-eps={eps!r}")


def full_symbol_table(grid: GridSpec, profile: AnisotropyProfile, ell: Optional[int] = None,
                      config: HsiQuadratureConfig = DEFAULT_CONFIG) -> SymbolTable:
    return truncated_symbol_table(grid, 0.0, profile, ell, config)


# ---------------------------------------------------------------- operator vs symbol

@dataclass
class ConsistencyReport:
    eps: float
    error: float          # max |A - B| / max |B| over the interior frequencies
    space_error: float    # same comparison in x
    interior: float       # frequency radius used


def symbol_consistency(f: Field, profile: AnisotropyProfile, grid: GridSpec, eps: float,
                       pad: int = 4, ell: Optional[int] = None,
                       config: HsiQuadratureConfig = DEFAULT_CONFIG,
                       interior: float = 0.5) -> ConsistencyReport:
    """Compare dft(T_eps f) with the symbol route S_eps * dft(f).

    T_eps f is computed pointwise on ``grid``. The symbol route is evaluated
    on a box ``pad`` times larger (same spacing), brought back to x, and
    restricted to ``grid`` before its dft is taken; this removes the
    periodization error of the slowly decaying T_eps f from the comparison.
    Frequencies with |xi| <= interior * Nyquist count as interior.
    """
    if grid.n != profile.n or f.n != profile.n:
        raise InputError("dimension mismatch")
    if pad < 1:
        raise InputError("pad must be >= 1")
    cfg = replace(config, eps=eps)
    tf = truncated_hsi(f, grid.points(), profile, ell, cfg).value
    a = dft(GridFunction(grid, tf)).values
    big = grid.padded(pad)
    table = truncated_symbol_table(big, eps, profile, ell, config).values
    back = inverse_dft(GridFunction(big, table * dft(sample(f, big)).values)).values
    off = (big.N - grid.N) // 2
    window = back[tuple(slice(off, off + grid.N) for _ in range(grid.n))]
    b = dft(GridFunction(grid, window)).values
    xi = np.linalg.norm(grid.dual_points(), axis=-1)
    inner = xi <= interior * math.pi / grid.h
    err = float(np.abs(a - b)[inner].max() / np.abs(b)[inner].max())
    space = float(np.abs(tf - window.real).max() / np.abs(window).max())
    return ConsistencyReport(float(eps), err, space, interior * math.pi / grid.h)
