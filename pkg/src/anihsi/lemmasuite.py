"""Numerical probes for the decay and difference estimates used in the theory.

Each probe samples a quantity on a set of steps t, divides by the predicted
majorant and reports the ratios together with a log-log slope. No probe
tries to estimate the unknown constants; it only checks boundedness or the
exponent of the decay.

Integrals over R^n are computed as iterated (mixed) norms with per-axis
composite Gauss rules whose breakpoints cluster around the shifted centres
k t, which is where the integrands concentrate or have cusps.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .distance import rho_lam
from .errors import InputError
from .field import Field, GridFunction, GridSpec, gaussian, sample, tensor_bump
from .finitediff import centered_diff, diff_bound_probe, noncentered_diff
from .hsi import DEFAULT_CONFIG, HsiQuadratureConfig, full_symbol_table
from .mixednorm import exponents, mixed_norm, mixed_norm_array
from .profile import AnisotropyProfile, derive_profile
from .quadrature import panel_rule
from .spectral import apply_symbol


@dataclass(frozen=True)
class ProbeThresholds:
    """Pass criteria; stored in every report."""
    slope_slack: float = 0.15
    stability_factor: float = 2.0
    resolution_slope_tol: float = 0.05


@dataclass
class BoundProbeReport:
    name: str
    samples: list
    rho: list
    ratios: list
    max_ratio: float
    slope: Optional[float]
    predicted: Optional[float]
    passed: bool
    applicable: bool = True
    note: str = ""
    thresholds: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["samples"] = [list(map(float, s)) for s in self.samples]
        return rec


def rays(profile: AnisotropyProfile, rhos, directions=None) -> np.ndarray:
    """Steps t = r^lam * omega for every r in ``rhos`` and unit ``omega``.

    Default direction is the normalized diagonal. Output shape (len(dirs) * len(rhos), n).
    """
    n = profile.n
    lam = profile.lam_array
    if directions is None:
        directions = [np.ones(n) / math.sqrt(n)]
    out = []
    for om in directions:
        om = np.asarray(om, dtype=float)
        om = om / np.linalg.norm(om)
        for r in rhos:
            out.append(r ** lam * om)
    return np.array(out)


def _loglog_slope(x, y) -> float:
    x, y = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------- axis rules

def _graded_axis(centers, inner: float, outer: float, per_octave: int, order: int):
    """Gauss rule on R clustering geometrically around each centre.

    Panels reach ``outer`` beyond the extreme centres; the two half-lines
    past that are mapped onto (0, 1] by x = X / u.
    """
    centers = np.unique(np.asarray(centers, dtype=float))
    steps = inner * 2.0 ** (np.arange(int(per_octave * math.log2(outer / inner)) + 1) / per_octave)
    pts = [centers]
    for c in centers:
        pts.append(c + steps)
        pts.append(c - steps)
    b = np.unique(np.concatenate(pts))
    lo, hi = centers.min() - outer, centers.max() + outer
    b = b[(b >= lo) & (b <= hi)]
    b = np.unique(np.concatenate([[lo], b, [hi]]))
    nodes, weights = panel_rule(b, order)
    # slow algebraic tails turn into u^(-1/2)-type endpoint singularities:
    # grade the u panels geometrically toward 0
    u, w = panel_rule(np.concatenate([[0.0], 2.0 ** -np.arange(_TAIL_PANELS, -1, -1.0)]), order)
    span = outer
    right = hi + span * (1.0 / u - 1.0)
    left = lo - span * (1.0 / u - 1.0)
    tw = span * w / (u * u)
    return np.concatenate([left, nodes, right]), np.concatenate([tw, weights, tw])


def _union_axis(centers, half: float, panels: int, order: int):
    """Gauss rule on the union of intervals [c - half, c + half]."""
    centers = np.sort(np.asarray(centers, dtype=float))
    ivs = []
    for c in centers:
        a, b = c - half, c + half
        if ivs and a <= ivs[-1][1]:
            ivs[-1][1] = max(ivs[-1][1], b)
        else:
            ivs.append([a, b])
    nodes, weights = [], []
    width = 2.0 * half / panels
    for a, b in ivs:
        k = max(1, int(math.ceil((b - a) / width - 1e-9)))
        x, w = panel_rule(np.linspace(a, b, k + 1), order)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _tensor_norm(func, axes, p) -> float:
    """Mixed norm of ``func`` on the tensor product of per-axis rules."""
    pts = np.stack(np.meshgrid(*[a[0] for a in axes], indexing="ij"), axis=-1)
    vals = func(pts)
    return mixed_norm_array(vals, p, [a[1] for a in axes])


# ---------------------------------------------------------------- decay of I(t)

def decay_regime(profile: AnisotropyProfile, gamma: float, s, ell: int):
    """Return ("power", exponent) for the two regimes, or (None, None) outside them."""
    b = float(np.sum(profile.lam_array / np.asarray(s, dtype=float)))
    if b / (ell + 1) < gamma < b:
        return "power", b - (ell + 1) * gamma
    if gamma > b:
        return "decay", -gamma * ell
    return None, None


_AXIS_DEFAULTS = {1: (2, 8, 1e-4, 1e8)}
_AXIS_FALLBACK = (1, 6, 1e-3, 1e6)
_TAIL_PANELS = 24


def i_integral(t, profile: AnisotropyProfile, gamma: float, s, ell: int,
               per_octave: Optional[int] = None, order: Optional[int] = None) -> float:
    """I(t) = || prod_{k=0}^{ell} (1 + rho(. - k t))^(-gamma) ||_s by nested quadrature."""
    t = np.asarray(t, dtype=float)
    dpo, dord, inner, outer = _AXIS_DEFAULTS.get(profile.n, _AXIS_FALLBACK)
    per_octave, order = per_octave or dpo, order or dord
    lam = profile.lam_array
    axes = [_graded_axis([k * t[i] for k in range(ell + 1)], inner, outer, per_octave, order)
            for i in range(profile.n)]

    def func(x):
        logv = 0.0
        for k in range(ell + 1):
            logv = logv - gamma * np.log1p(rho_lam(x - k * t, lam))
        return np.exp(logv)
    return _tensor_norm(func, axes, s)


def probe_I_decay(profile: AnisotropyProfile, gamma: float, s, ell: int, t_samples,
                  thresholds: ProbeThresholds = ProbeThresholds(),
                  per_octave: Optional[int] = None, order: Optional[int] = None) -> BoundProbeReport:
    """Fit the decay exponent of I(t) and compare with the predicted one.

    The fit is repeated with twice as many panels per octave and the two slopes must agree within ``resolution_slope_tol``.
    """
    s = exponents(s)
    if len(s) != profile.n:
        raise InputError("s must have one entry per dimension")
    if not gamma > 0 or ell < 1:
        raise InputError("gamma must be positive and ell >= 1")
    samples = np.atleast_2d(np.asarray(t_samples, dtype=float))
    th = asdict(thresholds)
    regime, predicted = decay_regime(profile, gamma, s, ell)
    if regime is None:
        return BoundProbeReport("I_decay", samples.tolist(), [], [], math.nan, None, None, False,
                                applicable=False, thresholds=th,
                                note="gamma outside both regimes (boundary case)")
    r = rho_lam(samples, profile.lam_array)
    vals = np.array([i_integral(t, profile, gamma, s, ell, per_octave, order) for t in samples])
    per_octave = per_octave or _AXIS_DEFAULTS.get(profile.n, _AXIS_FALLBACK)[0]
    fine = np.array([i_integral(t, profile, gamma, s, ell, 2 * per_octave, order)
                     for t in samples])
    slope = _loglog_slope(1 + r, vals)
    slope_fine = _loglog_slope(1 + r, fine)
    ratios = vals / (1 + r) ** predicted
    passed = bool(slope <= predicted + thresholds.slope_slack
                  and abs(slope - slope_fine) <= thresholds.resolution_slope_tol)
    return BoundProbeReport("I_decay", samples.tolist(), r.tolist(), ratios.tolist(),
                            float(ratios.max()), slope, predicted, passed, thresholds=th,
                            note=f"regime {regime}",
                            extra={"values": vals.tolist(), "slope_fine": slope_fine,
                                   "gamma": gamma, "s": list(s), "ell": ell})


# ---------------------------------------------------------------- difference norms

def _shifted_norm(f: Field, t, offsets, p, radius: float, panels: int, order: int, diff) -> float:
    axes = [_union_axis([m * t[i] for m in offsets], radius, panels, order) for i in range(f.n)]
    return _tensor_norm(lambda x: diff(x), axes, p)


def _doubled(samples: np.ndarray, profile: AnisotropyProfile) -> np.ndarray:
    """Insert the geometric midpoint (in rho, same direction) between neighbours."""
    lam = profile.lam_array
    out = [samples[0]]
    for a, b in zip(samples[:-1], samples[1:]):
        ra, rb = rho_lam(a, lam), rho_lam(b, lam)
        oa, ob = a / ra ** lam, b / rb ** lam
        if np.allclose(oa, ob):
            out.append(math.sqrt(ra * rb) ** lam * oa)
        out.append(b)
    return np.array(out)


def _small_slope(samples, r, num, lam, count: int = 3) -> Optional[float]:
    """Smallest log-log slope over the ``count`` smallest steps of each direction."""
    r, num = np.asarray(r), np.asarray(num)
    dirs = np.round(samples / r[:, None] ** lam, 9)
    slopes = []
    for d in np.unique(dirs, axis=0):
        idx = np.flatnonzero(np.all(dirs == d, axis=1))
        idx = idx[np.argsort(r[idx])][:count]
        if len(idx) >= 2 and np.all(num[idx] > 0) and np.ptp(r[idx]) > 0:
            slopes.append(_loglog_slope(r[idx], num[idx]))
    return min(slopes) if slopes else None


def probe_diff_norm_bound(a: Field, profile: AnisotropyProfile, p, ell: int, t_samples,
                          thresholds: ProbeThresholds = ProbeThresholds(),
                          panels: int = 16, order: int = 8) -> BoundProbeReport:
    """Ratios ||backward diff of a||_p / [rho/(1+rho)]^(ell theta)."""
    if a.support_radius is None:
        raise InputError("the probed function must be compactly supported")
    if a.n != profile.n:
        raise InputError("dimension mismatch")
    p = exponents(p)
    half = a.box if a.box is not None else a.support_radius
    lam, theta = profile.lam_array, profile.theta

    def measure(samples):
        r = rho_lam(samples, lam)
        num = np.array([
            _shifted_norm(a, t, range(ell + 1), p, half, panels, order,
                          lambda x, t=t: noncentered_diff(a, t, ell, x))
            for t in samples])
        return r, num, num / (r / (1 + r)) ** (ell * theta)

    samples = np.atleast_2d(np.asarray(t_samples, dtype=float))
    r, num, ratios = measure(samples)
    _, _, ratios2 = measure(_doubled(samples, profile))
    m1, m2 = float(ratios.max()), float(ratios2.max())
    small = _small_slope(samples, r, ratios, lam)
    passed = bool(np.isfinite(m2) and m2 <= thresholds.stability_factor * m1
                  and (small is None or small >= -thresholds.slope_slack))
    return BoundProbeReport("diff_norm_bound", samples.tolist(), r.tolist(), ratios.tolist(), m1,
                            small, 0.0, passed, thresholds=asdict(thresholds),
                            extra={"max_ratio_doubled": m2, "norms": num.tolist(), "ell": ell,
                                   "p": list(p), "saturation": 2 ** ell})


def probe_pointwise_bound(a: Field, profile: AnisotropyProfile, ell: int, t_samples, x_samples,
                          thresholds: ProbeThresholds = ProbeThresholds()) -> BoundProbeReport:
    """Max over x of the pointwise ratio from finitediff.diff_bound_probe, per t."""
    samples = np.atleast_2d(np.asarray(t_samples, dtype=float))
    xs = np.atleast_2d(np.asarray(x_samples, dtype=float))

    def measure(ts):
        return np.array([float(np.max(diff_bound_probe(a, t, ell, xs, profile))) for t in ts])

    ratios = measure(samples)
    ratios2 = measure(_doubled(samples, profile))
    m1, m2 = float(ratios.max()), float(ratios2.max())
    r = rho_lam(samples, profile.lam_array)
    passed = bool(np.isfinite(m2) and m2 <= thresholds.stability_factor * m1)
    return BoundProbeReport("pointwise_bound", samples.tolist(), r.tolist(), ratios.tolist(), m1,
                            None, None, passed, thresholds=asdict(thresholds),
                            extra={"max_ratio_doubled": m2, "ell": ell})


def probe_moment_inequality(f: Field, profile: AnisotropyProfile, p, m: int, t_samples,
                            grid: GridSpec, config: HsiQuadratureConfig = DEFAULT_CONFIG,
                            thresholds: ProbeThresholds = ProbeThresholds(),
                            panels: int = 16, order: int = 8) -> BoundProbeReport:
    """Ratios ||centered diff^m f||_p / (rho^alpha*(t) ||T f||_p).

    T f comes from the full symbol table on ``grid``; the differences are
    integrated on boxes around the shifted copies of f (needs a decay radius).
    """
    if m <= float(np.max(profile.alpha_array)):
        raise InputError("difference order must exceed every alpha_i")
    if f.decay_radius is None:
        raise InputError("the probed function needs a decay radius")
    if f.n != profile.n or grid.n != profile.n:
        raise InputError("dimension mismatch")
    p = exponents(p)
    th = asdict(thresholds)
    samples = np.atleast_2d(np.asarray(t_samples, dtype=float))
    fs = sample(f, grid)
    if float(np.abs(fs.values).max()) == 0.0:
        return BoundProbeReport("moment_inequality", samples.tolist(), [], [], 0.0, None, None,
                                True, note="zero function: all rows skipped", thresholds=th)
    tf = apply_symbol(fs, full_symbol_table(grid, profile, None, config))
    tnorm = mixed_norm(GridFunction(grid, np.real(tf.values)), p)
    offsets = [m / 2 - k for k in range(m + 1)]
    lam, astar = profile.lam_array, profile.alpha_star

    def measure(ts):
        r = rho_lam(ts, lam)
        num = np.array([
            _shifted_norm(f, t, offsets, p, f.decay_radius, panels, order,
                          lambda x, t=t: centered_diff(f, t, m, x))
            for t in ts])
        return r, num, num / (r ** astar * tnorm)

    r, num, ratios = measure(samples)
    _, _, ratios2 = measure(_doubled(samples, profile))
    m1, m2 = float(ratios.max()), float(ratios2.max())
    small = _small_slope(samples, r, num, lam)
    passed = bool(np.isfinite(m2) and m2 <= thresholds.stability_factor * m1
                  and (small is None or small >= astar - thresholds.slope_slack))
    return BoundProbeReport("moment_inequality", samples.tolist(), r.tolist(), ratios.tolist(), m1,
                            small, astar, passed, thresholds=th,
                            extra={"max_ratio_doubled": m2, "T_norm": tnorm, "m": m,
                                   "norms": num.tolist()})


# ---------------------------------------------------------------- default suite

def default_suite(thresholds: ProbeThresholds = ProbeThresholds(), seed: int = 0) -> list:
    """The fixed battery run by ``check --suite lemmas``."""
    reports = []
    iso = derive_profile([1.0])
    big = np.geomspace(30.0, 1000.0, 5)
    reports.append(probe_I_decay(iso, 2.0, [2.0], 1, rays(iso, big), thresholds))
    reports.append(probe_I_decay(iso, 0.75, [1.0], 1, rays(iso, big), thresholds))
    aniso = derive_profile([1.0, 2.0])
    reports.append(probe_I_decay(aniso, 1.5, [2.0, 2.0], 1, rays(aniso, np.geomspace(30.0, 300.0, 4)),
                                 thresholds))
    small_to_big = np.geomspace(1e-3, 1e2, 6)
    for prof in (derive_profile([1.0, 1.0]), derive_profile([1.0, 1.5])):
        dirs = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
        ts = rays(prof, small_to_big, dirs)
        reports.append(probe_diff_norm_bound(tensor_bump(2), prof, [2.0, 2.0], 2, ts, thresholds,
                                             panels=8, order=6))
    prof = derive_profile([1.0, 1.5])
    xs = np.random.default_rng(seed).uniform(-3, 3, size=(400, 2))
    reports.append(probe_pointwise_bound(tensor_bump(2), prof, 2,
                                         rays(prof, small_to_big, [[1.0, 0.0], [1.0, 1.0]]), xs,
                                         thresholds))
    one = derive_profile([0.5])
    reports.append(probe_moment_inequality(gaussian(1.0, 1), one, [2.0], 1,
                                           rays(one, np.geomspace(1e-3, 1e2, 6), [[1.0], [-1.0]]),
                                           GridSpec(1, 32.0, 512), thresholds=thresholds))
    return reports
