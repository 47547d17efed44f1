"""Potential kernel inverting the hypersingular operator (the alpha* < n case).

With a bump phi on (lo, hi), int_0^inf phi(t)/t dt = 1, and g = phi(rho(xi)) / S(xi),

    1 / S(xi) = int_0^inf g(s^lam xi) s^(alpha*-1) ds,

so the inverse transform of 1/S is the kernel

    Q(x) = int_0^inf t^(n-alpha*-1) g~(t^lam x) dt,   g~ = F^-1 g,

which is lam-homogeneous of order alpha* - n. g is compactly supported away
from the origin, so g~ is computed once on a grid and interpolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, ndimage

from .distance import rho_lam
from .errors import InputError, UnsupportedBranchError
from .field import Field, GridFunction, GridSpec, bump_profile, sample
from .hsi import DEFAULT_CONFIG, HsiQuadratureConfig, full_symbol, full_symbol_table, truncated_hsi
from .mixednorm import INF, exponents, mixed_norm
from .profile import AnisotropyProfile
from .quadrature import gauss_legendre
from .spectral import dft, inverse_dft

# relative size of t^lam x below which g~(t^lam x) is taken as g~(0)
_HEAD = 1e-3


@dataclass(frozen=True)
class KernelSynthesisConfig:
    """``bump`` support of phi; g~ lives on GridSpec(n, grid_L, grid_N);
    the t-integral uses Gauss panels of ``t_order`` nodes on the lattice
    t_base^k, split so that t^lam x moves at most path_step / hi^lam_max
    per piece."""
    bump: tuple = (1.0, 2.0)
    grid_L: float = 64.0
    grid_N: int = 512
    t_order: int = 8
    t_base: float = 1.5
    path_step: float = 1.0

    def __post_init__(self):
        lo, hi = self.bump
        if not 0 < lo < hi:
            raise InputError("bump support must satisfy 0 < lo < hi")
        if self.t_order < 1 or self.grid_N < 8 or self.t_base <= 1:
            raise InputError("invalid kernel synthesis resolution")


def normalized_bump(lo: float, hi: float):
    """phi supported in (lo, hi) scaled so that int phi(t)/t dt = 1 (checked to 1e-10)."""
    prof = bump_profile(lo, hi)
    mass, _ = integrate.quad(lambda t: prof(t) / t, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=200)
    c = 1.0 / mass

    def phi(t):
        return c * prof(t)
    check, _ = integrate.quad(lambda t: phi(t) / t, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=200)
    if abs(check - 1.0) > 1e-10:
        raise AssertionError("bump normalization failed")
    return phi


class PotentialKernel:
    """Q for one profile; callable on points of shape (..., n), x != 0."""

    def __init__(self, profile: AnisotropyProfile, ell: Optional[int] = None,
                 config: KernelSynthesisConfig = KernelSynthesisConfig(),
                 symbol_config: HsiQuadratureConfig = DEFAULT_CONFIG):
        n = profile.n
        if not profile.alpha_star < n:
            raise UnsupportedBranchError(
                f"alpha*={profile.alpha_star:g} >= n={n}: the kernel needs a polynomial "
                "correction that is not implemented")
        self.profile = profile
        self.config = config
        self.ell = ell
        lo, hi = config.bump
        phi = normalized_bump(lo, hi)
        grid = GridSpec(n, config.grid_L, config.grid_N)
        xi = grid.dual_points()
        r = rho_lam(xi, profile.lam_array)
        mask = (r > lo) & (r < hi)
        if 5 * grid.dual_spacing > lo ** profile.lam_array.max():
            raise InputError("kernel grid too coarse in frequency; raise grid_L")
        if hi ** profile.lam_array.max() > 0.8 * math.pi / grid.h:
            raise InputError("bump support exceeds the grid band; raise grid_N")
        g = np.zeros(grid.shape)
        g[mask] = phi(r[mask]) / full_symbol(xi[mask], profile, ell, symbol_config)
        gt = inverse_dft(GridFunction(grid, g)).values
        self.grid = grid
        self._coef = ndimage.spline_filter(np.real(gt), order=3, mode="grid-wrap")
        self.g_origin = float(self._gtilde(np.zeros((1, n)))[0])

    def _gtilde(self, y) -> np.ndarray:
        """Cubic-spline interpolation of g~ (the grid is periodic; callers stay inside)."""
        y = np.asarray(y, dtype=float)
        idx = (y + self.grid.L) / self.grid.h
        return ndimage.map_coordinates(self._coef, idx.reshape(-1, self.grid.n).T, order=3,
                                       mode="grid-wrap", prefilter=False)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        n = self.profile.n
        if x.shape[-1] != n:
            raise InputError("point dimension mismatch")
        pts = x.reshape(-1, n)
        if np.any(np.all(pts == 0, axis=-1)):
            raise InputError("the potential kernel is singular at x = 0")
        lam = self.profile.lam_array
        kappa = n - self.profile.alpha_star
        base = self.config.t_base
        ax = np.abs(pts)
        with np.errstate(divide="ignore"):
            # stay inside the g~ box: t^lam_i |x_i| <= 0.95 L
            t_top = np.min(np.where(ax > 0, (0.95 * self.grid.L / ax) ** (1 / lam), np.inf), axis=1)
            t_head = np.min(np.where(ax > 0, (_HEAD / ax) ** (1 / lam), np.inf), axis=1)
        # snap both ends to the global lattice base^k
        k_lo = np.floor(np.log(t_head) / math.log(base)).astype(int)
        k_hi = np.floor(np.log(t_top) / math.log(base)).astype(int)
        k_hi = np.maximum(k_hi, k_lo + 1)
        out = self.g_origin * (base ** k_lo.astype(float)) ** kappa / kappa
        u, w = gauss_legendre(self.config.t_order)
        # g~ oscillates with frequencies up to hi^lam_max: bound the y-path per piece
        step = self.config.path_step / self.config.bump[1] ** lam.max()
        for k in range(int(k_lo.min()), int(k_hi.max())):
            sel = np.nonzero((k >= k_lo) & (k < k_hi))[0]
            if sel.size == 0:
                continue
            a, b = base ** k, base ** (k + 1)
            path = np.max(ax[sel] * (b ** lam - a ** lam), axis=1)
            pieces = np.maximum(1, np.ceil(path / step)).astype(int)
            for m in np.unique(pieces):
                sub = sel[pieces == m]
                edges = np.linspace(a, b, m + 1)
                lo_e, hi_e = edges[:-1, None], edges[1:, None]
                t = (0.5 * (lo_e + hi_e) + 0.5 * (hi_e - lo_e) * u).ravel()
                wt = (0.5 * (hi_e - lo_e) * w).ravel() * t ** (kappa - 1)
                y = t[None, :, None] ** lam * pts[sub, None, :]
                out[sub] += self._gtilde(y).reshape(sub.size, -1) @ wt
        return out.reshape(x.shape[:-1])

    def field(self) -> Field:
        return Field(self, self.profile.n, "bounded", name="potential-kernel")

    def cell_average(self, center, h: float, depth: int = 24, order: int = 6) -> float:
        """Mean of Q over the cube center + [-h/2, h/2]^n; the cube containing
        the singularity is refined by 3^n subdivision ``depth`` times."""
        n = self.profile.n
        center = np.asarray(center, dtype=float)
        u, w = gauss_legendre(order)
        nodes = np.stack(np.meshgrid(*([u] * n), indexing="ij"), -1).reshape(-1, n)
        wts = np.prod(np.stack(np.meshgrid(*([w] * n), indexing="ij"), -1).reshape(-1, n), axis=1)
        wts = wts / wts.sum()
        offs = np.stack(np.meshgrid(*([np.array([-1.0, 0.0, 1.0])] * n), indexing="ij"), -1).reshape(-1, n)

        def avg(c, size, level):
            if level == 0 or np.any(np.abs(c) > size / 2):
                return float(self(c + 0.5 * size * nodes) @ wts)
            sub = size / 3
            total = 0.0
            for o in offs:
                total += avg(c + o * sub, sub, level - 1)
            return total / len(offs)
        return avg(center, h, depth)


def kernel_q(x, profile: AnisotropyProfile,
             config: KernelSynthesisConfig = KernelSynthesisConfig(),
             symbol_config: HsiQuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    return PotentialKernel(profile, None, config, symbol_config)(x)


def kernel_table(kernel: PotentialKernel, grid: GridSpec, near: int = 8, order: int = 4) -> np.ndarray:
    """Q on the offsets of ``grid`` doubled (FFT order).

    Point values of a kernel with an integrable singularity converge slowly
    (like h^alpha*), so cells within ``near`` steps of the origin hold Gauss
    cell averages instead; the origin cell is averaged with local refinement.
    """
    n = grid.n
    big = GridSpec(n, 2 * grid.L, 2 * grid.N)
    k = np.fft.fftfreq(big.N, 1.0 / big.N)
    idx = np.stack(np.meshgrid(*([k] * n), indexing="ij"), -1).reshape(-1, n)
    flat = idx * grid.h
    vals = np.zeros(flat.shape[0])
    band = np.max(np.abs(idx), axis=1) <= near
    far = ~band
    vals[far] = kernel(flat[far])
    u, w = gauss_legendre(order)
    nodes = np.stack(np.meshgrid(*([u] * n), indexing="ij"), -1).reshape(-1, n)
    wts = np.prod(np.stack(np.meshgrid(*([w] * n), indexing="ij"), -1).reshape(-1, n), axis=1)
    wts = wts / wts.sum()
    ring = np.flatnonzero(band & np.any(idx != 0, axis=1))
    pts = flat[ring, None, :] + 0.5 * grid.h * nodes[None, :, :]
    vals[ring] = kernel(pts).reshape(ring.size, -1) @ wts
    vals = vals.reshape(big.shape)
    vals[(0,) * n] = kernel.cell_average(np.zeros(n), grid.h)
    return vals


def convolve(kernel, phi: GridFunction, table: Optional[np.ndarray] = None) -> GridFunction:
    """Linear (non-periodic) convolution int K(x - y) phi(y) dy on the grid of phi.

    ``kernel`` is a PotentialKernel (or any callable with ``cell_average``);
    the kernel is sampled on the doubled box so no wrap-around occurs.
    """
    grid = phi.grid
    if table is None:
        table = kernel_table(kernel, grid)
    N = grid.N
    padded = np.zeros(tuple(2 * N for _ in range(grid.n)), dtype=np.result_type(phi.values, float))
    padded[tuple(slice(0, N) for _ in range(grid.n))] = phi.values
    conv = np.fft.ifftn(np.fft.fftn(padded) * np.fft.fftn(table)) * grid.h ** grid.n
    out = conv[tuple(slice(0, N) for _ in range(grid.n))]
    if not np.iscomplexobj(phi.values):
        out = out.real
    return GridFunction(grid, out)


@dataclass(frozen=True)
class SobolevExponents:
    feasible: bool
    q: Optional[tuple]
    deficit: float
    budget: float


def sobolev_exponents(profile: AnisotropyProfile, p: Sequence[float], kernel_order: float) -> SobolevExponents:
    """q with sum 1/(alpha_i q_i) = sum 1/(alpha_i p_i) - (kernel_order + n)/alpha*.

    The single relation leaves n - 1 degrees of freedom; the deficit is split
    in proportion to the terms 1/(alpha_i p_i), i.e. 1/q_i = c/p_i with one
    common c in (0, 1), which keeps every q_i > p_i.
    """
    p = exponents(p)
    if len(p) != profile.n or any(v == INF for v in p):
        raise InputError("need one finite exponent per axis")
    alpha = profile.alpha_array
    terms = 1.0 / (alpha * np.asarray(p))
    budget = float(terms.sum())
    deficit = (kernel_order + profile.n) / profile.alpha_star
    if budget <= deficit:
        return SobolevExponents(False, None, deficit, budget)
    c = 1.0 - deficit / budget
    q = tuple(float(pi / c) for pi in p)
    return SobolevExponents(True, q, deficit, budget)


@dataclass
class SobolevProbeReport:
    ratios: list
    max_ratio: float
    skipped: int


def sobolev_probe(kernel: PotentialKernel, p, q, fixtures) -> SobolevProbeReport:
    """||K phi||_q / ||phi||_p over grid fixtures (zero fixtures skipped)."""
    ratios, skipped = [], 0
    tables = {}
    for g in fixtures:
        den = mixed_norm(g, p)
        if den == 0:
            skipped += 1
            continue
        key = (g.grid.n, g.grid.L, g.grid.N)
        if key not in tables:
            tables[key] = kernel_table(kernel, g.grid)
        num = mixed_norm(convolve(kernel, g, tables[key]), q)
        ratios.append(num / den)
    mx = max(ratios) if ratios else float("nan")
    return SobolevProbeReport(ratios, mx, skipped)


# ---------------------------------------------------------------- inversion checks

def inversion_residual(f: Field, profile: AnisotropyProfile, grid: GridSpec,
                       kernel: Optional[PotentialKernel] = None,
                       hsi_config: HsiQuadratureConfig = DEFAULT_CONFIG) -> float:
    """||Q * (T f) - f||_2 / ||f||_2 on ``grid``.

    T f is the pointwise hypersingular integral (eps = 0) at the grid nodes;
    the convolution is linear, so the residual also contains the part of T f
    lying outside the box. That part decays like rho^(-n - alpha*), hence the
    residual shrinks as the box grows.
    """
    if grid.n != profile.n or f.n != profile.n:
        raise InputError("dimension mismatch")
    kernel = PotentialKernel(profile) if kernel is None else kernel
    tf = truncated_hsi(f, grid.points(), profile, kernel.ell, replace(hsi_config, eps=0.0)).value
    back = convolve(kernel, GridFunction(grid, tf))
    fs = sample(f, grid)
    two = [2.0] * grid.n
    return mixed_norm(back - fs, two) / mixed_norm(fs, two)


def spectral_inversion_residual(f: Field, profile: AnisotropyProfile, grid: GridSpec,
                                ell: Optional[int] = None,
                                config: HsiQuadratureConfig = DEFAULT_CONFIG) -> float:
    """||F^-1((1/S) S f^) - f||_2 / ||f||_2 with the symbol table of ``grid``.

    1/S is applied where S != 0; at xi = 0 the product (1/S) S is given its
    continuous value 1, so the mean of f is kept.
    """
    s = full_symbol_table(grid, profile, ell, config).values
    fs = sample(f, grid)
    fh = dft(fs).values
    forward = s * fh
    nz = s != 0
    inv = np.zeros_like(forward)
    inv[nz] = forward[nz] / s[nz]
    inv[~nz] = fh[~nz]
    back = inverse_dft(GridFunction(grid, inv)).values.real
    two = [2.0] * grid.n
    return mixed_norm(GridFunction(grid, back) - fs, two) / mixed_norm(fs, two)
