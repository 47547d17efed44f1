"""Grid realization of the Fourier transform F f(y) = int f(x) e^{+i x.y} dx.

numpy's FFT uses the kernel e^{-2 pi i k m / N}; the +i convention of this
library is obtained from ``ifftn`` (kernel e^{+...}) scaled by N^n, times the
cell volume h^n and the phase e^{-i L sum(y)} that accounts for the box
starting at -L. Spectra are stored in FFT index order; ``GridSpec.dual_axis``
gives the matching frequencies (index N/2 holds +Nyquist).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .field import GridFunction, GridSpec
from .mixednorm import mixed_norm
from .profile import AnisotropyProfile
from .distance import rho_lam

REAL_RESIDUE_TOL = 1e-12


@dataclass
class SymbolTable:
    grid: GridSpec
    values: np.ndarray
    tag: str = "custom"

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise InputError("symbol table shape does not match its grid")

    def __mul__(self, other: "SymbolTable") -> "SymbolTable":
        if other.grid != self.grid:
            raise InputError("grid mismatch")
        return SymbolTable(self.grid, self.values * other.values, f"{self.tag}*{other.tag}")

    def to_csv(self, path) -> None:
        xi = self.grid.dual_points().reshape(-1, self.grid.n)
        vals = self.values.ravel()
        with open(path, "w", newline="\n") as fh:
            fh.write(f"# tag={self.tag} n={self.grid.n} N={self.grid.N} L={self.grid.L!r}\n")
            fh.write(",".join(f"xi{i + 1}" for i in range(self.grid.n)) + ",re,im\n")
            for p, v in zip(xi, vals):
                v = complex(v)
                fh.write(",".join(f"{c:.17g}" for c in p) + f",{v.real:.17g},{v.imag:.17g}\n")


def _phase(grid: GridSpec) -> np.ndarray:
    xi = grid.dual_points()
    return np.exp(-1j * grid.L * xi.sum(axis=-1))


def dft(g: GridFunction) -> GridFunction:
    """Discrete approximation of F g on the dual grid (FFT order)."""
    grid = g.grid
    spec = np.fft.ifftn(g.values) * (grid.N * grid.h) ** grid.n
    return GridFunction(grid, spec * _phase(grid))


def inverse_dft(G: GridFunction) -> GridFunction:
    """Inverse of ``dft``: (2 pi)^{-n} int G(y) e^{-i x.y} dy on the grid."""
    grid = G.grid
    vals = np.fft.fftn(G.values / _phase(grid)) / (2.0 * grid.L) ** grid.n
    return GridFunction(grid, vals)


def liouville_table(grid: GridSpec, profile: AnisotropyProfile) -> SymbolTable:
    """sum_j |xi_j|^{alpha_j} on the dual grid."""
    if grid.n != profile.n:
        raise InputError("grid and profile dimensions differ")
    xi = grid.dual_points()
    vals = np.sum(np.abs(xi) ** profile.alpha_array, axis=-1)
    return SymbolTable(grid, vals, "liouville")


def rho_power_table(grid: GridSpec, profile: AnisotropyProfile, s: float) -> SymbolTable:
    """rho(xi)^s; for s < 0 the constant mode is set to 0 (mean annihilated)."""
    if grid.n != profile.n:
        raise InputError("grid and profile dimensions differ")
    r = rho_lam(grid.dual_points(), profile.lam_array)
    with np.errstate(divide="ignore"):
        vals = np.where(r > 0, r ** s, 0.0 if s < 0 else (1.0 if s == 0 else 0.0))
    return SymbolTable(grid, vals, f"rho_power({s})")


def _is_real_even(values: np.ndarray) -> bool:
    if np.iscomplexobj(values) and np.any(values.imag != 0):
        return False
    v = np.real(values)
    # reflection m -> -m in FFT order, per axis
    for ax in range(v.ndim):
        refl = np.roll(np.flip(v, axis=ax), 1, axis=ax)
        N = v.shape[ax]
        # the +Nyquist bin has no partner; exclude it from the comparison
        sl = [slice(None)] * v.ndim
        sl[ax] = np.r_[0:N // 2, N // 2 + 1:N]
        if not np.allclose(v[tuple(sl)], refl[tuple(sl)], rtol=1e-12, atol=0):
            return False
    return True


def apply_symbol(g: GridFunction, s: SymbolTable) -> GridFunction:
    """inverse_dft(s * dft(g)).

    For real data and a real symbol even in every axis the output is real;
    an imaginary residue above 1e-12 relative is reported as an error.
    """
    if s.grid != g.grid:
        raise InputError("symbol and data grids differ")
    out = inverse_dft(GridFunction(g.grid, s.values * dft(g).values))
    if not np.iscomplexobj(g.values) and _is_real_even(s.values):
        vals = out.values
        scale = max(float(np.abs(vals).max()), np.finfo(float).tiny)
        resid = float(np.abs(vals.imag).max()) / scale
        if resid > REAL_RESIDUE_TOL:
            raise NumericalError(f"imaginary residue {resid:.3e} exceeds {REAL_RESIDUE_TOL}")
        return GridFunction(g.grid, vals.real.copy())
    return out


def space_norm(g: GridFunction, profile: AnisotropyProfile, p, r) -> float:
    """||g||_r + ||F^{-1}(sum_j |xi_j|^{alpha_j}) F g||_p."""
    lv = apply_symbol(g, liouville_table(g.grid, profile))
    return mixed_norm(g, r) + mixed_norm(lv, p)


@dataclass
class MultiplierReport:
    table: SymbolTable
    min_abs: float
    max_abs: float
    sign: int


def multiplier_ratio_table(grid: GridSpec, profile: AnisotropyProfile,
                           hsi_symbol: SymbolTable) -> MultiplierReport:
    """b(xi) = S(xi) / sum_j |xi_j|^{alpha_j}, with b(0) taken from the first
    diagonal node (1, ..., 1) * pi / L."""
    if hsi_symbol.grid != grid:
        raise InputError("symbol grid mismatch")
    den = liouville_table(grid, profile).values
    num = np.real(hsi_symbol.values)
    nz = den > 0
    b = np.zeros(grid.shape)
    b[nz] = num[nz] / den[nz]
    diag = (1,) * grid.n
    zero = (0,) * grid.n
    b[zero] = b[diag]
    vals = b[nz]
    signs = np.sign(vals)
    sign = int(signs[0]) if np.all(signs == signs[0]) else 0
    return MultiplierReport(SymbolTable(grid, b, "multiplier"),
                            float(np.abs(vals).min()), float(np.abs(vals).max()), sign)
