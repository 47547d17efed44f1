"""Approximation by smooth compactly supported functions: mollify, then cut off.

    f_delta(x) = int a(t) f(x - delta t) dt,      mu_N(x) = mu(N^-lam x) = b(rho(x) / N),

with b = 1 on [0, 1] and 0 on [2, inf). The study tabulates the space-norm
error of f - mu_N f_delta over a grid of (delta, N).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .distance import rho_lam
from .errors import InputError, NumericalError
from .field import Field, GridFunction, GridSpec, bump_1d, sample, tensor_bump
from .profile import AnisotropyProfile
from .quadrature import gauss_legendre
from .spectral import space_norm

MASS_TOL = 1e-10


def _cube_rule(n: int, half: float, order: int):
    u, w = gauss_legendre(order)
    nodes = np.stack(np.meshgrid(*([u * half] * n), indexing="ij"), -1).reshape(-1, n)
    wts = np.ones(nodes.shape[0])
    for ax in np.meshgrid(*([w * half] * n), indexing="ij"):
        wts = wts * ax.ravel()
    return nodes, wts


def _half_width(a: Field) -> float:
    if a.box is not None:
        return a.box
    if a.support_radius is None:
        raise InputError("mollifier kernel must be compactly supported")
    return a.support_radius


def kernel_mass(a: Field, order: Optional[int] = None) -> float:
    order = order or {1: 200, 2: 96, 3: 80}.get(a.n, 32)
    nodes, wts = _cube_rule(a.n, _half_width(a), order)
    return float(np.real(a(nodes)) @ wts)


@dataclass(frozen=True)
class ApproximationSchedule:
    deltas: tuple
    radii: tuple
    kernel: Optional[Field] = None

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float)
        r = np.asarray(self.radii, dtype=float)
        if d.size == 0 or r.size == 0:
            raise InputError("schedule needs at least one delta and one radius")
        if np.any(d <= 0) or np.any(np.diff(d) >= 0):
            raise InputError("deltas must be positive and strictly decreasing")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise InputError("radii must be positive and strictly increasing")
        if self.kernel is not None and abs(kernel_mass(self.kernel) - 1) > MASS_TOL:
            raise InputError("mollifier kernel must have unit mass")

    @classmethod
    def default(cls) -> "ApproximationSchedule":
        return cls(tuple(2.0 ** -k for k in range(7)), tuple(2.0 ** k for k in range(1, 6)))


def mollify(f: Field, delta: float, a: Optional[Field] = None, order: int = 24) -> Field:
    """f_delta by a fixed tensor Gauss rule on the cube holding supp a.

    The discrete weights a(t_k) w_k are rescaled to sum to one, so constants
    are reproduced exactly and, for even a, so are linear functions.
    """
    if not delta > 0:
        raise InputError("delta must be positive")
    a = tensor_bump(f.n) if a is None else a
    if a.n != f.n:
        raise InputError("kernel and field dimensions differ")
    mass = kernel_mass(a)
    if abs(mass - 1.0) > MASS_TOL:
        raise InputError(f"mollifier kernel has mass {mass!r}, expected 1")
    nodes, wts = _cube_rule(a.n, _half_width(a), order)
    wts = wts * np.real(a(nodes))
    keep = wts != 0
    nodes, wts = nodes[keep], wts[keep] / wts[keep].sum()
    shifts = delta * nodes

    def func(x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, f.n)
        out = None
        step = max(1, (1 << 20) // len(wts))
        parts = []
        for k in range(0, flat.shape[0], step):
            vals = f(flat[k:k + step, None, :] - shifts[None, :, :])
            parts.append(vals @ wts)
        out = np.concatenate(parts) if parts else np.zeros(0)
        return out.reshape(x.shape[:-1])

    decay = None if f.decay_radius is None else f.decay_radius + delta * a.support_radius
    supp = None if f.support_radius is None else f.support_radius + delta * a.support_radius
    return Field(func, f.n, f.tag, None, f.sup, decay, supp, name=f"mollified({f.name}, {delta:g})")


def cutoff(N: float, profile: AnisotropyProfile):
    """mu_N as a function of points (..., n)."""
    if not N > 0:
        raise InputError("N must be positive")
    b = bump_1d(1.0, 2.0)
    lam = profile.lam_array

    def mu(x):
        return b(rho_lam(np.asarray(x, dtype=float), lam) / N)
    return mu


def truncate(f: Field, N: float, profile: AnisotropyProfile) -> Field:
    """mu_N f: equal to f where rho < N, zero where rho >= 2N."""
    if f.n != profile.n:
        raise InputError("field and profile dimensions differ")
    mu = cutoff(N, profile)

    def func(x):
        return mu(x) * f(x)
    # rho(x) < 2N bounds every |x_i| by (2N)^lam_i
    supp = float(np.linalg.norm((2.0 * N) ** profile.lam_array))
    if f.support_radius is not None:
        supp = min(supp, f.support_radius)
    return Field(func, f.n, f.tag, None, f.sup, f.decay_radius, supp,
                 name=f"truncated({f.name}, {N:g})")


@dataclass
class StudyRow:
    delta: float
    N: float
    error: float
    relative: float
    mollify_error: float
    truncate_error: float


@dataclass
class DensenessReport:
    initial: float
    rows: list
    diagonal_nonincreasing: bool
    config: dict = field(default_factory=dict)

    @property
    def final(self) -> StudyRow:
        return self.rows[-1]


def denseness_study(f: Field, profile: AnisotropyProfile, p, r, schedule: ApproximationSchedule,
                    grid: GridSpec, boundary_tol: float = 1e-12) -> DensenessReport:
    """space_norm(f - mu_N f_delta) for every (delta, N), rows delta-major.

    The cut-off functions must vanish on the box boundary (else the periodic
    grid norm would see a jump); this replaces a fixed N <= L/4 rule, which
    the default schedule (N up to 32 on L = 16) would violate for no reason
    when f itself already decays inside the box.
    """
    if grid.n != profile.n or f.n != profile.n:
        raise InputError("dimension mismatch")
    fs = sample(f, grid)
    initial = space_norm(fs, profile, p, r)
    pts = grid.points()
    scale = float(np.abs(fs.values).max())
    rows = []
    for delta in schedule.deltas:
        fd = sample(mollify(f, delta, schedule.kernel), grid)
        e_moll = space_norm(fs - fd, profile, p, r)
        for N in schedule.radii:
            mu = cutoff(N, profile)(pts)
            approx = GridFunction(grid, mu * fd.values)
            if approx.boundary_max() > boundary_tol * max(scale, 1e-300):
                raise NumericalError(
                    f"truncated function is not negligible on the box boundary at N={N:g}; "
                    "enlarge the grid")
            e = space_norm(fs - approx, profile, p, r)
            e_tr = space_norm(fd - approx, profile, p, r)
            rows.append(StudyRow(float(delta), float(N), e, e / initial, e_moll, e_tr))
    diag = [row.error for row in rows
            if schedule.deltas.index(row.delta) == schedule.radii.index(row.N)] \
        if len(schedule.deltas) and len(schedule.radii) else []
    nonincreasing = all(b <= a * 1.05 for a, b in zip(diag, diag[1:]))
    cfg = {"p": list(p), "r": list(r), "grid": {"n": grid.n, "L": grid.L, "N": grid.N},
           "deltas": list(schedule.deltas), "radii": list(schedule.radii)}
    return DensenessReport(initial, rows, nonincreasing, cfg)
