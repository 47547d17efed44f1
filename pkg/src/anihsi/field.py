"""Analytic test functions and their samples on uniform periodic boxes.

Fourier transforms use the convention  F f(y) = int f(x) exp(+i x.y) dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import InputError

SMOOTH = "smooth"
COMPACT_SMOOTH = "compactly-supported-smooth"
BOUNDED = "bounded"


@dataclass(frozen=True)
class Field:
    """An analytically evaluable function on R^n.

    ``func`` maps an array of points of shape (..., n) to values of shape (...).
    ``sup`` is an upper bound for |f| when known; ``decay_radius`` is a
    Euclidean radius outside which |f| < 1e-16 * sup. ``degree`` is set for
    polynomials (constants have degree 0). ``box`` is the half-width of a
    cube holding the support, when tighter than the support ball.
    """
    func: Callable[[np.ndarray], np.ndarray]
    n: int
    tag: str = SMOOTH
    ft: Optional[Callable[[np.ndarray], np.ndarray]] = None
    sup: Optional[float] = None
    decay_radius: Optional[float] = None
    support_radius: Optional[float] = None
    name: str = "field"
    degree: Optional[int] = None
    box: Optional[float] = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise InputError(f"point dimension {x.shape[-1]} != field dimension {self.n}")
        return self.func(x)

    def __add__(self, other: "Field") -> "Field":
        return combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: "Field") -> "Field":
        return combine([(1.0, self), (-1.0, other)])

    def scaled(self, c: complex) -> "Field":
        return combine([(c, self)])


def combine(terms) -> Field:
    """Linear combination sum_k c_k f_k of fields of equal dimension."""
    terms = list(terms)
    n = terms[0][1].n
    if any(f.n != n for _, f in terms):
        raise InputError("dimension mismatch in field combination")

    def func(x):
        return sum(c * f.func(x) for c, f in terms)

    def ft_sum(y):
        return sum(c * f.ft(y) for c, f in terms)
    ft = ft_sum if all(f.ft is not None for _, f in terms) else None
    sup = None
    if all(f.sup is not None for _, f in terms):
        sup = float(sum(abs(c) * f.sup for c, f in terms))
    decay = None
    if all(f.decay_radius is not None for _, f in terms):
        decay = max(f.decay_radius for _, f in terms)
    supp = None
    if all(f.support_radius is not None for _, f in terms):
        supp = max(f.support_radius for _, f in terms)
    tags = {f.tag for _, f in terms}
    tag = tags.pop() if len(tags) == 1 else (BOUNDED if BOUNDED in tags else SMOOTH)
    degree = None
    if all(f.degree is not None for _, f in terms):
        degree = max(f.degree for _, f in terms)
    return Field(func, n, tag, ft, sup, decay, supp, name="combination", degree=degree)


def gaussian(a: float, n: int, center=None) -> Field:
    """exp(-a |x - c|^2) with transform (pi/a)^{n/2} exp(-|y|^2/(4a) + i c.y)."""
    if not a > 0:
        raise InputError("gaussian width parameter a must be positive")
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)

    def func(x):
        d = x - c
        return np.exp(-a * np.sum(d * d, axis=-1))

    def ft(y):
        y = np.asarray(y, dtype=float)
        return (math.pi / a) ** (n / 2) * np.exp(-np.sum(y * y, axis=-1) / (4 * a)
                                                 + 1j * (y @ c))

    # exp(-a r^2) < 1e-16 beyond this radius
    decay = math.sqrt(37.0 / a) + float(np.linalg.norm(c))
    return Field(func, n, SMOOTH, ft, 1.0, decay, None, name=f"gaussian(a={a})")


def zero_mass_gaussian(a: float, n: int) -> Field:
    """G_a - 2^{n/2} G_{2a}: a Gaussian pair with vanishing total mass."""
    return combine([(1.0, gaussian(a, n)), (-(2.0 ** (n / 2)), gaussian(2 * a, n))])


def constant(c: complex, n: int) -> Field:
    def func(x):
        return np.full(np.shape(x)[:-1], c)
    return Field(func, n, SMOOTH, None, abs(c), None, None, name=f"constant({c})", degree=0)


def polynomial(coeffs: dict, n: int) -> Field:
    """sum_k coeffs[k] x^k over multi-indices k (tuples of length n)."""
    items = [(tuple(k), complex(v)) for k, v in coeffs.items()]

    def func(x):
        out = np.zeros(np.shape(x)[:-1], dtype=complex)
        for k, v in items:
            out = out + v * np.prod(x ** np.asarray(k, dtype=float), axis=-1)
        if all(v.imag == 0 for _, v in items):
            return out.real
        return out
    degree = max((sum(k) for k, v in items if v != 0), default=0)
    return Field(func, n, SMOOTH, None, None, None, None, name="polynomial", degree=degree)


def separable(factors) -> Field:
    """Product f(x) = prod_i u_i(x_i) of one-dimensional callables."""
    factors = list(factors)

    def func(x):
        out = factors[0](x[..., 0])
        for i, u in enumerate(factors[1:], start=1):
            out = out * u(x[..., i])
        return out
    return Field(func, len(factors), SMOOTH, name="separable")


def _raw_bump(s):
    """exp(-1/s) for s > 0, else 0 (the C-infinity building block)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def smooth_step(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, monotone in between."""
    a = _raw_bump(s)
    b = _raw_bump(1.0 - np.asarray(s, dtype=float))
    return a / (a + b)


@dataclass(frozen=True)
class Bump1D:
    """Smooth cutoff: 1 on [0, inner], 0 on [outer, inf), nonincreasing between.

    The transition is ``smooth_step``, the quotient e(s) / (e(s) + e(1-s))
    with e(s) = exp(-1/s).
    """
    inner: float
    outer: float

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise InputError("bump_1d needs 0 < inner < outer")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        s = (np.abs(r) - self.inner) / (self.outer - self.inner)
        return 1.0 - smooth_step(s)


def bump_1d(inner: float, outer: float) -> Bump1D:
    return Bump1D(inner, outer)


def bump_profile(lo: float, hi: float):
    """C-infinity function supported in (lo, hi): exp(-1/((s-lo)(hi-s)))."""
    if not lo < hi:
        raise InputError("bump_profile needs lo < hi")

    def f(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        m = (s > lo) & (s < hi)
        q = (s[m] - lo) * (hi - s[m]) / ((hi - lo) / 2) ** 2
        out[m] = np.exp(1.0 - 1.0 / q)
        return out
    return f


@lru_cache(maxsize=1)
def _unit_bump_mass() -> float:
    # int_{-1}^{1} exp(1 - 1/(1 - s^2)) ds; scaling s -> s/r multiplies it by r
    val, _ = integrate.quad(lambda s: math.exp(1.0 - 1.0 / (1.0 - s * s)), -1.0, 1.0,
                            epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def tensor_bump(n: int, radius: float = 1.0) -> Field:
    """Unit-mass C0-infinity kernel prod_i b(x_i/radius) supported in the cube."""
    if not radius > 0:
        raise InputError("radius must be positive")
    prof = bump_profile(-radius, radius)
    norm = (radius * _unit_bump_mass()) ** n

    def func(x):
        out = np.ones(np.shape(x)[:-1])
        for i in range(n):
            out = out * prof(x[..., i])
        return out / norm
    return Field(func, n, COMPACT_SMOOTH, None, 1.0 / norm, radius * math.sqrt(n),
                 radius * math.sqrt(n), name=f"tensor_bump(r={radius})", box=radius)


# ---------------------------------------------------------------- grids

@dataclass(frozen=True)
class GridSpec:
    """Uniform box [-L, L)^n with N points per axis."""
    n: int
    L: float
    N: int

    def __post_init__(self):
        if self.N < 4 or self.N % 2:
            raise InputError("N must be even and >= 4")
        if not self.L > 0:
            raise InputError("L must be positive")
        if self.n < 1:
            raise InputError("dimension must be >= 1")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def dual_spacing(self) -> float:
        return math.pi / self.L

    @property
    def shape(self):
        return (self.N,) * self.n

    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    def dual_axis(self) -> np.ndarray:
        """Frequencies in FFT storage order; index N/2 holds +Nyquist."""
        k = np.arange(self.N)
        m = np.where(k <= self.N // 2, k, k - self.N)
        return m * self.dual_spacing

    def points(self) -> np.ndarray:
        axes = [self.axis()] * self.n
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def dual_points(self) -> np.ndarray:
        axes = [self.dual_axis()] * self.n
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def padded(self, factor: int) -> "GridSpec":
        """Same spacing, box enlarged ``factor`` times (for linear convolutions)."""
        return GridSpec(self.n, self.L * factor, self.N * factor)


@dataclass
class GridFunction:
    """Samples on a GridSpec; axis k of ``values`` is coordinate x_{k+1}."""
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise InputError(f"sample shape {self.values.shape} != grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise InputError("grid samples must be finite")

    def __add__(self, other):
        _same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        return GridFunction(self.grid, self.values * c)

    __rmul__ = __mul__

    def boundary_max(self) -> float:
        """max |g| over the faces of the box (first index along any axis)."""
        v = np.abs(self.values)
        return max(float(np.take(v, 0, axis=k).max()) for k in range(self.grid.n))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            g = self.grid
            fh.write(f"# n={g.n} N={g.N} L={g.L!r}\n")
            fh.write("index,re,im\n")
            for i, v in enumerate(self.values.ravel(order="C")):
                v = complex(v)
                fh.write(f"{i},{v.real:.17g},{v.imag:.17g}\n")

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        with open(path) as fh:
            header = fh.readline().lstrip("# ").split()
            meta = dict(item.split("=") for item in header)
            g = GridSpec(int(meta["n"]), float(meta["L"]), int(meta["N"]))
            fh.readline()
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        vals = data[:, 1] + 1j * data[:, 2]
        if not np.any(data[:, 2]):
            vals = data[:, 1]
        return cls(g, vals.reshape(g.shape))


def _same_grid(a: GridFunction, b: GridFunction):
    if a.grid != b.grid:
        raise InputError("grid mismatch")


def sample(f: Field, grid: GridSpec) -> GridFunction:
    """Evaluate ``f`` at the nodes -L + k h."""
    if f.n != grid.n:
        raise InputError("field and grid dimensions differ")
    return GridFunction(grid, f(grid.points()))
