"""Quadrature building blocks in anisotropic polar coordinates.

Every t != 0 is written uniquely as t = r^lam * omega with r = rho(t) and
omega on the Euclidean unit sphere; then

    dt = r^(n-1) * w(omega) dr dS(omega),    w(omega) = sum_i lam_i omega_i^2,

because sum_i lam_i = n. Radial integrals are done with Gauss-Legendre panels
on a geometric lattice, split further wherever the integrand can oscillate.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import InputError


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_rule(breaks, order: int):
    """Composite Gauss rule on consecutive intervals of ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre(order)
    a = breaks[:-1, None]
    b = breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def sphere_rule(n: int, m: int = 128):
    """Nodes omega (K, n) and weights (K,) for the unit sphere S^{n-1}.

    n=1: the two points +-1. n=2: m equispaced angles (spectral for periodic
    integrands). n=3: Gauss-Legendre in z (m//2 nodes) times m angles.
    All rules are symmetric under omega -> -omega when m is even.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if m < 4 or m % 2:
        raise InputError("angular resolution must be an even integer >= 4")
    if n == 2:
        phi = (np.arange(m) + 0.5) * (2 * math.pi / m)
        om = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        return om, np.full(m, 2 * math.pi / m)
    if n == 3:
        z, wz = gauss_legendre(max(m // 2, 2))
        phi = (np.arange(m) + 0.5) * (2 * math.pi / m)
        Z, P = np.meshgrid(z, phi, indexing="ij")
        s = np.sqrt(1 - Z * Z)
        om = np.stack([s * np.cos(P), s * np.sin(P), Z], axis=-1).reshape(-1, 3)
        w = (wz[:, None] * np.full(m, 2 * math.pi / m)[None, :]).ravel()
        return om, w
    raise InputError("only dimensions 1, 2 and 3 are supported")


def _graded(q: int):
    """Gauss rule on [0, 1] after the quintic change of variable that flattens
    both endpoints; absorbs |s|^a type kinks sitting at the endpoints."""
    s, w = gauss_legendre(q)
    s = 0.5 * (s + 1.0)
    w = 0.5 * w
    u = s ** 3 * (10 - 15 * s + 6 * s * s)
    du = 30 * s * s * (1 - s) ** 2
    return u, w * du


def octant_sphere_rule(n: int, m: int = 128):
    """Sphere rule whose cells never straddle a coordinate hyperplane.

    Functions like |omega_1|^a are smooth inside each orthant, so a graded
    Gauss rule per orthant converges fast where an equispaced rule would not.
    """
    if n == 1:
        return sphere_rule(1)
    if m < 4 or m % 4:
        raise InputError("angular resolution must be a multiple of 4")
    u, w = _graded(m // 4)
    phi = np.concatenate([(k + u) * (math.pi / 2) for k in range(4)])
    wphi = np.tile(w * (math.pi / 2), 4)
    if n == 2:
        return np.stack([np.cos(phi), np.sin(phi)], axis=-1), wphi
    if n == 3:
        uz, wz = _graded(m // 4)
        z = np.concatenate([-uz[::-1], uz])
        wz = np.concatenate([wz[::-1], wz])
        Z, P = np.meshgrid(z, phi, indexing="ij")
        s = np.sqrt(np.clip(1 - Z * Z, 0, None))
        om = np.stack([s * np.cos(P), s * np.sin(P), Z], axis=-1).reshape(-1, 3)
        return om, (wz[:, None] * wphi[None, :]).ravel()
    raise InputError("only dimensions 1, 2 and 3 are supported")


def anisotropic_sphere_rule(lam, m: int = 128, graded: bool = False):
    """Sphere nodes with the polar Jacobian w(omega) folded into the weights."""
    lam = np.asarray(lam, dtype=float)
    om, w = (octant_sphere_rule if graded else sphere_rule)(lam.size, m)
    return om, w * ((om * om) @ lam)


def lattice_breaks(lo: float, hi: float, per_octave: int, base: float = 2.0) -> np.ndarray:
    """lo, hi and every lattice point base^(k/per_octave) strictly between them."""
    if not 0 < lo < hi:
        raise InputError("lattice needs 0 < lo < hi")
    lb = math.log(base)
    k0 = math.floor(math.log(lo) / lb * per_octave) + 1
    k1 = math.ceil(math.log(hi) / lb * per_octave) - 1
    inner = base ** (np.arange(k0, k1 + 1) / per_octave) if k1 >= k0 else np.empty(0)
    inner = inner[(inner > lo * (1 + 1e-14)) & (inner < hi * (1 - 1e-14))]
    return np.concatenate([[lo], inner, [hi]])


def refine_breaks(breaks, variation, limit: float) -> np.ndarray:
    """Split each interval uniformly so ``variation(a, b) <= limit`` per piece."""
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1], breaks[1:]
    counts = np.maximum(1, np.ceil(variation(a, b) / limit)).astype(int)
    pieces = [np.linspace(x, y, c + 1)[:-1] for x, y, c in zip(a, b, counts)]
    return np.concatenate(pieces + [breaks[-1:]])


def power_variation(coeff, lam):
    """Callable bounding the variation of sum_i coeff_i r^lam_i on [a, b]."""
    coeff = np.asarray(coeff, dtype=float)
    lam = np.asarray(lam, dtype=float)

    def var(a, b):
        return (coeff[None, :] * (b[:, None] ** lam - a[:, None] ** lam)).sum(axis=1)
    return var
