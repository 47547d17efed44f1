"""One-dimensional radial integrals behind the hypersingular symbol.

Along the ray t = r^lam * omega the symbol integrand becomes g(phi_a(r)) with

    g(u) = (-1)^l 4^l sin^(2l)(u/2),    phi_a(r) = sum_i a_i r^lam_i,
    a = xi * omega,

weighted by r^(-1-alpha*). ``g`` is a trigonometric polynomial,
g(u) = c_0 + sum_{j=1..l} c_j cos(j u), which gives a closed tail: the
constant integrates exactly and each cosine is handled by two steps of
integration by parts.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .quadrature import lattice_breaks, panel_rule, refine_breaks, power_variation

_CHUNK = 1 << 22
# below this phase, g(phi) is replaced by its leading power; relative error ~ l phi^2 / 12
HEAD_PHASE = 1e-5


def difference_coefficients(ell: int) -> np.ndarray:
    """d_j, j = 0..l, with Delta_t^{2l} f(x) = sum_{|j|<=l} d_|j| f(x + j t)."""
    return np.array([(-1) ** (ell + j) * math.comb(2 * ell, ell + j) for j in range(ell + 1)],
                    dtype=float)


def symbol_profile(u, ell: int):
    """(-1)^l (2 sin(u/2))^(2l); the product form keeps full relative accuracy at small u."""
    return (-1) ** ell * (2.0 * np.sin(0.5 * np.asarray(u))) ** (2 * ell)


class RadialSymbolIntegrator:
    """Batch evaluation of int g(phi_a(r)) r^(-1-alpha*) dr over rows of ``a``."""

    def __init__(self, lam, alpha_star: float, ell: int, order: int = 10,
                 tail_radius: float = 1024.0):
        lam = np.asarray(lam, dtype=float)
        # coordinates sharing an exponent only enter phi through their sum
        self.lam, inverse = np.unique(lam, return_inverse=True)
        self.merge = np.zeros((lam.size, self.lam.size))
        self.merge[np.arange(lam.size), inverse.ravel()] = 1.0
        self.astar = float(alpha_star)
        self.ell = int(ell)
        self.order = int(order)
        self.tail_radius = float(tail_radius)
        self.kappa = 2 * ell * self.lam.min() - self.astar
        self.coef = difference_coefficients(ell)

    def _phase(self, a, r):
        return a @ (r[:, None] ** self.lam).T

    def _head_cutoff(self, a) -> float:
        """Radius below which |phi_a| <= HEAD_PHASE for every row."""
        amax = np.abs(a).max(axis=0)
        live = amax > 0
        if not live.any():
            return 1.0
        share = HEAD_PHASE / live.sum()
        with np.errstate(over="ignore"):
            # tiny components give an infinite radius, which min() then ignores
            return float(np.min((share / amax[live]) ** (1 / self.lam[live])))

    def _head(self, a, s1: float) -> np.ndarray:
        """int_0^s1 exactly for the leading term (-1)^l phi^(2l) of g.

        Below s1 the phase is tiny and (2 sin(phi/2))^(2l) = phi^(2l) (1 + O(phi^2));
        phi^(2l) expands into monomials r^(k.lam) that integrate in closed form.
        """
        two_l = 2 * self.ell
        out = np.zeros(a.shape[0])
        for k in itertools.product(range(two_l + 1), repeat=self.lam.size):
            if sum(k) != two_l:
                continue
            mult = math.factorial(two_l)
            for ki in k:
                mult //= math.factorial(ki)
            expo = float(np.dot(k, self.lam)) - self.astar
            out += mult * np.prod(a ** np.array(k), axis=1) * s1 ** expo / expo
        return (-1) ** self.ell * out

    def reduce(self, a) -> np.ndarray:
        """Coefficients of phi_a on the distinct exponents."""
        return np.atleast_2d(np.asarray(a, dtype=float)) @ self.merge

    def span(self, a, lo: float, hi: float, base: float = 2.0) -> np.ndarray:
        """int_lo^hi for every row of ``a``; lo = 0 starts at a certified cutoff."""
        return self._span(self.reduce(a), lo, hi, base)

    def _span(self, a, lo, hi, base):
        out = np.zeros(a.shape[0])
        if a.shape[0] == 0 or hi <= lo:
            return out
        if lo == 0:
            lo = min(self._head_cutoff(a), 0.5 * hi)
            out += self._head(a, lo)
        amax = np.abs(a).max(axis=0)
        breaks = lattice_breaks(lo, hi, 1, base)
        breaks = refine_breaks(breaks, power_variation(self.ell * amax, self.lam), math.pi)
        r, w = panel_rule(breaks, self.order)
        # g(phi) r^(-1-alpha*) = (2 sin(phi/2) / r^lam_min)^(2l) * r^(kappa-1)
        # (times the sign) stays finite however small r gets
        w = w * r ** (self.kappa - 1)
        inv = r ** -self.lam.min()
        sign = (-1) ** self.ell
        step = max(1, _CHUNK // max(r.size, 1))
        for k in range(0, a.shape[0], step):
            blk = a[k:k + step]
            scaled = 2.0 * np.sin(0.5 * self._phase(blk, r)) * inv
            out[k:k + step] += sign * (scaled ** (2 * self.ell) @ w)
        return out

    def _constant_tail(self, R):
        return (-1) ** self.ell * math.comb(2 * self.ell, self.ell) * R ** (-self.astar) / self.astar

    def _tail(self, a, R: float) -> np.ndarray:
        """int_R^inf by the closed constant term and two integration-by-parts steps."""
        lam, s = self.lam, self.astar
        phi = a @ R ** lam
        d1 = a @ (lam * R ** (lam - 1))
        d2 = a @ (lam * (lam - 1) * R ** (lam - 2))
        amp = R ** (-1 - s)
        damp = -(1 + s) * R ** (-2 - s)
        total = np.full(a.shape[0], self._constant_tail(R))
        with np.errstate(divide="ignore", invalid="ignore"):
            for j in range(1, self.ell + 1):
                p1, p2 = j * d1, j * d2
                b = amp / p1
                db = (damp * p1 - amp * p2) / p1 ** 2
                tj = -np.sin(j * phi) * b - np.cos(j * phi) * db / p1
                total = total + 2 * self.coef[j] * tj
        return total

    def _tail_ok(self, a, R: float) -> np.ndarray:
        d1 = a @ (self.lam * R ** self.lam)
        return np.abs(d1) >= 40.0

    def _span_and_tail(self, a, R: float, base: float) -> np.ndarray:
        out = self._span(a, 0.0, R, base)
        todo = np.arange(a.shape[0])
        for _ in range(4):
            ok = self._tail_ok(a[todo], R)
            out[todo[ok]] += self._tail(a[todo[ok]], R)
            todo = todo[~ok]
            if todo.size == 0:
                return out
            out[todo] += self._span(a[todo], R, 4 * R, base)
            R *= 4
        # a stationary phase sits near R: keep the exact constant part only,
        # the oscillating part is below sum|c_j| R^-alpha* / alpha*
        out[todo] += self._constant_tail(R)
        return out

    def _scale(self, b):
        from .distance import rho_lam
        return rho_lam(b, self.lam)

    def normalized(self, ahat) -> np.ndarray:
        """Full integral; meant for unit vectors but valid for any rows.

        After merging equal exponents the reduced vector is rescaled to unit
        length by homogeneity, I(s^lam b) = s^alpha* I(b).
        """
        b = self.reduce(ahat)
        sc = self._scale(b)
        out = np.zeros(b.shape[0])
        live = sc > 0
        bh = b[live] / sc[live, None] ** self.lam
        out[live] = sc[live] ** self.astar * self._span_and_tail(bh, self.tail_radius, 2.0)
        return out

    def raw(self, a) -> np.ndarray:
        """Full integral without using homogeneity: each row is integrated at its
        own scale on a base-3 lattice, so results at a and 2^lam a come from
        unrelated discretizations."""
        a = self.reduce(a)
        rho_a = self._scale(a)
        out = np.zeros(a.shape[0])
        live = rho_a > 0
        expo = np.zeros(a.shape[0], dtype=int)
        expo[live] = np.ceil(np.log(self.tail_radius / rho_a[live]) / math.log(3.0)).astype(int)
        for e in np.unique(expo[live]):
            idx = np.nonzero(live & (expo == e))[0]
            out[idx] = self._span_and_tail(a[idx], 3.0 ** e, 3.0)
        return out
