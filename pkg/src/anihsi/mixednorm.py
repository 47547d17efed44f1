"""Iterated (mixed) Lebesgue norms with x_1 innermost, and the
multi-exponent interpolation inequality ||f||_p <= prod_j ||f||_{p^j}^{theta_j}."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError
from .field import GridFunction

INF = math.inf


def exponents(values) -> tuple:
    """Normalize exponents: floats >= 1 or inf ('inf'/'infinity' accepted)."""
    out = []
    for v in values:
        if isinstance(v, str):
            s = v.strip().lower()
            v = INF if s in ("inf", "infinity", "oo") else float(s)
        v = float(v)
        if not (v >= 1.0):
            raise InputError(f"exponents must be >= 1 or infinity, got {v}")
        out.append(v)
    return tuple(out)


def mixed_norm_array(values: np.ndarray, p: Sequence[float], weights) -> float:
    """Mixed norm of an array whose axis k carries coordinate x_{k+1}.

    ``weights`` is either a scalar cell size used on every axis or a list of
    per-axis weight vectors (nonuniform quadrature).
    """
    p = exponents(p)
    cur = np.abs(np.asarray(values))
    if cur.ndim != len(p):
        raise InputError("exponent count must equal the array dimension")
    # normalize first so |g|^p neither underflows nor overflows
    scale = float(cur.max()) if cur.size else 0.0
    if scale == 0.0 or not math.isfinite(scale):
        return scale
    cur = cur / scale
    for k, pk in enumerate(p):
        w = weights[k] if isinstance(weights, (list, tuple)) else weights
        if pk == INF:
            cur = cur.max(axis=0)
            continue
        w = np.asarray(w, dtype=float)
        if w.ndim:
            w = w.reshape((-1,) + (1,) * (cur.ndim - 1))
        cur = np.sum(cur ** pk * w, axis=0) ** (1.0 / pk)
    return float(cur) * scale


def mixed_norm(g: GridFunction, p: Sequence[float]) -> float:
    """||g||_p with Riemann weight h per axis; inf axes become maxima."""
    if len(p) != g.grid.n:
        raise InputError("exponent vector length must equal the grid dimension")
    return mixed_norm_array(g.values, p, g.grid.h)


@dataclass(frozen=True)
class InterpolationReport:
    lhs: float
    rhs: float
    holds: bool
    target: tuple


def interpolation_target(families) -> tuple:
    """Per-axis exponents with 1/p_i = sum_j theta_j / p_i^j."""
    ps = [exponents(p) for p, _ in families]
    th = [float(t) for _, t in families]
    n = len(ps[0])
    out = []
    for i in range(n):
        inv = math.fsum(t / p[i] for p, t in zip(ps, th))
        out.append(INF if inv == 0 else 1.0 / inv)
    return tuple(out)


def interpolation_check(g: GridFunction, families, rel_slack: float = 1e-10) -> InterpolationReport:
    """Evaluate both sides of the multi-point interpolation inequality."""
    families = list(families)
    th = [float(t) for _, t in families]
    if any(t < 0 for t in th) or abs(math.fsum(th) - 1.0) > 1e-12:
        raise InputError("interpolation weights must be nonnegative and sum to 1")
    if len(families) > g.grid.n + 1:
        raise InputError("at most n+1 exponent families are allowed")
    target = interpolation_target(families)
    lhs = mixed_norm(g, target)
    rhs = 1.0
    for (p, t) in families:
        if t == 0:
            continue
        rhs *= mixed_norm(g, p) ** t
    return InterpolationReport(lhs, rhs, lhs <= rhs * (1 + rel_slack), target)
