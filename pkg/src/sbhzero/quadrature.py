"""Quadrature helpers.

Proper integrals of piecewise smooth integrands go through an adaptive
Simpson rule; improper ones (infinite range or an integrable endpoint
singularity) are handed to QUADPACK via :func:`scipy.integrate.quad`.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Iterable

import numpy as np
from scipy import integrate as _spi

from .errors import NumericalInstabilityError

ABS_TOL = 1e-10
REL_TOL = 1e-10
MAX_DEPTH = 60
MAX_EVALS = 400_000


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    abstol: float = ABS_TOL,
    reltol: float = REL_TOL,
    max_depth: int = MAX_DEPTH,
    max_evals: int = MAX_EVALS,
) -> float:
    """Integrate ``f`` over ``[a, b]`` by adaptive Simpson bisection.

    The acceptance test per panel is the classical ``|S2 - S1| <= 15 tol``
    with one step of Richardson correction.  ``tol`` starts at
    ``max(abstol, reltol * |I0|)`` where ``I0`` is a 16-panel composite
    estimate, and halves with every bisection.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, abstol, reltol, max_depth, max_evals)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("adaptive_simpson needs a finite interval")

    xs = np.linspace(a, b, 33)
    ys = [float(f(x)) for x in xs]
    if not all(math.isfinite(y) for y in ys):
        raise NumericalInstabilityError(f"non-finite integrand on [{a}, {b}]")
    h = (b - a) / 32
    coarse = h / 3 * (ys[0] + ys[-1] + 4 * sum(ys[1:-1:2]) + 2 * sum(ys[2:-1:2]))
    tol = max(abstol, reltol * abs(coarse))

    evals = 33
    total = 0.0
    # 16 Simpson panels seeded from the coarse grid
    stack = []
    for i in range(16):
        x0, x1, x2 = xs[2 * i], xs[2 * i + 1], xs[2 * i + 2]
        y0, y1, y2 = ys[2 * i], ys[2 * i + 1], ys[2 * i + 2]
        whole = (x2 - x0) / 6 * (y0 + 4 * y1 + y2)
        stack.append((x0, x2, y0, y1, y2, whole, tol / 16, 0))

    while stack:
        lo, hi, flo, fmid, fhi, whole, ptol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = float(f(lm)), float(f(rm))
        evals += 2
        left = (mid - lo) / 6 * (flo + 4 * flm + fmid)
        right = (hi - mid) / 6 * (fmid + 4 * frm + fhi)
        delta = left + right - whole
        tiny = (hi - lo) <= 8 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0)
        if abs(delta) <= 15 * ptol or depth >= max_depth or tiny:
            total += left + right + delta / 15
            continue
        if evals > max_evals:
            warnings.warn("adaptive_simpson: evaluation budget exhausted", RuntimeWarning)
            total += left + right + delta / 15
            continue
        stack.append((lo, mid, flo, flm, fmid, left, ptol / 2, depth + 1))
        stack.append((mid, hi, fmid, frm, fhi, right, ptol / 2, depth + 1))
    return total


def improper(
    f: Callable[[float], float],
    a: float,
    b: float,
    points: Iterable[float] = (),
    abstol: float = 1e-13,
    reltol: float = REL_TOL,
) -> float:
    """Integrate over a possibly infinite range or integrable singularity."""
    pts = sorted(p for p in points if a < p < b and math.isfinite(p))
    edges = [a, *pts, b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo == hi:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", _spi.IntegrationWarning)
            val, _err = _spi.quad(f, lo, hi, epsabs=abstol, epsrel=reltol, limit=500)
        total += val
    return total


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
    singular: bool = False,
) -> float:
    """Piecewise integral of ``f`` over ``[a, b]`` split at ``breakpoints``.

    ``singular=True`` (or an infinite endpoint) routes through :func:`improper`.
    """
    if a == b:
        return 0.0
    if b < a:
        return -integrate(f, b, a, breakpoints, singular)
    if singular or not (math.isfinite(a) and math.isfinite(b)):
        return improper(f, a, b, breakpoints)
    pts = sorted({p for p in breakpoints if a < p < b})
    edges = [a, *pts, b]
    return math.fsum(adaptive_simpson(f, lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))


def power_integral(p, a, b):
    """Vectorised ``∫_a^b t**p dt`` for ``0 <= a <= b <= inf``.

    Nearby endpoints go through ``expm1``/``log1p`` to keep relative accuracy.
    Divergent cases return ``inf``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = float(p)
    q = p + 1.0
    out = np.zeros(np.broadcast(a, b).shape)
    a, b = np.broadcast_to(a, out.shape), np.broadcast_to(b, out.shape)
    nz = b > a
    if not np.any(nz):
        return out if out.ndim else float(out)
    aa, bb = a[nz], b[nz]
    res = np.empty_like(aa)
    inf_b = np.isinf(bb)
    zero_a = aa == 0.0
    reg = ~inf_b & ~zero_a
    if np.any(reg):
        ratio = np.log1p((bb[reg] - aa[reg]) / aa[reg])
        if q == 0.0:
            res[reg] = ratio
        else:
            res[reg] = aa[reg] ** q * np.expm1(q * ratio) / q
    if np.any(inf_b):
        lo = aa[inf_b]
        if q < 0.0:
            res[inf_b] = np.where(lo > 0, -(lo**q) / q, np.inf)
        else:
            res[inf_b] = np.inf
    fin0 = zero_a & ~inf_b
    if np.any(fin0):
        res[fin0] = bb[fin0] ** q / q if q > 0 else np.inf
    out[nz] = res
    return out if out.ndim else float(out)
