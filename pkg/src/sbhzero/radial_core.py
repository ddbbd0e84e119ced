"""Radial subharmonic functions.

A radial function ``Q(x) = q(|x|)`` on an annulus in R^m is subharmonic iff
``q`` is convex in the harmonic coordinate ``s = h_m(r)``, iff
``r**(m-1) q'(r)`` is increasing.  This module provides the coordinate
change, the inversion/Kelvin machinery, numerical checks of both
characterisations, one-sided derivatives and the radial Riesz masses
``c_m Δ Q`` of annuli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InsufficientDataError, NumericalInstabilityError, PreconditionError
from .profiles import INF, MonotoneDensity, RadialProfile

CONVEXITY_TOL = 1e-9
DERIV_RTOL = 1e-8
MAX_HALVINGS = 40
RICHARDSON_ORDER = 3


class _Infinity:
    """The point at infinity of the one-point compactification."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def _check_dim(m: int) -> int:
    if int(m) != m or m < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {m!r}")
    return int(m)


# --------------------------------------------------------------------------
# harmonic coordinate
# --------------------------------------------------------------------------


def h_transform(m: int, t):
    """``t`` (m=1), ``log t`` (m=2), ``-t**(2-m)`` (m>=3); vectorised."""
    m = _check_dim(m)
    x = np.asarray(t, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("h_transform needs t > 0")
    if m == 1:
        out = x
    elif m == 2:
        out = np.log(x)
    else:
        out = -(x ** (2.0 - m))
    return float(out) if np.ndim(t) == 0 else out


def h_inverse(m: int, s):
    m = _check_dim(m)
    x = np.asarray(s, dtype=float)
    if m == 1:
        if np.any(x <= 0):
            raise DomainError("h_1 maps onto t > 0; need s > 0")
        out = x
    elif m == 2:
        out = np.exp(x)
    else:
        if np.any(x >= 0):
            raise DomainError("h_m for m >= 3 takes negative values; need s < 0")
        out = (-x) ** (-1.0 / (m - 2))
    return float(out) if np.ndim(s) == 0 else out


def h_of_endpoint(m: int, r: float) -> float:
    """``h_m`` extended to the endpoints 0 and +inf."""
    if r == 0.0:
        return 0.0 if m == 1 else -INF
    if math.isinf(r):
        return 0.0 if m >= 3 else INF
    return h_transform(m, r)


# --------------------------------------------------------------------------
# inversion and Kelvin transform
# --------------------------------------------------------------------------


def invert_point(x, m: int | None = None):
    """Inversion in the unit sphere on R^m ∪ {∞}.

    ``INFINITY`` maps to the origin of R^m (``m`` defaults to 2); the origin
    maps to ``INFINITY``; other points to ``x / |x|**2``.
    """
    if x is INFINITY:
        return np.zeros(2 if m is None else _check_dim(m))
    v = np.asarray(x, dtype=float)
    n2 = float(v @ v)
    if n2 == 0.0:
        return INFINITY
    return v / n2


def invert_points(xs) -> np.ndarray:
    """Row-wise inversion of an ``(N, m)`` array of finite non-zero points."""
    xs = np.asarray(xs, dtype=float)
    n2 = np.einsum("ij,ij->i", xs, xs)
    if np.any(n2 == 0):
        raise DomainError("invert_points: zero rows map to infinity; use invert_point")
    return xs / n2[:, None]


def kelvin_value(m: int, u_at_x: float, x):
    """Return ``(x*, |x|**(m-2) u(x))``: the Kelvin transform at ``x*``."""
    m = _check_dim(m)
    if x is INFINITY:
        raise DomainError("Kelvin value undefined at infinity")
    v = np.asarray(x, dtype=float)
    n = math.sqrt(float(v @ v))
    if n == 0.0:
        raise DomainError("Kelvin value undefined at the origin")
    return v / n**2, n ** (m - 2) * u_at_x


def kelvin_profile(q: RadialProfile, m: int) -> RadialProfile:
    """Radial profile of the Kelvin transform: ``ρ**(2-m) q(1/ρ)`` on the
    inverted interval."""
    m = _check_dim(m)
    lo, hi = q.domain
    dom = (0.0 if math.isinf(hi) else 1.0 / hi, INF if lo == 0.0 else 1.0 / lo)

    def val(rho):
        return rho ** (2 - m) * q(1.0 / rho)

    deriv = None
    if q.has_derivative:
        def deriv(rho):
            return (2 - m) * rho ** (1 - m) * q(1.0 / rho) - rho ** (-m) * q.derivative(1.0 / rho, "left")

    kinks = tuple(1.0 / k for k in q.breakpoints() if k > 0)
    return RadialProfile.from_callable(val, dom, deriv, kinks)


# --------------------------------------------------------------------------
# Riesz constant
# --------------------------------------------------------------------------


def riesz_constant(m: int) -> float:
    """``Γ(m/2) / (2 π**(m/2) max(1, m-2))``; ``c_m σ_{m-1}(S^{m-1}) = 1/max(1, m-2)``."""
    m = _check_dim(m)
    return math.gamma(m / 2) / (2 * math.pi ** (m / 2) * max(1, m - 2))


# --------------------------------------------------------------------------
# convexity in the harmonic coordinate
# --------------------------------------------------------------------------


@dataclass
class ConvexityReport:
    passed: bool
    n_points: int
    tolerance: float
    interval: tuple
    max_violation: float = 0.0
    first_violation: tuple | None = None  # (r_left, r_mid, r_right)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "n_points": self.n_points,
            "tolerance": self.tolerance,
            "interval": [float(v) for v in self.interval],
            "max_violation": self.max_violation,
            "first_violation": None if self.first_violation is None else list(self.first_violation),
        }


def _evaluation_range(lo: float, hi: float) -> tuple[float, float]:
    if lo == 0.0 and math.isinf(hi):
        return 1e-3, 1e3
    if lo == 0.0:
        return hi * 1e-4, hi
    if math.isinf(hi):
        return lo, lo * 1e4
    return lo, hi


def check_convex_of_h(q, m: int, tolerance: float = CONVEXITY_TOL, n_points: int = 256,
                      interval=None) -> ConvexityReport:
    """Midpoint-convexity test of ``q ∘ h_m^{-1}`` on a uniform ``s`` grid.

    Tested triples are ``(s_{i-k}, s_i, s_{i+k})`` for ``k = 1, 2, 4, ...``;
    a triple fails if ``f(s_i) > (f(s_{i-k}) + f(s_{i+k}))/2 + tol_i`` where
    ``tol_i`` is ``tolerance`` times the local value scale.  Infinite or zero
    endpoints are clipped to a finite range.
    """
    m = _check_dim(m)
    if n_points < 3:
        raise InsufficientDataError("convexity check needs at least 3 evaluation points")
    lo, hi = interval if interval is not None else q.domain
    rlo, rhi = _evaluation_range(float(lo), float(hi))
    slo, shi = h_transform(m, rlo), h_transform(m, rhi)
    s = np.linspace(slo, shi, n_points + 2)[1:-1]
    r = h_inverse(m, s)
    f = np.asarray(q(r), dtype=float)
    if not np.all(np.isfinite(f)):
        bad = int(np.nonzero(~np.isfinite(f))[0][0])
        return ConvexityReport(False, n_points, tolerance, (rlo, rhi), INF, (float(r[bad]),) * 3)
    floor = 1e-6 * float(np.max(np.abs(f))) if f.size else 0.0
    worst = 0.0
    first = None
    k = 1
    while 2 * k < n_points:
        a, c, b = f[:-2 * k], f[k:-k], f[2 * k:]
        scale = np.maximum.reduce([np.abs(a), np.abs(c), np.abs(b), np.full(a.shape, floor)])
        excess = c - 0.5 * (a + b) - tolerance * scale
        i = int(np.argmax(excess))
        if excess[i] > 0:
            worst = max(worst, float(excess[i]))
            if first is None:
                first = (float(r[i]), float(r[i + k]), float(r[i + 2 * k]))
        k *= 2
    return ConvexityReport(first is None, n_points, tolerance, (rlo, rhi), worst, first)


def is_monotone(values, direction: str = "increasing", tolerance: float = 0.0) -> tuple[bool, int | None]:
    """Check a sampled sequence; returns ``(ok, first_bad_index)``."""
    v = np.asarray(values, dtype=float)
    d = np.diff(v)
    scale = np.maximum(np.abs(v[:-1]), np.abs(v[1:]))
    bad = d < -tolerance * scale if direction == "increasing" else d > tolerance * scale
    idx = np.nonzero(bad)[0]
    return (idx.size == 0, None if idx.size == 0 else int(idx[0]))


# --------------------------------------------------------------------------
# one-sided derivatives
# --------------------------------------------------------------------------


def _richardson_side(q, r: float, q0: float, h0: float, sign: int, rtol: float, max_halvings: int):
    prev_row: list[float] = []
    best_val, best_diff, best_k = None, INF, -1
    last = None
    for k in range(max_halvings + 1):
        h = h0 * 2.0**-k
        if sign > 0:
            d0 = (float(q(r + h)) - q0) / h
        else:
            d0 = (q0 - float(q(r - h))) / h
        row = [d0]
        for j in range(1, min(k, RICHARDSON_ORDER) + 1):
            row.append(row[j - 1] + (row[j - 1] - prev_row[j - 1]) / (2.0**j - 1.0))
        est = row[-1]
        prev_row = row
        if last is not None and math.isfinite(est):
            diff = abs(est - last)
            if diff < best_diff:
                best_val, best_diff, best_k = est, diff, k
            limit = rtol * max(abs(best_val), abs(last), 1e-300) + 1e-14
            if best_diff <= limit and (diff > 4 * best_diff or k - best_k >= 3):
                return best_val
        last = est
    if best_val is not None and best_diff <= rtol * max(abs(best_val), 1e-300) + 1e-14:
        return best_val
    raise NumericalInstabilityError(
        f"one-sided difference quotients at r={r} did not converge in {max_halvings} halvings"
    )


def onesided_derivatives(q, r: float, h0: float | None = None, rtol: float = DERIV_RTOL,
                         max_halvings: int = MAX_HALVINGS, method: str = "auto") -> tuple[float, float]:
    """Left and right derivatives ``(q'_←(r), q'_→(r))``.

    ``method="auto"`` uses exact derivatives when the profile carries them
    and Richardson-extrapolated one-sided difference quotients on the step
    schedule ``h0 * 2**-k`` otherwise; ``method="numeric"`` forces the
    latter.  For a callable ``q`` only the numeric path is available.
    """
    if isinstance(q, RadialProfile):
        lo, hi = q.domain
        if not lo < r < hi:
            raise DomainError(f"r={r} is not interior to {q.domain}")
        if method == "auto" and q.has_derivative:
            return float(q.derivative(r, "left")), float(q.derivative(r, "right"))
    else:
        lo, hi = -INF, INF
    if h0 is None:
        h0 = 0.25 * min(r - lo, hi - r, abs(r) if r != 0 else 1.0, 1.0)
    q0 = float(q(r))
    right = _richardson_side(q, r, q0, h0, +1, rtol, max_halvings)
    left = _richardson_side(q, r, q0, h0, -1, rtol, max_halvings)
    return left, right


def detect_kinks(q, radii: Sequence[float], tolerance: float = 1e-6, method: str = "auto") -> list[float]:
    """Radii where the one-sided derivatives differ by more than ``tolerance``.

    Only finitely many kinks are detectable on a grid; no claim is made
    about the full exceptional set.
    """
    out = []
    for r in radii:
        left, right = onesided_derivatives(q, float(r), method=method)
        if right - left > tolerance * max(1.0, abs(left), abs(right)):
            out.append(float(r))
    return out


# --------------------------------------------------------------------------
# reconstruction from an increasing density
# --------------------------------------------------------------------------


def profile_from_rate(p0, r0: float, q_r0: float, m: int, domain) -> RadialProfile:
    """``q(r) = q_r0 + ∫_{r0}^r p0(t) t**(1-m) dt`` with no monotonicity check.

    ``p0`` is a :class:`MonotoneDensity` (possibly built with
    ``validate=False``); the integral is closed form per linear piece.
    """
    m = _check_dim(m)
    lo, hi = domain
    if not lo < r0 < hi:
        raise DomainError(f"r0={r0} must lie in {domain}")

    def val(r):
        return q_r0 + p0.weighted_integral(r0, float(r), m - 1)

    def deriv(r):
        return float(p0(r)) * r ** (1 - m)

    return RadialProfile.from_callable(val, (float(lo), float(hi)), deriv, p0.breakpoints())


def build_profile_from_density(p0: MonotoneDensity, r0: float, q_r0: float, m: int, domain) -> RadialProfile:
    """Radial profile with ``r**(m-1) q'(r) = p0(r)`` and ``q(r0) = q_r0``.

    The result is convex of ``h_m`` on ``domain`` because ``p0`` increases.
    """
    if p0.direction != "increasing":
        raise PreconditionError("build_profile_from_density needs an increasing density")
    ok, witness = p0.check_monotone()
    if not ok:
        raise PreconditionError(f"p0 is not increasing near {witness}")
    return profile_from_rate(p0, r0, q_r0, m, domain)


def rate_from_profile(q, m: int, radii: Sequence[float], method: str = "auto") -> np.ndarray:
    """Samples of ``r**(m-1) q'_→(r)``, the candidate increasing density."""
    radii = np.asarray(radii, dtype=float)
    return np.array([r ** (m - 1) * onesided_derivatives(q, float(r), method=method)[1] for r in radii])


# --------------------------------------------------------------------------
# Riesz measure of radial functions
# --------------------------------------------------------------------------


@dataclass
class RadialMeasure:
    """Masses of half-open annuli ``(a, b]`` plus optional pole masses."""

    edges: np.ndarray
    masses: np.ndarray
    pole_mass_origin: float = 0.0
    pole_mass_infinity: float = 0.0

    def __post_init__(self):
        if np.any(self.masses < 0) or self.pole_mass_origin < 0 or self.pole_mass_infinity < 0:
            raise ValueError("Riesz masses must be non-negative")

    @property
    def total(self) -> float:
        return float(self.masses.sum()) + self.pole_mass_origin + self.pole_mass_infinity

    def as_dict(self) -> dict:
        return {(float(a), float(b)): float(w) for a, b, w in zip(self.edges[:-1], self.edges[1:], self.masses)}


def radial_flux(q, m: int, r: float, method: str = "auto") -> float:
    """``r**(m-1) q'_→(r) / max(1, m-2)``: Riesz mass of the closed ball B̄(r)."""
    m = _check_dim(m)
    return r ** (m - 1) * onesided_derivatives(q, r, method=method)[1] / max(1, m - 2)


def radial_riesz_measure(q, m: int, annulus, tolerance: float = CONVEXITY_TOL, method: str = "auto") -> float:
    """Riesz mass of the annulus ``{a < |x| <= b}`` for ``Q(x) = q(|x|)``.

    Uses ``c_m σ_{m-1}(S^{m-1}) = 1/max(1, m-2)`` and the divergence
    theorem: the mass is the difference of fluxes
    ``b**(m-1) q'_→(b) - a**(m-1) q'_→(a)`` over ``max(1, m-2)``.
    ``a = 0`` means the whole closed ball B̄(b), pole included.  A mass below
    ``-tolerance`` (relative to the flux scale) means ``Q`` is not
    subharmonic there.
    """
    a, b = (float(v) for v in annulus)
    if not 0 <= a < b:
        raise DomainError("annulus needs 0 <= a < b")
    fb = radial_flux(q, m, b, method)
    fa = 0.0 if a == 0.0 else radial_flux(q, m, a, method)
    mass = fb - fa
    if mass < -tolerance * max(1.0, abs(fa), abs(fb)):
        raise PreconditionError(f"negative Riesz mass {mass:.3e} on ({a}, {b}]: profile not subharmonic")
    return mass


def riesz_measure_on_partition(q, m: int, edges: Sequence[float], tolerance: float = CONVEXITY_TOL) -> RadialMeasure:
    edges = np.asarray(edges, dtype=float)
    flux = np.array([radial_flux(q, m, float(r)) for r in edges])
    masses = np.diff(flux)
    scale = np.maximum(1.0, np.maximum(np.abs(flux[:-1]), np.abs(flux[1:])))
    if np.any(masses < -tolerance * scale):
        raise PreconditionError("negative Riesz mass on partition: profile not subharmonic")
    return RadialMeasure(edges, np.clip(masses, 0.0, None))


# --------------------------------------------------------------------------
# discrete Laplacian oracles
# --------------------------------------------------------------------------


@dataclass
class LaplacianReport:
    passed: bool
    min_scaled: float  # min of h**2 * Δ_h u over tested nodes
    tolerance: float
    n_nodes: int
    witness: tuple | None = None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "min_scaled": self.min_scaled, "tolerance": self.tolerance,
                "n_nodes": self.n_nodes, "witness": None if self.witness is None else list(self.witness)}


def cartesian_laplacian(func: Callable, r_inner: float, r_outer: float, n: int = 201,
                        tolerance: float = 1e-10) -> LaplacianReport:
    """5-point Laplacian of ``func(x, y)`` on a square grid over the annulus.

    Nodes whose whole stencil lies in ``r_inner < |x| < r_outer`` are tested
    for ``h**2 Δ_h u >= -tolerance * scale``.
    """
    xs = np.linspace(-r_outer, r_outer, n)
    h = xs[1] - xs[0]
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    R = np.hypot(X, Y)
    inside = (R > r_inner) & (R < r_outer)
    U = np.full(X.shape, np.nan)
    U[inside] = func(X[inside], Y[inside])
    lap = U[2:, 1:-1] + U[:-2, 1:-1] + U[1:-1, 2:] + U[1:-1, :-2] - 4 * U[1:-1, 1:-1]
    ok = np.isfinite(lap)
    vals = lap[ok]
    if vals.size == 0:
        raise InsufficientDataError("no complete stencils inside the annulus")
    scale = max(1.0, float(np.nanmax(np.abs(U))))
    i = int(np.argmin(vals))
    Xi, Yi = X[1:-1, 1:-1][ok], Y[1:-1, 1:-1][ok]
    passed = bool(vals[i] >= -tolerance * scale)
    return LaplacianReport(passed, float(vals[i]), tolerance, int(vals.size),
                           None if passed else (float(Xi[i]), float(Yi[i])))


def polar_laplacian(func: Callable, r_inner: float, r_outer: float, n_radii: int = 256,
                    n_angles: int = 64, tolerance: float = 1e-10, center=(0.0, 0.0),
                    mask: Callable | None = None) -> LaplacianReport:
    """Polar-grid Laplacian ``u_rr + u_r / r + u_θθ / r**2`` in the plane.

    Radii are uniform on ``[r_inner, r_outer]`` (both ends used only as
    stencil neighbours); angles are periodic.  ``mask(x, y)`` can exclude
    nodes (e.g. a compact ``K``); a node is tested only if its whole stencil
    is unmasked.  The tested quantity is ``h_r**2 Δ_h u``.
    """
    r = np.linspace(r_inner, r_outer, n_radii)
    th = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
    hr, ht = r[1] - r[0], th[1] - th[0]
    Rg, Tg = np.meshgrid(r, th, indexing="ij")
    X, Y = center[0] + Rg * np.cos(Tg), center[1] + Rg * np.sin(Tg)
    U = np.asarray(func(X, Y), dtype=float)
    if mask is not None:
        U = np.where(mask(X, Y), np.nan, U)
    Urr = (U[2:] - 2 * U[1:-1] + U[:-2]) / hr**2
    Ur = (U[2:] - U[:-2]) / (2 * hr)
    Um = U[1:-1]
    Utt = (np.roll(Um, -1, axis=1) - 2 * Um + np.roll(Um, 1, axis=1)) / ht**2
    rr = Rg[1:-1]
    lap = (Urr + Ur / rr + Utt / rr**2) * hr**2
    ok = np.isfinite(lap)
    vals = lap[ok]
    if vals.size == 0:
        raise InsufficientDataError("no complete stencils on the polar grid")
    scale = max(1.0, float(np.nanmax(np.abs(U))))
    i = int(np.argmin(vals))
    passed = bool(vals[i] >= -tolerance * scale)
    Xi, Yi = X[1:-1][ok], Y[1:-1][ok]
    return LaplacianReport(passed, float(vals[i]), tolerance, int(vals.size),
                           None if passed else (float(Xi[i]), float(Yi[i])))


def radial_laplacian(q, m: int, radii: Sequence[float]) -> np.ndarray:
    """3-point ``q'' + (m-1) q' / r`` at the interior nodes of a uniform grid,
    multiplied by the grid step squared."""
    r = np.asarray(radii, dtype=float)
    h = r[1] - r[0]
    u = np.asarray(q(r), dtype=float)
    return (u[2:] - 2 * u[1:-1] + u[:-2]) + (m - 1) * h * (u[2:] - u[:-2]) / (2 * r[1:-1])
