"""Uniqueness criteria: growth integral vs. zero-counting integral.

Radial form (domain ``B(R)`` in C^n, ``m = 2n``)::

    mass   ∫_{r0}^R d(r) q'_→(r) dr                       must be finite
    zeros  ∫_{r0}^R d(r) s_Z(r) r**(1-2n) dr              must diverge

Green form (model domain ``D`` with pole, level sets ``D_t = {g > t}``)::

    mass   ∫_0^{t0} q'_→(t) F'_→(-t) dt                   must be finite
    zeros  ∫_0^{t0} q'_→(t) s_{Z,D}(t) dt                 must diverge

When both hold, every holomorphic ``f`` with ``|f| <= exp(M)`` vanishing on
``Z`` is identically zero (verdict ``forced-zero``).  Divergence is decided
symbolically from tail metadata when available and heuristically from the
partial-integral trace otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import radial_core as rc
from .errors import ConstructionError, DomainError, PreconditionError, UnsupportedError
from .green_domains import ModelDomain, level_radius
from .profiles import INF, MonotoneDensity, RadialProfile
from .quadrature import integrate
from .tails import GROWTH_FACTOR, DivergenceVerdict, Tail, classify, combine
from .testfns import EnvelopeFunction, GrowthEnvelope, build_radial_testfn, green_superposition

FORCED_ZERO = "forced-zero"
INCONCLUSIVE = "inconclusive"

DEFAULT_T0 = 1.0
DEFAULT_IBP_DELTA = 1e-6
IBP_TOL_RADIAL = 1e-10
IBP_TOL_POINTS = 1e-12
IBP_TOL_SMOOTH = 1e-8

MULTIPLICITY_NOTE = ("zeros carry integer multiplicities, counted in s_Z; this only strengthens "
                     "the hypothesis Z ⊂ Zero_f")


# --------------------------------------------------------------------------
# zero sets
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Zeros as explicit planar points (n = 1) and/or a counting function.

    A counting function given next to points overrides the counts derived
    from the points in every integral; the points are then used only for
    direct sums (this is how inconsistent inputs are exercised).
    """

    points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    mults: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    counting: RadialProfile | None = None
    interpretation: str | None = None  # "radial" (s_Z) or "green" (s_{Z,D})
    n: int = 1
    generator: dict | None = None
    gaps: np.ndarray | None = None  # 1 - |a_k|/R for generated points

    def __post_init__(self):
        if self.points.size and self.n != 1:
            raise UnsupportedError("point zero sets need n = 1; supply a counting function for n > 1")
        if np.any(self.mults < 1):
            raise ValueError("multiplicities must be integers >= 1")
        if self.counting is not None and self.interpretation not in ("radial", "green"):
            raise ValueError("counting functions need interpretation 'radial' or 'green'")

    # --- constructors ---------------------------------------------------

    @classmethod
    def empty(cls) -> "ZeroSet":
        return cls()

    @classmethod
    def from_points(cls, points, mults=None) -> "ZeroSet":
        pts = _as_complex_array(points)
        m = np.ones(pts.size, dtype=np.int64) if mults is None else np.asarray(mults, dtype=np.int64)
        if m.shape != pts.shape:
            raise ValueError("one multiplicity per point")
        return cls(pts, m)

    @classmethod
    def generated(cls, gamma: float, count: int, mult: int = 1, radius: float = 1.0) -> "ZeroSet":
        """Real points ``a_k = radius (1 - k**-gamma)``, ``k = 1..count``."""
        if not gamma > 0 or count < 0 or mult < 1 or not 0 < radius < INF:
            raise ValueError("generator needs gamma > 0, count >= 0, mult >= 1, 0 < radius < inf")
        k = np.arange(1, count + 1, dtype=float)
        gaps = k ** (-float(gamma))
        pts = (radius * (1.0 - gaps)).astype(complex)
        spec = {"gamma": float(gamma), "count": int(count), "mult": int(mult), "radius": float(radius)}
        return cls(pts, np.full(count, mult, dtype=np.int64), generator=spec, gaps=gaps)

    @classmethod
    def uniform_annulus(cls, count: int, r1: float, r2: float, seed: int = 0) -> "ZeroSet":
        """``count`` points uniform with respect to area in ``r1 < |z| < r2``."""
        rng = np.random.default_rng(seed)
        r = np.sqrt(rng.uniform(r1 * r1, r2 * r2, count))
        th = rng.uniform(0.0, 2 * np.pi, count)
        return cls.from_points(r * np.exp(1j * th))

    @classmethod
    def counting_function(cls, profile: RadialProfile, interpretation: str, n: int = 1) -> "ZeroSet":
        return cls(counting=profile, interpretation=interpretation, n=int(n))

    def with_counting(self, profile: RadialProfile, interpretation: str) -> "ZeroSet":
        return ZeroSet(self.points, self.mults, profile, interpretation, self.n, self.generator, self.gaps)

    # --- basic queries ----------------------------------------------------

    @property
    def has_points(self) -> bool:
        return self.points.size > 0 or self.counting is None

    @property
    def total(self) -> int:
        return int(self.mults.sum())

    def moduli(self) -> np.ndarray:
        return np.abs(self.points)

    def green_values(self, domain: ModelDomain) -> np.ndarray:
        """``g_D(a_k)``; ``inf`` at the pole.  Points must lie in ``D``."""
        if self.points.size == 0:
            return np.zeros(0)
        mod = self.moduli()
        if np.any(mod >= domain.R):
            raise DomainError("zero points must lie inside the domain")
        if (self.gaps is not None and domain.center_pole and domain.m == 2
                and self.generator["radius"] == domain.R):
            with np.errstate(divide="ignore"):
                return -np.log1p(-self.gaps)
        if domain.center_pole:
            with np.errstate(divide="ignore"):
                return np.asarray(domain.green_radial(mod), dtype=float)
        g = domain.green_xy(self.points.real, self.points.imag)
        return np.where(self.points == domain.pole, INF, g)

    # --- counting functions ------------------------------------------------

    def radial_counting(self, R: float = INF) -> RadialProfile:
        if self.counting is not None and self.interpretation == "radial":
            return self.counting
        if self.counting is not None:
            raise ValueError("zero set carries a Green counting function, not s_Z")
        return counting_function_points(self, R)

    def green_counting_profile(self, domain: ModelDomain) -> RadialProfile:
        if self.counting is not None and self.interpretation == "green":
            return self.counting
        if self.counting is not None:
            raise ValueError("zero set carries s_Z, not a Green counting function")
        g = self.green_values(domain)
        at_pole = int(self.mults[np.isinf(g)].sum())
        fin = np.isfinite(g)
        gs, ms = g[fin], self.mults[fin]
        order = np.argsort(gs)
        gs, ms = gs[order], ms[order]
        knots, first = np.unique(gs, return_index=True)
        counts = np.add.reduceat(ms, first) if ms.size else np.zeros(0, dtype=np.int64)
        # value at knot g_j counts points with g > g_j
        above = (ms.sum() - np.cumsum(counts)) + at_pole
        left = float(ms.sum() + at_pole)
        if knots.size == 0:
            return RadialProfile.samples([1.0], [left], "step", (0.0, INF), left=left)
        return RadialProfile.samples(knots, above.astype(float), "step", (0.0, INF), left=left)

    def radial_tail(self, R: float) -> Tail | None:
        """Behaviour of ``s_Z`` near ``R`` (local variable ``R - r`` or ``1/r``)."""
        if self.counting is not None:
            return _counting_tail(self.counting, R, "below")
        gen = self.generator
        if gen is not None and not math.isinf(R) and gen["radius"] == R:
            return Tail(R ** (1.0 / gen["gamma"]) * gen["mult"], -1.0 / gen["gamma"], 0.0)
        return Tail(float(self.total)) if self.total else Tail.zero()

    def green_tail(self, domain: ModelDomain) -> Tail | None:
        """Behaviour of ``s_{Z,D}(t)`` as ``t -> 0+``."""
        if self.counting is not None:
            return _counting_tail(self.counting, 0.0, "above")
        gen = self.generator
        if gen is not None and domain.center_pole and domain.m == 2 and gen["radius"] == domain.R:
            return Tail(float(gen["mult"]), -1.0 / gen["gamma"], 0.0)
        if gen is not None and gen["radius"] == domain.R:
            return None  # accumulates at ∂D but the rate is not tabulated here
        return Tail(float(self.total)) if self.total else Tail.zero()

    # --- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        out: dict = {"n": self.n}
        if self.generator is not None:
            out["generator"] = dict(self.generator)
        elif self.points.size:
            out["points"] = [[float(p.real), float(p.imag), int(k)] for p, k in zip(self.points, self.mults)]
        if self.counting is not None:
            out["counting"] = self.counting.to_dict()
            out["interpretation"] = self.interpretation
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ZeroSet":
        n = int(data.get("n", 1))
        if "generator" in data:
            g = data["generator"]
            z = cls.generated(g["gamma"], int(g["count"]), int(g.get("mult", 1)), float(g.get("radius", 1.0)))
        elif "points" in data:
            rows = data["points"]
            pts = [complex(r[0], r[1]) for r in rows]
            mults = [int(r[2]) if len(r) > 2 else 1 for r in rows]
            z = cls.from_points(pts, mults)
        elif "annulus" in data:
            a = data["annulus"]
            z = cls.uniform_annulus(int(a["count"]), float(a["r1"]), float(a["r2"]), int(a.get("seed", 0)))
        else:
            z = cls()
        if "counting" in data:
            prof = RadialProfile.from_dict(data["counting"])
            interp = data.get("interpretation", "radial")
            if z.points.size:
                return z.with_counting(prof, interp)
            return cls.counting_function(prof, interp, n)
        if n != 1:
            return cls(z.points, z.mults, n=n)
        return z


def _as_complex_array(points) -> np.ndarray:
    arr = np.asarray(points)
    if arr.size == 0:
        return np.zeros(0, dtype=complex)
    if np.iscomplexobj(arr) or arr.ndim == 1:
        return arr.astype(complex).ravel()
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    raise ValueError("points must be complex numbers or (x, y) pairs")


def _counting_tail(prof: RadialProfile, e: float, side: str) -> Tail | None:
    # sampled data are bounded on their grid but say nothing about the limit,
    # so only explicit metadata or closed forms give a tail
    if prof.tail is not None and prof.tail_at == e:
        return prof.tail
    if prof.closed_form and prof.family != "samples":
        return prof.value_tail(e, side)
    return None


def counting_function_points(Z: ZeroSet, R: float = INF, radii=None) -> RadialProfile:
    """Right-continuous ``s_Z(r) = Σ mult_k [|a_k| <= r]`` as step data.

    With ``radii`` given, the step function is sampled there instead.
    """
    if Z.n != 1:
        raise UnsupportedError("σ₀ counting from points needs n = 1")
    mod = Z.moduli()
    order = np.argsort(mod)
    mod, ms = mod[order], Z.mults[order]
    knots, first = np.unique(mod, return_index=True)
    counts = np.cumsum(np.add.reduceat(ms, first)) if ms.size else np.zeros(0)
    if radii is not None:
        radii = np.asarray(radii, dtype=float)
        idx = np.searchsorted(knots, radii, side="right")
        vals = np.where(idx > 0, counts[np.clip(idx - 1, 0, None)] if counts.size else 0.0, 0.0)
        return RadialProfile.samples(radii, vals.astype(float), "step", (0.0, R), left=0.0)
    if knots.size == 0:
        return RadialProfile.samples([0.0], [0.0], "step", (0.0, R), left=0.0)
    return RadialProfile.samples(knots, counts.astype(float), "step", (0.0, R), left=0.0)


def green_counting(Z: ZeroSet, domain: ModelDomain, t: float) -> float:
    """``s_{Z,D}(t) = Σ mult_k [g_D(a_k) > t]``."""
    if Z.n != 1:
        raise UnsupportedError("σ₀ counting from points needs n = 1")
    g = Z.green_values(domain)
    return float(Z.mults[g > t].sum())


# --------------------------------------------------------------------------
# exact integrals against step functions
# --------------------------------------------------------------------------


def _step_integral(prof: RadialProfile, a: float, b: float, seg_weight) -> float:
    """``∫_a^b s(x) w(x) dx`` for a step profile ``s``; ``seg_weight(edges)``
    returns the per-segment integrals of ``w``."""
    if b <= a:
        return 0.0
    knots = np.asarray(prof.params["r"], dtype=float)
    inner = knots[(knots > a) & (knots < b)]
    edges = np.concatenate([[a], inner, [b]])
    vals = np.asarray(prof(edges[:-1]), dtype=float)
    nz = vals != 0.0
    if not np.any(nz):
        return 0.0
    w = seg_weight(edges)
    return float(math.fsum(vals[nz] * w[nz]))


def _is_step(prof: RadialProfile) -> bool:
    return prof.family == "samples" and prof.params["interpolation"] == "step"


def _is_zero_profile(prof: RadialProfile) -> bool:
    if prof.family == "constant":
        return prof.params["c"] == 0.0
    if prof.family == "samples":
        return bool(np.all(np.asarray(prof.params["values"]) == 0.0)) and prof.params.get("left", 0.0) in (0.0, None)
    return False


def _right_derivative(q: RadialProfile):
    if q.has_derivative:
        return lambda x: float(q.derivative(x, "right"))
    return lambda x: rc.onesided_derivatives(q, x, method="numeric")[1]


# --------------------------------------------------------------------------
# radial criterion
# --------------------------------------------------------------------------


def _default_r0(R: float) -> float:
    return 1.0 if math.isinf(R) else 0.5 * R


def radial_mass_integral(d: MonotoneDensity, q, r0: float | None = None, R: float | None = None,
                         growth_factor: float = GROWTH_FACTOR) -> DivergenceVerdict:
    """Classify ``∫_{r0}^R d(r) q'_→(r) dr``."""
    if isinstance(q, GrowthEnvelope):
        R = q.R if R is None else R
        q = q.q
    R = q.domain[1] if R is None else R
    r0 = _default_r0(R) if r0 is None else r0
    if not 0 < r0 < R:
        raise DomainError("need 0 < r0 < R")
    if d.is_zero or (q.family == "constant"):
        return classify(lambda a, b: 0.0, r0, R, "upper", Tail.zero())
    dq = _right_derivative(q)
    f = lambda r: float(d(r)) * dq(r)
    brk = tuple(d.breakpoints()) + tuple(q.breakpoints())
    tail = combine([d.local_tail(R, "below"), q.derivative_tail(R, "below")], at_infinity=math.isinf(R))
    return classify(lambda a, b: integrate(f, a, b, brk), r0, R, "upper", tail,
                    total=lambda: integrate(f, r0, R, brk, singular=True), growth_factor=growth_factor)


def radial_zero_integral(d: MonotoneDensity, Z, r0: float | None = None, R: float = INF,
                         n: int = 1, growth_factor: float = GROWTH_FACTOR) -> DivergenceVerdict:
    """Classify ``∫_{r0}^R d(r) s_Z(r) r**(1-2n) dr``.

    ``Z`` is a :class:`ZeroSet` or an increasing counting profile ``s_Z``.
    """
    r0 = _default_r0(R) if r0 is None else r0
    if not 0 < r0 < R:
        raise DomainError("need 0 < r0 < R")
    k = 2 * n - 1
    if isinstance(Z, ZeroSet):
        s = Z.radial_counting(R)
        s_tail = Z.radial_tail(R)
    else:
        s = Z
        s_tail = _counting_tail(s, R, "below")
    tail = combine([d.local_tail(R, "below"), s_tail, Tail(1.0, float(k)) if math.isinf(R) else Tail(1.0)],
                   at_infinity=math.isinf(R))
    if d.is_zero or _is_zero_profile(s):
        return classify(lambda a, b: 0.0, r0, R, "upper", Tail.zero())
    if _is_step(s):
        partial = lambda a, b: _step_integral(s, a, b, lambda e: d.segment_integrals(e, k))
        return classify(partial, r0, R, "upper", tail, total=lambda: partial(r0, R),
                        growth_factor=growth_factor)
    f = lambda r: float(d(r)) * float(s(r)) * r ** (-k)
    brk = tuple(d.breakpoints()) + tuple(s.breakpoints())
    return classify(lambda a, b: integrate(f, a, b, brk), r0, R, "upper", tail,
                    total=lambda: integrate(f, r0, R, brk, singular=True), growth_factor=growth_factor)


@dataclass
class CriterionReport:
    mode: str
    mass: DivergenceVerdict
    zero: DivergenceVerdict
    inputs: dict
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return FORCED_ZERO if self.mass.convergent and self.zero.divergent else INCONCLUSIVE

    @property
    def unknown(self) -> bool:
        return self.mass.unknown or self.zero.unknown or bool(self.extra.get("unknown"))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "verdict": self.verdict,
            "unknown": self.unknown,
            "mass_integral": self.mass.to_dict(),
            "zero_integral": self.zero.to_dict(),
            "inputs": self.inputs,
            "notes": list(self.notes),
            **({"extra": self.extra} if self.extra else {}),
        }


def radial_verdict(envelope: GrowthEnvelope, d: MonotoneDensity, Z: ZeroSet, r0: float | None = None,
                   R: float | None = None, n: int | None = None,
                   growth_factor: float = GROWTH_FACTOR) -> CriterionReport:
    """Radial criterion on ``B(R)`` in C^n."""
    if envelope.kind != "radial":
        raise ValueError("radial verdict needs a radial growth envelope")
    R = envelope.R if R is None else R
    n = envelope.n if n is None else n
    r0 = _default_r0(R) if r0 is None else r0
    m = 2 * n
    notes = [MULTIPLICITY_NOTE]
    extra = {}
    try:
        tf = build_radial_testfn(d, r0, R, m, validate=False)
        extra["test_function_sup"] = tf.sup_bound
    except ConstructionError as exc:
        if "cannot be certified" not in str(exc):
            raise PreconditionError(str(exc)) from exc
        extra["unknown"] = True
        notes.append("finiteness of ∫ d(t) t^(1-m) dt could not be certified")
    mass = radial_mass_integral(d, envelope.q, r0, R, growth_factor)
    zero = radial_zero_integral(d, Z, r0, R, n, growth_factor)
    inputs = {"r0": r0, "R": _enc(R), "n": n, "density": d.to_dict(), "envelope": _safe_dict(envelope),
              "zeros": _zero_summary(Z)}
    return CriterionReport("radial", mass, zero, inputs, notes, extra)


# --------------------------------------------------------------------------
# Green criterion
# --------------------------------------------------------------------------


def _envelope_function(F) -> EnvelopeFunction:
    return F.F if isinstance(F, GrowthEnvelope) else F


def green_mass_integral(q: RadialProfile, F, t0: float = DEFAULT_T0,
                        growth_factor: float = GROWTH_FACTOR) -> DivergenceVerdict:
    """Classify ``∫_0^{t0} q'_→(t) F'_→(-t) dt``."""
    F = _envelope_function(F)
    if F.is_zero_derivative or q.family == "constant":
        return classify(lambda a, b: 0.0, 0.0, t0, "lower", Tail.zero())
    dq = _right_derivative(q)
    f = lambda t: dq(t) * float(F.derivative(-t))
    tail = combine([q.derivative_tail(0.0, "above"), F.derivative_tail_at_zero()], at_infinity=False)
    brk = q.breakpoints()
    return classify(lambda a, b: integrate(f, a, b, brk), 0.0, t0, "lower", tail,
                    total=lambda: integrate(f, 0.0, t0, brk, singular=True), growth_factor=growth_factor)


def green_zero_integral(q: RadialProfile, Z, t0: float = DEFAULT_T0, domain: ModelDomain | None = None,
                        growth_factor: float = GROWTH_FACTOR) -> DivergenceVerdict:
    """Classify ``∫_0^{t0} q'_→(t) s_{Z,D}(t) dt``.

    ``Z`` is a :class:`ZeroSet` (with ``domain``) or a decreasing profile
    ``s_{Z,D}`` of ``t``.
    """
    if isinstance(Z, ZeroSet):
        if domain is None and Z.counting is None:
            raise ValueError("point zero sets need the domain")
        s = Z.green_counting_profile(domain)
        s_tail = Z.green_tail(domain) if domain is not None else _counting_tail(s, 0.0, "above")
    else:
        s = Z
        s_tail = _counting_tail(s, 0.0, "above")
    if q.family == "constant" or _is_zero_profile(s):
        return classify(lambda a, b: 0.0, 0.0, t0, "lower", Tail.zero())
    tail = combine([q.derivative_tail(0.0, "above"), s_tail], at_infinity=False)
    if _is_step(s):
        # on each constancy interval ∫ q' = q(b) - q(a) since q is continuous
        qv = lambda e: np.diff(np.asarray(q(e), dtype=float))
        partial = lambda a, b: _step_integral(s, a, b, qv)
        return classify(partial, 0.0, t0, "lower", tail, total=lambda: partial(0.0, t0),
                        growth_factor=growth_factor)
    dq = _right_derivative(q)
    f = lambda t: dq(t) * float(s(t))
    brk = tuple(q.breakpoints()) + tuple(s.breakpoints())
    return classify(lambda a, b: integrate(f, a, b, brk), 0.0, t0, "lower", tail,
                    total=lambda: integrate(f, 0.0, t0, brk, singular=True), growth_factor=growth_factor)


def green_verdict(F, q: RadialProfile, Z: ZeroSet, domain: ModelDomain, t0: float = DEFAULT_T0,
                  growth_factor: float = GROWTH_FACTOR) -> CriterionReport:
    """Green criterion on a model domain with the growth bound ``F ∘ (-g_D)``."""
    green_superposition(q, domain, t0, validate=False)
    Fn = _envelope_function(F)
    mass = green_mass_integral(q, Fn, t0, growth_factor)
    zero = green_zero_integral(q, Z, t0, domain, growth_factor)
    inputs = {"t0": t0, "domain": domain.to_dict(), "q": _safe_dict(q), "F": _safe_dict(Fn),
              "zeros": _zero_summary(Z)}
    return CriterionReport("green", mass, zero, inputs, [MULTIPLICITY_NOTE])


def _enc(x):
    return "inf" if x is not None and math.isinf(x) else x


def _safe_dict(obj):
    try:
        return obj.to_dict()
    except TypeError:
        return {"family": "callable"}


def _zero_summary(Z) -> dict:
    if isinstance(Z, ZeroSet):
        out = {"n": Z.n, "total_multiplicity": Z.total}
        if Z.generator is not None:
            out["generator"] = dict(Z.generator)
        if Z.counting is not None:
            out["counting"] = _safe_dict(Z.counting)
        return out
    return {"counting": _safe_dict(Z)}


# --------------------------------------------------------------------------
# integration-by-parts cross checks
# --------------------------------------------------------------------------


@dataclass
class IbpCheck:
    name: str
    values: dict
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name, "values": self.values, "residual": self.residual,
                "tolerance": self.tolerance, "passed": self.passed}


@dataclass
class IbpReport:
    checks: list
    skipped: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks],
                "skipped": list(self.skipped)}


def relative_residual(*values: float) -> float:
    vals = [float(v) for v in values]
    if not all(math.isfinite(v) for v in vals):
        return INF
    spread = max(vals) - min(vals)
    if spread == 0.0:
        return 0.0
    return spread / max(max(abs(v) for v in vals), 1e-300)


def ibp_check_radial(d: MonotoneDensity, Z: ZeroSet, r0: float, R: float, m: int = 2,
                     tolerance: float = IBP_TOL_RADIAL) -> IbpReport:
    """Direct sum ``Σ_{|a_k| > r0} mult_k v(a_k)`` against
    ``∫_{r0}^R d s_Z r**(1-m) dr - s_Z(r0) ∫_{r0}^R d(t) t**(1-m) dt``."""
    if Z.n != 1 or m != 2:
        raise UnsupportedError("the direct sum needs planar points (n = 1, m = 2)")
    mod = Z.moduli()
    if np.any(mod >= R):
        raise DomainError("zero points must lie inside B(R)")
    sel = mod > r0
    direct = math.fsum(float(k) * d.weighted_integral(float(r), R, m - 1)
                       for r, k in zip(mod[sel], Z.mults[sel]))
    s = Z.radial_counting(R)
    k = m - 1
    if _is_step(s):
        first = _step_integral(s, r0, R, lambda e: d.segment_integrals(e, k))
    else:
        first = integrate(lambda r: float(d(r)) * float(s(r)) * r ** (-k), r0, R,
                          tuple(d.breakpoints()) + tuple(s.breakpoints()))
    second = float(s(r0)) * d.weighted_integral(r0, R, m - 1)
    ibp = first - second
    chk = IbpCheck("radial", {"direct_sum": direct, "zero_integral": first, "boundary_term": second,
                              "ibp": ibp}, relative_residual(direct, ibp), tolerance)
    return IbpReport([chk])


def _stieltjes_romberg(q, mu, t_lo: float, t_hi: float, k_min: int = 4, k_max: int = 12,
                       rtol: float = 1e-13) -> tuple[float, int]:
    """Romberg-extrapolated Stieltjes trapezoid ``∫ q dμ`` on a uniform grid in t.

    ``mu`` is evaluated once per node (nested grids reuse values).
    """
    cache: dict = {}

    def mu_at(t):
        key = float(t)
        if key not in cache:
            cache[key] = float(mu(key))
        return cache[key]

    rows: list[list[float]] = []
    for k in range(k_min, k_max + 1):
        t = np.linspace(t_lo, t_hi, 2**k + 1)
        qv = np.asarray(q(t), dtype=float)
        mv = np.array([mu_at(x) for x in t])
        est = float(np.sum(0.5 * (qv[1:] + qv[:-1]) * np.diff(mv)))
        row = [est]
        for j, prev in enumerate(rows[-1] if rows else []):
            f = 4.0 ** (j + 1)
            row.append(row[j] + (row[j] - prev) / (f - 1.0))
        rows.append(row)
        if len(rows) >= 3 and abs(rows[-1][-1] - rows[-2][-1]) <= rtol * max(abs(rows[-1][-1]), 1e-300):
            break
    return rows[-1][-1], len(cache)


def _mass_paths(q: RadialProfile, F: EnvelopeFunction, domain: ModelDomain, t0: float, delta: float) -> dict:
    dq = _right_derivative(q)
    out = {}
    # t-side: q against the measure F''(-t) dt
    try:
        out["t_measure"] = integrate(lambda t: float(q(t)) * float(F.second_derivative(-t)), delta, t0,
                                     q.breakpoints())
    except UnsupportedError:
        pass
    # integration by parts
    boundary = -float(q(t0)) * float(F.derivative(-t0)) + float(q(delta)) * float(F.derivative(-delta))
    out["ibp"] = boundary + integrate(lambda t: dq(t) * float(F.derivative(-t)), delta, t0, q.breakpoints())
    # spatial: radial flux of M = F(-g) from numeric derivatives, against q ∘ g
    if domain.center_pole:
        g = domain.green_profile()
        M = RadialProfile.from_callable(lambda r: float(F(-float(g(r)))), (0.0, domain.R))
        m = domain.m

        def flux(t):
            r = level_radius(domain, t)
            return r ** (m - 1) * rc.onesided_derivatives(M, r, method="numeric")[1] / max(1, m - 2)

        # μ increases with r, i.e. decreases with t
        val, _ = _stieltjes_romberg(q, lambda t: -flux(t), delta, t0)
        out["spatial"] = val
    return out


def ibp_check_green(q: RadialProfile, domain: ModelDomain, t0: float = DEFAULT_T0, F=None,
                    Z: ZeroSet | None = None, delta: float = DEFAULT_IBP_DELTA,
                    tol_smooth: float = IBP_TOL_SMOOTH, tol_points: float = IBP_TOL_POINTS) -> IbpReport:
    """Cross-check the Green-form integrals by independent routes.

    Growth side (needs ``F``), truncated to ``[delta, t0]``: the spatial
    integral of ``q ∘ g`` against the Riesz measure of ``F ∘ (-g)``, the
    integral of ``q`` against ``F''(-t) dt``, and the integrated-by-parts
    form ``[-q F'(-t)] + ∫ q' F'(-t) dt``.

    Zero side (needs point zeros): the direct sum ``Σ_{g_k <= t0} q(g_k)``,
    the Stieltjes sum over the jumps of ``s_{Z,D}``, and
    ``∫_0^{t0} q' s_{Z,D} dt - q(t0) s_{Z,D}(t0)``.
    """
    checks, skipped = [], []
    if F is not None:
        Fn = _envelope_function(F)
        vals = _mass_paths(q, Fn, domain, t0, delta)
        if not domain.center_pole:
            skipped.append("growth: spatial path needs a centre pole")
        if len(vals) >= 2:
            checks.append(IbpCheck("growth", {**vals, "delta": delta},
                                   relative_residual(*vals.values()), tol_smooth))
        else:
            skipped.append("growth: fewer than two evaluation paths available")
    if Z is not None:
        if Z.points.size == 0 and Z.counting is None:
            checks.append(IbpCheck("zeros", {"direct_sum": 0.0, "stieltjes": 0.0, "ibp": 0.0}, 0.0, tol_points))
        elif Z.points.size == 0:
            skipped.append("zeros: direct sum needs explicit points")
        else:
            g = Z.green_values(domain)
            sel = g <= t0
            qg = np.asarray(q(g[sel]), dtype=float) * Z.mults[sel]
            direct = math.fsum(qg.tolist())
            s = Z.green_counting_profile(domain)
            knots = np.asarray(s.params["r"], dtype=float)
            jumps_at = knots[(knots > 0) & (knots <= t0)]
            # the value at a knot is the right limit; the jump of -s is left minus right
            right_lim = np.asarray(s(jumps_at), dtype=float)
            left_lim = np.asarray(s(np.nextafter(jumps_at, -np.inf)), dtype=float)
            stieltjes = math.fsum((np.asarray(q(jumps_at), dtype=float) * (left_lim - right_lim)).tolist())
            qv = lambda e: np.diff(np.asarray(q(e), dtype=float))
            ibp = _step_integral(s, 0.0, t0, qv) - float(q(t0)) * float(s(t0))
            checks.append(IbpCheck("zeros", {"direct_sum": direct, "stieltjes": stieltjes, "ibp": ibp},
                                   relative_residual(direct, stieltjes, ibp), tol_points))
    return IbpReport(checks, skipped)
