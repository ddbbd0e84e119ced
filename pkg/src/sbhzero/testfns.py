"""Test functions: positive subharmonic functions on ``D \\ K`` vanishing on ``∂D``.

Two constructions are provided:

* radial, on ``B(R) \\ B̄(r0)``:  ``v(x) = ∫_{|x|}^R d(t) t**(1-m) dt`` with a
  decreasing density ``d >= 0``;
* Green, on ``D \\ D̄_{t0}``:  ``v = q ∘ g_D`` with ``q`` convex, ``q(0) = 0``.

:func:`validate_testfn` checks positivity, boundary vanishing on a
decreasing ε schedule, boundedness and subharmonicity on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import radial_core as rc
from .errors import ConstructionError, DomainError, PreconditionError, UnsupportedError
from .green_domains import ModelDomain, green_value, level_radius, mobius_from_center
from .profiles import INF, MonotoneDensity, RadialProfile
from .tails import Tail, classify, combine

EPS_SCHEDULE = (1e-1, 1e-2, 1e-3)
N_RADII = 256
N_ANGLES = 64
POSITIVITY_TOL = 1e-12
LAPLACIAN_TOL = 1e-6


@dataclass(frozen=True)
class ClosedBall:
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("K must have non-empty interior; a single point is not supported")


@dataclass(frozen=True)
class LevelClosure:
    t: float

    def __post_init__(self):
        if not 0 < self.t < INF:
            raise DomainError("level-set closure needs 0 < t < inf")


# --------------------------------------------------------------------------
# growth envelopes
# --------------------------------------------------------------------------

F_FAMILIES = ("constant", "linear", "exp", "neg-power", "neg-log")


@dataclass(frozen=True, eq=False)
class EnvelopeFunction:
    """Convex increasing ``F`` on ``(-inf, 0)``.

    ==========  ===================  ========================
    family      F(s)                 parameters
    ==========  ===================  ========================
    constant    c                    c
    linear      c s                  c >= 0
    exp         c exp(lam s)         c >= 0, lam > 0
    neg-power   c (-s)**-p           c >= 0, p > 0
    neg-log     -c log(-s)           c >= 0
    ==========  ===================  ========================
    """

    family: str
    params: dict
    func: Callable | None = field(default=None, repr=False)
    deriv: Callable | None = field(default=None, repr=False)
    deriv2: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.family == "callable":
            return
        if self.family not in F_FAMILIES:
            raise ValueError(f"unknown envelope family {self.family!r}")
        P = self.params
        if self.family != "constant" and P.get("c", 0.0) < 0:
            raise PreconditionError("envelope coefficient must be >= 0 (F increasing)")
        if self.family == "exp" and not P.get("lam", 1.0) > 0:
            raise PreconditionError("exp envelope needs lam > 0")
        if self.family == "neg-power" and not P.get("p", 1.0) > 0:
            raise PreconditionError("neg-power envelope needs p > 0")

    @classmethod
    def from_callable(cls, func, deriv=None, deriv2=None) -> "EnvelopeFunction":
        return cls("callable", {}, func, deriv, deriv2)

    @classmethod
    def from_dict(cls, data: dict) -> "EnvelopeFunction":
        data = dict(data)
        fam = data.pop("family")
        defaults = {"constant": {"c": 0.0}, "linear": {"c": 1.0}, "exp": {"c": 1.0, "lam": 1.0},
                    "neg-power": {"c": 1.0, "p": 1.0}, "neg-log": {"c": 1.0}}
        if fam not in defaults:
            raise ValueError(f"unknown envelope family {fam!r}")
        params = {**defaults[fam], **{k: float(v) for k, v in data.items()}}
        return cls(fam, params)

    def to_dict(self) -> dict:
        if self.family == "callable":
            raise TypeError("callable envelopes are not serialisable")
        return {"family": self.family, **self.params}

    @property
    def is_zero_derivative(self) -> bool:
        return self.family == "constant" or self.params.get("c", 1.0) == 0.0

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        P, fam = self.params, self.family
        with np.errstate(divide="ignore", invalid="ignore"):
            if fam == "constant":
                out = np.full(s.shape, P["c"])
            elif fam == "linear":
                out = P["c"] * s
            elif fam == "exp":
                out = P["c"] * np.exp(P["lam"] * s)
            elif fam == "neg-power":
                out = P["c"] * (-s) ** (-P["p"])
            elif fam == "neg-log":
                out = -P["c"] * np.log(-s)
            else:
                out = np.vectorize(lambda v: float(self.func(v)))(s)
        return float(out) if out.ndim == 0 else out

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        P, fam = self.params, self.family
        with np.errstate(divide="ignore", invalid="ignore"):
            if fam == "constant":
                out = np.zeros(s.shape)
            elif fam == "linear":
                out = np.full(s.shape, P["c"])
            elif fam == "exp":
                out = P["c"] * P["lam"] * np.exp(P["lam"] * s)
            elif fam == "neg-power":
                out = P["c"] * P["p"] * (-s) ** (-P["p"] - 1.0)
            elif fam == "neg-log":
                out = -P["c"] / s
            else:
                if self.deriv is None:
                    out = np.vectorize(lambda v: _numeric_right_derivative(self, v))(s)
                else:
                    out = np.vectorize(lambda v: float(self.deriv(v)))(s)
        return float(out) if out.ndim == 0 else out

    def second_derivative(self, s):
        s = np.asarray(s, dtype=float)
        P, fam = self.params, self.family
        with np.errstate(divide="ignore", invalid="ignore"):
            if fam in ("constant", "linear"):
                out = np.zeros(s.shape)
            elif fam == "exp":
                out = P["c"] * P["lam"] ** 2 * np.exp(P["lam"] * s)
            elif fam == "neg-power":
                out = P["c"] * P["p"] * (P["p"] + 1.0) * (-s) ** (-P["p"] - 2.0)
            elif fam == "neg-log":
                out = P["c"] / s**2
            else:
                if self.deriv2 is None:
                    raise UnsupportedError("second derivative of a callable envelope was not supplied")
                out = np.vectorize(lambda v: float(self.deriv2(v)))(s)
        return float(out) if out.ndim == 0 else out

    def derivative_tail_at_zero(self) -> Tail | None:
        """Asymptotics of ``t -> F'(-t)`` as ``t -> 0+``."""
        P, fam = self.params, self.family
        if self.is_zero_derivative:
            return Tail.zero()
        if fam == "linear":
            return Tail(P["c"])
        if fam == "exp":
            return Tail(P["c"] * P["lam"])
        if fam == "neg-power":
            return Tail(P["c"] * P["p"], -P["p"] - 1.0)
        if fam == "neg-log":
            return Tail(P["c"], -1.0)
        return None


def _numeric_right_derivative(F, s):
    prof = RadialProfile.from_callable(lambda v: float(F(v)), (-INF, 0.0))
    return rc.onesided_derivatives(prof, float(s), h0=0.25 * min(1.0, -s))[1]


def check_envelope_function(F: EnvelopeFunction, s_min: float = -20.0, n: int = 256) -> dict:
    """Grid check of convexity and monotonicity of ``F`` on ``[s_min, 0)``."""
    s = np.linspace(s_min, 0.0, n + 1)[:-1]
    vals = np.asarray(F(s), dtype=float)
    inc_ok, inc_bad = rc.is_monotone(vals, "increasing", 1e-12)
    shifted = RadialProfile.from_callable(lambda v: float(F(v + s_min)), (0.0, -s_min))
    conv = rc.check_convex_of_h(shifted, 1, n_points=n, interval=(1e-12, -s_min))
    return {
        "increasing": inc_ok,
        "increasing_witness": None if inc_ok else float(s[inc_bad]),
        "convex": conv.passed,
        "convex_witness": None if conv.first_violation is None else [v + s_min for v in conv.first_violation],
        "passed": inc_ok and conv.passed,
    }


@dataclass(frozen=True, eq=False)
class GrowthEnvelope:
    """Majorant ``M`` with ``|f| <= exp(M)``: radial ``q(|z|)`` or ``F ∘ (-g_D)``."""

    kind: str
    q: RadialProfile | None = None
    n: int | None = None
    R: float | None = None
    F: EnvelopeFunction | None = None
    domain: ModelDomain | None = None
    report: dict = field(default_factory=dict)

    def radial_profile(self) -> RadialProfile:
        if self.kind == "radial":
            return self.q
        dom = self.domain
        if not dom.center_pole:
            raise UnsupportedError("radial profile of M needs a centre pole")
        F = self.F
        return RadialProfile.from_callable(lambda r: float(F(-dom.green_radial(r))), (0.0, dom.R))

    def __call__(self, x):
        if self.kind == "radial":
            return float(self.q(float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))))
        return float(self.F(-green_value(self.domain, x)))

    def to_dict(self) -> dict:
        if self.kind == "radial":
            return {"kind": "radial", "q": self.q.to_dict(), "n": self.n, "R": _enc(self.R)}
        return {"kind": "green", "F": self.F.to_dict(), "domain": self.domain.to_dict()}


def _enc(x):
    return "inf" if x is not None and math.isinf(x) else x


def radial_envelope(q: RadialProfile, n: int, R: float = INF) -> GrowthEnvelope:
    """Validated radial envelope: ``q`` convex of ``h_{2n}`` on ``(0, R)``."""
    rep = rc.check_convex_of_h(q, 2 * n, interval=(0.0, R))
    if not rep.passed:
        raise PreconditionError(f"envelope profile is not convex of h_{2 * n}: {rep.first_violation}")
    return GrowthEnvelope("radial", q=q, n=int(n), R=float(R), report={"convexity": rep.to_dict()})


def growth_envelope_green(F: EnvelopeFunction, domain: ModelDomain, n_radii: int = 128,
                          n_angles: int = N_ANGLES) -> GrowthEnvelope:
    """``M = F ∘ (-g_D)``, subharmonic on ``D``; checked on sample annuli."""
    chk = check_envelope_function(F)
    if not chk["passed"]:
        raise PreconditionError(f"F is not convex increasing: {chk}")
    report = {"F": chk}
    if domain.m == 2:
        # pulled back to the unit disk with the pole at 0 (conformal invariance)
        def pulled(U, V):
            z = mobius_from_center(domain, np.asarray(U) + 1j * np.asarray(V))
            return F(-domain.green_xy(z.real, z.imag))

        lap = rc.polar_laplacian(pulled, 0.25, 0.95, n_radii, n_angles, tolerance=LAPLACIAN_TOL)
        report["laplacian"] = lap.to_dict()
        if not lap.passed:
            raise PreconditionError(f"F ∘ (-g) failed the discrete Laplacian check at {lap.witness}")
    else:
        prof = RadialProfile.from_callable(lambda r: float(F(-domain.green_radial(r))), (0.0, domain.R))
        conv = rc.check_convex_of_h(prof, domain.m, interval=(0.05 * domain.R, 0.95 * domain.R))
        report["convexity"] = conv.to_dict()
        if not conv.passed:
            raise PreconditionError("F ∘ (-g) is not subharmonic on the sample annulus")
    return GrowthEnvelope("green", F=F, domain=domain, report=report)


# --------------------------------------------------------------------------
# test functions
# --------------------------------------------------------------------------


@dataclass
class ValidationReport:
    passed: bool
    checks: dict
    failures: list

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": self.checks,
                "failures": [{"axiom": tag, "witness": w} for tag, w in self.failures]}


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A member of sbh₀⁺(D \\ K); see the module docstring for the two kinds."""

    __test__ = False  # not a pytest class

    kind: str
    domain: ModelDomain
    K: object
    m: int
    density: MonotoneDensity | None = None
    r0: float | None = None
    R: float | None = None
    q: RadialProfile | None = None
    t0: float | None = None
    sup_bound: float = 0.0
    validation: ValidationReport | None = None

    @property
    def radial(self) -> bool:
        return self.kind == "radial" or self.domain.center_pole

    @property
    def inner_radius(self) -> float:
        if self.kind == "radial":
            return self.r0
        return level_radius(self.domain, self.t0)

    @property
    def outer_radius(self) -> float:
        return self.R if self.kind == "radial" else self.domain.R

    def radial_value(self, r):
        """``spr_v(r)``; ``nan`` inside ``K``, ``0`` at and beyond ``R``."""
        if not self.radial:
            raise UnsupportedError("test function is not radial")
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.full(r_arr.shape, np.nan)
        if self.kind == "radial":
            inside = (r_arr > self.r0) & (r_arr < self.R)
            out[r_arr >= self.R] = 0.0
            if np.any(inside):
                out[inside] = _radial_integral(self.density, r_arr[inside], self.R, self.m)
        else:
            g = self.domain.green_radial(r_arr)
            inside = (g < self.t0) & (r_arr < self.domain.R)
            out[r_arr >= self.domain.R] = 0.0
            out[inside] = self.q(g[inside])
        return float(out[0]) if np.ndim(r) == 0 else out

    def values_xy(self, X, Y):
        """Vectorised planar evaluation (``nan`` in ``K``, ``0`` off ``D``)."""
        X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
        if self.radial:
            return self.radial_value(np.hypot(X, Y))
        g = self.domain.green_xy(X, Y)
        out = np.full(X.shape, np.nan)
        off = np.hypot(X, Y) >= self.domain.R
        out[off] = 0.0
        ok = ~off & (g < self.t0)
        out[ok] = self.q(g[ok])
        return out

    def __call__(self, x) -> float:
        if isinstance(x, (complex,)):
            x = (x.real, x.imag)
        v = np.atleast_1d(np.asarray(x, dtype=float))
        if self.kind == "green":
            if not self.domain.contains(v if v.size > 1 else float(v[0])):
                raise DomainError(f"{x} is outside D")
            g = green_value(self.domain, v if v.size > 1 else float(v[0]))
            if g >= self.t0:
                raise DomainError(f"{x} lies in K")
            return float(self.q(g))
        r = float(np.linalg.norm(v))
        if not self.r0 < r < self.R:
            raise DomainError(f"radius {r} outside ({self.r0}, {self.R})")
        return self.radial_value(r)

    def profile(self) -> RadialProfile:
        """``spr_v`` as a profile on ``(inner, outer)``."""
        lo, hi = self.inner_radius, self.outer_radius
        if self.kind == "radial":
            d, R, m = self.density, self.R, self.m
            return RadialProfile.from_callable(lambda r: float(_radial_integral(d, np.array([r]), R, m)[0]),
                                               (lo, hi), lambda r: -float(d(r)) * r ** (1 - m), d.breakpoints())
        dom, q = self.domain, self.q
        gp = dom.green_profile()

        def deriv(r):
            return float(q.derivative(float(gp(r)), "left")) * float(gp.derivative(r))

        return RadialProfile.from_callable(lambda r: float(q(float(gp(r)))), (lo, hi),
                                           deriv if q.has_derivative else None)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "m": self.m, "domain": self.domain.to_dict(), "sup_bound": self.sup_bound}
        if self.kind == "radial":
            out.update(density=self.density.to_dict(), r0=self.r0, R=_enc(self.R))
        else:
            out.update(q=self.q.to_dict() if self.q.closed_form else None, t0=self.t0)
        return out


def _radial_integral(d: MonotoneDensity, radii: np.ndarray, R: float, m: int) -> np.ndarray:
    """``∫_r^R d(t) t**(1-m) dt`` for each radius, by reverse cumulative sums."""
    order = np.argsort(radii)
    rs = radii[order]
    edges = np.concatenate([rs, [R]])
    seg = d.segment_integrals(edges, m - 1)
    vals = np.cumsum(seg[::-1])[::-1]
    out = np.empty_like(vals)
    out[order] = vals
    return out


def build_radial_testfn(d: MonotoneDensity, r0: float, R: float, m: int, validate: bool = True,
                        n_radii: int = N_RADII) -> TestFunction:
    """Radial test function ``∫_{|x|}^R d(t) t**(1-m) dt`` on ``B(R) \\ B̄(r0)``.

    Validation failures raise for parametric densities and are only recorded
    for sampled ones.
    """
    if not 0 < r0 < R:
        raise DomainError("need 0 < r0 < R")
    if d.direction != "decreasing" and not _is_constant(d):
        raise PreconditionError("radial test functions need a decreasing density")
    if d.kind == "samples" and np.any(d.values < 0):
        raise PreconditionError("density must be non-negative")
    if math.isinf(R):
        tail = combine([d.local_tail(INF), Tail(1.0, m - 1.0)], at_infinity=True)
        verdict = classify(lambda a, b: d.weighted_integral(a, b, m - 1), r0, INF, "upper", tail)
        if not verdict.convergent:
            why = "diverges" if verdict.divergent else "cannot be certified finite"
            raise ConstructionError(f"∫_r0^inf d(t) t^(1-m) dt {why}; a test function needs it finite")
    sup = d.weighted_integral(r0, R, m - 1)
    if not math.isfinite(sup):
        raise ConstructionError("∫_r0^R d(t) t^(1-m) dt diverges; a test function needs it finite")
    tf = TestFunction("radial", ModelDomain.ball(R, m), ClosedBall(r0), int(m), density=d, r0=float(r0),
                      R=float(R), sup_bound=float(sup))
    if not validate:
        return tf
    rep = validate_testfn(tf, n_radii=n_radii)
    if not rep.passed and d.kind == "parametric":
        raise ConstructionError(f"radial test function failed validation: {rep.failures}")
    return _with_report(tf, rep)


def _is_constant(d: MonotoneDensity) -> bool:
    if d.kind == "parametric":
        return d.alpha == 0 and d.beta == 0
    return bool(np.all(d.values == d.values[0]))


def _with_report(tf: TestFunction, rep: ValidationReport) -> TestFunction:
    return TestFunction(tf.kind, tf.domain, tf.K, tf.m, tf.density, tf.r0, tf.R, tf.q, tf.t0,
                        tf.sup_bound, rep)


def green_superposition(q: RadialProfile, domain: ModelDomain, t0: float, validate: bool = True) -> TestFunction:
    """Test function ``q ∘ g_D`` on ``D \\ D̄_{t0}``."""
    if not 0 < t0 < INF:
        raise DomainError("t0 must be positive and finite")
    domain._require_green()
    q0 = float(q(0.0))
    if not math.isfinite(q0) or abs(q0) > 1e-12:
        raise PreconditionError(f"q(0) = {q0} != 0: the superposition would not vanish on ∂D")
    ts = np.linspace(0.0, t0, 257)[1:]
    if np.any(np.asarray(q(ts)) < -POSITIVITY_TOL):
        raise PreconditionError("q must be non-negative on [0, t0)")
    conv = rc.check_convex_of_h(q, 1, interval=(0.0, t0))
    if not conv.passed:
        raise PreconditionError(f"q is not convex on [0, t0): {conv.first_violation}")
    tf = TestFunction("green", domain, LevelClosure(t0), domain.m, q=q, t0=float(t0),
                      sup_bound=float(q(t0)))
    if not validate:
        return tf
    rep = validate_testfn(tf)
    if not rep.passed and q.closed_form:
        raise ConstructionError(f"Green test function failed validation: {rep.failures}")
    return _with_report(tf, rep)


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------


def _boundary_coordinate(R: float):
    """Map a boundary distance ``y`` to a radius: ``R - y`` or ``1 / y`` at infinity."""
    if math.isinf(R):
        return lambda y: 1.0 / y
    return lambda y: R - y


def _v0lo_schedule(sup_near, y_max: float, eps_schedule, max_halvings: int = 60):
    """For each ε find δ with ``sup_near(δ) < ε``; bisection refines δ."""
    rows, ok_all, witness = [], True, None
    for eps in eps_schedule:
        delta, found = y_max, False
        for _ in range(max_halvings):
            val, wit = sup_near(delta)
            if val < eps:
                found = True
                break
            witness = wit
            delta /= 2
        if found and delta < y_max:
            lo, hi = delta, min(2 * delta, y_max)
            for _ in range(30):
                mid = 0.5 * (lo + hi)
                if sup_near(mid)[0] < eps:
                    lo = mid
                else:
                    hi = mid
            delta = lo
        rows.append({"eps": eps, "delta": delta if found else None, "passed": found})
        if not found:
            ok_all = False
    return ok_all, rows, witness


def validate_testfn(v, domain: ModelDomain | None = None, K=None, *, n_radii: int = N_RADII,
                    n_angles: int = N_ANGLES, tol: float = rc.CONVEXITY_TOL,
                    eps_schedule=EPS_SCHEDULE, laplacian_tol: float = LAPLACIAN_TOL) -> ValidationReport:
    """Grid check of the test-function axioms.

    ``v`` is a :class:`TestFunction`, a radial candidate (a
    :class:`RadialProfile` of ``|x|``) or a planar callable ``v(X, Y)``;
    candidates need ``domain`` and ``K``.  The report lists, per axiom, the
    outcome and a witness point for failures:

    ``positivity``   v >= 0 on the grid
    ``v0lo``         for each ε of the schedule a boundary collar of width δ(ε)
                     on which v < ε
    ``v0ls``         finite sup, finite lim sup approaching ``∂K``
    ``subharmonic``  radial convexity test, or polar discrete Laplacian
    """
    if isinstance(v, TestFunction):
        domain = v.domain if domain is None else domain
        K = v.K if K is None else K
        m = v.m
        if v.radial:
            return _validate_radial(v.radial_value, v.inner_radius, v.outer_radius, m, n_radii, tol,
                                    eps_schedule)
        return _validate_planar(v.values_xy, domain, K, n_radii, n_angles, eps_schedule, laplacian_tol,
                                pullback=True)
    if domain is None or K is None:
        raise ValueError("candidates need an explicit domain and K")
    if isinstance(v, RadialProfile):
        if not isinstance(K, ClosedBall):
            raise ValueError("radial candidates need K = ClosedBall(r0)")
        return _validate_radial(lambda r: np.asarray(v(r), dtype=float), K.radius, domain.R, domain.m,
                                n_radii, tol, eps_schedule)
    return _validate_planar(v, domain, K, n_radii, n_angles, eps_schedule, laplacian_tol)


def _validate_radial(vr, r_in: float, R: float, m: int, n_radii: int, tol: float, eps_schedule) -> ValidationReport:
    failures = []
    checks = {}
    if math.isinf(R):
        radii = np.geomspace(r_in, r_in * 1e6, n_radii + 2)[1:-1]
        y_max = 1.0 / r_in
    else:
        radii = np.linspace(r_in, R, n_radii + 2)[1:-1]
        y_max = R - r_in
    vals = np.asarray(vr(radii), dtype=float)
    to_r = _boundary_coordinate(R)

    # positivity
    i = int(np.nanargmin(vals))
    pos_ok = bool(np.all(np.isfinite(vals)) and vals[i] >= -POSITIVITY_TOL * max(1.0, np.nanmax(np.abs(vals))))
    checks["positivity"] = {"passed": pos_ok, "min": float(vals[i])}
    if not pos_ok:
        failures.append(("positivity", [float(radii[i]), float(vals[i])]))

    # boundary vanishing
    def sup_near(delta):
        ys = np.geomspace(delta * 1e-6, delta, 24)
        rs = to_r(ys)
        w = np.asarray(vr(rs), dtype=float)
        j = int(np.argmax(w))
        return float(w[j]), [float(rs[j]), float(w[j])]

    ok, rows, witness = _v0lo_schedule(sup_near, y_max, eps_schedule)
    limit_rs = [float(to_r(y_max * 10.0**-k)) for k in (6, 7, 8)]
    limit_vals = [float(x) for x in np.asarray(vr(np.array(limit_rs)), dtype=float)]
    lim_ok = (limit_vals[0] >= limit_vals[1] - 1e-15 >= limit_vals[2] - 2e-15
              and abs(limit_vals[2]) < min(eps_schedule))
    checks["v0lo"] = {"passed": ok and lim_ok, "schedule": rows,
                      "limit": {"radii": limit_rs, "values": limit_vals, "passed": lim_ok}}
    if not (ok and lim_ok):
        failures.append(("v0lo", witness if witness is not None else [limit_rs[-1], limit_vals[-1]]))

    # boundedness, including the approach to ∂K
    near_k = [r_in + y_max * 10.0**-k for k in (6, 7, 8)] if not math.isinf(R) else \
        [r_in * (1 + 10.0**-k) for k in (6, 7, 8)]
    near_vals = np.asarray(vr(np.array(near_k)), dtype=float)
    sup = float(np.nanmax(np.concatenate([vals, near_vals])))
    ls_ok = bool(np.all(np.isfinite(vals)) and np.all(np.isfinite(near_vals)))
    checks["v0ls"] = {"passed": ls_ok, "sup": sup, "limsup_at_K": float(np.max(near_vals))}
    if not ls_ok:
        failures.append(("v0ls", [float(r_in), float(np.max(near_vals))]))

    # subharmonicity
    prof = RadialProfile.from_callable(lambda r: float(np.asarray(vr(np.array([r])))[0]), (r_in, R))
    conv = rc.check_convex_of_h(prof, m, tolerance=tol, n_points=n_radii)
    checks["subharmonic"] = {"method": "convex-of-h", **conv.to_dict()}
    if not conv.passed:
        failures.append(("subharmonic", list(conv.first_violation)))

    return ValidationReport(not failures, checks, failures)


def _validate_planar(vxy, domain: ModelDomain, K, n_radii: int, n_angles: int, eps_schedule,
                     laplacian_tol: float, pullback: bool = False) -> ValidationReport:
    if domain.m != 2:
        raise UnsupportedError("planar validation needs m = 2")
    R = domain.R
    if isinstance(K, LevelClosure):
        t0 = K.t

        def in_k(X, Y):
            return domain.green_xy(X, Y) >= t0
    else:
        rk = K.radius

        def in_k(X, Y):
            return np.hypot(X, Y) <= rk

    failures, checks = [], {}
    r = np.linspace(0.0, R, n_radii + 2)[1:-1]
    th = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
    Rg, Tg = np.meshgrid(r, th, indexing="ij")
    X, Y = Rg * np.cos(Tg), Rg * np.sin(Tg)
    keep = ~in_k(X, Y)
    vals = np.asarray(vxy(X[keep], Y[keep]), dtype=float)
    i = int(np.nanargmin(vals))
    pos_ok = bool(np.all(np.isfinite(vals)) and vals[i] >= -POSITIVITY_TOL * max(1.0, np.nanmax(np.abs(vals))))
    checks["positivity"] = {"passed": pos_ok, "min": float(vals[i])}
    if not pos_ok:
        failures.append(("positivity", [float(X[keep][i]), float(Y[keep][i]), float(vals[i])]))

    def sup_near(delta):
        ys = np.geomspace(delta * 1e-6, delta, 12)
        rr, tt = np.meshgrid(R - ys, th, indexing="ij")
        xx, yy = rr * np.cos(tt), rr * np.sin(tt)
        k = ~in_k(xx, yy)
        w = np.asarray(vxy(xx[k], yy[k]), dtype=float)
        j = int(np.argmax(w))
        return float(w[j]), [float(xx[k][j]), float(yy[k][j]), float(w[j])]

    y_max = R - float(np.max(np.hypot(X[~keep], Y[~keep]))) if np.any(~keep) else R
    ok, rows, witness = _v0lo_schedule(sup_near, max(y_max, 1e-12), eps_schedule)
    checks["v0lo"] = {"passed": ok, "schedule": rows}
    if not ok:
        failures.append(("v0lo", witness))

    sup = float(np.nanmax(vals))
    ls_ok = bool(np.isfinite(sup))
    checks["v0ls"] = {"passed": ls_ok, "sup": sup}
    if not ls_ok:
        failures.append(("v0ls", None))

    if pullback and isinstance(K, LevelClosure):
        # subharmonicity is conformally invariant in the plane: test v ∘ φ^{-1}
        # on the unit disk, where φ sends the pole to 0 and the grid is exact
        # in the angular direction
        def pulled(U, V):
            z = mobius_from_center(domain, np.asarray(U) + 1j * np.asarray(V))
            return vxy(z.real, z.imag)

        rk = math.exp(-K.t)
        lap = rc.polar_laplacian(pulled, 1.0 / (n_radii + 1), 1.0, n_radii, n_angles,
                                 tolerance=laplacian_tol, mask=lambda U, V: np.hypot(U, V) <= rk)
        method = "polar-laplacian-mobius"
    else:
        lap = rc.polar_laplacian(vxy, R / (n_radii + 1), R, n_radii, n_angles,
                                 tolerance=laplacian_tol, mask=in_k)
        method = "polar-laplacian"
    checks["subharmonic"] = {"method": method, **lap.to_dict()}
    if not lap.passed:
        failures.append(("subharmonic", list(lap.witness)))
    return ValidationReport(not failures, checks, failures)


# --------------------------------------------------------------------------
# zero extension
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExtendedTestFunction:
    """``v`` on ``D \\ K`` continued by ``0`` on the complement of ``D``."""

    inner: TestFunction
    collar: rc.LaplacianReport | None = None

    def radial_value(self, r):
        return self.inner.radial_value(r)

    def values_xy(self, X, Y):
        return self.inner.values_xy(X, Y)

    def __call__(self, x) -> float:
        if isinstance(x, complex):
            x = (x.real, x.imag)
        v = np.atleast_1d(np.asarray(x, dtype=float))
        r = float(np.linalg.norm(v))
        if r >= self.inner.outer_radius:
            return 0.0
        return self.inner(x)


def collar_laplacian(v: TestFunction, width: float | None = None, n: int = 257,
                     tolerance: float = LAPLACIAN_TOL) -> rc.LaplacianReport:
    """Discrete Laplacian of the zero extension on a collar around ``∂D``."""
    R = v.outer_radius
    if math.isinf(R):
        return rc.LaplacianReport(True, 0.0, tolerance, 0)
    if v.kind == "green" and not v.domain.center_pole:
        # ∂D_{t0} is the image of the circle |w| = exp(-t0)
        circle = math.exp(-v.t0) * np.exp(1j * np.linspace(0.0, 2 * np.pi, 256, endpoint=False))
        lo = float(np.max(np.abs(mobius_from_center(v.domain, circle))))
    else:
        lo = v.inner_radius
    w = 0.25 * (R - lo) if width is None else width
    if v.radial:
        radii = np.linspace(R - w, R + w, n)
        lap = rc.radial_laplacian(v.radial_value, v.m, radii)
        scale = max(1.0, float(np.nanmax(np.abs(v.radial_value(radii)))))
        i = int(np.argmin(lap))
        passed = bool(lap[i] >= -tolerance * scale)
        return rc.LaplacianReport(passed, float(lap[i]), tolerance, int(lap.size),
                                  None if passed else (float(radii[i + 1]),))
    return rc.polar_laplacian(v.values_xy, R - w, R + w, n, N_ANGLES, tolerance=tolerance)


def extend_by_zero(v: TestFunction) -> ExtendedTestFunction:
    """Zero extension; the collar Laplacian across ``∂D`` is attached."""
    return ExtendedTestFunction(v, collar_laplacian(v))


def density_from_testfn(v, m: int, radii, method: str = "auto") -> np.ndarray:
    """Recover ``d(t) = -t**(m-1) v'_→(t)`` at the given radii."""
    prof = v.profile() if isinstance(v, TestFunction) else v
    return np.array([-(r ** (m - 1)) * rc.onesided_derivatives(prof, float(r), method=method)[1]
                     for r in np.asarray(radii, dtype=float)])


def level_set_harmonic_mass(domain: ModelDomain, t0: float, method: str = "numeric") -> float:
    """Riesz mass of ``-min(g_D, t0)`` on an annulus straddling ``∂D_{t0}``.

    ``-min(g, t0)`` is constant on ``D_{t0}`` and equals ``-g`` outside, so
    its Riesz measure is the harmonic measure of ``∂D_{t0}`` seen from the
    pole; the total should be 1.
    """
    if not domain.center_pole:
        raise UnsupportedError("harmonic-measure mass is computed for centre poles")
    rt = level_radius(domain, t0)
    R = domain.R
    prof = RadialProfile.from_callable(lambda r: -min(float(domain.green_radial(r)), t0), (0.0, R), kinks=(rt,))
    return rc.radial_riesz_measure(prof, domain.m, (0.5 * rt, 0.5 * (rt + R)), method=method)


def density_from_green(domain: ModelDomain, r0: float, n_knots: int = 65, snap_tol: float = 1e-12) -> MonotoneDensity:
    """Piecewise-linear ``d`` recovered by differentiating ``v = g_D`` on ``(r0, R)``.

    Round-off can make exactly constant samples increase by an ulp; rises up
    to ``snap_tol`` (relative) are flattened, larger ones raise.
    """
    if not domain.center_pole:
        raise UnsupportedError("density recovery needs a centre pole")
    v = green_superposition(RadialProfile.power(1.0, 1.0), domain, level_green(domain, r0), validate=False)
    knots = np.linspace(r0, domain.R, n_knots)
    # endpoints lie on ∂K and ∂D; sample just inside
    inner = knots.copy()
    span = domain.R - r0
    inner[0] += 1e-9 * span
    inner[-1] -= 1e-9 * span
    vals = density_from_testfn(v, domain.m, inner)
    snapped = np.minimum.accumulate(vals)
    if np.any(vals - snapped > snap_tol * np.maximum(1.0, np.abs(vals))):
        raise ConstructionError("recovered density is not decreasing")
    return MonotoneDensity.piecewise_linear(knots, snapped, "decreasing")


def level_green(domain: ModelDomain, r: float) -> float:
    """``g`` at radius ``r`` (centre pole); the ``t0`` whose level radius is ``r``."""
    return float(domain.green_radial(r))
