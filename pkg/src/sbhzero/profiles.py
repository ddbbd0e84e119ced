"""One-dimensional profiles: radial functions, counting functions, densities.

A :class:`RadialProfile` is a real function on an open interval, either a
closed-form family (serialisable as a tagged record) or an opaque callable.
A :class:`MonotoneDensity` is a monotone function used as a density in the
radial integral representations; its weighted integrals
``∫ d(t) t**-k dt`` are closed form per piece.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import quadrature
from .errors import DomainError, PreconditionError
from .tails import Tail

INF = math.inf

FAMILIES = ("constant", "power", "log-power", "samples")


def _scalar_or_array(out, x):
    return float(out) if np.ndim(x) == 0 else out


# --------------------------------------------------------------------------
# RadialProfile
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """A real function of one variable on ``domain = (lo, hi)``.

    Families and their parameters::

        constant   {c}                 c
        power      {c, p, offset}      offset + c r**p
        log-power  {c, p, b, offset}   offset + c r**p (log r)**b
        samples    {r, values, interpolation}
                   piecewise linear ("linear") or right-continuous steps
                   ("step", with optional ``left`` value before the first
                   knot); constant extension outside the knots.

    ``tail`` optionally carries the asymptotics of the profile *value* at
    ``tail_at`` for inputs whose behaviour is not derivable from the family.
    """

    family: str
    params: dict
    domain: tuple = (0.0, INF)
    tail: Tail | None = None
    tail_at: float | None = None
    func: Callable | None = field(default=None, repr=False)
    deriv: Callable | None = field(default=None, repr=False)
    kinks: tuple = ()

    # --- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, c: float, domain=(0.0, INF)) -> "RadialProfile":
        return cls("constant", {"c": float(c)}, tuple(domain))

    @classmethod
    def power(cls, c: float, p: float, offset: float = 0.0, domain=(0.0, INF)) -> "RadialProfile":
        return cls("power", {"c": float(c), "p": float(p), "offset": float(offset)}, tuple(domain))

    @classmethod
    def log_power(cls, c: float, p: float, b: float, offset: float = 0.0, domain=(0.0, INF)) -> "RadialProfile":
        return cls("log-power", {"c": float(c), "p": float(p), "b": float(b), "offset": float(offset)},
                   tuple(domain))

    @classmethod
    def samples(cls, r: Sequence[float], values: Sequence[float], interpolation: str = "linear",
                domain=None, left: float | None = None, tail: Tail | None = None,
                tail_at: float | None = None) -> "RadialProfile":
        r = np.asarray(r, dtype=float)
        v = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size == 0:
            raise ValueError("samples need matching one-dimensional radii and values")
        if np.any(np.diff(r) <= 0):
            raise ValueError("sample radii must be strictly increasing")
        if interpolation not in ("linear", "step"):
            raise ValueError(f"unknown interpolation {interpolation!r}")
        if interpolation == "linear" and r.size < 2:
            raise ValueError("linear interpolation needs at least two samples")
        if domain is None:
            domain = (float(r[0]), float(r[-1])) if interpolation == "linear" else (0.0, INF)
        lo, hi = domain
        if r[0] < lo or r[-1] > hi:
            raise ValueError("sample radii must lie inside the profile domain")
        params: dict[str, Any] = {"r": r.tolist(), "values": v.tolist(), "interpolation": interpolation}
        if interpolation == "step":
            params["left"] = float(v[0] if left is None else left)
        return cls("samples", params, (float(lo), float(hi)), tail, tail_at)

    @classmethod
    def from_callable(cls, func: Callable, domain=(0.0, INF), derivative: Callable | None = None,
                      kinks: Sequence[float] = (), tail: Tail | None = None,
                      tail_at: float | None = None) -> "RadialProfile":
        return cls("callable", {}, tuple(domain), tail, tail_at, func, derivative, tuple(kinks))

    @classmethod
    def harmonic(cls, m: int, domain=(0.0, INF)) -> "RadialProfile":
        """The radial harmonic coordinate ``h_m`` as a profile."""
        if m == 1:
            return cls.power(1.0, 1.0, domain=domain)
        if m == 2:
            return cls.log_power(1.0, 0.0, 1.0, domain=domain)
        return cls.power(-1.0, 2.0 - m, domain=domain)

    # --- evaluation -------------------------------------------------------

    @property
    def closed_form(self) -> bool:
        return self.family in FAMILIES

    def _np(self, name):
        return np.asarray(self.params[name], dtype=float)

    def __call__(self, r):
        x = np.asarray(r, dtype=float)
        fam, P = self.family, self.params
        if fam == "constant":
            out = np.full(x.shape, P["c"])
        elif fam == "power":
            with np.errstate(divide="ignore", invalid="ignore"):
                out = P["offset"] + P["c"] * x ** P["p"]
        elif fam == "log-power":
            with np.errstate(divide="ignore", invalid="ignore"):
                out = P["offset"] + P["c"] * x ** P["p"] * np.log(x) ** P["b"]
        elif fam == "samples":
            out = self._eval_samples(x)
        else:
            if x.ndim == 0:
                return float(self.func(float(x)))
            out = np.array([float(self.func(float(t))) for t in x.ravel()]).reshape(x.shape)
        return _scalar_or_array(out, r)

    def _eval_samples(self, x):
        knots, vals = self._np("r"), self._np("values")
        if self.params["interpolation"] == "linear":
            return np.interp(x, knots, vals)
        idx = np.searchsorted(knots, x, side="right") - 1
        out = np.where(idx >= 0, vals[np.clip(idx, 0, None)], self.params["left"])
        return out

    def derivative(self, r, side: str = "right"):
        """Exact one-sided derivative, or ``None`` if the profile has none."""
        x = np.asarray(r, dtype=float)
        fam, P = self.family, self.params
        if fam == "constant":
            out = np.zeros(x.shape)
        elif fam == "power":
            with np.errstate(divide="ignore", invalid="ignore"):
                out = P["c"] * P["p"] * x ** (P["p"] - 1.0)
        elif fam == "log-power":
            c, p, b = P["c"], P["p"], P["b"]
            with np.errstate(divide="ignore", invalid="ignore"):
                lg = np.log(x)
                out = c * x ** (p - 1.0) * (p * lg ** b + (b * lg ** (b - 1.0) if b != 0 else 0.0))
        elif fam == "samples":
            knots, vals = self._np("r"), self._np("values")
            if P["interpolation"] == "step":
                out = np.zeros(x.shape)
            else:
                slopes = np.diff(vals) / np.diff(knots)
                if side == "right":
                    idx = np.searchsorted(knots, x, side="right") - 1
                else:
                    idx = np.searchsorted(knots, x, side="left") - 1
                inside = (idx >= 0) & (idx < slopes.size)
                out = np.where(inside, slopes[np.clip(idx, 0, slopes.size - 1)], 0.0)
        else:
            if self.deriv is None:
                return None
            if x.ndim == 0:
                return float(self.deriv(float(x)))
            out = np.array([float(self.deriv(float(t))) for t in x.ravel()]).reshape(x.shape)
        return _scalar_or_array(out, r)

    @property
    def has_derivative(self) -> bool:
        return self.closed_form or self.deriv is not None

    def breakpoints(self) -> tuple:
        if self.family == "samples":
            return tuple(self.params["r"])
        return self.kinks

    # --- asymptotics ------------------------------------------------------

    def value_tail(self, endpoint: float, side: str) -> Tail | None:
        """Local behaviour of the value near ``endpoint``.

        ``side`` is ``"below"`` when the endpoint is approached from the
        left (upper endpoint) and ``"above"`` otherwise.
        """
        if self.tail is not None and self.tail_at is not None and self.tail_at == endpoint:
            return self.tail
        return _family_tail(self, endpoint, side, derivative=False)

    def derivative_tail(self, endpoint: float, side: str) -> Tail | None:
        return _family_tail(self, endpoint, side, derivative=True)

    # --- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        if not self.closed_form:
            raise TypeError("callable profiles are not serialisable")
        out = {"family": self.family, **self.params,
               "domain": [_enc(self.domain[0]), _enc(self.domain[1])]}
        if self.tail is not None:
            out["tail"] = {"coef": self.tail.coef, "power": self.tail.power,
                           "log_power": self.tail.log_power, "at": _enc(self.tail_at)}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RadialProfile":
        data = dict(data)
        fam = data.pop("family")
        domain = tuple(_dec(v) for v in data.pop("domain", (0.0, "inf")))
        tail_rec = data.pop("tail", None)
        tail = tail_at = None
        if tail_rec is not None:
            tail = Tail.from_any(tail_rec)
            tail_at = _dec(tail_rec.get("at", "inf")) if isinstance(tail_rec, dict) else domain[1]
        if fam == "constant":
            prof = cls.constant(data["c"], domain)
        elif fam == "power":
            prof = cls.power(data["c"], data["p"], data.get("offset", 0.0), domain)
        elif fam == "log-power":
            prof = cls.log_power(data["c"], data["p"], data["b"], data.get("offset", 0.0), domain)
        elif fam == "samples":
            prof = cls.samples(data["r"], data["values"], data.get("interpolation", "linear"),
                               domain, data.get("left"))
        else:
            raise ValueError(f"unknown profile family {fam!r}")
        if tail is not None:
            prof = RadialProfile(prof.family, prof.params, prof.domain, tail, tail_at)
        return prof


def _enc(x):
    if x is None:
        return None
    return "inf" if x == INF else ("-inf" if x == -INF else float(x))


def _dec(x):
    if x is None:
        return None
    return float(x)


def _family_tail(prof: RadialProfile, e: float, side: str, derivative: bool) -> Tail | None:
    fam, P = prof.family, prof.params
    if fam == "constant":
        if derivative or P["c"] == 0.0:
            return Tail.zero()
        return Tail(abs(P["c"]))
    if fam in ("power", "log-power"):
        c, p = P["c"], P["p"]
        b = P.get("b", 0.0)
        off = P["offset"]
        if c == 0.0:
            return Tail.zero() if (derivative or off == 0.0) else Tail(abs(off))
        if math.isinf(e) or e == 0.0:
            # local variable x = 1/r at infinity (r**p = x**-p), x = r at 0
            sgn = -1.0 if math.isinf(e) else 1.0
            if derivative:
                if p != 0.0:
                    return Tail(abs(c * p), sgn * (p - 1.0), b)
                if b != 0.0:
                    return Tail(abs(c * b), -sgn, b - 1.0)
                return Tail.zero()
            lead = Tail(abs(c), sgn * p, b)
            if off != 0.0 and lead.bounded and not (lead.power == 0 and lead.log_power == 0):
                return Tail(abs(off))
            return lead
        return _analytic_tail(prof, e, derivative)
    if fam == "samples":
        knots, vals = prof._np("r"), prof._np("values")
        if math.isinf(e):
            return None
        if prof.params["interpolation"] == "step":
            if derivative:
                return Tail.zero()
            if side == "below":
                idx = np.searchsorted(knots, e, side="left") - 1
            else:
                idx = np.searchsorted(knots, e, side="right") - 1
            val = vals[idx] if idx >= 0 else prof.params["left"]
            return Tail(abs(val)) if val != 0.0 else Tail.zero()
        return _analytic_tail(prof, e, derivative, side)
    if prof.tail is not None and prof.tail_at == e and not derivative:
        return prof.tail
    return None


def _analytic_tail(prof: RadialProfile, e: float, derivative: bool, side: str = "below") -> Tail:
    val = prof.derivative(e, "left" if side == "below" else "right") if derivative else prof(e)
    if val != 0.0 and math.isfinite(val):
        return Tail(abs(val))
    if derivative:
        return Tail(1.0, 1.0)
    slope = prof.derivative(e, "left" if side == "below" else "right")
    if slope is not None and slope != 0.0:
        return Tail(abs(slope), 1.0)
    if prof.family == "samples":
        return Tail.zero()
    return Tail(1.0, 2.0)


# --------------------------------------------------------------------------
# MonotoneDensity
# --------------------------------------------------------------------------


class MonotoneDensity:
    """Monotone density: piecewise-linear samples or ``c t**-alpha log(t)**-beta``.

    Piecewise-linear densities are extended by constants outside their knots.
    Monotonicity in ``direction`` is checked at construction with zero
    tolerance; a violation raises :class:`PreconditionError` unless
    ``validate=False``.
    """

    def __init__(self, direction: str, *, knots=None, values=None, c: float | None = None,
                 alpha: float = 0.0, beta: float = 0.0, domain=(0.0, INF),
                 tail: Tail | None = None, validate: bool = True):
        if direction not in ("increasing", "decreasing"):
            raise ValueError("direction must be 'increasing' or 'decreasing'")
        self.direction = direction
        self.tail = tail
        if knots is not None:
            self.kind = "samples"
            self.knots = np.asarray(knots, dtype=float)
            self.values = np.asarray(values, dtype=float)
            if self.knots.ndim != 1 or self.knots.shape != self.values.shape or self.knots.size < 1:
                raise ValueError("knots and values must be matching 1-d arrays")
            if np.any(np.diff(self.knots) <= 0):
                raise ValueError("knots must be strictly increasing")
            self.domain = tuple(domain) if domain != (0.0, INF) else (0.0, INF)
            self.c = self.alpha = self.beta = None
        else:
            if c is None:
                raise ValueError("parametric density needs c")
            self.kind = "parametric"
            self.c, self.alpha, self.beta = float(c), float(alpha), float(beta)
            self.domain = tuple(float(v) for v in domain)
            if self.c < 0:
                raise PreconditionError("parametric density needs c >= 0")
            if self.beta != 0.0 and self.domain[0] < 1.0:
                raise PreconditionError("log-power densities live on t > 1")
            self.knots = self.values = None
        if validate:
            ok, witness = self.check_monotone()
            if not ok:
                raise PreconditionError(f"density is not {direction}: violation at {witness}")

    # --- constructors -----------------------------------------------------

    @classmethod
    def piecewise_linear(cls, knots, values, direction: str = "decreasing", tail=None,
                         validate: bool = True) -> "MonotoneDensity":
        return cls(direction, knots=knots, values=values, tail=tail, validate=validate)

    @classmethod
    def parametric(cls, c: float, alpha: float = 0.0, beta: float = 0.0,
                   direction: str = "decreasing", domain=(0.0, INF)) -> "MonotoneDensity":
        return cls(direction, c=c, alpha=alpha, beta=beta, domain=domain)

    @classmethod
    def constant(cls, c: float, direction: str = "decreasing") -> "MonotoneDensity":
        return cls(direction, c=c)

    # --- checks -----------------------------------------------------------

    def check_monotone(self):
        """Return ``(ok, witness)``; witness is the first offending knot pair."""
        if self.kind == "samples":
            diffs = np.diff(self.values)
            bad = np.nonzero(diffs < 0 if self.direction == "increasing" else diffs > 0)[0]
            if bad.size:
                i = int(bad[0])
                return False, (float(self.knots[i]), float(self.knots[i + 1]))
            return True, None
        if self.c == 0.0:
            return True, None
        # d'/d = -(alpha log t + beta) / (t log t); sign of (alpha log t + beta)
        # is affine in log t so the domain endpoints decide.
        lo, hi = self.domain
        want = 1.0 if self.direction == "decreasing" else -1.0
        if self.beta == 0.0:
            ok = want * self.alpha >= 0.0
            return ok, None if ok else (lo, hi)
        ends = []
        for t in (lo, hi):
            if math.isinf(t):
                ends.append(math.copysign(INF, self.alpha) if self.alpha != 0 else self.beta)
            else:
                ends.append(self.alpha * math.log(t) + self.beta)
        ok = all(want * v >= 0 for v in ends)
        return ok, None if ok else (lo, hi)

    # --- evaluation -------------------------------------------------------

    def __call__(self, t):
        x = np.asarray(t, dtype=float)
        if self.kind == "samples":
            out = np.interp(x, self.knots, self.values)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = self.c * x ** (-self.alpha)
                if self.beta != 0.0:
                    out = out * np.log(x) ** (-self.beta)
        return _scalar_or_array(out, t)

    @property
    def is_zero(self) -> bool:
        if self.kind == "samples":
            return bool(np.all(self.values == 0.0))
        return self.c == 0.0

    def breakpoints(self) -> tuple:
        return tuple(self.knots.tolist()) if self.kind == "samples" else ()

    def local_tail(self, endpoint: float, side: str = "below") -> Tail | None:
        if self.is_zero:
            return Tail.zero()
        if self.kind == "parametric":
            if math.isinf(endpoint):
                return Tail(self.c, self.alpha, -self.beta)
            if endpoint == 0.0:
                return Tail(self.c, -self.alpha, 0.0) if self.beta == 0.0 else None
            return Tail(abs(float(self(endpoint)))) if float(self(endpoint)) != 0 else Tail.zero()
        if math.isinf(endpoint):
            return self.tail
        val = float(self(endpoint))
        if val != 0.0:
            return Tail(abs(val))
        # vanishing at a finite endpoint: linear approach or flat zero
        k = self.knots
        if side == "below":
            i = np.searchsorted(k, endpoint, side="left") - 1
            if i < 0 or i >= k.size - 1:
                return Tail.zero()
            slope = (self.values[i + 1] - self.values[i]) / (k[i + 1] - k[i])
        else:
            i = np.searchsorted(k, endpoint, side="right") - 1
            if i < 0 or i >= k.size - 1:
                return Tail.zero()
            slope = (self.values[i + 1] - self.values[i]) / (k[i + 1] - k[i])
        return Tail(abs(slope), 1.0) if slope != 0 else Tail.zero()

    # --- weighted integrals -------------------------------------------------

    def weighted_integral(self, a: float, b: float, k: float) -> float:
        """``∫_a^b d(t) t**-k dt`` (``b`` may be ``inf``)."""
        if b < a:
            return -self.weighted_integral(b, a, k)
        if a == b:
            return 0.0
        return float(self.segment_integrals(np.array([a, b]), k)[0])

    def segment_integrals(self, edges, k: float) -> np.ndarray:
        """Vectorised ``∫_{e_i}^{e_{i+1}} d(t) t**-k dt`` for sorted ``edges``."""
        edges = np.asarray(edges, dtype=float)
        if edges.size < 2:
            return np.zeros(0)
        if np.any(np.diff(edges) < 0):
            raise ValueError("edges must be sorted")
        if self.is_zero:
            return np.zeros(edges.size - 1)
        if self.kind == "parametric":
            if self.beta == 0.0:
                return self.c * quadrature.power_integral(-self.alpha - k, edges[:-1], edges[1:])
            f = lambda t: self.c * t ** (-self.alpha - k) * math.log(t) ** (-self.beta)
            return np.array([quadrature.integrate(f, lo, hi) if hi > lo else 0.0
                             for lo, hi in zip(edges[:-1], edges[1:])])
        return self._pl_segments(edges, k)

    def _pl_segments(self, edges, k):
        kn, vals = self.knots, self.values
        lo, hi = edges[0], edges[-1]
        inner = kn[(kn > lo) & (kn < hi)]
        merged = np.union1d(edges, inner)
        a, b = merged[:-1], merged[1:]
        finite_b = np.isfinite(b)
        res = np.zeros(a.size)
        # piece index of each merged segment (by its left end)
        idx = np.searchsorted(kn, a, side="right") - 1
        n = kn.size
        slopes = np.zeros(max(n - 1, 0))
        if n > 1:
            slopes = np.diff(vals) / np.diff(kn)
        interior = (idx >= 0) & (idx < n - 1) & finite_b
        flat = ~interior
        if np.any(interior):
            j = idx[interior]
            B = slopes[j]
            A = vals[j] - B * kn[j]
            aa, bb = a[interior], b[interior]
            res[interior] = A * quadrature.power_integral(-k, aa, bb) + B * quadrature.power_integral(1.0 - k, aa, bb)
        if np.any(flat):
            aa, bb = a[flat], b[flat]
            cval = np.where(idx[flat] < 0, vals[0], vals[-1])
            ints = quadrature.power_integral(-k, aa, bb)
            with np.errstate(invalid="ignore"):
                res[flat] = np.where(cval == 0.0, 0.0, cval * ints)
        pos = np.searchsorted(merged, edges)
        out = np.zeros(edges.size - 1)
        if res.size:
            csum = np.concatenate([[0.0], np.cumsum(res)])
            out = csum[pos[1:]] - csum[pos[:-1]]
        return out

    # --- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind == "samples":
            out = {"family": "samples", "direction": self.direction,
                   "r": self.knots.tolist(), "values": self.values.tolist()}
        else:
            out = {"family": "log-power" if self.beta else ("constant" if self.alpha == 0 else "power"),
                   "direction": self.direction, "c": self.c, "alpha": self.alpha, "beta": self.beta,
                   "domain": [_enc(self.domain[0]), _enc(self.domain[1])]}
        if self.tail is not None:
            out["tail"] = self.tail.to_list()
        return out

    @classmethod
    def from_dict(cls, data: dict, direction: str | None = None) -> "MonotoneDensity":
        direction = data.get("direction", direction or "decreasing")
        fam = data.get("family", "power")
        tail = Tail.from_any(data.get("tail"))
        if fam == "samples":
            return cls.piecewise_linear(data["r"], data["values"], direction, tail)
        if fam not in ("constant", "power", "log-power"):
            raise ValueError(f"unknown density family {fam!r}")
        dom = tuple(_dec(v) for v in data.get("domain", (0.0, "inf")))
        return cls(direction, c=data["c"], alpha=data.get("alpha", 0.0), beta=data.get("beta", 0.0),
                   domain=dom)

    def __repr__(self):
        if self.kind == "samples":
            return f"MonotoneDensity({self.direction}, {self.knots.size} knots)"
        return f"MonotoneDensity({self.direction}, c={self.c}, alpha={self.alpha}, beta={self.beta})"
