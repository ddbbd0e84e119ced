"""Endpoint asymptotics and divergence classification of improper integrals.

Near a singular endpoint every integrand factor is described by a
:class:`Tail` ``coef * x**power * log(1/x)**log_power`` in a local variable
``x -> 0+`` (``x = 1/r`` at infinity, ``x = |r - e|`` at a finite endpoint
``e``).  Products of tails multiply termwise, and

    ∫_0 x**a log(1/x)**b dx  < inf   iff   a > -1  or  (a == -1 and b < -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

CONVERGENT = "convergent"
DIVERGENT = "divergent"
UNKNOWN = "unknown"

SYMBOLIC = "symbolic-tail"
HEURISTIC = "heuristic-partial-sums"
PROPER = "proper"

GROWTH_FACTOR = 1.05
GROWTH_WINDOW = 5
TRACE_STEPS = 40


@dataclass(frozen=True)
class Tail:
    coef: float
    power: float = 0.0
    log_power: float = 0.0

    @classmethod
    def zero(cls) -> "Tail":
        return cls(0.0, 0.0, 0.0)

    @property
    def is_zero(self) -> bool:
        return self.coef == 0.0

    @property
    def bounded(self) -> bool:
        return self.is_zero or self.power > 0 or (self.power == 0 and self.log_power <= 0)

    def __mul__(self, other: "Tail") -> "Tail":
        if self.is_zero or other.is_zero:
            return Tail.zero()
        return Tail(
            abs(self.coef * other.coef),
            self.power + other.power,
            self.log_power + other.log_power,
        )

    def integrable(self) -> bool:
        """True when ``∫_0 tail(x) dx`` is finite."""
        if self.is_zero:
            return True
        if self.power > -1:
            return True
        return self.power == -1 and self.log_power < -1

    def to_list(self) -> list:
        return [self.coef, self.power, self.log_power]

    @classmethod
    def from_any(cls, value) -> "Tail | None":
        if value is None or isinstance(value, Tail):
            return value
        if isinstance(value, dict):
            return cls(float(value["coef"]), float(value.get("power", 0.0)), float(value.get("log_power", 0.0)))
        vals = [float(v) for v in value]
        return cls(*vals)


# Jacobian of r = 1/x, dr = -dx / x**2
INFINITY_JACOBIAN = Tail(1.0, -2.0, 0.0)


def combine(tails: Sequence["Tail | None"], at_infinity: bool) -> "Tail | None":
    """Product of factor tails in the local variable, including the Jacobian."""
    if any(t is None for t in tails):
        # a vanishing factor settles it even if another is unknown
        if any(t is not None and t.is_zero for t in tails):
            return Tail.zero()
        return None
    out = Tail(1.0)
    for t in tails:
        out = out * t
    if at_infinity and not out.is_zero:
        out = out * INFINITY_JACOBIAN
    return out


@dataclass
class DivergenceVerdict:
    classification: str
    mode: str
    value: float | None = None
    trace: list = field(default_factory=list)
    tail: Tail | None = None
    note: str = ""

    @property
    def convergent(self) -> bool:
        return self.classification == CONVERGENT

    @property
    def divergent(self) -> bool:
        return self.classification == DIVERGENT

    @property
    def unknown(self) -> bool:
        return self.classification == UNKNOWN

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "mode": self.mode,
            "value": _json_float(self.value),
            "tail": None if self.tail is None else self.tail.to_list(),
            "note": self.note,
            "trace": [[_json_float(c), _json_float(v)] for c, v in self.trace],
        }


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def cutoff_schedule(lo: float, hi: float, singular_at: str, steps: int = TRACE_STEPS) -> list[float]:
    """Cutoffs approaching the singular endpoint by successive doublings.

    ``singular_at`` is ``"upper"`` or ``"lower"``.  For an infinite upper
    endpoint the cutoff radius doubles; otherwise the distance to the
    endpoint halves.
    """
    if singular_at == "upper":
        if math.isinf(hi):
            base = lo if lo > 0 else 1.0
            return [base * 2.0**j for j in range(1, steps + 1)]
        return [hi - (hi - lo) * 2.0**-j for j in range(1, steps + 1)]
    return [lo + (hi - lo) * 2.0**-j for j in range(1, steps + 1)]


def partial_trace(partial: Callable[[float, float], float], lo: float, hi: float,
                  singular_at: str, steps: int = TRACE_STEPS) -> list[tuple[float, float]]:
    """(cutoff, integral from the regular end to the cutoff) pairs."""
    cuts = cutoff_schedule(lo, hi, singular_at, steps)
    trace = []
    acc = 0.0
    if singular_at == "upper":
        prev = lo
        for c in cuts:
            acc += partial(prev, c)
            trace.append((c, acc))
            prev = c
    else:
        prev = hi
        for c in cuts:
            acc += partial(c, prev)
            trace.append((c, acc))
            prev = c
    return trace


def heuristic_classification(trace, factor: float = GROWTH_FACTOR, window: int = GROWTH_WINDOW) -> str:
    """Divergent when each of the last ``window`` doublings grows the integral
    by more than ``factor``; otherwise unknown."""
    vals = [abs(v) for _, v in trace]
    if len(vals) < window + 1 or not math.isfinite(vals[-1]):
        return DIVERGENT if vals and not math.isfinite(vals[-1]) else UNKNOWN
    tail = vals[-(window + 1):]
    for prev, cur in zip(tail[:-1], tail[1:]):
        if prev <= 0 or cur <= factor * prev:
            return UNKNOWN
    return DIVERGENT


def classify(
    partial: Callable[[float, float], float],
    lo: float,
    hi: float,
    singular_at: str | None,
    tail: Tail | None,
    total: Callable[[], float] | None = None,
    steps: int = TRACE_STEPS,
    growth_factor: float = GROWTH_FACTOR,
) -> DivergenceVerdict:
    """Classify ``∫_lo^hi`` given a segment integrator and endpoint tail.

    ``partial(a, b)`` must return the integral over ``[a, b]`` for any
    ``lo <= a <= b <= hi`` strictly away from the singular endpoint.
    ``total()`` evaluates the full (possibly improper) integral and is only
    called once the integral is known to converge.
    """
    if singular_at is None:
        val = partial(lo, hi)
        return DivergenceVerdict(CONVERGENT, PROPER, val, [(hi, val)], tail)
    if tail is not None and tail.is_zero and _zero_everywhere(partial, lo, hi, singular_at):
        edge = hi if singular_at == "upper" else lo
        return DivergenceVerdict(CONVERGENT, SYMBOLIC, 0.0, [(edge, 0.0)], tail, "integrand vanishes identically")

    trace = partial_trace(partial, lo, hi, singular_at, steps)
    if tail is not None:
        if tail.integrable():
            val = total() if total is not None else trace[-1][1]
            return DivergenceVerdict(CONVERGENT, SYMBOLIC, val, trace, tail)
        return DivergenceVerdict(DIVERGENT, SYMBOLIC, None, trace, tail)
    cls = heuristic_classification(trace, growth_factor)
    return DivergenceVerdict(cls, HEURISTIC, None, trace, None,
                             "no tail metadata; classified from partial integrals")


def _zero_everywhere(partial, lo, hi, singular_at) -> bool:
    cuts = cutoff_schedule(lo, hi, singular_at, 8)
    edge = cuts[-1]
    a, b = (lo, edge) if singular_at == "upper" else (edge, hi)
    return partial(a, b) == 0.0
