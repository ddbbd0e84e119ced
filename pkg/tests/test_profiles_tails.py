import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbhzero.errors import PreconditionError
from sbhzero.profiles import MonotoneDensity, RadialProfile
from sbhzero.quadrature import adaptive_simpson, integrate, power_integral
from sbhzero.tails import (HEURISTIC, PROPER, SYMBOLIC, Tail, classify, combine, cutoff_schedule,
                           heuristic_classification, partial_trace)


class TestQuadrature:
    def test_simpson_polynomial(self):
        assert adaptive_simpson(lambda x: x**3, 0.0, 2.0) == pytest.approx(4.0, rel=1e-13)

    def test_integrate_with_kink(self):
        assert integrate(lambda x: abs(x - 0.3), 0.0, 1.0, (0.3,)) == pytest.approx(0.045 + 0.245, rel=1e-12)

    def test_improper_integral(self):
        assert integrate(lambda x: x**-2, 1.0, math.inf, singular=True) == pytest.approx(1.0, rel=1e-10)
        assert integrate(lambda x: x**-0.5, 0.0, 1.0, singular=True) == pytest.approx(2.0, rel=1e-10)

    @given(st.floats(-3, 3), st.floats(0.01, 5), st.floats(0.01, 5))
    def test_power_integral_matches_antiderivative(self, p, a, b):
        a, b = min(a, b), max(a, b)
        expected = math.log(b / a) if p == -1 else (b ** (p + 1) - a ** (p + 1)) / (p + 1)
        assert float(power_integral(p, a, b)) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_power_integral_divergent(self):
        assert power_integral(-1.0, 1.0, math.inf) == math.inf
        assert power_integral(-2.0, 0.0, 1.0) == math.inf
        assert power_integral(-2.0, 1.0, math.inf) == pytest.approx(1.0)


class TestRadialProfile:
    def test_families(self):
        assert RadialProfile.constant(3.0)(2.0) == 3.0
        assert RadialProfile.power(2.0, 3.0, offset=1.0)(2.0) == 17.0
        assert RadialProfile.log_power(1.0, 0.0, 2.0)(math.e) == pytest.approx(1.0)

    def test_linear_samples(self):
        q = RadialProfile.samples([1.0, 2.0, 3.0], [0.0, 2.0, 3.0])
        assert q(1.5) == 1.0
        assert q.derivative(2.0, "left") == 2.0
        assert q.derivative(2.0, "right") == 1.0
        assert q.breakpoints() == (1.0, 2.0, 3.0)

    def test_step_samples_right_continuous(self):
        q = RadialProfile.samples([1.0, 2.0], [1.0, 3.0], "step", left=0.0)
        assert q(0.5) == 0.0
        assert q(1.0) == 1.0
        assert q(1.99) == 1.0
        assert q(2.0) == 3.0

    @pytest.mark.parametrize("kwargs", [
        dict(r=[2.0, 1.0], values=[0.0, 1.0]),
        dict(r=[1.0], values=[0.0]),
        dict(r=[1.0, 2.0], values=[0.0]),
        dict(r=[1.0, 2.0], values=[0.0, 1.0], interpolation="cubic"),
    ])
    def test_bad_samples(self, kwargs):
        with pytest.raises(ValueError):
            RadialProfile.samples(**kwargs)

    def test_dict_round_trip(self):
        for q in (RadialProfile.power(2.0, -1.0, 0.5, (0.0, 3.0)),
                  RadialProfile.log_power(1.0, 1.0, 2.0),
                  RadialProfile.samples([1, 2], [3, 4], "step", left=1.0),
                  RadialProfile.samples([1, 2], [3, 4], tail=Tail(2.0, 1.0), tail_at=2.0)):
            back = RadialProfile.from_dict(q.to_dict())
            assert back.to_dict() == q.to_dict()
            assert back(1.5) == q(1.5)

    def test_callable_not_serialisable(self):
        with pytest.raises(TypeError):
            RadialProfile.from_callable(math.sin).to_dict()

    def test_harmonic(self):
        assert RadialProfile.harmonic(3)(2.0) == -0.5

    def test_power_tail_at_infinity(self):
        # r**2 at infinity in x = 1/r: x**-2
        assert RadialProfile.power(1.0, 2.0).value_tail(math.inf, "below") == Tail(1.0, -2.0, 0.0)

    def test_log_tail_at_zero(self):
        assert RadialProfile.log_power(1.0, 0.0, 1.0).value_tail(0.0, "above") == Tail(1.0, 0.0, 1.0)

    def test_samples_without_tail_at_infinity(self):
        q = RadialProfile.samples([1.0, 2.0], [0.0, 1.0], domain=(1.0, math.inf))
        assert q.value_tail(math.inf, "below") is None


class TestMonotoneDensity:
    def test_monotonicity_enforced(self):
        with pytest.raises(PreconditionError):
            MonotoneDensity.piecewise_linear([1, 2], [0, 1])
        with pytest.raises(PreconditionError):
            MonotoneDensity.parametric(1.0, alpha=-1.0)
        MonotoneDensity.piecewise_linear([1, 2], [0, 1], "increasing")

    def test_log_power_domain(self):
        with pytest.raises(PreconditionError):
            MonotoneDensity.parametric(1.0, 0.0, 1.0, domain=(0.5, 2.0))

    def test_parametric_weighted_integral(self):
        d = MonotoneDensity.parametric(1.0, alpha=1.0)
        assert d.weighted_integral(1.0, 2.0, 1.0) == pytest.approx(0.5, rel=1e-14)
        assert d.weighted_integral(2.0, 1.0, 1.0) == pytest.approx(-0.5, rel=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0.0, 5.0), min_size=2, max_size=6), st.sampled_from([0.0, 1.0, 3.0]),
           st.floats(0.5, 1.5), st.floats(1.6, 3.0))
    def test_piecewise_linear_integral_matches_quadrature(self, vals, k, a, b):
        vals = sorted(vals, reverse=True)
        knots = np.linspace(0.8, 2.5, len(vals))
        d = MonotoneDensity.piecewise_linear(knots, vals)
        ref = integrate(lambda t: float(d(t)) * t**-k, a, b, tuple(knots))
        assert d.weighted_integral(a, b, k) == pytest.approx(ref, rel=1e-10, abs=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(1.0, 3.0), min_size=2, max_size=8))
    def test_segments_are_additive(self, cuts):
        d = MonotoneDensity.piecewise_linear([1.0, 2.0, 3.0], [3.0, 1.0, 0.5])
        edges = np.sort(np.array(cuts))
        parts = d.segment_integrals(edges, 1.0)
        assert parts.sum() == pytest.approx(d.weighted_integral(edges[0], edges[-1], 1.0), abs=1e-13)

    def test_constant_extension(self):
        d = MonotoneDensity.piecewise_linear([1.0, 2.0], [2.0, 1.0])
        assert d(0.5) == 2.0 and d(5.0) == 1.0
        assert d.weighted_integral(2.0, math.inf, 2.0) == pytest.approx(0.5)

    def test_local_tails(self):
        assert MonotoneDensity.parametric(2.0, 1.0, 0.5, domain=(1.0, math.inf)).local_tail(math.inf) == \
            Tail(2.0, 1.0, -0.5)
        d = MonotoneDensity.piecewise_linear([1.0, 2.0], [1.0, 0.0])
        assert d.local_tail(2.0, "below") == Tail(1.0, 1.0)

    def test_dict_round_trip(self):
        for d in (MonotoneDensity.parametric(2.0, 1.0),
                  MonotoneDensity.piecewise_linear([1, 2], [2, 1], tail=Tail(1.0, 2.0))):
            back = MonotoneDensity.from_dict(d.to_dict())
            assert back.to_dict() == d.to_dict()


class TestTails:
    def test_integrability(self):
        assert Tail(1.0, -0.5).integrable()
        assert not Tail(1.0, -1.0).integrable()
        assert Tail(1.0, -1.0, -2.0).integrable()
        assert not Tail(1.0, -1.0, -1.0).integrable()
        assert Tail.zero().integrable()

    def test_product(self):
        assert Tail(2.0, 1.0, 1.0) * Tail(-3.0, -2.0, 0.5) == Tail(6.0, -1.0, 1.5)
        assert (Tail(2.0, 1.0) * Tail.zero()).is_zero

    def test_combine_at_infinity_applies_jacobian(self):
        assert combine([Tail(1.0, 0.0)], at_infinity=True) == Tail(1.0, -2.0)

    def test_combine_unknown(self):
        assert combine([Tail(1.0), None], False) is None
        assert combine([Tail.zero(), None], False).is_zero

    def test_from_any(self):
        assert Tail.from_any([1, 2, 3]) == Tail(1.0, 2.0, 3.0)
        assert Tail.from_any({"coef": 1.0}) == Tail(1.0)

    def test_cutoff_schedules(self):
        up = cutoff_schedule(1.0, math.inf, "upper", 4)
        assert up == [2.0, 4.0, 8.0, 16.0]
        assert cutoff_schedule(0.0, 1.0, "lower", 3) == [0.5, 0.25, 0.125]
        assert cutoff_schedule(0.0, 1.0, "upper", 2) == [0.5, 0.75]

    def test_partial_trace_accumulates(self):
        trace = partial_trace(lambda a, b: b - a, 0.0, 1.0, "lower", 3)
        assert [v for _, v in trace] == [0.5, 0.75, 0.875]

    def test_heuristic_divergence(self):
        growing = [(2.0**j, 1.1**j) for j in range(10)]
        assert heuristic_classification(growing) == "divergent"
        flat = [(2.0**j, 1.0) for j in range(10)]
        assert heuristic_classification(flat) == "unknown"

    def test_classify_symbolic(self):
        partial = lambda a, b: math.log(b / a)
        v = classify(partial, 1.0, math.inf, "upper", Tail(1.0, 1.0))  # 1/r in x = 1/r after Jacobian
        assert v.convergent and v.mode == SYMBOLIC
        v = classify(partial, 1.0, math.inf, "upper", Tail(1.0, -1.0))
        assert v.divergent and v.mode == SYMBOLIC

    def test_classify_heuristic_log_growth_is_not_divergent(self):
        # log growth adds a constant per doubling, never a fixed factor
        v = classify(lambda a, b: math.log(b / a), 1.0, math.inf, "upper", None)
        assert v.mode == HEURISTIC and v.unknown

    def test_classify_heuristic_linear_growth(self):
        v = classify(lambda a, b: b - a, 1.0, math.inf, "upper", None)
        assert v.divergent and v.mode == HEURISTIC

    def test_proper(self):
        v = classify(lambda a, b: b - a, 0.0, 1.0, None, None)
        assert v.convergent and v.value == 1.0 and v.mode == PROPER

    def test_verdict_serialises_infinity(self):
        v = classify(lambda a, b: math.inf, 1.0, math.inf, "upper", None)
        assert v.divergent
        assert v.to_dict()["trace"][0][1] == "inf"
