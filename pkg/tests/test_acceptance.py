"""Acceptance suite: one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints
one ``criterion N ...: PASS|FAIL`` line per criterion.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from sbhzero import cli
from sbhzero.green_domains import ModelDomain
from sbhzero.profiles import MonotoneDensity, RadialProfile
from sbhzero.radial_core import (INFINITY, build_profile_from_density, check_convex_of_h, h_transform,
                                 invert_point, invert_points, is_monotone, kelvin_profile, profile_from_rate,
                                 radial_riesz_measure, rate_from_profile, riesz_constant)
from sbhzero.testfns import (EnvelopeFunction, build_radial_testfn, density_from_green, density_from_testfn,
                             radial_envelope, validate_testfn)
from sbhzero.uniqueness import (ZeroSet, green_verdict, ibp_check_green, ibp_check_radial, radial_verdict)

GAMMAS = (0.5, 1.0, 1.5, 2.0)
EXPECTED = {0.5: "forced-zero", 1.0: "forced-zero", 1.5: "inconclusive", 2.0: "inconclusive"}
UNIT_DISK = ModelDomain.disk(1.0)


def _green_blaschke(gamma):
    Z = ZeroSet.generated(gamma, 100_000)
    F = EnvelopeFunction.from_dict({"family": "constant", "c": 0.0})
    return green_verdict(F, RadialProfile.power(1.0, 1.0), Z, UNIT_DISK, t0=1.0)


def _radial_blaschke(gamma):
    Z = ZeroSet.generated(gamma, 100_000)
    d = density_from_green(ModelDomain.ball(1.0, 2), 0.5)
    env = radial_envelope(RadialProfile.constant(0.0, (0.0, 1.0)), 1, 1.0)
    return radial_verdict(env, d, Z, r0=0.5, R=1.0)


def test_criterion_01_blaschke_oracle():
    for gamma in GAMMAS:
        start = time.perf_counter()
        rep = _green_blaschke(gamma)
        elapsed = time.perf_counter() - start
        assert rep.verdict == EXPECTED[gamma], (gamma, rep.to_dict())
        assert not rep.unknown
        assert elapsed < 2.0, f"gamma={gamma} took {elapsed:.2f}s"


def test_criterion_02_radial_green_agreement():
    for gamma in GAMMAS:
        radial = _radial_blaschke(gamma)
        green = _green_blaschke(gamma)
        assert radial.verdict == green.verdict == EXPECTED[gamma], gamma
        assert not radial.unknown and not green.unknown


def test_criterion_03_radial_ibp_identity():
    Z = ZeroSet.uniform_annulus(100, 1.0, 2.0, seed=2024)
    d = MonotoneDensity.parametric(1.0, alpha=1.0)
    rep = ibp_check_radial(d, Z, r0=1.0, R=2.0, m=2, tolerance=1e-10)
    assert rep.passed, rep.to_dict()
    assert rep.max_residual < 1e-10


def test_criterion_04_green_mass_ibp_identity():
    F = EnvelopeFunction.from_dict({"family": "exp", "c": 1.0, "lam": 1.0})
    rep = ibp_check_green(RadialProfile.power(1.0, 1.0), UNIT_DISK, t0=1.0, F=F, delta=1e-6, tol_smooth=1e-8)
    (growth,) = rep.checks
    # all three routes were available for a centre pole
    assert {"t_measure", "ibp", "spatial"} <= set(growth.values)
    assert growth.residual < 1e-8, growth.to_dict()


def test_criterion_05_harmonicity_null_tests():
    rng = np.random.default_rng(5)
    for m in (1, 2, 3, 5):
        q = RadialProfile.harmonic(m)
        q_numeric = RadialProfile.from_callable(lambda r, m=m: h_transform(m, r))
        for _ in range(20):
            a, b = np.sort(rng.uniform(0.1, 10.0, 2))
            assert abs(radial_riesz_measure(q, m, (a, b))) < 1e-9
            assert abs(radial_riesz_measure(q_numeric, m, (a, b), method="numeric")) < 1e-9
    for m in (2, 3, 5):
        g = ModelDomain.ball(1.0, m).green_profile()
        minus_g = RadialProfile.from_callable(lambda r, g=g: -g(r), (0.0, 1.0))
        for b in (0.3, 0.7):
            assert abs(radial_riesz_measure(minus_g, m, (0.0, b), method="numeric") - 1.0) < 1e-9


def _random_increasing(rng, lo, hi):
    k = int(rng.integers(4, 10))
    knots = np.concatenate([[lo], np.sort(rng.uniform(lo, hi, k - 2)), [hi]])
    values = np.cumsum(rng.uniform(0.0, 1.0, k)) + rng.uniform(-1.0, 1.0)
    return knots, values


def test_criterion_06_convexity_equivalence():
    rng = np.random.default_rng(6)
    ms = (1, 2, 3, 5)
    grid = np.linspace(1.02, 1.98, 97)
    for i in range(50):
        m = ms[i % 4]
        knots, values = _random_increasing(rng, 1.0, 2.0)
        p0 = MonotoneDensity.piecewise_linear(knots, values, "increasing")
        q = build_profile_from_density(p0, 1.5, 0.0, m, (1.0, 2.0))
        assert check_convex_of_h(q, m).passed, (i, m)
    for i in range(50):
        m = ms[i % 4]
        k = int(rng.integers(5, 10))
        knots = np.linspace(1.0, 2.0, k)
        values = np.cumsum(rng.uniform(0.1, 1.0, k))
        j = int(rng.integers(1, k))
        values[j:] -= values[j] - values[j - 1] + rng.uniform(0.3, 1.0)
        p0 = MonotoneDensity.piecewise_linear(knots, values, "increasing", validate=False)
        q = profile_from_rate(p0, 1.5, 0.0, m, (1.0, 2.0))
        assert not check_convex_of_h(q, m).passed, (i, m)
        rate = rate_from_profile(q, m, grid, method="numeric")
        assert not is_monotone(rate, "increasing", 1e-8)[0]


def test_criterion_07_density_round_trip():
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(20):
        m = (2, 4)[i % 2]
        k = int(rng.integers(3, 9))
        knots = np.concatenate([[1.0], np.sort(rng.uniform(1.05, 1.95, k - 2)), [2.0]])
        values = np.sort(rng.uniform(0.1, 3.0, k))[::-1]
        d = MonotoneDensity.piecewise_linear(knots, values)
        tf = build_radial_testfn(d, 1.0, 2.0, m)
        report = validate_testfn(tf)
        assert report.passed, report.failures
        schedule = report.checks["v0lo"]["schedule"]
        assert schedule and all(row["passed"] for row in schedule)
        mids = 0.5 * (knots[1:] + knots[:-1])
        recovered = density_from_testfn(tf, m, mids, method="numeric")
        worst = max(worst, float(np.max(np.abs(recovered - d(mids)))))
    assert worst < 1e-6


def test_criterion_08_riesz_constant():
    closed = {1: 0.5, 2: 1 / (2 * math.pi), 3: 1 / (4 * math.pi), 4: 1 / (4 * math.pi**2)}
    for m, expected in closed.items():
        assert abs(riesz_constant(m) - expected) <= 1e-14 * expected


def test_criterion_09_kelvin_and_involution():
    rng = np.random.default_rng(9)
    for _ in range(10):
        knots, values = _random_increasing(rng, 0.5, 2.0)
        p0 = MonotoneDensity.piecewise_linear(knots, values, "increasing")
        q = build_profile_from_density(p0, 1.0, float(rng.normal()), 2, (0.5, 2.0))
        assert check_convex_of_h(q, 2).passed
        star = kelvin_profile(q, 2)
        assert star.domain == (0.5, 2.0)
        assert check_convex_of_h(star, 2).passed
    worst = 0.0
    for m in (1, 2, 3, 4, 5):
        dirs = rng.normal(size=(2000, m))
        scale = 10.0 ** rng.uniform(-6, 6, size=(2000, 1))
        x = dirs / np.linalg.norm(dirs, axis=1, keepdims=True) * scale
        back = invert_points(invert_points(x))
        worst = max(worst, float(np.max(np.linalg.norm(back - x, axis=1) / np.linalg.norm(x, axis=1))))
        for row in x[:20]:
            assert np.allclose(invert_point(invert_point(row)), row, rtol=1e-12, atol=0)
    assert worst < 1e-12
    assert invert_point(np.zeros(3)) is INFINITY
    assert np.array_equal(invert_point(INFINITY, 3), np.zeros(3))


MATRIX = [(f"green_blaschke_g{tag}.json", ["verdict", "--mode", "green"], code)
          for tag, code in (("05", 0), ("10", 0), ("15", 3), ("20", 3))]
MATRIX += [(f"radial_blaschke_g{tag}.json", ["verdict", "--mode", "radial"], code)
           for tag, code in (("05", 0), ("10", 0), ("15", 3), ("20", 3))]
MATRIX += [("ibp_radial_annulus.json", ["ibp"], 0), ("ibp_green_smooth.json", ["ibp"], 0)]


def _stable(report):
    return json.dumps({k: v for k, v in report.items() if k != "timing"}, sort_keys=True)


def test_criterion_10_cli_determinism(scenario_dir, tmp_path):
    for name, cmd, expected in MATRIX:
        argv = [cmd[0], "--config", str(scenario_dir / name), *cmd[1:]]
        first, code1 = cli.run(argv)
        second, code2 = cli.run(argv)
        assert code1 == code2 == expected == first["exit_code"], (name, first)
        assert _stable(first) == _stable(second), name
    # a real process honours the same contract
    proc = subprocess.run([sys.executable, "-m", "sbhzero", "verdict", "--config",
                           str(scenario_dir / "green_blaschke_g15.json"), "--mode", "green"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 3
    assert json.loads(proc.stdout)["verdict"] == "inconclusive"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    proc = subprocess.run([sys.executable, "-m", "sbhzero", "validate", "--config", str(bad)],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 1
