"""Scenario configuration: a JSON document with one block per ingredient.

Schema (every key optional unless marked)::

    {
      "dimension":  {"n": 1}                      # or {"m": 2}; default n = 1
      "domain":     {"kind": "ball", "R": 1.0, "m": 2}
                  | {"kind": "disk", "R": 1.0, "pole": [x, y]}
      "envelope":   {"kind": "radial", "q": PROFILE, "R": 1.0}
                  | {"kind": "green", "F": {"family": "exp", "c": 1, "lam": 1}}
      "testfn":     {"kind": "radial", "density": DENSITY, "r0": 0.5, "R": 1.0}
                  | {"kind": "green", "q": PROFILE, "t0": 1.0}
                  | {"kind": "candidate", "profile": PROFILE, "r0": 1.0, "R": 2.0}
      "zeros":      {"generator": {"gamma": 1.0, "count": 100000, "mult": 1, "radius": 1.0}}
                  | {"points": [[x, y, mult], ...]}
                  | {"annulus": {"count": 100, "r1": 1, "r2": 2, "seed": 0}}
                  | {"counting": PROFILE, "interpretation": "radial" | "green"}
                    (points and counting may be combined)
      "tolerances": {KEY: VALUE}                  # see DEFAULT_TOLERANCES
    }

PROFILE is a tagged record ``{"family": "constant"|"power"|"log-power"|
"samples", ...}``; DENSITY is ``{"family": "constant"|"power"|"log-power"|
"samples"|"green-derived", ...}``.  Missing ``r0`` defaults to ``R/2``
(``1`` when ``R`` is infinite) and missing ``t0`` to ``1``.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field

from .green_domains import ModelDomain
from .profiles import MonotoneDensity, RadialProfile
from .tails import GROWTH_FACTOR
from .testfns import EnvelopeFunction, density_from_green
from .uniqueness import ZeroSet

DEFAULT_TOLERANCES = {
    "convexity": 1e-9,
    "laplacian": 1e-6,
    "growth_factor": GROWTH_FACTOR,
    "ibp_radial": 1e-10,
    "ibp_points": 1e-12,
    "ibp_smooth": 1e-8,
    "ibp_delta": 1e-6,
    "n_radii": 256,
    "n_angles": 64,
    "green_derived_knots": 65,
}
INT_TOLERANCES = {"n_radii", "n_angles", "green_derived_knots"}

BLOCKS = ("dimension", "domain", "envelope", "testfn", "zeros", "tolerances")


class ConfigError(ValueError):
    """Malformed scenario; ``where`` names the offending field or line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _num(x) -> float:
    # JSON has no infinity literal; accept the string forms too
    if isinstance(x, str) and x.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return float(x)


@dataclass
class ScenarioConfig:
    dimension: dict = field(default_factory=lambda: {"n": 1, "m": 2})
    domain: dict | None = None
    envelope: dict | None = None
    testfn: dict | None = None
    zeros: dict | None = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    # --- parsing ------------------------------------------------------------

    @classmethod
    def from_dict(cls, data) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "scenario must be a JSON object")
        unknown = set(data) - set(BLOCKS)
        if unknown:
            raise ConfigError(sorted(unknown)[0], f"unknown block (expected one of {', '.join(BLOCKS)})")
        for name in BLOCKS:
            if name in data and data[name] is not None and not isinstance(data[name], dict):
                raise ConfigError(name, "block must be an object")
        cfg = cls(
            dimension=_norm_dimension(data.get("dimension", {"n": 1})),
            domain=copy.deepcopy(data.get("domain")),
            envelope=copy.deepcopy(data.get("envelope")),
            testfn=copy.deepcopy(data.get("testfn")),
            zeros=copy.deepcopy(data.get("zeros")),
            tolerances=_norm_tolerances(data.get("tolerances", {})),
        )
        cfg._check()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(str(path), f"cannot read config ({exc.strerror})") from exc
        return cls.from_json(text)

    def to_dict(self) -> dict:
        out = {"dimension": dict(self.dimension), "tolerances": dict(self.tolerances)}
        for name in ("domain", "envelope", "testfn", "zeros"):
            block = getattr(self, name)
            if block is not None:
                out[name] = copy.deepcopy(block)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def with_overrides(self, overrides: dict) -> "ScenarioConfig":
        data = self.to_dict()
        data["tolerances"] = {**data["tolerances"], **overrides}
        return ScenarioConfig.from_dict(data)

    # --- structural checks ------------------------------------------------

    def _check(self):
        if self.domain is not None:
            self._wrap("domain", lambda: self.build_domain())
        if self.envelope is not None:
            kind = self.envelope.get("kind")
            if kind not in ("radial", "green"):
                raise ConfigError("envelope.kind", "must be 'radial' or 'green'")
            if kind == "radial" and "q" not in self.envelope:
                raise ConfigError("envelope.q", "radial envelope needs a q profile")
            if kind == "green" and "F" not in self.envelope:
                raise ConfigError("envelope.F", "green envelope needs an F family")
            self._wrap("envelope", self.build_envelope_parts)
        if self.testfn is not None:
            kind = self.testfn.get("kind")
            if kind not in ("radial", "green", "candidate"):
                raise ConfigError("testfn.kind", "must be 'radial', 'green' or 'candidate'")
            need = {"radial": ("density",), "green": ("q",), "candidate": ("profile",)}[kind]
            for key in need:
                if key not in self.testfn:
                    raise ConfigError(f"testfn.{key}", "missing")
            if kind == "radial" and self.testfn["density"].get("family") != "green-derived":
                self._wrap("testfn.density", self.build_density)
            if kind == "green":
                self._wrap("testfn.q", lambda: RadialProfile.from_dict(self.testfn["q"]))
        if self.zeros is not None:
            self._wrap("zeros", self.build_zeros)

    @staticmethod
    def _wrap(where, fn):
        try:
            return fn()
        except ConfigError:
            raise
        except KeyError as exc:
            raise ConfigError(f"{where}.{exc.args[0]}", "missing") from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(where, str(exc)) from exc

    # --- object builders ----------------------------------------------------

    @property
    def n(self) -> int | None:
        return self.dimension.get("n")

    @property
    def m(self) -> int:
        return self.dimension["m"]

    def build_domain(self) -> ModelDomain | None:
        if self.domain is None:
            return None
        d = dict(self.domain)
        if "R" in d:
            d["R"] = _num(d["R"])
        if d.get("kind", "ball") == "ball":
            d.setdefault("m", self.m)
        return ModelDomain.from_dict(d)

    def build_envelope_parts(self):
        env = self.envelope
        if env["kind"] == "radial":
            return RadialProfile.from_dict(env["q"])
        return EnvelopeFunction.from_dict(env["F"])

    def outer_radius(self) -> float:
        for block in (self.testfn, self.envelope):
            if block is not None and "R" in block:
                return _num(block["R"])
        if self.domain is not None:
            return _num(self.domain["R"])
        raise ConfigError("testfn.R", "outer radius R is not specified (testfn, envelope or domain)")

    def inner_radius(self) -> float:
        if self.testfn is not None and "r0" in self.testfn:
            return _num(self.testfn["r0"])
        R = self.outer_radius()
        return 1.0 if math.isinf(R) else 0.5 * R

    def t0(self) -> float:
        return _num(self.testfn.get("t0", 1.0)) if self.testfn is not None else 1.0

    def build_density(self) -> MonotoneDensity:
        spec = dict(self.testfn["density"])
        if spec.get("family") == "green-derived":
            R = self.outer_radius()
            dom = ModelDomain.ball(R, self.m)
            return density_from_green(dom, self.inner_radius(), int(spec.get("knots", self.tolerances["green_derived_knots"])))
        return MonotoneDensity.from_dict(spec, "decreasing")

    def build_zeros(self) -> ZeroSet:
        data = dict(self.zeros)
        data.setdefault("n", self.n or 1)
        return ZeroSet.from_dict(data)


def _norm_dimension(block) -> dict:
    if not isinstance(block, dict):
        raise ConfigError("dimension", "block must be an object")
    if "n" in block:
        n = block["n"]
        if not isinstance(n, int) or n < 1:
            raise ConfigError("dimension.n", "must be an integer >= 1")
        if "m" in block and block["m"] != 2 * n:
            raise ConfigError("dimension.m", "must equal 2n when both are given")
        return {"n": n, "m": 2 * n}
    if "m" in block:
        m = block["m"]
        if not isinstance(m, int) or m < 1:
            raise ConfigError("dimension.m", "must be an integer >= 1")
        return {"n": m // 2 if m % 2 == 0 else None, "m": m}
    return {"n": 1, "m": 2}


def _norm_tolerances(block) -> dict:
    if not isinstance(block, dict):
        raise ConfigError("tolerances", "block must be an object")
    out = dict(DEFAULT_TOLERANCES)
    for key, val in block.items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"tolerances.{key}", "unknown tolerance key")
        try:
            num = float(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"tolerances.{key}", f"not a number: {val!r}") from exc
        if key in INT_TOLERANCES:
            if not num.is_integer() or num < 1:
                raise ConfigError(f"tolerances.{key}", f"must be a positive integer, got {val!r}")
            num = int(num)
        out[key] = num
    return out


def parse_overrides(items) -> dict:
    """``["KEY=VAL", "A=1,B=2"]`` -> dict."""
    out = {}
    for item in items or ():
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise ConfigError("--tolerance-overrides", f"expected KEY=VAL, got {part!r}")
            k, v = part.split("=", 1)
            out[k.strip()] = v.strip()
    return out
