"""Model domains with closed-form Green functions.

Two kinds are supported: a ball ``B(R)`` in R^m with the pole at the centre,
and a disk ``B(R)`` in the plane with an arbitrary pole ``z0``.  Green
functions are normalised so that ``-g`` has unit Riesz mass at the pole:

    ball, m = 2    log(R / |x|)
    ball, m >= 3   |x|**(2-m) - R**(2-m)
    disk           log |(R**2 - conj(z0) z) / (R (z - z0))|
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedError
from .profiles import INF, RadialProfile


@dataclass(frozen=True)
class ModelDomain:
    kind: str  # "ball" | "disk"
    R: float
    m: int = 2
    pole: complex = 0j
    regular: bool = True

    def __post_init__(self):
        if self.kind not in ("ball", "disk"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not self.R > 0:
            raise DomainError("domain radius must be positive")
        if int(self.m) != self.m or self.m < 1:
            raise DomainError("dimension must be an integer >= 1")
        if self.kind == "disk":
            if self.m != 2:
                raise DomainError("general-pole disks live in the plane (m = 2)")
            if math.isinf(self.R):
                raise DomainError("no Green function on the whole plane")
            if not abs(self.pole) < self.R:
                raise DomainError("pole must lie inside the disk")

    @classmethod
    def ball(cls, R: float, m: int = 2) -> "ModelDomain":
        return cls("ball", float(R), int(m))

    @classmethod
    def disk(cls, R: float, pole: complex = 0j) -> "ModelDomain":
        return cls("disk", float(R), 2, complex(pole))

    @property
    def center_pole(self) -> bool:
        return self.kind == "ball" or self.pole == 0

    def _require_green(self):
        if math.isinf(self.R):
            raise DomainError("Green mode needs a bounded domain (R < inf)")

    # --- Green function ---------------------------------------------------

    def green_radial(self, r):
        """``g`` as a function of ``|x|`` for centre-pole domains (vectorised, lenient)."""
        self._require_green()
        if not self.center_pole:
            raise UnsupportedError("radial Green profile needs the pole at the centre")
        x = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            if self.m == 1:
                out = self.R - x
            elif self.m == 2:
                out = np.log(self.R / x)
            else:
                out = x ** (2.0 - self.m) - self.R ** (2.0 - self.m)
        return float(out) if np.ndim(r) == 0 else out

    def green_xy(self, X, Y):
        """Vectorised plane Green function (lenient: negative outside the disk)."""
        self._require_green()
        if self.m != 2:
            raise UnsupportedError("green_xy is planar")
        Z = np.asarray(X) + 1j * np.asarray(Y)
        z0 = self.pole
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.abs((self.R**2 - np.conj(z0) * Z) / (self.R * (Z - z0))))

    def green_profile(self) -> RadialProfile:
        """Closed-form radial profile of ``g`` (centre pole)."""
        self._require_green()
        if self.m == 2:
            return RadialProfile.log_power(-1.0, 0.0, 1.0, offset=math.log(self.R), domain=(0.0, self.R))
        if self.m == 1:
            return RadialProfile.power(-1.0, 1.0, offset=self.R, domain=(0.0, self.R))
        return RadialProfile.power(1.0, 2.0 - self.m, offset=-self.R ** (2.0 - self.m), domain=(0.0, self.R))

    def contains(self, x) -> bool:
        return _norm(x) < self.R

    def to_dict(self) -> dict:
        return {"kind": self.kind, "R": "inf" if math.isinf(self.R) else self.R, "m": self.m,
                "pole": [self.pole.real, self.pole.imag]}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelDomain":
        kind = data.get("kind", "ball")
        R = float(data["R"])
        if kind == "ball":
            return cls.ball(R, int(data.get("m", 2)))
        pole = data.get("pole", [0.0, 0.0])
        if isinstance(pole, (list, tuple)):
            pole = complex(pole[0], pole[1])
        return cls.disk(R, complex(pole))


def _norm(x) -> float:
    if isinstance(x, (complex, float, int)):
        return abs(x)
    v = np.asarray(x, dtype=float)
    return float(np.sqrt(v @ v))


def _as_complex(x) -> complex:
    if isinstance(x, (complex, float, int)):
        return complex(x)
    v = np.asarray(x, dtype=float)
    if v.shape != (2,):
        raise DomainError("planar point expected")
    return complex(v[0], v[1])


def green_value(domain: ModelDomain, x) -> float:
    """``g_D(x, pole)``; ``+inf`` at the pole, :class:`DomainError` off ``D``."""
    domain._require_green()
    if domain.kind == "disk":
        z = _as_complex(x)
        if not abs(z) < domain.R:
            raise DomainError(f"point {x} is not in the disk of radius {domain.R}")
        if z == domain.pole:
            return INF
        z0, R = domain.pole, domain.R
        return math.log(abs((R * R - z0.conjugate() * z) / (R * (z - z0))))
    r = _norm(x)
    if not r < domain.R:
        raise DomainError(f"point at radius {r} is not in B({domain.R})")
    if r == 0.0:
        return INF
    return float(domain.green_radial(r))


def mobius_to_center(domain: ModelDomain, z):
    """Disk automorphism onto the unit disk sending the pole to 0; ``g = -log|φ|``."""
    z = np.asarray(z, dtype=complex)
    z0, R = domain.pole, domain.R
    return R * (z - z0) / (R * R - np.conj(z0) * z)


def mobius_from_center(domain: ModelDomain, w):
    """Inverse of :func:`mobius_to_center`."""
    w = np.asarray(w, dtype=complex)
    z0, R = domain.pole, domain.R
    return R * (w * R + z0) / (R + np.conj(z0) * w)


# --------------------------------------------------------------------------
# level sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelSet:
    """``D_t = {x in D : g(x) > t}``; an explicit ball for centre poles."""

    domain: ModelDomain
    t: float

    def __post_init__(self):
        if not self.t > 0 or math.isinf(self.t):
            raise DomainError("level sets need 0 < t < sup g = +inf")

    @property
    def radius(self) -> float | None:
        return level_radius(self.domain, self.t) if self.domain.center_pole else None

    def contains(self, x) -> bool:
        if _norm(x) >= self.domain.R:
            return False
        return green_value(self.domain, x) > self.t


def level_radius(domain: ModelDomain, t: float) -> float:
    """Radius ``r(t)`` with ``g(r(t)) = t``; ``D_t = B(r(t))``."""
    domain._require_green()
    if not domain.center_pole:
        raise UnsupportedError("level sets of off-centre poles are represented implicitly")
    if not t > 0 or math.isinf(t):
        raise DomainError("level radius needs 0 < t < sup g")
    R, m = domain.R, domain.m
    if m == 1:
        if t >= R:
            raise DomainError("level set empty for t >= R in dimension 1")
        return R - t
    if m == 2:
        return R * math.exp(-t)
    return (t + R ** (2.0 - m)) ** (-1.0 / (m - 2))


def harmonic_measure_center(domain: ModelDomain, theta1: float, theta2: float) -> float:
    """Harmonic measure at the centre of the arc ``(theta1, theta2)`` of the circle."""
    if domain.m != 2 or not domain.center_pole:
        raise UnsupportedError("harmonic measure is implemented for planar disks at the centre")
    span = theta2 - theta1
    if span < 0 or span > 2 * math.pi + 1e-15:
        raise DomainError("arc must satisfy 0 <= theta2 - theta1 <= 2 pi")
    return span / (2 * math.pi)
