"""Radial weight functions on the unit disk.

A weight is bounded, continuous and strictly positive; everything here is
additionally radial (a function of |z| alone), which is what lets the norm
engine run one-dimensional fast paths and rotation-covariance checks.  The
standard power weight (1 - |z|^2)^alpha and the logarithmic weight
(1 - |z|^2) log(2 / (1 - |z|^2)) cover the usual Bloch-type scales; custom
radial profiles are linearly interpolated from (r, value) tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .disk import ParameterError

__all__ = [
    "Weight",
    "StandardWeight",
    "LogWeight",
    "CustomRadialWeight",
    "ScaledWeight",
    "weight_at",
    "parse_weight",
    "check_dilation_inequality",
    "standard_weight_value",
]

ALPHA_MAX = 8.0


@dataclass(frozen=True)
class Weight:
    """Base class; subclasses are callable on complex scalars or arrays."""

    def __call__(self, z):
        raise NotImplementedError

    @property
    def bound(self) -> float:
        raise NotImplementedError

    @property
    def is_radial(self) -> bool:
        return True

    def spec(self) -> str:
        """The config-string form accepted by parse_weight."""
        raise NotImplementedError


def _abs2(z):
    z = np.asarray(z, dtype=complex)
    return z.real * z.real + z.imag * z.imag


@dataclass(frozen=True)
class StandardWeight(Weight):
    """(1 - |z|^2)^alpha; alpha = 1 gives the classical Bloch weight."""

    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= ALPHA_MAX) or not math.isfinite(self.alpha):
            raise ParameterError(f"weight exponent {self.alpha} must lie in (0, {ALPHA_MAX}]")

    def __call__(self, z):
        return (1.0 - _abs2(z)) ** self.alpha

    @property
    def bound(self) -> float:
        return 1.0

    def spec(self) -> str:
        return f"valpha:{self.alpha:.17g}"


@dataclass(frozen=True)
class LogWeight(Weight):
    """w log(2/w) with w = 1 - |z|^2; peaks at w = 2/e with value 2/e."""

    def __call__(self, z):
        w = 1.0 - _abs2(z)
        return w * (math.log(2.0) - np.log(w))

    @property
    def bound(self) -> float:
        return 2.0 / math.e

    def spec(self) -> str:
        return "log"


@dataclass(frozen=True)
class CustomRadialWeight(Weight):
    """Piecewise-linear profile from (r, value) samples on [0, 1).

    Values must be strictly positive; outside the sampled range the profile
    is held constant at the nearest endpoint.
    """

    radii: tuple[float, ...]
    values: tuple[float, ...]
    source: str = ""

    def __post_init__(self):
        if len(self.radii) < 2 or len(self.radii) != len(self.values):
            raise ParameterError("custom weight needs >= 2 (r, value) samples")
        prev = -1.0
        for r in self.radii:
            if not (0.0 <= r < 1.0) or r <= prev:
                raise ParameterError("custom weight radii must increase within [0, 1)")
            prev = r
        for v in self.values:
            if not (v > 0.0 and math.isfinite(v)):
                raise ParameterError("custom weight values must be finite and positive")

    def __call__(self, z):
        r = np.sqrt(_abs2(z))
        return np.interp(r, self.radii, self.values)

    @property
    def bound(self) -> float:
        return max(self.values)

    def spec(self) -> str:
        return f"custom:{self.source}" if self.source else "custom:<inline>"

    @classmethod
    def from_file(cls, path: str | Path) -> "CustomRadialWeight":
        radii, values = [], []
        for ln, line in enumerate(Path(path).read_text().splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ParameterError(f"{path}:{ln}: expected 'r value' pairs")
            radii.append(float(parts[0]))
            values.append(float(parts[1]))
        return cls(tuple(radii), tuple(values), source=str(path))


@dataclass(frozen=True)
class ScaledWeight(Weight):
    """c * base with c > 0; scan values scale linearly in c."""

    factor: float
    base: Weight

    def __post_init__(self):
        if not (self.factor > 0.0 and math.isfinite(self.factor)):
            raise ParameterError(f"weight scale {self.factor} must be positive")

    def __call__(self, z):
        return self.factor * self.base(z)

    @property
    def bound(self) -> float:
        return self.factor * self.base.bound

    def spec(self) -> str:
        return f"scaled:{self.factor:.17g}:{self.base.spec()}"


def weight_at(weight: Weight, z) -> float:
    """Weight value at a single point."""
    if hasattr(z, "as_complex"):
        z = z.as_complex()
    return float(weight(complex(z)))


def standard_weight_value(alpha: float, z) -> float:
    """(1 - |z|^2)^alpha at a single point, without constructing a Weight."""
    return float((1.0 - abs(complex(z)) ** 2) ** alpha)


def parse_weight(text: str) -> Weight:
    """Parse a weight spec: 'valpha:<alpha>', 'log' or 'custom:<path>'."""
    spec = text.strip().lower()
    if spec == "log":
        return LogWeight()
    if spec.startswith("valpha:"):
        try:
            alpha = float(text.strip()[len("valpha:"):])
        except ValueError as exc:
            raise ParameterError(f"bad weight exponent in {text!r}") from exc
        return StandardWeight(alpha)
    if spec.startswith("custom:"):
        return CustomRadialWeight.from_file(text.strip()[len("custom:"):])
    raise ParameterError(f"unknown weight spec {text!r}")


def check_dilation_inequality(alpha: float, samples) -> bool:
    """Check r * w(z) < w(r z) for the power weight w = (1 - |.|^2)^alpha.

    samples is an iterable of (r, z) with r in (0, 1) and z in the disk; the
    comparison allows 1e-15 arithmetic slack.
    """
    if not (alpha > 0.0):
        raise ParameterError(f"alpha {alpha} must be positive")
    w = StandardWeight(alpha)
    for r, z in samples:
        z = complex(z)
        if not (0.0 < r < 1.0):
            raise ParameterError(f"dilation factor {r} must lie in (0, 1)")
        if not r * float(w(z)) < float(w(r * z)) + 1e-15:
            return False
    return True
