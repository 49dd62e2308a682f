"""Unit-disk sampling primitives: points, polar grids, local refinement.

Every supremum search in this package walks polar grids whose rings cluster
geometrically toward the boundary, then zooms in around promising points.
Grids never touch the boundary: radii are capped at 1 - eps_boundary so that
boundary-singular objectives stay finite in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

DEFAULT_EPS_BOUNDARY = 1e-6
DEFAULT_MAX_ANGLES = 4096


class ParameterError(ValueError):
    """A point, grid or refinement parameter is out of range."""


@dataclass(frozen=True)
class DiskPoint:
    """A point strictly inside the unit disk."""

    re: float
    im: float

    def __post_init__(self) -> None:
        if not (self.re * self.re + self.im * self.im < 1.0):
            raise ParameterError(
                f"point {self.re}+{self.im}i is not strictly inside the unit disk"
            )

    @classmethod
    def from_complex(cls, z: complex) -> "DiskPoint":
        z = complex(z)
        return cls(z.real, z.imag)

    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    def modulus(self) -> float:
        return math.hypot(self.re, self.im)


def _ring_angle_count(radius: float, max_angles: int) -> int:
    # 2*pi/(1-r) keeps the arc spacing comparable to the distance to the
    # boundary; the cap bounds work per ring, local refinement recovers the
    # lost resolution.
    return min(max_angles, max(8, math.ceil(TWO_PI / (1.0 - radius))))


@dataclass(frozen=True)
class DiskGrid:
    """Concentric polar rings, optionally restricted to an angular window.

    Radii are strictly increasing and capped at 1 - eps_boundary; the angle
    count per ring is at least 8 and nondecreasing outward.  A full-circle
    grid samples angles half-open in [start, start + 2*pi); an angular window
    includes both endpoints.
    """

    radii: tuple[float, ...]
    angles_per_radius: tuple[int, ...]
    eps_boundary: float
    angle_start: float = 0.0
    angle_span: float = TWO_PI

    def __post_init__(self) -> None:
        if not (0.0 < self.eps_boundary < 0.5):
            raise ParameterError(f"eps_boundary {self.eps_boundary} not in (0, 0.5)")
        if len(self.radii) == 0:
            raise ParameterError("grid needs at least one radius")
        if len(self.radii) != len(self.angles_per_radius):
            raise ParameterError("radii and angle counts differ in length")
        cap = 1.0 - self.eps_boundary
        prev_r = -1.0
        for r in self.radii:
            if not (0.0 <= r <= cap):
                raise ParameterError(f"radius {r} outside [0, {cap}]")
            if r <= prev_r:
                raise ParameterError("radii must be strictly increasing")
            prev_r = r
        prev_n = 0
        for n in self.angles_per_radius:
            if n < 8:
                raise ParameterError(f"angle count {n} below 8")
            if n < prev_n:
                raise ParameterError("angle counts must be nondecreasing")
            prev_n = n
        if not (0.0 < self.angle_span <= TWO_PI + 1e-12):
            raise ParameterError(f"angle span {self.angle_span} not in (0, 2*pi]")

    @property
    def size(self) -> int:
        return sum(self.angles_per_radius)

    def is_full_circle(self) -> bool:
        return self.angle_span >= TWO_PI - 1e-12

    def points(self) -> np.ndarray:
        """All grid points as a flat complex array, ring by ring."""
        chunks = []
        full = self.is_full_circle()
        for r, n in zip(self.radii, self.angles_per_radius):
            if full:
                theta = self.angle_start + self.angle_span * np.arange(n) / n
            else:
                theta = np.linspace(
                    self.angle_start, self.angle_start + self.angle_span, n
                )
            chunks.append(r * np.exp(1j * theta))
        return np.concatenate(chunks)

    def ring_slices(self) -> list[slice]:
        """Index ranges of each ring inside the points() array."""
        out, start = [], 0
        for n in self.angles_per_radius:
            out.append(slice(start, start + n))
            start += n
        return out


@dataclass(frozen=True)
class RefinementTrace:
    """Evaluation history of a supremum search.

    Each level records (points evaluated, running maximum, argmax point); the
    running maxima are nondecreasing because every level only adds evaluation
    points.  final_gap is the difference between the last two levels.
    """

    levels: tuple[tuple[int, float, complex], ...]
    converged: bool
    final_gap: float


def make_geometric_grid(
    depth: int,
    eps_boundary: float = DEFAULT_EPS_BOUNDARY,
    max_angles: int = DEFAULT_MAX_ANGLES,
) -> DiskGrid:
    """Center plus rings at 1 - 2^-k, k = 1..depth, capped at 1 - eps_boundary."""
    if not isinstance(depth, int) or depth < 1:
        raise ParameterError(f"depth {depth!r} must be a positive integer")
    if not (0.0 < eps_boundary < 0.5):
        raise ParameterError(f"eps_boundary {eps_boundary} not in (0, 0.5)")
    if max_angles < 8:
        raise ParameterError(f"max_angles {max_angles} below 8")
    cap = 1.0 - eps_boundary
    radii = [0.0]
    for k in range(1, depth + 1):
        r = 1.0 - 2.0 ** (-k)
        if r >= cap:
            radii.append(cap)
            break
        radii.append(r)
    counts = tuple(_ring_angle_count(r, max_angles) for r in radii)
    return DiskGrid(tuple(radii), counts, eps_boundary)


def refine_near(
    grid: DiskGrid,
    witness: DiskPoint | complex,
    shrink: float,
    rings: int = 13,
    angles: int = 13,
) -> DiskGrid:
    """Denser local grid covering the size-`shrink` neighborhood of `witness`.

    The patch is the polar box [|w| - shrink, |w| + shrink] x [arg w - d,
    arg w + d] with d sized so the box covers the disk of radius `shrink`
    around the witness, clamped to [0, 1 - eps_boundary].
    """
    if not (0.0 < shrink < 1.0):
        raise ParameterError(f"shrink {shrink} not in (0, 1)")
    w = witness.as_complex() if isinstance(witness, DiskPoint) else complex(witness)
    if abs(w) >= 1.0:
        raise ParameterError("witness must lie strictly inside the unit disk")
    if rings < 1 or angles < 8:
        raise ParameterError("patch needs rings >= 1 and angles >= 8")
    cap = 1.0 - grid.eps_boundary
    rw = abs(w)
    lo = max(0.0, rw - shrink)
    hi = min(rw + shrink, cap)
    if hi <= lo:  # witness pinned at the cap with a tiny neighborhood
        radii = (lo,)
    else:
        radii = tuple(np.unique(np.linspace(lo, hi, rings)))
    theta_w = math.atan2(w.imag, w.real) % TWO_PI
    if rw <= shrink:
        # neighborhood contains the origin: no angular restriction helps
        start, span = 0.0, TWO_PI
    else:
        half = min(math.pi, shrink / rw)
        start, span = theta_w - half, 2.0 * half
    counts = tuple(angles for _ in radii)
    return DiskGrid(radii, counts, grid.eps_boundary, start, span)
