"""Adaptive supremum search for weighted Bloch-type norms.

The seminorm of f against a weight w is sup over the disk of w(z) |f'(z)|;
the full norm adds |f(0)|.  The search evaluates the objective on a boundary
clustered polar grid, then zooms in geometrically around (a) the grid argmax
and (b) the argmin of each "spike score" the expression tree exposes.  The
scores locate evaluation points that approach a pole of some subexpression,
which is where Bloch objectives concentrate into peaks far narrower than any
affordable uniform grid; steering the zoom by the score instead of the raw
objective makes those peaks findable deterministically.

Every reported value is the maximum of the objective over all points ever
evaluated, hence a lower bound for the true supremum by construction.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .disk import (
    DEFAULT_EPS_BOUNDARY,
    DEFAULT_MAX_ANGLES,
    DiskGrid,
    DiskPoint,
    ParameterError,
    RefinementTrace,
    TWO_PI,
    make_geometric_grid,
    refine_near,
)
from .symbols import (
    AnalyticMap,
    Compose,
    Dilation,
    Identity,
    SelfMapCertificate,
    certify_self_map,
)
from .weights import StandardWeight, Weight

__all__ = [
    "SearchSettings",
    "SeminormEstimate",
    "BlochNorm",
    "NonFiniteError",
    "bloch_seminorm",
    "bloch_norm",
    "composition_seminorm",
    "composition_norm",
    "dilate_and_norm",
]


class NonFiniteError(ArithmeticError):
    """The objective overflowed; carries the offending point."""

    def __init__(self, point: complex):
        super().__init__(f"objective is non-finite at {point}")
        self.point = complex(point)


@dataclass(frozen=True)
class SearchSettings:
    """Knobs of the supremum search; defaults suit the acceptance scales.

    refine_rounds caps the zoom iterations per seed; each round shrinks the
    patch halfwidth by `shrink`, so resolution improves geometrically and the
    loop exits early once improvements fall below rel_tol * value + abs_tol.
    """

    depth: int = 20
    max_angles: int = DEFAULT_MAX_ANGLES
    refine_rounds: int = 40
    shrink: float = 0.25
    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    eps_boundary: float = DEFAULT_EPS_BOUNDARY
    patch_rings: int = 13
    patch_angles: int = 13
    use_radial_fast_path: bool = True

    def __post_init__(self):
        if self.depth < 1:
            raise ParameterError("depth must be >= 1")
        if not (0.0 < self.shrink < 1.0):
            raise ParameterError("shrink must lie in (0, 1)")
        if self.refine_rounds < 0:
            raise ParameterError("refine_rounds must be >= 0")

    def tight(self) -> "SearchSettings":
        """Preset for property tests that compare against 1e-9 slacks."""
        return replace(self, rel_tol=1e-12, abs_tol=1e-15, refine_rounds=60)


@dataclass(frozen=True)
class SeminormEstimate:
    """Grid-certified lower bound for sup w(z) |f'(z)| with its witness.

    is_diverging marks searches whose running maximum was still climbing at
    the boundary cap, the numerical signature of a function outside the
    target space (the objective sup is then a truncation, not an estimate).
    """

    value: float
    witness: DiskPoint
    trace: RefinementTrace
    is_converged: bool
    is_diverging: bool = False


@dataclass(frozen=True)
class BlochNorm:
    value_at_zero: float
    seminorm: SeminormEstimate
    total: float


# ---------------------------------------------------------------------------
# objective


class _SupProblem:
    """Batch evaluator for w(z) |f'(z)| plus the tree's spike scores."""

    def __init__(self, f: AnalyticMap, weight: Weight):
        self.f = f
        self.weight = weight

    def values(self, z: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.asarray(self.weight(z)) * np.abs(self.f.deriv(z))
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(np.asarray(v)))[0])
            raise NonFiniteError(complex(np.asarray(z).ravel()[bad]))
        return np.asarray(v, dtype=float)

    def scores(self, z: np.ndarray) -> list[np.ndarray]:
        return self.f.spike_scores(z)


# ---------------------------------------------------------------------------
# base grids (cached: scans reuse the same grid for every cell)


@lru_cache(maxsize=8)
def _base_grid(depth: int, max_angles: int, eps: float):
    grid = make_geometric_grid(depth, eps, max_angles)
    pts = grid.points()
    pts.setflags(write=False)
    return grid, pts, tuple(grid.ring_slices())


def _local_spacing(grid: DiskGrid, w: complex) -> float:
    """Approximate distance between base-grid neighbors around the point."""
    rw = abs(w)
    radii = np.asarray(grid.radii)
    i = int(np.searchsorted(radii, rw))
    gaps = []
    if 0 < i < len(radii):
        gaps.append(radii[i] - radii[i - 1])
    elif len(radii) > 1:
        gaps.append(radii[1] - radii[0])
    ring_r = radii[min(i, len(radii) - 1)]
    count = grid.angles_per_radius[min(i, len(radii) - 1)]
    gaps.append(TWO_PI * max(ring_r, 1e-3) / count)
    return float(max(gaps))


# ---------------------------------------------------------------------------
# zoom refinement


def _zoom(
    problem: _SupProblem,
    seed: complex,
    score_index: int | None,
    best: float,
    best_w: complex,
    h_best: float,
    levels: list,
    grid: DiskGrid,
    st: SearchSettings,
    h0: float | None = None,
) -> tuple[float, complex, float]:
    """Shrinking polar patches around a moving center.

    score_index None steers by the objective (local maximization); an index
    steers by that spike score (chases the near-singular point while the
    objective maxima encountered along the way are harvested).  Returns the
    updated running best plus the patch halfwidth at which it last improved,
    which tells follow-up zooms at what scale the witness is still uncertain.
    """
    center = complex(seed)
    h = h0 if h0 is not None else min(0.25, 2.0 * _local_spacing(grid, center))
    stall = 0
    for _ in range(st.refine_rounds):
        if h < 1e-13:
            break
        patch = refine_near(grid, center, h, st.patch_rings, st.patch_angles)
        zp = patch.points()
        vals = problem.values(zp)
        j = int(np.argmax(vals))
        cand = float(vals[j])
        gain = cand - best
        if cand > best:
            best, best_w, h_best = cand, complex(zp[j]), h
        levels.append((zp.size, best, best_w))
        if score_index is None:
            center = complex(zp[j])
            # keep zooming well past the reporting tolerance so the settled
            # value sits comfortably inside it; six flat rounds cover a 4^6
            # dynamic range between the starting halfwidth and a peak offset
            if gain < 0.05 * (st.rel_tol * max(best, 1e-300) + st.abs_tol):
                stall += 1
                if stall >= 6:
                    break
            else:
                stall = 0
        else:
            s = problem.scores(zp)[score_index]
            center = complex(zp[int(np.argmin(s))])
        h *= st.shrink
    return best, best_w, h_best


def _is_diverging(ring_maxima: np.ndarray, witness: complex, cap: float) -> bool:
    """Running maximum still climbing at the radius cap."""
    if abs(witness) < cap - 1e-12 or len(ring_maxima) < 4:
        return False
    tail = ring_maxima[-4:]
    climbing = all(tail[i + 1] > tail[i] * (1.0 + 1e-9) for i in range(len(tail) - 1))
    return climbing and tail[-1] >= 0.995 * float(np.max(ring_maxima))


def _search_sup(problem: _SupProblem, st: SearchSettings) -> SeminormEstimate:
    grid, z, slices = _base_grid(st.depth, st.max_angles, st.eps_boundary)
    vals = problem.values(z)
    i0 = int(np.argmax(vals))
    best, best_w = float(vals[i0]), complex(z[i0])
    levels: list = [(z.size, best, best_w)]
    ring_maxima = np.array([float(np.max(vals[sl])) for sl in slices])

    if best == 0.0:
        # identically-zero objective (constant maps): nothing to refine
        trace = RefinementTrace(tuple(levels), True, 0.0)
        return SeminormEstimate(0.0, DiskPoint.from_complex(best_w), trace, True)

    # chase each near-singular direction, then polish the overall argmax
    scores = problem.scores(z)
    h_best = _local_spacing(grid, best_w)
    seen: list[complex] = []
    for k, s in enumerate(scores):
        seed = complex(z[int(np.argmin(s))])
        spacing = _local_spacing(grid, seed)
        if any(abs(seed - q) < 0.25 * spacing for q in seen):
            continue
        seen.append(seed)
        best, best_w, h_best = _zoom(
            problem, seed, k, best, best_w, h_best, levels, grid, st
        )
    # polish from the witness at the scale it was last pinned down
    best, best_w, h_best = _zoom(
        problem, best_w, None, best, best_w, h_best, levels, grid, st,
        h0=min(0.25, h_best),
    )

    if len(levels) >= 2:
        final_gap = levels[-1][1] - levels[-2][1]
    else:
        final_gap = 0.0
    converged = final_gap < st.rel_tol * best + st.abs_tol and len(levels) >= 2
    trace = RefinementTrace(tuple(levels), converged, float(final_gap))
    return SeminormEstimate(
        value=best,
        witness=DiskPoint.from_complex(best_w),
        trace=trace,
        is_converged=converged,
        is_diverging=_is_diverging(ring_maxima, best_w, 1.0 - st.eps_boundary),
    )


# ---------------------------------------------------------------------------
# radial fast path


def _search_radial(f: AnalyticMap, weight: Weight, st: SearchSettings) -> SeminormEstimate:
    """1-D maximization along the positive radius for rotation-symmetric |f'|."""
    cap = 1.0 - st.eps_boundary
    grid, _, _ = _base_grid(st.depth, st.max_angles, st.eps_boundary)
    rr = np.unique(np.concatenate([np.linspace(0.0, cap, 4097), np.asarray(grid.radii)]))

    def values(r: np.ndarray) -> np.ndarray:
        zc = r.astype(complex)
        v = np.asarray(weight(zc)) * np.abs(f.deriv(zc))
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            raise NonFiniteError(complex(zc[bad]))
        return np.asarray(v, dtype=float)

    vals = values(rr)
    i0 = int(np.argmax(vals))
    best, best_r = float(vals[i0]), float(rr[i0])
    levels: list = [(rr.size, best, complex(best_r))]
    seg = np.array_split(vals, 16)
    seg_max = np.array([float(s.max()) for s in seg])

    h = 2.0 * cap / 4096.0
    stall = 0
    for _ in range(st.refine_rounds):
        if h < 1e-14:
            break
        local = np.linspace(max(0.0, best_r - h), min(cap, best_r + h), 33)
        lv = values(local)
        j = int(np.argmax(lv))
        gain = float(lv[j]) - best
        if lv[j] > best:
            best, best_r = float(lv[j]), float(local[j])
        levels.append((local.size, best, complex(best_r)))
        if gain < 0.05 * (st.rel_tol * max(best, 1e-300) + st.abs_tol):
            stall += 1
            if stall >= 6:
                break
        else:
            stall = 0
        h *= st.shrink

    final_gap = levels[-1][1] - levels[-2][1] if len(levels) >= 2 else 0.0
    converged = len(levels) >= 2 and final_gap < st.rel_tol * max(best, 1e-300) + st.abs_tol
    trace = RefinementTrace(tuple(levels), converged, float(final_gap))
    return SeminormEstimate(
        value=best,
        witness=DiskPoint(best_r, 0.0),
        trace=trace,
        is_converged=converged,
        is_diverging=_is_diverging(seg_max, complex(best_r), cap),
    )


# ---------------------------------------------------------------------------
# public operations


def bloch_seminorm(
    f: AnalyticMap, weight: Weight, settings: SearchSettings | None = None
) -> SeminormEstimate:
    """sup over the disk of weight(z) |f'(z)|, from below, with witness."""
    st = settings or SearchSettings()
    if st.use_radial_fast_path and weight.is_radial and f.is_radially_symmetric():
        return _search_radial(f, weight, st)
    return _search_sup(_SupProblem(f, weight), st)


def bloch_norm(
    f: AnalyticMap, weight: Weight, settings: SearchSettings | None = None
) -> BlochNorm:
    """|f(0)| plus the weighted seminorm."""
    sem = bloch_seminorm(f, weight, settings)
    v0 = float(abs(f.eval(0j)))
    return BlochNorm(value_at_zero=v0, seminorm=sem, total=v0 + sem.value)


def composition_seminorm(
    f: AnalyticMap,
    phi: AnalyticMap,
    weight: Weight,
    settings: SearchSettings | None = None,
    certificate: SelfMapCertificate | None = None,
) -> SeminormEstimate:
    """sup of weight(z) |f'(phi(z))| |phi'(z)| for a certified self-map phi.

    Identical to the seminorm of f composed with phi; the identity symbol
    short-circuits to the plain seminorm.
    """
    if certificate is None:
        certify_self_map(phi)
    if isinstance(phi, Identity):
        return bloch_seminorm(f, weight, settings)
    return bloch_seminorm(Compose(f, phi), weight, settings)


def composition_norm(
    f: AnalyticMap,
    phi: AnalyticMap,
    weight: Weight,
    settings: SearchSettings | None = None,
    certificate: SelfMapCertificate | None = None,
) -> BlochNorm:
    """|f(phi(0))| plus the composition seminorm."""
    sem = composition_seminorm(f, phi, weight, settings, certificate)
    v0 = float(abs(f.eval(complex(phi.eval(0j)))))
    return BlochNorm(value_at_zero=v0, seminorm=sem, total=v0 + sem.value)


def dilate_and_norm(
    f: AnalyticMap,
    r: float,
    alpha: float,
    settings: SearchSettings | None = None,
) -> tuple[BlochNorm, BlochNorm]:
    """Norm of f and of its r-dilation z -> f(r z) in the alpha-Bloch scale.

    The dilation never increases the norm (it is a contraction for r <= 1),
    which the returned pair lets callers assert.
    """
    if not (0.0 <= r <= 1.0):
        raise ParameterError(f"dilation factor {r} must lie in [0, 1]")
    weight = StandardWeight(alpha)
    return (
        bloch_norm(f, weight, settings),
        bloch_norm(Dilation(r, f), weight, settings),
    )


def thread_count() -> int:
    """Worker cap for data-parallel scans, from BLOCH_SCOPE_THREADS."""
    try:
        n = int(os.environ.get("BLOCH_SCOPE_THREADS", "1"))
    except ValueError:
        return 1
    return max(1, n)
