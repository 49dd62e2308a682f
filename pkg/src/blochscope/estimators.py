"""Essential-norm machinery for composition operators between Bloch scales.

Three independent estimates are produced for a disk self-map phi:

* sigma scan: the composed norms ||sigma_a o phi|| along a geometric ladder
  of base points |a| = 1 - 2^-k; the tail maximum L surrogates the boundary
  limsup, and the essential norm of the composition operator from the
  alpha-Bloch space into the weighted target lies between L / (alpha 2^alpha)
  and (8 / alpha) L.
* power criterion: (e / (2 alpha))^alpha times the tail maximum of
  j^(alpha-1) ||phi^j||, valid when the target weight is a power weight.
* Moebius scan: the same ladder with the disk automorphisms (a - z) /
  (1 - conj(a) z) as test functions; its seminorm limit vanishes exactly for
  compact operators on the classical Bloch space.

A compactness verdict falls out of the scans: the operator is compact iff
phi lies in the target space and the seminorm tail vanishes, so a small
converged tail reads "Compact", a large one "NonCompact", anything in
between "Inconclusive".
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .disk import ParameterError, TWO_PI
from .norms import (
    BlochNorm,
    SearchSettings,
    bloch_norm,
    composition_seminorm,
    thread_count,
)
from .symbols import (
    ALPHA_MAX,
    AnalyticMap,
    Compose,
    Identity,
    Mobius,
    Monomial,
    Sigma,
    certify_self_map,
)
from .weights import StandardWeight, Weight

__all__ = [
    "ScanSettings",
    "BoundaryScan",
    "EssentialNormBounds",
    "PowerCriterionResult",
    "CriteriaComparison",
    "UnsupportedWeightError",
    "VERDICT_COMPACT",
    "VERDICT_NONCOMPACT",
    "VERDICT_INCONCLUSIVE",
    "sigma_scan",
    "mobius_scan",
    "essential_bounds",
    "power_criterion_estimate",
    "criteria_compare",
    "lower_constant",
    "upper_constant",
]

VERDICT_COMPACT = "Compact"
VERDICT_NONCOMPACT = "NonCompact"
VERDICT_INCONCLUSIVE = "Inconclusive"


class UnsupportedWeightError(ValueError):
    """The requested criterion only applies to power-weight targets."""


@dataclass(frozen=True)
class ScanSettings:
    """Boundary-ladder layout and verdict thresholds.

    Base points sit at |a| = min(1 - 2^-k, 1 - eps) for k = k_min..k_max with
    `angles` uniform arguments per modulus.  The limsup surrogate is the
    maximum over the last tail_window moduli; the scan converges when that
    window maximum moved by less than rel_tol * L + abs_tol in the last step.
    """

    k_min: int = 3
    k_max: int = 20
    angles: int = 64
    tail_window: int = 4
    compact_tol: float = 1e-3
    noncompact_floor: float | None = None  # defaults to 10 * compact_tol
    rel_tol: float = 0.02
    abs_tol: float = 1e-9
    j_max: int = 256
    search: SearchSettings = field(default_factory=SearchSettings)

    def __post_init__(self):
        if self.k_min < 1 or self.k_max < self.k_min:
            raise ParameterError("need 1 <= k_min <= k_max")
        if self.angles < 1:
            raise ParameterError("angle grid must be nonempty")
        if self.tail_window < 1:
            raise ParameterError("tail_window must be >= 1")
        if not (self.compact_tol > 0.0):
            raise ParameterError("compact_tol must be positive")

    @property
    def floor(self) -> float:
        return (
            self.noncompact_floor
            if self.noncompact_floor is not None
            else 10.0 * self.compact_tol
        )

    def moduli(self) -> tuple[float, ...]:
        cap = 1.0 - self.search.eps_boundary
        out: list[float] = []
        for k in range(self.k_min, self.k_max + 1):
            r = min(1.0 - 2.0 ** (-k), cap)
            if out and r <= out[-1]:
                break
            out.append(r)
        return tuple(out)

    def angle_grid(self) -> tuple[float, ...]:
        return tuple(TWO_PI * m / self.angles for m in range(self.angles))


@dataclass(frozen=True)
class BoundaryScan:
    """Composed norms of a test family over the boundary ladder.

    values holds the full norms |f_a(phi(0))| + seminorm, seminorm_values the
    seminorms alone; the two L estimates are the corresponding tail maxima.
    They agree in the limit (the value-at-zero term vanishes as |a| -> 1) but
    both are reported because the compactness criteria are stated for the
    seminorm while the sandwich uses the full norm.
    """

    family: str
    radii: tuple[float, ...]
    angles: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]
    seminorm_values: tuple[tuple[float, ...], ...]
    tail_max: tuple[float, ...]
    seminorm_tail_max: tuple[float, ...]
    L_estimate: float
    L_seminorm: float
    converged: bool
    tail_window: int


def _window_maxima(tail: np.ndarray, window: int) -> np.ndarray:
    """Running max over the trailing `window` entries, per ladder prefix."""
    return np.array(
        [float(np.max(tail[max(0, i - window + 1) : i + 1])) for i in range(len(tail))]
    )


def _scan(
    phi: AnalyticMap,
    family: str,
    make_test,
    weight: Weight,
    settings: ScanSettings,
) -> BoundaryScan:
    cert = certify_self_map(phi)
    radii = settings.moduli()
    angles = settings.angle_grid()
    phi0 = complex(phi.eval(0j))
    cells = [
        (i, j, r * math.cos(t) + 1j * r * math.sin(t))
        for i, r in enumerate(radii)
        for j, t in enumerate(angles)
    ]

    sem = np.zeros((len(radii), len(angles)))
    full = np.zeros_like(sem)

    def run_cell(cell):
        i, j, a = cell
        test = make_test(a)
        est = composition_seminorm(test, phi, weight, settings.search, cert)
        at0 = float(abs(test.eval(phi0)))
        return i, j, est.value, at0 + est.value

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(c) for c in cells]
    for i, j, s, f in results:
        sem[i, j] = s
        full[i, j] = f

    tail_full = full.max(axis=1)
    tail_sem = sem.max(axis=1)
    win_full = _window_maxima(tail_full, settings.tail_window)
    win_sem = _window_maxima(tail_sem, settings.tail_window)
    L_full = float(win_full[-1])
    L_sem = float(win_sem[-1])
    if len(win_full) >= 2:
        gap = abs(win_full[-1] - win_full[-2])
        converged = gap < settings.rel_tol * L_full + settings.abs_tol
    else:
        converged = False
    return BoundaryScan(
        family=family,
        radii=radii,
        angles=angles,
        values=tuple(tuple(row) for row in full),
        seminorm_values=tuple(tuple(row) for row in sem),
        tail_max=tuple(tail_full),
        seminorm_tail_max=tuple(tail_sem),
        L_estimate=L_full,
        L_seminorm=L_sem,
        converged=bool(converged),
        tail_window=settings.tail_window,
    )


def sigma_scan(
    phi: AnalyticMap,
    alpha: float,
    weight: Weight,
    settings: ScanSettings | None = None,
) -> BoundaryScan:
    """Boundary ladder of ||sigma_a o phi|| against the target weight."""
    if not (0.0 < alpha <= ALPHA_MAX):
        raise ParameterError(f"alpha {alpha} must lie in (0, {ALPHA_MAX}]")
    st = settings or ScanSettings()
    return _scan(phi, "sigma", lambda a: Sigma(alpha, a), weight, st)


def mobius_scan(
    phi: AnalyticMap,
    weight: Weight,
    settings: ScanSettings | None = None,
) -> BoundaryScan:
    """Boundary ladder with the disk automorphisms as test functions."""
    st = settings or ScanSettings()
    return _scan(phi, "mobius", lambda a: Mobius(a), weight, st)


def lower_constant(alpha: float) -> float:
    """Essential norm >= lower_constant(alpha) * L."""
    return 1.0 / (alpha * 2.0 ** alpha)


def upper_constant(alpha: float) -> float:
    """Essential norm <= upper_constant(alpha) * L."""
    return 8.0 / alpha


@dataclass(frozen=True)
class EssentialNormBounds:
    """Two-sided essential-norm estimate from a boundary scan.

    The interval is [L / (alpha 2^alpha), (8 / alpha) L]; its endpoints ratio
    is 2^(alpha + 3) whenever L > 0.  The verdict applies the compactness
    criterion to the seminorm tail: Compact needs a small tail plus a finite
    symbol norm, NonCompact needs a large tail from a converged scan.
    """

    L: float
    lower: float
    upper: float
    alpha: float
    verdict: str
    L_seminorm: float
    symbol_norm: float
    power_criterion: float | None = None


def _verdict(
    L_sem: float,
    converged: bool,
    symbol_norm_finite: bool,
    compact_tol: float,
    floor: float,
) -> str:
    if L_sem < compact_tol and symbol_norm_finite:
        return VERDICT_COMPACT
    if L_sem > floor and converged:
        return VERDICT_NONCOMPACT
    return VERDICT_INCONCLUSIVE


def essential_bounds(
    scan: BoundaryScan,
    alpha: float,
    phi_norm: BlochNorm,
    compact_tol: float = 1e-3,
    noncompact_floor: float | None = None,
) -> EssentialNormBounds:
    """Sandwich the essential norm between the two scan multiples of L."""
    if not (0.0 < alpha <= ALPHA_MAX):
        raise ParameterError(f"alpha {alpha} must lie in (0, {ALPHA_MAX}]")
    floor = noncompact_floor if noncompact_floor is not None else 10.0 * compact_tol
    finite = not phi_norm.seminorm.is_diverging
    return EssentialNormBounds(
        L=scan.L_estimate,
        lower=lower_constant(alpha) * scan.L_estimate,
        upper=upper_constant(alpha) * scan.L_estimate,
        alpha=alpha,
        verdict=_verdict(scan.L_seminorm, scan.converged, finite, compact_tol, floor),
        L_seminorm=scan.L_seminorm,
        symbol_norm=phi_norm.total,
    )


@dataclass(frozen=True)
class PowerCriterionResult:
    """Tail estimate of (e / 2 alpha)^alpha * limsup_j j^(alpha-1) ||phi^j||."""

    value: float
    prefactor: float
    terms: tuple[float, ...]
    tail_start: int  # first index (1-based j) of the tail quarter

    @property
    def tail_terms(self) -> tuple[float, ...]:
        return self.terms[self.tail_start - 1 :]


def power_criterion_estimate(
    phi: AnalyticMap,
    alpha: float,
    beta: float,
    j_max: int = 256,
    settings: SearchSettings | None = None,
) -> PowerCriterionResult:
    """Power-of-the-symbol essential-norm estimate for a v_beta target.

    Computes j^(alpha-1) ||phi^j|| in the beta power-weight norm for
    j = 1..j_max and returns the prefactored maximum over the last quarter
    of indices, the desk-scale surrogate for the limsup in j.
    """
    if j_max < 16:
        raise ParameterError(f"j_max {j_max} must be >= 16")
    if not (0.0 < alpha <= ALPHA_MAX):
        raise ParameterError(f"alpha {alpha} must lie in (0, {ALPHA_MAX}]")
    weight = StandardWeight(beta)
    certify_self_map(phi)
    st = settings or SearchSettings()
    identity_symbol = isinstance(phi, Identity)

    def term(j: int) -> float:
        power = Monomial(j) if identity_symbol else Compose(Monomial(j), phi)
        nrm = bloch_norm(power, weight, st)
        return j ** (alpha - 1.0) * nrm.total

    workers = thread_count()
    js = range(1, j_max + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            terms = list(pool.map(term, js))
    else:
        terms = [term(j) for j in js]
    tail_start = j_max - j_max // 4 + 1
    prefactor = (math.e / (2.0 * alpha)) ** alpha
    value = prefactor * max(terms[tail_start - 1 :])
    return PowerCriterionResult(
        value=float(value),
        prefactor=float(prefactor),
        terms=tuple(terms),
        tail_start=tail_start,
    )


@dataclass(frozen=True)
class CriteriaComparison:
    """Side-by-side run of the three criteria with an agreement check.

    sandwich_ok states whether the power-criterion value lies inside the
    scan sandwich, with 5% relative slack widened by compact_tol absolutely
    (both quantities estimate the same limit, but near-compact symbols push
    both to zero where a purely relative membership test is ill-posed).
    None means the check was not applicable (scan not converged).
    """

    alpha: float
    beta: float
    scan: BoundaryScan
    bounds: EssentialNormBounds
    power: PowerCriterionResult
    mobius: BoundaryScan | None
    verdicts: dict
    agreement: bool
    sandwich_ok: bool | None
    notes: tuple[str, ...]


def criteria_compare(
    phi: AnalyticMap,
    alpha: float,
    beta: float,
    settings: ScanSettings | None = None,
) -> CriteriaComparison:
    """Run scan, power criterion and (when alpha = beta = 1) Moebius scan.

    Verdicts must agree (all zero-limits or all positive); a disagreement is
    reported in the notes, never raised.
    """
    st = settings or ScanSettings()
    weight = StandardWeight(beta)
    phi_n = bloch_norm(phi, weight, st.search)
    scan = sigma_scan(phi, alpha, weight, st)
    bounds = essential_bounds(scan, alpha, phi_n, st.compact_tol, st.floor)
    power = power_criterion_estimate(phi, alpha, beta, st.j_max, st.search)
    bounds = replace(bounds, power_criterion=power.value)

    finite = not phi_n.seminorm.is_diverging
    verdicts = {
        "sigma_scan": bounds.verdict,
        "power_criterion": _verdict(
            power.value, True, finite, st.compact_tol, st.floor
        ),
    }
    mob = None
    if alpha == 1.0 and beta == 1.0:
        mob = mobius_scan(phi, weight, st)
        verdicts["mobius_criterion"] = _verdict(
            mob.L_seminorm, mob.converged, finite, st.compact_tol, st.floor
        )

    notes: list[str] = []
    decided = [v for v in verdicts.values() if v != VERDICT_INCONCLUSIVE]
    agreement = len(set(decided)) <= 1
    if not agreement:
        notes.append(f"criteria disagree: {verdicts}")

    sandwich_ok: bool | None = None
    if scan.converged:
        slack_lo = 0.95 * bounds.lower - st.compact_tol
        slack_hi = 1.05 * bounds.upper + st.compact_tol
        sandwich_ok = slack_lo <= power.value <= slack_hi
        if not sandwich_ok:
            notes.append(
                f"power criterion {power.value:.6g} outside "
                f"[{slack_lo:.6g}, {slack_hi:.6g}]"
            )
    return CriteriaComparison(
        alpha=alpha,
        beta=beta,
        scan=scan,
        bounds=bounds,
        power=power,
        mobius=mob,
        verdicts=verdicts,
        agreement=agreement,
        sandwich_ok=sandwich_ok,
        notes=tuple(notes),
    )
