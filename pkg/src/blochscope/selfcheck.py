"""Built-in property suite behind the `selfcheck` CLI command.

Fast, deterministic spot checks of the numerical core: closed-form identities,
derivative consistency, norm inequalities and the parser round-trip.  Each
check returns (name, passed, detail); the CLI prints one line per check.
"""

from __future__ import annotations

import numpy as np

from .norms import SearchSettings, bloch_norm, bloch_seminorm, dilate_and_norm
from .sigma_family import (
    SigmaFamily,
    check_derivative_lower_bound,
    sigma_norm_cap,
)
from .symbols import (
    Identity,
    Monomial,
    Polynomial,
    Sigma,
    evaluate,
    evaluate_derivative,
    parse_symbol,
    print_symbol,
)
from .weights import StandardWeight, check_dilation_inequality

FD_STEP = 1e-5


def _fd_derivative(m, z: complex) -> complex:
    return (complex(m.eval(z + FD_STEP)) - complex(m.eval(z - FD_STEP))) / (2 * FD_STEP)


def _check_dilation_weight() -> tuple[str, bool, str]:
    rng = np.random.default_rng(101)
    samples = []
    for _ in range(300):
        r = rng.uniform(0.01, 0.99)
        rad = np.sqrt(rng.uniform(0, 0.9999))
        theta = rng.uniform(0, 2 * np.pi)
        samples.append((r, rad * np.exp(1j * theta)))
    ok = all(
        check_dilation_inequality(alpha, samples) for alpha in (0.5, 1.0, 2.0)
    )
    return "dilation weight inequality", ok, "300 samples x 3 exponents"


def _check_derivatives() -> tuple[str, bool, str]:
    rng = np.random.default_rng(202)
    maps = [
        Identity(),
        Monomial(3),
        parse_symbol("compose(pow(2), mobius(0.3+0.2i))"),
        parse_symbol("product(mobius(0.5+0i), poly(1, 0, -0.5))"),
        Sigma(1.5, 0.6 + 0.2j),
        parse_symbol("dilate(0.8, blaschke(0.3+0i, -0.2+0.4i))"),
    ]
    worst = 0.0
    for m in maps:
        for _ in range(5):
            z = 0.8 * np.sqrt(rng.uniform(0, 1)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            exact = evaluate_derivative(m, complex(z))
            approx = _fd_derivative(m, complex(z))
            if abs(exact) > 1e-8:
                worst = max(worst, abs(exact - approx) / abs(exact))
    return "structural vs finite-difference derivative", worst < 1e-6, f"worst rel err {worst:.2e}"


def _check_sigma_norm_bound() -> tuple[str, bool, str]:
    rng = np.random.default_rng(303)
    st = SearchSettings()
    ok = True
    for _ in range(20):
        alpha = rng.uniform(0.1, 8.0)
        a = np.sqrt(rng.uniform(0, 1)) * (1 - 1e-6) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        fam = SigmaFamily(alpha, complex(a))
        nrm = bloch_norm(fam.as_map(), StandardWeight(alpha), st)
        if nrm.total > sigma_norm_cap(alpha) + 1e-9:
            ok = False
    return "sigma family norm cap", ok, "20 random (alpha, a)"


def _check_derivative_floor() -> tuple[str, bool, str]:
    mods = np.arange(0.51, 1.0, 0.03)
    ok = all(
        check_derivative_lower_bound(alpha, m)
        for alpha in (0.5, 1.0, 2.0, 4.0)
        for m in mods
    )
    return "sigma derivative floor", ok, f"{4 * len(mods)} closed-form checks"


def _check_contraction() -> tuple[str, bool, str]:
    rng = np.random.default_rng(404)
    st = SearchSettings().tight()
    ok = True
    for _ in range(5):
        coeffs = tuple(rng.normal(size=4) + 1j * rng.normal(size=4))
        f = Polynomial(coeffs)
        for r in (0.3, 0.9):
            full, dilated = dilate_and_norm(f, r, 1.0, st)
            if dilated.total > full.total + 1e-9:
                ok = False
    return "dilation contraction", ok, "5 polynomials x 2 factors"


def _check_roundtrip() -> tuple[str, bool, str]:
    texts = [
        "identity",
        "compose(pow(2), dilate(0.9, identity))",
        "sum(mobius(0.25-0.5i), scale(2+0i, poly(0, 1, 0.125)))",
        "sigma(2.5, 0.7+0.1i)",
    ]
    worst = 0.0
    pts = [0.1 + 0.2j, -0.5 + 0.1j, 0.3 - 0.6j]
    for text in texts:
        m1 = parse_symbol(text)
        m2 = parse_symbol(print_symbol(m1))
        for z in pts:
            worst = max(worst, abs(evaluate(m1, z) - evaluate(m2, z)))
    return "parser round-trip", worst < 1e-12, f"worst diff {worst:.2e}"


def _check_radial_equivalence() -> tuple[str, bool, str]:
    w = StandardWeight(1.0)
    fast = bloch_seminorm(Monomial(8), w, SearchSettings())
    full = bloch_seminorm(Monomial(8), w, SearchSettings(use_radial_fast_path=False))
    rel = abs(fast.value - full.value) / fast.value
    return "radial fast path vs 2-D search", rel < 1e-6, f"rel diff {rel:.2e}"


def run_selfcheck() -> list[tuple[str, bool, str]]:
    checks = [
        _check_dilation_weight,
        _check_derivatives,
        _check_sigma_norm_bound,
        _check_derivative_floor,
        _check_contraction,
        _check_roundtrip,
        _check_radial_equivalence,
    ]
    return [c() for c in checks]
