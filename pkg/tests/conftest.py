"""Shared helpers: deterministic tree generation and independent oracles.

The oracles here stay deliberately separate from the engine code paths they
check: finite differences for structural derivatives, dense-grid-plus-scipy
for one-dimensional radial maximization.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from blochscope.symbols import (
    Affine,
    Blaschke,
    Compose,
    Constant,
    Dilation,
    Identity,
    Mobius,
    Monomial,
    Polynomial,
    Scale,
    Sigma,
    Sum,
    Product,
)

FD_STEP = 1e-5


def fd_derivative(m, z: complex, step: float = FD_STEP) -> complex:
    """Independent central finite-difference derivative."""
    return (complex(m.eval(z + step)) - complex(m.eval(z - step))) / (2.0 * step)


def radial_oracle(profile, cap: float = 1.0 - 1e-6) -> float:
    """Independent 1-D maximizer: dense grid plus bounded scalar polish."""
    rr = np.linspace(0.0, cap, 200_001)
    vals = profile(rr)
    i = int(np.argmax(vals))
    lo = rr[max(0, i - 2)]
    hi = rr[min(len(rr) - 1, i + 2)]
    res = minimize_scalar(
        lambda r: -float(profile(np.array([r]))[0]),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-14},
    )
    return max(float(vals[i]), -float(res.fun))


def _rand_disk_point(rng, rmax: float) -> complex:
    return rmax * np.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * np.pi))


def _rand_leaf(rng, tame: bool):
    """A leaf node; `tame` restricts to maps sending the disk into itself."""
    choices = ["identity", "monomial", "mobius", "blaschke"]
    if not tame:
        choices += ["constant", "affine", "poly", "sigma"]
    kind = choices[rng.integers(len(choices))]
    if kind == "identity":
        return Identity()
    if kind == "monomial":
        return Monomial(int(rng.integers(1, 7)))
    if kind == "mobius":
        return Mobius(_rand_disk_point(rng, 0.7))
    if kind == "blaschke":
        n = int(rng.integers(1, 4))
        return Blaschke(tuple(_rand_disk_point(rng, 0.6) for _ in range(n)))
    if kind == "constant":
        return Constant(complex(rng.normal(), rng.normal()))
    if kind == "affine":
        return Affine(_rand_disk_point(rng, 0.5), _rand_disk_point(rng, 0.5))
    if kind == "poly":
        n = int(rng.integers(2, 5))
        coeffs = tuple(0.5 * (rng.normal() + 1j * rng.normal()) for _ in range(n))
        return Polynomial(coeffs)
    return Sigma(float(rng.uniform(0.5, 3.0)), _rand_disk_point(rng, 0.7))


def random_tree(rng, depth: int, tame: bool = False):
    """Random expression tree of the given depth.

    Compose inners are always tame (disk self-maps), which keeps every
    subexpression away from its poles on |z| <= 0.9 and makes the finite
    difference comparison well conditioned.
    """
    if depth <= 0:
        return _rand_leaf(rng, tame)
    kinds = ["compose", "sum", "product", "scale", "dilate"] if not tame else [
        "dilate",
        "compose_tame",
    ]
    kind = kinds[rng.integers(len(kinds))]
    if kind == "compose":
        return Compose(random_tree(rng, depth - 1, tame=False), random_tree(rng, depth - 1, tame=True))
    if kind == "compose_tame":
        return Compose(random_tree(rng, depth - 1, tame=True), random_tree(rng, depth - 1, tame=True))
    if kind == "sum":
        return Sum(random_tree(rng, depth - 1, tame), random_tree(rng, depth - 1, tame))
    if kind == "product":
        return Product(random_tree(rng, depth - 1, tame), random_tree(rng, depth - 1, tame))
    if kind == "scale":
        return Scale(complex(rng.normal(), rng.normal()), random_tree(rng, depth - 1, tame))
    return Dilation(float(rng.uniform(0.3, 1.0)), random_tree(rng, depth - 1, tame))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
