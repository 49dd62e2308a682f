"""The boundary test family sigma(alpha, a) and its closed-form inequalities.

For a in the disk, sigma_a(z) = (1 - |a|) ((1 - conj(a) z)^-alpha - 1).  The
family is uniformly bounded in the alpha-Bloch norm by alpha * 2^alpha, its
derivative at z = a dominates alpha / (4 (1 - |a|^2)^alpha) once |a| > 1/2,
and it vanishes uniformly on compact subsets as |a| -> 1.  Those three facts
are what the essential-norm scans lean on; the checks here evaluate the
closed forms directly so grid error never enters the inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disk import TWO_PI
from .symbols import ALPHA_MAX, Sigma, SymbolParameterError

__all__ = [
    "SigmaFamily",
    "DomainError",
    "sigma_eval",
    "sigma_derivative",
    "sigma_norm_cap",
    "derivative_floor",
    "check_derivative_lower_bound",
    "check_uniform_vanishing",
]


class DomainError(ValueError):
    """A closed-form check was requested outside its domain of validity."""


@dataclass(frozen=True)
class SigmaFamily:
    """One member of the test family, pinned to an exponent and a base point."""

    alpha: float
    a: complex

    def __post_init__(self):
        # Sigma validates alpha in (0, ALPHA_MAX] and |a| < 1
        object.__setattr__(self, "a", complex(self.a))
        Sigma(self.alpha, self.a)

    def as_map(self) -> Sigma:
        """The family member as an expression-tree node (norm-engine input)."""
        return Sigma(self.alpha, self.a)

    def normalized_map(self):
        """Member divided by alpha * 2^alpha, so its Bloch norm is <= 1."""
        from .symbols import Scale

        return Scale(1.0 / sigma_norm_cap(self.alpha), self.as_map())


def sigma_eval(fam: SigmaFamily, z) -> complex:
    """(1 - |a|) ((1 - conj(a) z)^-alpha - 1) via the principal branch."""
    z = complex(z) if not hasattr(z, "as_complex") else z.as_complex()
    base = 1.0 - fam.a.conjugate() * z
    return (1.0 - abs(fam.a)) * (base ** (-fam.alpha) - 1.0)


def sigma_derivative(fam: SigmaFamily, z) -> complex:
    """Closed-form derivative alpha conj(a) (1 - |a|) (1 - conj(a) z)^-(alpha+1)."""
    z = complex(z) if not hasattr(z, "as_complex") else z.as_complex()
    base = 1.0 - fam.a.conjugate() * z
    return fam.alpha * fam.a.conjugate() * (1.0 - abs(fam.a)) * base ** (-fam.alpha - 1.0)


def sigma_norm_cap(alpha: float) -> float:
    """Uniform alpha-Bloch norm bound alpha * 2^alpha for the whole family."""
    if not (0.0 < alpha <= ALPHA_MAX):
        raise SymbolParameterError(f"exponent {alpha} must lie in (0, {ALPHA_MAX}]")
    return alpha * 2.0 ** alpha


def derivative_floor(alpha: float, a: complex) -> float:
    """Lower bound alpha / (4 (1 - |a|^2)^alpha) for |sigma_a'(a)|, |a| > 1/2."""
    return alpha / (4.0 * (1.0 - abs(complex(a)) ** 2) ** alpha)


def check_derivative_lower_bound(alpha: float, a: complex) -> bool:
    """Check |sigma_a'(a)| >= alpha / (4 (1 - |a|^2)^alpha) at a single a.

    Valid for 1/2 < |a| < 1; uses the closed-form derivative so the margin
    reflects the inequality itself, not grid error.  Allows 1e-12 slack.
    """
    a = complex(a)
    mod = abs(a)
    if not (0.5 < mod < 1.0):
        raise DomainError(f"|a| = {mod} outside (1/2, 1)")
    fam = SigmaFamily(alpha, a)
    lhs = abs(sigma_derivative(fam, a))
    return lhs >= derivative_floor(alpha, a) - 1e-12


def check_uniform_vanishing(
    alpha: float, rho: float, radii, n_angles: int = 720
) -> list[float]:
    """sup_{|z| <= rho} |sigma_a(z)| for each |a| in radii.

    By the maximum principle the sup over the closed rho-disk is attained on
    the circle |z| = rho, so a single dense circle suffices.  The returned
    sequence decreases toward 0 as |a| -> 1.
    """
    if not (0.0 < rho < 1.0):
        raise DomainError(f"rho = {rho} outside (0, 1)")
    circle = rho * np.exp(1j * TWO_PI * np.arange(n_angles) / n_angles)
    out = []
    for mod in radii:
        if not (0.0 <= mod < 1.0):
            raise DomainError(f"|a| = {mod} outside [0, 1)")
        node = Sigma(alpha, complex(mod)) if mod > 0 else None
        if node is None:
            out.append(0.0)
            continue
        out.append(float(np.max(np.abs(node.eval(circle)))))
    return out
