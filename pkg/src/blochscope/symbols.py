"""Expression trees for analytic maps of the unit disk.

Nodes evaluate pointwise (python complex or numpy arrays) and differentiate
structurally via chain/product rules, so weighted derivative magnitudes can
be maximized without finite differencing.  The node set covers the usual
disk self-map symbols (Moebius, Blaschke, dilations, polynomials) plus the
boundary test family sigma(alpha, a) used by the scans.

Powers with non-integer exponents use the principal branch throughout; the
bases that occur, 1 - conj(a)*z with a and z in the disk, stay in the right
half plane so the branch cut is never crossed.
"""

from __future__ import annotations

import math
import re as _re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .disk import DiskGrid, DiskPoint, make_geometric_grid

__all__ = [
    "AnalyticMap",
    "Constant",
    "Identity",
    "Monomial",
    "Affine",
    "Mobius",
    "Blaschke",
    "Polynomial",
    "Dilation",
    "Compose",
    "Scale",
    "Sum",
    "Product",
    "Sigma",
    "SelfMapCertificate",
    "NotSelfMapError",
    "SymbolSyntaxError",
    "SymbolParameterError",
    "parse_symbol",
    "print_symbol",
    "evaluate",
    "evaluate_derivative",
    "certify_self_map",
    "default_certification_grid",
]

SELF_MAP_TOL = 1e-9
ALPHA_MAX = 8.0


class SymbolParameterError(ValueError):
    """A node parameter is out of its admissible range."""


class SymbolSyntaxError(ValueError):
    """Symbol text does not conform to the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NotSelfMapError(ValueError):
    """The map sends grid points outside the closed unit disk."""


def _require_finite(name: str, *values: complex) -> None:
    for v in values:
        if not (math.isfinite(complex(v).real) and math.isfinite(complex(v).imag)):
            raise SymbolParameterError(f"{name} parameter must be finite, got {v}")


def _require_in_disk(name: str, a: complex) -> None:
    _require_finite(name, a)
    if abs(a) >= 1.0:
        raise SymbolParameterError(f"{name} parameter {a} must satisfy |a| < 1")


@dataclass(frozen=True)
class AnalyticMap:
    """Base node.  Subclasses implement eval/deriv on scalars or arrays."""

    def eval(self, z):
        raise NotImplementedError

    def deriv(self, z):
        raise NotImplementedError

    def spike_scores(self, z) -> list:
        """Smallness measures whose minima flag near-singular evaluation.

        Searches refine around the argmin of each score in addition to the
        plain objective argmax; this is what locates sharply concentrated
        boundary peaks that a uniform grid would step over.
        """
        return []

    def is_radially_symmetric(self) -> bool:
        """True when |self.deriv(z)| and |self.eval(z)| depend on |z| only."""
        return False

    def __str__(self) -> str:
        return print_symbol(self)


@dataclass(frozen=True)
class Constant(AnalyticMap):
    value: complex

    def __post_init__(self):
        _require_finite("const", self.value)

    def eval(self, z):
        return np.full_like(np.asarray(z, dtype=complex), self.value)

    def deriv(self, z):
        return np.zeros_like(np.asarray(z, dtype=complex))

    def is_radially_symmetric(self) -> bool:
        return True


@dataclass(frozen=True)
class Identity(AnalyticMap):
    def eval(self, z):
        return np.asarray(z, dtype=complex)

    def deriv(self, z):
        return np.ones_like(np.asarray(z, dtype=complex))

    def is_radially_symmetric(self) -> bool:
        return True


@dataclass(frozen=True)
class Monomial(AnalyticMap):
    degree: int

    def __post_init__(self):
        if not isinstance(self.degree, int) or self.degree < 1:
            raise SymbolParameterError(f"pow degree {self.degree!r} must be a positive integer")

    def eval(self, z):
        return np.asarray(z, dtype=complex) ** self.degree

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        if self.degree == 1:
            return np.ones_like(z)
        return self.degree * z ** (self.degree - 1)

    def is_radially_symmetric(self) -> bool:
        return True


@dataclass(frozen=True)
class Affine(AnalyticMap):
    """z -> offset + slope * z (coefficients in increasing power order)."""

    offset: complex
    slope: complex

    def __post_init__(self):
        _require_finite("affine", self.offset, self.slope)

    def eval(self, z):
        return self.offset + self.slope * np.asarray(z, dtype=complex)

    def deriv(self, z):
        return np.full_like(np.asarray(z, dtype=complex), self.slope)


@dataclass(frozen=True)
class Mobius(AnalyticMap):
    """Disk automorphism z -> (a - z) / (1 - conj(a) z); swaps 0 and a."""

    a: complex

    def __post_init__(self):
        _require_in_disk("mobius", self.a)

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a - z) / (1.0 - np.conj(self.a) * z)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        return (abs(self.a) ** 2 - 1.0) / (1.0 - np.conj(self.a) * z) ** 2

    def spike_scores(self, z) -> list:
        if self.a == 0:
            return []
        return [np.abs(1.0 - np.conj(self.a) * np.asarray(z, dtype=complex))]


@dataclass(frozen=True)
class Blaschke(AnalyticMap):
    """Finite Blaschke product: factor * prod_k (z_k - z) / (1 - conj(z_k) z)."""

    zeros: tuple[complex, ...]
    factor: complex = 1.0

    def __post_init__(self):
        if len(self.zeros) == 0:
            raise SymbolParameterError("blaschke needs at least one zero")
        for zk in self.zeros:
            _require_in_disk("blaschke zero", zk)
        _require_finite("blaschke factor", self.factor)
        if abs(abs(self.factor) - 1.0) > 1e-12:
            raise SymbolParameterError(f"blaschke factor {self.factor} must be unimodular")

    def _factors(self, z):
        z = np.asarray(z, dtype=complex)
        vals = [(zk - z) / (1.0 - np.conj(zk) * z) for zk in self.zeros]
        ders = [
            (abs(zk) ** 2 - 1.0) / (1.0 - np.conj(zk) * z) ** 2 for zk in self.zeros
        ]
        return vals, ders

    def eval(self, z):
        vals, _ = self._factors(z)
        out = np.full_like(vals[0], self.factor)
        for v in vals:
            out = out * v
        return out

    def deriv(self, z):
        # product rule, summed per factor; safe at the zeros themselves
        vals, ders = self._factors(z)
        n = len(vals)
        total = np.zeros_like(vals[0])
        for k in range(n):
            term = ders[k]
            for j in range(n):
                if j != k:
                    term = term * vals[j]
            total = total + term
        return self.factor * total

    def spike_scores(self, z) -> list:
        z = np.asarray(z, dtype=complex)
        scores = [np.abs(1.0 - np.conj(zk) * z) for zk in self.zeros if zk != 0]
        if not scores:
            return []
        return [np.minimum.reduce(scores)]


@dataclass(frozen=True)
class Polynomial(AnalyticMap):
    """c0 + c1 z + ... + cn z^n."""

    coefficients: tuple[complex, ...]

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise SymbolParameterError("poly needs at least one coefficient")
        _require_finite("poly", *self.coefficients)

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polynomial.polynomial.polyval(z, np.asarray(self.coefficients))

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        c = np.polynomial.polynomial.polyder(np.asarray(self.coefficients))
        if len(c) == 0:
            return np.zeros_like(z)
        return np.polynomial.polynomial.polyval(z, c)


@dataclass(frozen=True)
class Dilation(AnalyticMap):
    """z -> inner(r z) with r in [0, 1]: composition with the r-dilation."""

    r: float
    inner: AnalyticMap

    def __post_init__(self):
        if not (0.0 <= self.r <= 1.0) or not math.isfinite(self.r):
            raise SymbolParameterError(f"dilate factor {self.r} must lie in [0, 1]")

    def eval(self, z):
        return self.inner.eval(self.r * np.asarray(z, dtype=complex))

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        return self.r * self.inner.deriv(self.r * z)

    def spike_scores(self, z) -> list:
        return self.inner.spike_scores(self.r * np.asarray(z, dtype=complex))

    def is_radially_symmetric(self) -> bool:
        return self.inner.is_radially_symmetric()


@dataclass(frozen=True)
class Scale(AnalyticMap):
    factor: complex
    inner: AnalyticMap

    def __post_init__(self):
        _require_finite("scale", self.factor)

    def eval(self, z):
        return self.factor * self.inner.eval(z)

    def deriv(self, z):
        return self.factor * self.inner.deriv(z)

    def spike_scores(self, z) -> list:
        return self.inner.spike_scores(z)

    def is_radially_symmetric(self) -> bool:
        return self.inner.is_radially_symmetric()


@dataclass(frozen=True)
class Compose(AnalyticMap):
    """z -> outer(inner(z))."""

    outer: AnalyticMap
    inner: AnalyticMap

    def eval(self, z):
        return self.outer.eval(self.inner.eval(z))

    def deriv(self, z):
        w = self.inner.eval(z)
        return self.outer.deriv(w) * self.inner.deriv(z)

    def spike_scores(self, z) -> list:
        # outer spikes are pulled back through the inner map
        scores = list(self.inner.spike_scores(z))
        w = self.inner.eval(z)
        scores.extend(self.outer.spike_scores(w))
        return scores

    def is_radially_symmetric(self) -> bool:
        return self.outer.is_radially_symmetric() and self.inner.is_radially_symmetric()


@dataclass(frozen=True)
class Sum(AnalyticMap):
    left: AnalyticMap
    right: AnalyticMap

    def eval(self, z):
        return self.left.eval(z) + self.right.eval(z)

    def deriv(self, z):
        return self.left.deriv(z) + self.right.deriv(z)

    def spike_scores(self, z) -> list:
        return list(self.left.spike_scores(z)) + list(self.right.spike_scores(z))

    def is_radially_symmetric(self) -> bool:
        # adding a constant leaves both |f'| and the self-map profile of the
        # other summand intact only for the derivative; keep the check to
        # derivative-safe cases
        if isinstance(self.left, Constant):
            return self.right.is_radially_symmetric() and self.left.value == 0
        if isinstance(self.right, Constant):
            return self.left.is_radially_symmetric() and self.right.value == 0
        return False


@dataclass(frozen=True)
class Product(AnalyticMap):
    left: AnalyticMap
    right: AnalyticMap

    def eval(self, z):
        return self.left.eval(z) * self.right.eval(z)

    def deriv(self, z):
        return self.left.deriv(z) * self.right.eval(z) + self.left.eval(z) * self.right.deriv(z)

    def spike_scores(self, z) -> list:
        return list(self.left.spike_scores(z)) + list(self.right.spike_scores(z))


@dataclass(frozen=True)
class Sigma(AnalyticMap):
    """Boundary test function (1 - |a|) ((1 - conj(a) z)^-alpha - 1).

    Vanishes at 0, lives in the alpha-Bloch space uniformly in a, and its
    weighted derivative concentrates near z = a as |a| -> 1, which is what
    makes the family useful for boundary scans.
    """

    alpha: float
    a: complex

    def __post_init__(self):
        if not (0.0 < self.alpha <= ALPHA_MAX) or not math.isfinite(self.alpha):
            raise SymbolParameterError(
                f"sigma exponent {self.alpha} must lie in (0, {ALPHA_MAX}]"
            )
        _require_in_disk("sigma", self.a)

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        base = 1.0 - np.conj(self.a) * z
        return (1.0 - abs(self.a)) * (base ** (-self.alpha) - 1.0)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        base = 1.0 - np.conj(self.a) * z
        return self.alpha * np.conj(self.a) * (1.0 - abs(self.a)) * base ** (-self.alpha - 1.0)

    def spike_scores(self, z) -> list:
        if self.a == 0:
            return []
        return [np.abs(1.0 - np.conj(self.a) * np.asarray(z, dtype=complex))]


# ---------------------------------------------------------------------------
# evaluation wrappers


def _to_complex(z) -> complex:
    if isinstance(z, DiskPoint):
        return z.as_complex()
    return complex(z)


def evaluate(m: AnalyticMap, z) -> complex:
    """Value of the map at a single disk point."""
    return complex(m.eval(_to_complex(z)))


def evaluate_derivative(m: AnalyticMap, z) -> complex:
    """Structural derivative of the map at a single disk point."""
    return complex(m.deriv(_to_complex(z)))


# ---------------------------------------------------------------------------
# self-map certification


@dataclass(frozen=True)
class SelfMapCertificate:
    """Grid evidence that a map sends the disk into the closed disk.

    is_strict means the grid supremum stays below 1 - 1e-9; boundary-touching
    maps (identity, inner functions) certify as non-strict.
    """

    sup_modulus_estimate: float
    witness: DiskPoint
    is_strict: bool


@lru_cache(maxsize=4)
def default_certification_grid() -> DiskGrid:
    # deep enough to reach the radius cap, so boundary-touching maps are
    # sampled where they peak
    return make_geometric_grid(depth=21, eps_boundary=1e-6, max_angles=1024)


@lru_cache(maxsize=256)
def _certify_cached(m: AnalyticMap, grid: DiskGrid) -> SelfMapCertificate:
    z = grid.points()
    vals = np.abs(m.eval(z))
    if not np.all(np.isfinite(vals)):
        bad = z[int(np.flatnonzero(~np.isfinite(vals))[0])]
        raise NotSelfMapError(f"map is non-finite at {bad}")
    i = int(np.argmax(vals))
    sup = float(vals[i])
    if sup > 1.0 + SELF_MAP_TOL:
        raise NotSelfMapError(
            f"grid modulus {sup:.6g} at {complex(z[i])} exceeds 1; not a disk self-map"
        )
    # a grid supremum at the grid's own radius cap says nothing about the
    # unsampled boundary band, so strictness is measured against the cap
    strict_cap = (1.0 - grid.eps_boundary) - SELF_MAP_TOL
    return SelfMapCertificate(
        sup_modulus_estimate=sup,
        witness=DiskPoint.from_complex(z[i]),
        is_strict=sup <= strict_cap,
    )


def certify_self_map(m: AnalyticMap, grid: DiskGrid | None = None) -> SelfMapCertificate:
    """Certify numerically that |m| <= 1 on the grid; raise NotSelfMapError otherwise."""
    return _certify_cached(m, grid if grid is not None else default_certification_grid())


# ---------------------------------------------------------------------------
# grammar: parser and canonical printer
#
# expr    := "identity" | "const(" cplx ")" | "pow(" int ")" | "mobius(" cplx ")"
#          | "affine(" cplx "," cplx ")" | "poly(" cplx {"," cplx} ")"
#          | "blaschke(" cplx {"," cplx} ")" | "dilate(" real "," expr ")"
#          | "scale(" cplx "," expr ")" | "compose(" expr "," expr ")"
#          | "sum(" expr "," expr ")" | "product(" expr "," expr ")"
#          | "sigma(" real "," cplx ")"
# cplx    := real | real ("+"|"-") real "i"
# Case- and whitespace-insensitive.

_NUM_RE = _re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME_RE = _re.compile(r"[A-Za-z_]+")


class _Parser:
    def __init__(self, text: str):
        self.text = text.replace("−", "-")  # tolerate typographic minus
        self.pos = 0

    def error(self, message: str):
        raise SymbolSyntaxError(message, self.pos)

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        self._skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            self.error(f"expected '{ch}'")
        self.pos += 1

    def name(self) -> str:
        self._skip_ws()
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a symbol name")
        self.pos = m.end()
        return m.group(0).lower()

    def real(self) -> float:
        self._skip_ws()
        m = _NUM_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return float(m.group(0))

    def integer(self) -> int:
        self._skip_ws()
        start = self.pos
        value = self.real()
        if value != int(value):
            self.pos = start
            self.error("expected an integer")
        return int(value)

    def cplx(self) -> complex:
        re_part = self.real()
        save = self.pos
        self._skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            sign = 1.0 if self.text[self.pos] == "+" else -1.0
            self.pos += 1
            m = _NUM_RE.match(self.text, self.pos)
            if m and self.text[m.end() : m.end() + 1].lower() == "i":
                self.pos = m.end() + 1
                return complex(re_part, sign * float(m.group(0)))
            self.pos = save
        return complex(re_part, 0.0)

    def expr(self) -> AnalyticMap:
        start = self.pos
        word = self.name()
        try:
            return self._node(word)
        except SymbolParameterError as exc:
            raise SymbolSyntaxError(str(exc), start) from exc

    def _node(self, word: str) -> AnalyticMap:
        if word == "identity":
            return Identity()
        if word == "const":
            self.expect("(")
            c = self.cplx()
            self.expect(")")
            return Constant(c)
        if word == "pow":
            self.expect("(")
            j = self.integer()
            self.expect(")")
            return Monomial(j)
        if word == "mobius":
            self.expect("(")
            a = self.cplx()
            self.expect(")")
            return Mobius(a)
        if word == "affine":
            self.expect("(")
            a = self.cplx()
            self.expect(",")
            b = self.cplx()
            self.expect(")")
            return Affine(a, b)
        if word == "poly":
            return Polynomial(tuple(self._cplx_list()))
        if word == "blaschke":
            return Blaschke(tuple(self._cplx_list()))
        if word == "dilate":
            self.expect("(")
            r = self.real()
            self.expect(",")
            inner = self.expr()
            self.expect(")")
            return Dilation(r, inner)
        if word == "scale":
            self.expect("(")
            c = self.cplx()
            self.expect(",")
            inner = self.expr()
            self.expect(")")
            return Scale(c, inner)
        if word == "compose":
            outer, inner = self._expr_pair()
            return Compose(outer, inner)
        if word == "sum":
            left, right = self._expr_pair()
            return Sum(left, right)
        if word == "product":
            left, right = self._expr_pair()
            return Product(left, right)
        if word == "sigma":
            self.expect("(")
            alpha = self.real()
            self.expect(",")
            a = self.cplx()
            self.expect(")")
            return Sigma(alpha, a)
        self.error(f"unknown symbol '{word}'")

    def _cplx_list(self) -> list[complex]:
        self.expect("(")
        items = [self.cplx()]
        while self.peek() == ",":
            self.expect(",")
            items.append(self.cplx())
        self.expect(")")
        return items

    def _expr_pair(self) -> tuple[AnalyticMap, AnalyticMap]:
        self.expect("(")
        first = self.expr()
        self.expect(",")
        second = self.expr()
        self.expect(")")
        return first, second


def parse_symbol(text: str) -> AnalyticMap:
    """Parse symbol text into an expression tree; round-trips print_symbol."""
    p = _Parser(text)
    node = p.expr()
    p._skip_ws()
    if p.pos != len(p.text):
        p.error("trailing input after expression")
    return node


def _fmt_real(x: float) -> str:
    return f"{float(x):.17g}"


def _fmt_cplx(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 or math.isnan(z.imag) else "-"
    return f"{_fmt_real(z.real)}{sign}{_fmt_real(abs(z.imag))}i"


def print_symbol(m: AnalyticMap) -> str:
    """Canonical text form; parse_symbol(print_symbol(m)) evaluates like m."""
    if isinstance(m, Identity):
        return "identity"
    if isinstance(m, Constant):
        return f"const({_fmt_cplx(m.value)})"
    if isinstance(m, Monomial):
        return f"pow({m.degree})"
    if isinstance(m, Mobius):
        return f"mobius({_fmt_cplx(m.a)})"
    if isinstance(m, Affine):
        return f"affine({_fmt_cplx(m.offset)}, {_fmt_cplx(m.slope)})"
    if isinstance(m, Polynomial):
        return "poly(" + ", ".join(_fmt_cplx(c) for c in m.coefficients) + ")"
    if isinstance(m, Blaschke):
        body = "blaschke(" + ", ".join(_fmt_cplx(c) for c in m.zeros) + ")"
        # the grammar has no factor slot; a non-trivial unimodular factor
        # prints as an evaluation-equivalent scale
        if m.factor != 1.0:
            return f"scale({_fmt_cplx(m.factor)}, {body})"
        return body
    if isinstance(m, Dilation):
        return f"dilate({_fmt_real(m.r)}, {print_symbol(m.inner)})"
    if isinstance(m, Scale):
        return f"scale({_fmt_cplx(m.factor)}, {print_symbol(m.inner)})"
    if isinstance(m, Compose):
        return f"compose({print_symbol(m.outer)}, {print_symbol(m.inner)})"
    if isinstance(m, Sum):
        return f"sum({print_symbol(m.left)}, {print_symbol(m.right)})"
    if isinstance(m, Product):
        return f"product({print_symbol(m.left)}, {print_symbol(m.right)})"
    if isinstance(m, Sigma):
        return f"sigma({_fmt_real(m.alpha)}, {_fmt_cplx(m.a)})"
    raise TypeError(f"unknown node type {type(m).__name__}")
