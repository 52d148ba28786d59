"""The three explicit triangle-free families and their proven rate bounds.

* hamming(r):        f = (x_r+1)(x_{r+1}+1) + x_r (x_1+1)...(x_{r-1}+1)      in P_{r+1}
* seven_eighths(k):  short cubic term plus three long terms on k-blocks        in P_{3k+3}
* generalized(r, k): short product over r top variables plus m = 2^{r-1}-1
                     long terms h_i * prod_j (x_{ik+j}+1)                       in P_{mk+r}
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from . import algebra
from .algebra import AlgebraElement, monomial, shifted_product
from .errors import ParameterError

FAMILIES = ("hamming", "seven_eighths", "generalized")


@dataclass(frozen=True)
class FamilyInstance:
    family: str
    r: int | None
    k: int | None
    element: AlgebraElement
    rate_lower: Fraction
    rate_upper: Fraction

    @property
    def arity(self) -> int:
        return self.element.arity

    @property
    def params(self) -> dict:
        return {key: val for key, val in (("r", self.r), ("k", self.k)) if val is not None}

    def label(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.family}({inner})"

    def sidecar(self) -> dict:
        return {
            "family": self.family,
            **self.params,
            "arity": self.arity,
            "vertices": 1 << self.arity,
            "support_size": self.element.weight,
            "rate_lower": str(self.rate_lower),
            "rate_upper": str(self.rate_upper),
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n"


def _mask(*indices: int) -> int:
    out = 0
    for i in indices:
        out |= 1 << (i - 1)
    return out


def long_term_count(r: int) -> int:
    """m = 2^{r-1} - 1."""
    return (1 << (r - 1)) - 1


def hamming_element(r: int) -> FamilyInstance:
    if r < 2:
        raise ParameterError(f"hamming family needs r >= 2, got {r}")
    n = r + 1
    f = shifted_product(n, [r, r + 1]) + monomial(n, _mask(r)) * shifted_product(n, range(1, r))
    lower = Fraction(3, 4) * (1 - Fraction(1, 2 ** (r - 1)))
    return FamilyInstance("hamming", r, None, f, lower, Fraction(3, 4))


def seven_eighths_element(k: int) -> FamilyInstance:
    if k < 1:
        raise ParameterError(f"seven_eighths family needs k >= 1, got {k}")
    n = 3 * k + 3
    a, b, c = 3 * k + 1, 3 * k + 2, 3 * k + 3
    f = shifted_product(n, [a, b, c])
    f = f + monomial(n, _mask(a, b)) * shifted_product(n, range(1, k + 1))
    f = f + monomial(n, _mask(a, c)) * shifted_product(n, range(k + 1, 2 * k + 1))
    f = f + monomial(n, _mask(b, c)) * shifted_product(n, range(2 * k + 1, 3 * k + 1))
    lower = Fraction(7, 8) * (1 - Fraction(1, 2**k)) ** 3
    return FamilyInstance("seven_eighths", None, k, f, lower, Fraction(7, 8))


def even_top_masks(r: int) -> list[int]:
    """Nonzero even-weight r-bit masks in ascending order (the h_i exponents)."""
    return [s for s in range(1, 1 << r) if bin(s).count("1") % 2 == 0]


def generalized_element(r: int, k: int) -> FamilyInstance:
    if r < 2:
        raise ParameterError(f"generalized family needs r >= 2, got {r}")
    if k < 1:
        raise ParameterError(f"generalized family needs k >= 1, got {k}")
    m = long_term_count(r)
    n = m * k + r
    top = range(m * k + 1, m * k + r + 1)
    f = shifted_product(n, top)
    for i, s in enumerate(even_top_masks(r)):
        h = monomial(n, s << (m * k))
        f = f + h * shifted_product(n, range(i * k + 1, i * k + k + 1))
    upper = 1 - Fraction(1, 2**r)
    lower = upper * (1 - Fraction(1, 2**k)) ** m
    return FamilyInstance("generalized", r, k, f, lower, upper)


def build(family: str, r: int | None = None, k: int | None = None) -> FamilyInstance:
    if family == "hamming":
        if r is None:
            raise ParameterError("hamming family needs --r")
        return hamming_element(r)
    if family == "seven_eighths":
        if k is None:
            raise ParameterError("seven_eighths family needs --k")
        return seven_eighths_element(k)
    if family == "generalized":
        if r is None or k is None:
            raise ParameterError("generalized family needs --r and --k")
        return generalized_element(r, k)
    raise ParameterError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def family_bounds(instance: FamilyInstance) -> tuple[Fraction, Fraction]:
    return instance.rate_lower, instance.rate_upper


def annihilating_products(instance: FamilyInstance) -> list[AlgebraElement]:
    """Products with one factor (x_i+1) from each block of the proven inclusion.

    Each one lies in ann(f); the blocks are the top variables of the short
    term followed by the variable block of every long term.
    """
    f = instance.element
    n = f.arity
    if instance.family == "hamming":
        r = instance.r
        blocks = [[r, r + 1], list(range(1, r))]
    elif instance.family == "seven_eighths":
        k = instance.k
        blocks = [[3 * k + 1, 3 * k + 2, 3 * k + 3]] + [
            list(range(b * k + 1, b * k + k + 1)) for b in range(3)
        ]
    else:
        r, k = instance.r, instance.k
        m = long_term_count(r)
        blocks = [list(range(m * k + 1, m * k + r + 1))] + [
            list(range(i * k + 1, i * k + k + 1)) for i in range(m)
        ]
    return [shifted_product(n, choice) for choice in itertools.product(*blocks)]


@dataclass(frozen=True)
class SparsityRow:
    r: int
    k: int
    vertices: int
    predicted_degree: int
    actual_degree: int
    edge_count: int
    exponent_estimate: float

    @property
    def degree_gap(self) -> int:
        return self.predicted_degree - self.actual_degree


def predicted_degree(r: int, k: int) -> int:
    """The published count 2^{r-1} + (2^{r-1}-1) 2^k."""
    return (1 << (r - 1)) + long_term_count(r) * (1 << k)


def exact_degree(r: int, k: int) -> int:
    """2^{r-1} + (2^{r-1}-1)(2^k-1): each bare h_i cancels its short-term twin."""
    return (1 << (r - 1)) + long_term_count(r) * ((1 << k) - 1)


def limiting_exponent(r: int) -> Fraction:
    return 1 + Fraction(1, long_term_count(r))


def sparsity_check(r: int, k: int) -> SparsityRow:
    inst = generalized_element(r, k)
    n = inst.arity
    degree = inst.element.weight - 1  # drop the zero mask
    edges = (1 << n) * degree // 2
    exponent = math.log2(edges) / n
    return SparsityRow(r, k, 1 << n, predicted_degree(r, k), degree, edges, exponent)


def top_product_count(instance: FamilyInstance) -> int:
    """How often the product of all top variables occurs in f + 1 (as a sub-monomial)."""
    f = instance.element
    if instance.family == "hamming":
        top = _mask(instance.r, instance.r + 1)
    elif instance.family == "seven_eighths":
        k = instance.k
        top = _mask(3 * k + 1, 3 * k + 2, 3 * k + 3)
    else:
        m = long_term_count(instance.r)
        top = ((1 << instance.r) - 1) << (m * instance.k)
    g = f + algebra.one(f.arity)
    return sum(1 for s in algebra.support(g) if s & top == top)
