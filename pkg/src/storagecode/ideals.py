"""Ideals and annihilators of P_n computed through multiplication operators.

An ideal is stored by its generators; its underlying subspace is the span of
``x^v * g`` over all monomials v and generators g. Dimensions always come from
an explicit GF(2) elimination of those rows.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import algebra
from .algebra import AlgebraElement, shifted, shifted_product
from .errors import ArityError, ParameterError, ResourceError
from .gf2 import (
    SpanBuilder,
    SubspaceBasis,
    check_dense_arity,
    mult_operator_matrix,
    nullspace,
    pack_bits,
    subspace_intersection,
)

DEFAULT_SEED = 7
DEFAULT_PARTITIONS = 50
MAX_VERIFY_ARITY = 12


@dataclass(frozen=True)
class IdealHandle:
    arity: int
    generators: tuple[AlgebraElement, ...]

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        for g in gens:
            if g.arity != self.arity:
                raise ArityError(f"generator of arity {g.arity} in an ideal of P_{self.arity}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def principal(cls, f: AlgebraElement) -> "IdealHandle":
        return cls(f.arity, (f,))

    def __add__(self, other: "IdealHandle") -> "IdealHandle":
        return ideal_sum(self, other)

    def __mul__(self, other: "IdealHandle") -> "IdealHandle":
        return ideal_product(self, other)

    def basis(self) -> SubspaceBasis:
        return ideal_basis(self)

    @property
    def dim(self) -> int:
        return ideal_dim(self)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.dim, 1 << self.arity)


def _translate_rows(g: AlgebraElement) -> np.ndarray:
    """Packed rows x^v * g for all monomials v."""
    return mult_operator_matrix(g).data


def _builder(ideal: IdealHandle) -> SpanBuilder:
    check_dense_arity(ideal.arity)
    builder = SpanBuilder(1 << ideal.arity)
    for g in ideal.generators:
        if builder.full:
            break
        if not g:
            continue
        # the span so far is itself an ideal, so a member generator adds nothing
        if builder.dim and builder.contains(pack_bits(g.coeffs[None, :])[0]):
            continue
        builder.add_rows(_translate_rows(g))
    return builder


def ideal_basis(ideal: IdealHandle) -> SubspaceBasis:
    return _builder(ideal).basis()


def ideal_dim(ideal: IdealHandle) -> int:
    return _builder(ideal).dim


def ideal_rate(ideal: IdealHandle) -> Fraction:
    return Fraction(ideal_dim(ideal), 1 << ideal.arity)


def _same_arity(a: IdealHandle, b: IdealHandle) -> None:
    if a.arity != b.arity:
        raise ArityError(f"arity mismatch: {a.arity} vs {b.arity}")


def ideal_sum(a: IdealHandle, b: IdealHandle) -> IdealHandle:
    _same_arity(a, b)
    return IdealHandle(a.arity, a.generators + b.generators)


def ideal_product(a: IdealHandle, b: IdealHandle) -> IdealHandle:
    _same_arity(a, b)
    gens = []
    seen = set()
    for f, g in itertools.product(a.generators, b.generators):
        h = algebra.mul(f, g)
        if h not in seen:
            seen.add(h)
            gens.append(h)
    return IdealHandle(a.arity, tuple(gens))


def annihilator_basis(f: AlgebraElement) -> SubspaceBasis:
    return nullspace(mult_operator_matrix(f))


def annihilator_dim(f: AlgebraElement) -> int:
    return annihilator_basis(f).dim


def annihilator_contains(f: AlgebraElement, candidate: AlgebraElement) -> bool:
    return not algebra.mul(f, candidate)


def shifted_sum_ideal(arity: int, indices: Sequence[int]) -> IdealHandle:
    """sum_{i in indices} <x_i + 1>."""
    return IdealHandle(arity, tuple(shifted(arity, i) for i in indices))


def shifted_product_ideal(arity: int, indices: Sequence[int]) -> IdealHandle:
    """prod_{i in indices} <x_i + 1>, generated by the single product."""
    return IdealHandle(arity, (shifted_product(arity, indices),))


def block_product_ideal(arity: int, blocks: Sequence[Sequence[int]]) -> IdealHandle:
    """prod over blocks of (sum_{j in block} <x_j + 1>)."""
    out = IdealHandle(arity, (algebra.one(arity),))
    for block in blocks:
        out = ideal_product(out, shifted_sum_ideal(arity, block))
    return out


# ------------------------------------------------------------ verification


@dataclass
class CheckItem:
    name: str
    passed: bool = True
    cases: int = 0
    details: list = field(default_factory=list)
    counterexample: dict | None = None

    def record(self, ok: bool, case: dict) -> None:
        self.cases += 1
        if not ok:
            self.passed = False
            if self.counterexample is None:
                self.counterexample = case

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "details": self.details,
            "counterexample": self.counterexample,
        }


@dataclass
class IdealReport:
    arity: int
    seed: int
    partitions: int
    items: list[CheckItem]

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def item(self, name: str) -> CheckItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "arity": self.arity,
            "seed": self.seed,
            "partitions": self.partitions,
            "passed": self.passed,
            "items": [it.to_dict() for it in self.items],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def random_blocks(n: int, rng: np.random.Generator) -> list[list[int]]:
    """Two or three disjoint nonempty variable blocks drawn from x_1..x_n."""
    if n < 2:
        raise ParameterError("need at least two variables for a block partition")
    t = int(rng.integers(2, min(3, n) + 1))
    total = int(rng.integers(t, n + 1))
    cuts = sorted(rng.choice(np.arange(1, total), size=t - 1, replace=False).tolist())
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [total])]
    chosen = (rng.permutation(n)[:total] + 1).tolist()
    blocks, pos = [], 0
    for size in sizes:
        blocks.append(sorted(chosen[pos : pos + size]))
        pos += size
    return blocks


def verify_ideal_identities(
    n: int, seed: int = DEFAULT_SEED, partitions: int = DEFAULT_PARTITIONS
) -> IdealReport:
    """Check the annihilator/ideal identities of P_n by direct elimination.

    Items: ``annihilator_equals_ideal`` (ann(x_i+1) = <x_i+1> as spans),
    ``intersection_equals_product``, ``product_rate`` (prod of k ideals has
    dimension 2^{n-k}), ``sum_rate`` (sum of k ideals has dimension
    2^n - 2^{n-k}) and ``rate_multiplicative`` over random disjoint blocks.
    Failures are reported, never raised.
    """
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    if n > MAX_VERIFY_ARITY:
        raise ResourceError(f"identity verification is capped at n={MAX_VERIFY_ARITY}, got {n}")
    full = 1 << n

    ann_item = CheckItem("annihilator_equals_ideal")
    for i in range(1, n + 1):
        g = shifted(n, i)
        ann = annihilator_basis(g)
        ideal = ideal_basis(IdealHandle.principal(g))
        ok = ann.same_span(ideal)
        ann_item.record(ok, {"i": i, "ann_dim": ann.dim, "ideal_dim": ideal.dim})
        ann_item.details.append({"i": i, "dim": ideal.dim})

    prod_item = CheckItem("product_rate")
    cap_item = CheckItem("intersection_equals_product")
    products = {}
    for k in range(1, n + 1):
        basis = ideal_basis(shifted_product_ideal(n, range(1, k + 1)))
        products[k] = basis
        prod_item.record(basis.dim == full >> k, {"k": k, "dim": basis.dim, "expected": full >> k})
        prod_item.details.append({"k": k, "dim": basis.dim})
    for k in range(1, n):
        cap = subspace_intersection(products[k], ideal_basis(IdealHandle.principal(shifted(n, k + 1))))
        ok = cap.same_span(products[k + 1])
        cap_item.record(ok, {"k": k, "intersection_dim": cap.dim, "product_dim": products[k + 1].dim})
        cap_item.details.append({"k": k, "dim": cap.dim})

    sum_item = CheckItem("sum_rate")
    for k in range(1, n + 1):
        d = ideal_dim(shifted_sum_ideal(n, range(1, k + 1)))
        expected = full - (full >> k)
        sum_item.record(d == expected, {"k": k, "dim": d, "expected": expected})
        sum_item.details.append({"k": k, "dim": d})

    mult_item = CheckItem("rate_multiplicative")
    if n >= 2:
        rng = np.random.default_rng([seed, n])
        for _ in range(partitions):
            blocks = random_blocks(n, rng)
            block_dims = [ideal_dim(shifted_sum_ideal(n, b)) for b in blocks]
            prod_dim = ideal_dim(block_product_ideal(n, blocks))
            lhs = prod_dim * full ** (len(blocks) - 1)
            rhs = 1
            for d in block_dims:
                rhs *= d
            case = {"blocks": blocks, "block_dims": block_dims, "product_dim": prod_dim}
            mult_item.record(lhs == rhs, case)
            mult_item.details.append(case)

    items = [ann_item, prod_item, cap_item, sum_item, mult_item]
    return IdealReport(n, seed, partitions, items)
