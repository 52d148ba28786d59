"""Arithmetic in P_n = F_2[x_1..x_n]/(x_i^2 - 1), the group algebra of (Z/2)^n.

An element is a coefficient vector of length 2^n indexed by monomial masks:
bit ``i-1`` of a mask is set iff ``x_i`` occurs in the monomial. The group
operation on monomials is XOR of masks, so a product is an XOR-convolution.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ArityError, ParameterError, ParseError, ResourceError

ALGEBRA_MAX_ARITY = 24


def _check_arity(arity: int) -> None:
    if arity < 1:
        raise ParameterError(f"arity must be positive, got {arity}")
    if arity > ALGEBRA_MAX_ARITY:
        raise ResourceError(
            f"arity {arity} exceeds the algebra ceiling {ALGEBRA_MAX_ARITY} "
            f"({2 ** arity} coefficients per element)"
        )


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class AlgebraElement:
    """Immutable element of P_n stored as a uint8 0/1 vector of length 2^n."""

    __slots__ = ("arity", "coeffs")

    def __init__(self, arity: int, coeffs) -> None:
        _check_arity(arity)
        arr = np.array(coeffs, dtype=np.uint8).reshape(-1) & 1
        if arr.size != 1 << arity:
            raise ParameterError(
                f"coefficient vector has length {arr.size}, expected {1 << arity}"
            )
        self.arity = arity
        self.coeffs = _frozen(arr)

    @classmethod
    def _wrap(cls, arity: int, arr: np.ndarray) -> "AlgebraElement":
        # trusted constructor: arr is a fresh 0/1 uint8 array of the right size
        obj = cls.__new__(cls)
        obj.arity = arity
        obj.coeffs = _frozen(arr)
        return obj

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.arity == other.arity and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.arity, self.coeffs.tobytes()))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return add(self, other)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return mul(self, other)

    def __bool__(self) -> bool:
        return bool(self.coeffs.any())

    def __repr__(self) -> str:
        text = format_polynomial(self)
        if len(text) > 80:
            text = text[:77] + "..."
        return f"AlgebraElement(n={self.arity}, {text})"

    @property
    def weight(self) -> int:
        return int(self.coeffs.sum())

    @property
    def constant_term(self) -> int:
        return int(self.coeffs[0])


def zero(arity: int) -> AlgebraElement:
    _check_arity(arity)
    return AlgebraElement._wrap(arity, np.zeros(1 << arity, dtype=np.uint8))


def one(arity: int) -> AlgebraElement:
    return monomial(arity, 0)


def monomial(arity: int, mask: int) -> AlgebraElement:
    return elem_from_monomials(arity, [mask])


def variable(arity: int, i: int) -> AlgebraElement:
    """The generator x_i (1-indexed)."""
    if not 1 <= i <= arity:
        raise ParameterError(f"variable index {i} outside 1..{arity}")
    return monomial(arity, 1 << (i - 1))


def shifted(arity: int, i: int) -> AlgebraElement:
    """x_i + 1."""
    if not 1 <= i <= arity:
        raise ParameterError(f"variable index {i} outside 1..{arity}")
    return elem_from_monomials(arity, [0, 1 << (i - 1)])


def shifted_product(arity: int, indices: Iterable[int]) -> AlgebraElement:
    """prod_{i in indices} (x_i + 1); the empty product is 1."""
    out = one(arity)
    for i in indices:
        out = mul(out, shifted(arity, i))
    return out


def elem_from_monomials(arity: int, masks: Iterable[int]) -> AlgebraElement:
    """Sum of monomials; repeated masks cancel in pairs."""
    _check_arity(arity)
    size = 1 << arity
    arr = np.zeros(size, dtype=np.uint8)
    for m in masks:
        m = int(m)
        if not 0 <= m < size:
            raise ParameterError(f"mask {m:#x} out of range for arity {arity}")
        arr[m] ^= 1
    return AlgebraElement._wrap(arity, arr)


def _same_arity(a: AlgebraElement, b: AlgebraElement) -> None:
    if a.arity != b.arity:
        raise ArityError(f"arity mismatch: {a.arity} vs {b.arity}")


def add(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _same_arity(a, b)
    return AlgebraElement._wrap(a.arity, a.coeffs ^ b.coeffs)


def translate(a: AlgebraElement, mask: int) -> AlgebraElement:
    """x^mask * a, i.e. the coefficient vector permuted by XOR with ``mask``."""
    idx = np.arange(1 << a.arity, dtype=np.int64) ^ int(mask)
    return AlgebraElement._wrap(a.arity, a.coeffs[idx])


def mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _same_arity(a, b)
    if a.weight > b.weight:
        a, b = b, a
    idx = np.arange(1 << a.arity, dtype=np.int64)
    out = np.zeros(1 << a.arity, dtype=np.uint8)
    for u in np.flatnonzero(a.coeffs):
        out ^= b.coeffs[idx ^ u]
    return AlgebraElement._wrap(a.arity, out)


def support(a: AlgebraElement) -> set[int]:
    return {int(m) for m in np.flatnonzero(a.coeffs)}


def variable_mask(a: AlgebraElement) -> int:
    """OR of all support masks: the set of variables the element depends on."""
    acc = 0
    for m in np.flatnonzero(a.coeffs):
        acc |= int(m)
    return acc


def disjoint_variables(a: AlgebraElement, b: AlgebraElement) -> bool:
    _same_arity(a, b)
    return variable_mask(a) & variable_mask(b) == 0


# ---------------------------------------------------------------- B2 basis


def superset_sum(vec: np.ndarray) -> np.ndarray:
    """out[s] = XOR of vec[t] over all t containing s. An involution over F_2."""
    out = np.array(vec, dtype=np.uint8).copy()
    size = out.size
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ParameterError(f"length {size} is not a power of two")
    for i in range(n):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 0, :] ^= view[:, 1, :]
    return out


@dataclass(frozen=True, eq=False)
class B2Coordinates:
    """Coordinates w.r.t. the shifted basis {prod (x_i+1)^{s_i}}, indexed by s."""

    arity: int
    coords: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, B2Coordinates):
            return NotImplemented
        return self.arity == other.arity and np.array_equal(self.coords, other.coords)

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=np.uint8) & 1
        if coords.shape != (1 << self.arity,):
            raise ParameterError(f"B2 coordinates need length {1 << self.arity}, got {coords.shape}")
        object.__setattr__(self, "coords", coords)

    @property
    def support(self) -> set[int]:
        return {int(s) for s in np.flatnonzero(self.coords)}


def to_b2(a: AlgebraElement) -> B2Coordinates:
    # x_T = prod_{i in T} ((x_i+1) + 1) = sum_{s subset T} B2_s
    return B2Coordinates(a.arity, _frozen(superset_sum(a.coeffs)))


def from_b2(c: B2Coordinates) -> AlgebraElement:
    # B2_s = sum_{T subset s} x_T, so the inverse is the same transform
    return AlgebraElement._wrap(c.arity, superset_sum(c.coords))


# ------------------------------------------------------- polynomial text I/O

_TERM = re.compile(r"^(1|x\d+(\*x\d+)*)$")


def parse_polynomial(text: str, arity: int | None = None) -> AlgebraElement:
    """Parse ``x4*x5 + x4*x1*x2*x3 + 1`` style text.

    Lines starting with ``#`` are comments; a line ``n=<int>`` declares the
    arity, otherwise it is the largest variable index used.
    """
    body = []
    declared = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        compact = re.sub(r"\s+", "", line)
        if compact.startswith("n="):
            try:
                declared = int(compact[2:])
            except ValueError:
                raise ParseError(f"bad arity header: {raw!r}") from None
            continue
        body.append(compact)
    if not body and declared is None:
        raise ParseError("empty polynomial text (write 0 for the zero element)")
    joined = "".join(body)
    masks: list[int] = []
    max_index = 0
    if joined not in ("", "0"):
        for term in joined.split("+"):
            if not _TERM.match(term):
                raise ParseError(f"cannot parse term {term!r}")
            mask = 0
            if term != "1":
                for var in term.split("*"):
                    idx = int(var[1:])
                    if idx < 1:
                        raise ParseError(f"variable index must be >= 1: {var!r}")
                    max_index = max(max_index, idx)
                    mask ^= 1 << (idx - 1)  # x_i^2 = 1
            masks.append(mask)
    if arity is None:
        arity = declared if declared is not None else max(1, max_index)
    elif declared is not None and declared != arity:
        raise ParseError(f"header declares n={declared} but arity {arity} requested")
    if max_index > arity:
        raise ParseError(f"variable x{max_index} exceeds declared arity {arity}")
    return elem_from_monomials(arity, masks)


def format_monomial(mask: int) -> str:
    if mask == 0:
        return "1"
    names = []
    i = 1
    while mask:
        if mask & 1:
            names.append(f"x{i}")
        mask >>= 1
        i += 1
    return "*".join(names)


def format_polynomial(a: AlgebraElement) -> str:
    terms = [format_monomial(int(m)) for m in np.flatnonzero(a.coeffs)]
    return " + ".join(terms) if terms else "0"


def dumps_polynomial(a: AlgebraElement, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"n={a.arity}")
    lines.append(format_polynomial(a))
    return "\n".join(lines) + "\n"
