"""Storage codes on Cayley graphs of F_2^n.

A connection set S' (always containing 0) defines the Cayley graph with
u ~ v iff u XOR v is a nonzero member of S', and the coset matrix
H = A + I with H[u, v] = 1 iff u XOR v is in S'. The storage code is the
null space of H; each coordinate equals the XOR of its neighbours.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numba
import numpy as np

from . import algebra
from .algebra import AlgebraElement
from .errors import ConventionError, ParameterError, ParseError, RepairError
from .gf2 import (
    BitMatrix,
    SubspaceBasis,
    _kernel_from_rref,
    check_dense_arity,
    pack_bits,
    rank,
    reduced_row_echelon,
    unpack_bits,
)

DEFAULT_MAX_K = 3
DEFAULT_SEED = 20240229


@dataclass(frozen=True)
class ConnectionSet:
    """S' = S ∪ {0} as a sorted tuple of n-bit masks."""

    arity: int
    masks: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise ParameterError(f"arity must be positive, got {self.arity}")
        ordered = tuple(sorted(set(int(m) for m in self.masks)))
        if not ordered:
            raise ConventionError("connection set is empty")
        if ordered[0] != 0:
            raise ConventionError("connection set must contain the zero mask")
        if ordered[-1] >= 1 << self.arity:
            raise ParameterError(f"mask {ordered[-1]:#x} out of range for arity {self.arity}")
        object.__setattr__(self, "masks", ordered)

    @classmethod
    def from_masks(cls, arity: int, masks: Iterable[int]) -> "ConnectionSet":
        return cls(arity, tuple(masks))

    @property
    def nonzero(self) -> tuple[int, ...]:
        return self.masks[1:]

    @property
    def size(self) -> int:
        return len(self.masks)

    def element(self) -> AlgebraElement:
        return algebra.elem_from_monomials(self.arity, self.masks)

    def dumps(self) -> str:
        width = max(1, (self.arity + 3) // 4)
        lines = [f"n={self.arity}"] + [f"{m:0{width}x}" for m in self.masks]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ConnectionSet":
        arity = None
        masks = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.replace(" ", "").startswith("n="):
                arity = int(line.replace(" ", "")[2:])
                continue
            try:
                masks.append(int(line, 16))
            except ValueError:
                raise ParseError(f"bad hex mask {raw!r}") from None
        if arity is None:
            raise ParseError("connection-set file lacks an n=<int> header")
        return cls(arity, tuple(masks))


def connection_set_from_element(f: AlgebraElement) -> ConnectionSet:
    if not f:
        raise ConventionError("the zero element has empty support")
    if f.constant_term != 1:
        raise ConventionError("constant coefficient must be 1 (0 must lie in S)")
    return ConnectionSet(f.arity, tuple(algebra.support(f)))


def is_triangle_free(s: ConnectionSet) -> bool:
    """No three distinct nonzero masks XOR to zero."""
    nz = np.asarray(s.nonzero, dtype=np.int64)
    if nz.size < 3:
        return True
    member = set(s.masks)
    if s.arity <= 26:
        table = np.zeros(1 << s.arity, dtype=np.bool_)
        table[np.asarray(s.masks, dtype=np.int64)] = True
        lookup = table.__getitem__
    else:
        lookup = np.vectorize(member.__contains__, otypes=[np.bool_])
    step = max(1, (1 << 22) // nz.size)
    for start in range(0, nz.size, step):
        block = nz[start : start + step]
        xor = block[:, None] ^ nz[None, :]
        hit = lookup(xor)
        # a == b gives xor 0, which is always a member; ignore the diagonal
        rows = np.arange(block.size)
        hit[rows, start + rows] = False
        if hit.any():
            return False
    return True


@numba.njit(cache=True)
def _coset_rows(masks, size):
    width = (size + 63) // 64
    out = np.zeros((size, width), dtype=np.uint64)
    for v in range(size):
        for w in masks:
            u = v ^ w
            out[v, u >> 6] |= np.uint64(1) << np.uint64(u & 63)
    return out


def coset_matrix(s: ConnectionSet) -> BitMatrix:
    check_dense_arity(s.arity)
    size = 1 << s.arity
    data = _coset_rows(np.asarray(s.masks, dtype=np.int64), size)
    return BitMatrix(size, size, data)


def graph_stats(s: ConnectionSet) -> tuple[int, int, int]:
    """(vertices, degree, edges) of the Cayley graph."""
    n_vertices = 1 << s.arity
    degree = s.size - 1
    return n_vertices, degree, n_vertices * degree // 2


def _odd_intersection(s: ConnectionSet, max_k: int):
    """Smallest witness against a high rate, as (k, rows) or None.

    Rows are variable indices (1-based) of the n x |S| matrix whose columns
    are the nonzero masks. k = 1 covers both "|S| even" (rows = ()) and
    "some row has odd weight".
    """
    nz = np.asarray(s.nonzero, dtype=np.int64)
    if nz.size % 2 == 0:
        return 1, ()
    bits = (nz[:, None] >> np.arange(s.arity)) & 1
    for k in range(1, max_k + 1):
        for rows in itertools.combinations(range(s.arity), k):
            common = int(np.count_nonzero(bits[:, list(rows)].all(axis=1)))
            if common % 2:
                return k, tuple(r + 1 for r in rows)
    return None


def row_intersection(s: ConnectionSet, rows) -> int:
    """Number of nonzero masks containing every variable in ``rows`` (1-based)."""
    want = 0
    for i in rows:
        if not 1 <= i <= s.arity:
            raise ParameterError(f"row {i} out of range for arity {s.arity}")
        want |= 1 << (i - 1)
    return sum(1 for m in s.nonzero if m & want == want)


def necessary_conditions(s: ConnectionSet, max_k: int = DEFAULT_MAX_K) -> Fraction | None:
    """Rate ceiling forced by parity of row weights / k-row intersections.

    Returns 1/2 if |S| is even or a row has odd weight, otherwise
    (2^k - 1)/2^k for the least k <= max_k with an odd k-row intersection,
    otherwise None.
    """
    if max_k < 1:
        raise ParameterError(f"max_k must be >= 1, got {max_k}")
    found = _odd_intersection(s, max_k)
    if found is None:
        return None
    k = found[0]
    return Fraction((1 << k) - 1, 1 << k)


def ceiling_witness(s: ConnectionSet, max_k: int = DEFAULT_MAX_K):
    return _odd_intersection(s, max_k)


def _fraction_text(x: Fraction | None) -> str:
    return "none" if x is None else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class CodeReport:
    arity: int
    code_length: int
    code_dim: int
    rate: Fraction
    triangle_free: bool
    degree: int
    edge_count: int
    ceiling_from_necessary_conditions: Fraction | None
    edgeless: bool = False
    max_k: int = DEFAULT_MAX_K

    @property
    def rate_float(self) -> float:
        return float(self.rate)

    def to_dict(self) -> dict:
        return {
            "arity": self.arity,
            "code_length": self.code_length,
            "code_dim": self.code_dim,
            "rate": {"exact": _fraction_text(self.rate), "float": float(self.rate)},
            "triangle_free": self.triangle_free,
            "degree": self.degree,
            "edge_count": self.edge_count,
            "ceiling_from_necessary_conditions": _fraction_text(
                self.ceiling_from_necessary_conditions
            ),
            "edgeless": self.edgeless,
            "max_k": self.max_k,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def code_rate(s: ConnectionSet, max_k: int = DEFAULT_MAX_K, code_dim: int | None = None) -> CodeReport:
    """Exact rate of Null(H) plus graph facts; pass ``code_dim`` to reuse a rank."""
    if code_dim is None:
        code_dim = (1 << s.arity) - rank(coset_matrix(s))
    n_vertices, degree, edges = graph_stats(s)
    return CodeReport(
        arity=s.arity,
        code_length=n_vertices,
        code_dim=code_dim,
        rate=Fraction(code_dim, n_vertices),
        triangle_free=is_triangle_free(s),
        degree=degree,
        edge_count=edges,
        ceiling_from_necessary_conditions=necessary_conditions(s, max_k),
        edgeless=degree == 0,
        max_k=max_k,
    )


# ------------------------------------------------------------- codewords


def _as_bits(s: ConnectionSet, c) -> np.ndarray:
    arr = np.asarray(c, dtype=np.uint8).reshape(-1)
    if arr.size != 1 << s.arity:
        raise ParameterError(f"codeword has length {arr.size}, expected {1 << s.arity}")
    return arr & 1


def neighbour_parity(s: ConnectionSet, c) -> np.ndarray:
    """For every vertex v, XOR of c over the neighbours of v."""
    bits = _as_bits(s, c)
    idx = np.arange(bits.size, dtype=np.int64)
    acc = np.zeros_like(bits)
    for w in s.nonzero:
        acc ^= bits[idx ^ w]
    return acc


def check_storage_property(s: ConnectionSet, c) -> bool:
    bits = _as_bits(s, c)
    return bool(np.array_equal(neighbour_parity(s, bits), bits))


def repair_coordinate(s: ConnectionSet, c, v: int) -> int:
    """Recover c_v from the neighbours of v (c_v itself is never read)."""
    bits = _as_bits(s, c)
    if not 0 <= v < bits.size:
        raise ParameterError(f"vertex {v} out of range")
    if not check_storage_property(s, bits):
        raise RepairError("word is not a codeword; neighbour repair is unsound")
    acc = 0
    for w in s.nonzero:
        acc ^= int(bits[v ^ w])
    return acc


def repair_all(s: ConnectionSet, c) -> np.ndarray:
    """Neighbour reconstruction of every coordinate after one validity check.

    Entry v never reads c_v (0 is not a neighbour offset), so it is exactly
    what single-vertex erasure repair at v returns.
    """
    bits = _as_bits(s, c)
    parity = neighbour_parity(s, bits)
    if not np.array_equal(parity, bits):
        raise RepairError("word is not a codeword; neighbour repair is unsound")
    return parity


@dataclass
class CodeSpace:
    """Reduced echelon form of H, kept for sampling and basis extraction."""

    conn: ConnectionSet
    rref: np.ndarray  # pivot rows only
    pivots: np.ndarray
    _free: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        size = 1 << self.conn.arity
        mask = np.ones(size, dtype=bool)
        mask[self.pivots] = False
        self._free = np.flatnonzero(mask)

    @classmethod
    def build(cls, s: ConnectionSet) -> "CodeSpace":
        ech = reduced_row_echelon(coset_matrix(s))
        return cls(s, np.ascontiguousarray(ech.matrix.data[: ech.rank]), ech.pivots)

    @property
    def length(self) -> int:
        return 1 << self.conn.arity

    @property
    def dim(self) -> int:
        return self.length - int(self.pivots.size)

    def basis(self) -> SubspaceBasis:
        # H is symmetric, so the right kernel equals the left null space
        kern = _kernel_from_rref(self.rref, self.pivots, self.length)
        return SubspaceBasis(self.length, BitMatrix(kern.shape[0], self.length, kern))

    def codeword_from_free(self, free_bits: np.ndarray) -> np.ndarray:
        """Unique codeword with the given values on the free coordinates."""
        word = np.zeros(self.length, dtype=np.uint8)
        word[self._free] = np.asarray(free_bits, dtype=np.uint8) & 1
        packed = pack_bits(word[None, :])[0]
        if self.pivots.size:
            parity = np.bitwise_count(self.rref & packed).sum(axis=1) & 1
            word[self.pivots] = parity.astype(np.uint8)
        return word

    def sample(self, count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
        """``count`` uniformly random codewords as a (count, length) 0/1 array."""
        rng = np.random.default_rng(seed)
        out = np.empty((count, self.length), dtype=np.uint8)
        for i in range(count):
            out[i] = self.codeword_from_free(rng.integers(0, 2, self.dim, dtype=np.uint8))
        return out


# ---------------------------------------------------------------- exports


def iter_edges(s: ConnectionSet):
    """Edges (u, v) with u < v, in increasing u order."""
    nz = s.nonzero
    for u in range(1 << s.arity):
        for w in nz:
            v = u ^ w
            if u < v:
                yield u, v


def edge_list_text(s: ConnectionSet) -> str:
    return "".join(f"{u} {v}\n" for u, v in iter_edges(s))


def dimacs_text(s: ConnectionSet) -> str:
    n_vertices, _, edges = graph_stats(s)
    lines = [f"c Cayley graph on F_2^{s.arity}", f"p edge {n_vertices} {edges}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in iter_edges(s))
    return "\n".join(lines) + "\n"


def codewords_text(basis: SubspaceBasis) -> str:
    if basis.dim == 0:
        return ""
    bits = unpack_bits(basis.vectors.data, basis.ambient_dim)
    return "".join((row + ord("0")).tobytes().decode() + "\n" for row in bits)
