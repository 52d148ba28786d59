"""Dense bit-packed GF(2) matrices.

Rows are packed little-endian into 64-bit words: column ``j`` lives in word
``j // 64`` at bit ``j % 64``; pad bits past ``cols`` are always zero. All
elimination kernels are numba-compiled and XOR whole words.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numba
import numpy as np

from .algebra import AlgebraElement
from .errors import ParameterError, ParseError, ResourceError

WORD_BITS = 64
DEFAULT_DENSE_MAX_ARITY = 15
ENV_MAX_ARITY = "STORAGECODE_MAX_ARITY"


def dense_max_arity() -> int:
    """Largest n for which 2^n x 2^n dense matrices are built."""
    raw = os.environ.get(ENV_MAX_ARITY)
    if raw is None:
        return DEFAULT_DENSE_MAX_ARITY
    try:
        return int(raw)
    except ValueError:
        raise ParameterError(f"{ENV_MAX_ARITY}={raw!r} is not an integer") from None


def check_dense_arity(arity: int) -> None:
    limit = dense_max_arity()
    if arity > limit:
        raise ResourceError(
            f"arity {arity} needs a {2 ** arity} x {2 ** arity} dense matrix; "
            f"the ceiling is arity {limit} (set {ENV_MAX_ARITY} to override)"
        )


def n_words(cols: int) -> int:
    return (cols + WORD_BITS - 1) // WORD_BITS


# ---------------------------------------------------------------- kernels


@numba.njit(cache=True)
def _forward(data, ncols):
    """Row echelon form in place. Returns (rank, pivot columns)."""
    nrows = data.shape[0]
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    rank = 0
    for c in range(ncols):
        if rank == nrows:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for r in range(rank, nrows):
            if data[r, w] & bit:
                p = r
                break
        if p < 0:
            continue
        if p != rank:
            for j in range(w, data.shape[1]):
                tmp = data[p, j]
                data[p, j] = data[rank, j]
                data[rank, j] = tmp
        for r in range(p + 1, nrows):
            if data[r, w] & bit:
                for j in range(w, data.shape[1]):
                    data[r, j] ^= data[rank, j]
        pivots[rank] = c
        rank += 1
    return rank, pivots[:rank].copy()


@numba.njit(cache=True, parallel=True)
def _forward_parallel(data, ncols):
    nrows = data.shape[0]
    width = data.shape[1]
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    rank = 0
    for c in range(ncols):
        if rank == nrows:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for r in range(rank, nrows):
            if data[r, w] & bit:
                p = r
                break
        if p < 0:
            continue
        if p != rank:
            for j in range(w, width):
                tmp = data[p, j]
                data[p, j] = data[rank, j]
                data[rank, j] = tmp
        for r in numba.prange(p + 1, nrows):
            if data[r, w] & bit:
                for j in range(w, width):
                    data[r, j] ^= data[rank, j]
        pivots[rank] = c
        rank += 1
    return rank, pivots[:rank].copy()


@numba.njit(cache=True)
def _gauss_jordan(data, ncols):
    """Reduced row echelon form in place; pivot rows end up on top."""
    nrows = data.shape[0]
    width = data.shape[1]
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    rank = 0
    for c in range(ncols):
        if rank == nrows:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for r in range(rank, nrows):
            if data[r, w] & bit:
                p = r
                break
        if p < 0:
            continue
        if p != rank:
            for j in range(w, width):
                tmp = data[p, j]
                data[p, j] = data[rank, j]
                data[rank, j] = tmp
        for r in range(nrows):
            if r != rank and data[r, w] & bit:
                for j in range(w, width):
                    data[r, j] ^= data[rank, j]
        pivots[rank] = c
        rank += 1
    return rank, pivots[:rank].copy()


@numba.njit(cache=True, parallel=True)
def _gauss_jordan_parallel(data, ncols):
    nrows = data.shape[0]
    width = data.shape[1]
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    rank = 0
    for c in range(ncols):
        if rank == nrows:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for r in range(rank, nrows):
            if data[r, w] & bit:
                p = r
                break
        if p < 0:
            continue
        if p != rank:
            for j in range(w, width):
                tmp = data[p, j]
                data[p, j] = data[rank, j]
                data[rank, j] = tmp
        for r in numba.prange(nrows):
            if r != rank and data[r, w] & bit:
                for j in range(w, width):
                    data[r, j] ^= data[rank, j]
        pivots[rank] = c
        rank += 1
    return rank, pivots[:rank].copy()


@numba.njit(cache=True)
def _lowest_bit(row, start_word):
    for j in range(start_word, row.shape[0]):
        x = row[j]
        if x:
            b = 0
            while not (x >> np.uint64(b)) & np.uint64(1):
                b += 1
            return j * 64 + b
    return -1


@numba.njit(cache=True)
def _residue(basis, owner, row):
    """``row`` reduced against a fully reduced basis (returns a copy).

    Basis rows vanish on every other pivot column, so one pass over the set
    pivot bits of ``row`` suffices.
    """
    buf = row.copy()
    width = buf.shape[0]
    for j in range(width):
        done = np.uint64(0)
        while True:
            x = buf[j] & ~done
            if not x:
                break
            low = x & (~x + np.uint64(1))
            b = 0
            while not (low >> np.uint64(b)) & np.uint64(1):
                b += 1
            c = j * 64 + b
            o = owner[c]
            if o >= 0:
                for t in range(j, width):
                    buf[t] ^= basis[o, t]
            done |= low
    return buf


@numba.njit(cache=True)
def _insert_rows(basis, owner, count, rows):
    """Insert ``rows`` one by one into a fully reduced basis.

    ``owner[c]`` is the basis row pivoting on column ``c`` (or -1); each
    pivot is the lowest set bit of its row and every other basis row is zero
    there. Returns the new basis size; stops early at full rank.
    """
    ncols = owner.shape[0]
    width = rows.shape[1]
    for i in range(rows.shape[0]):
        if count == ncols:
            break
        buf = _residue(basis, owner, rows[i])
        p = _lowest_bit(buf, 0)
        if p < 0:
            continue
        w = p >> 6
        bit = np.uint64(1) << np.uint64(p & 63)
        for r in range(count):
            if basis[r, w] & bit:
                for t in range(w, width):
                    basis[r, t] ^= buf[t]
        for t in range(width):
            basis[count, t] = buf[t]
        owner[p] = count
        count += 1
    return count


@numba.njit(cache=True)
def _reduce_against(basis, pivots, vecs):
    """Reduce ``vecs`` in place against a reduced echelon basis."""
    width = vecs.shape[1]
    for i in range(vecs.shape[0]):
        for k in range(pivots.shape[0]):
            c = pivots[k]
            w = c >> 6
            if vecs[i, w] & (np.uint64(1) << np.uint64(c & 63)):
                for j in range(width):
                    vecs[i, j] ^= basis[k, j]


@numba.njit(cache=True)
def _kernel_from_rref(rref, pivots, ncols):
    """Right-kernel basis of a matrix whose reduced echelon rows are ``rref``."""
    rank = pivots.shape[0]
    is_pivot = np.zeros(ncols, dtype=np.bool_)
    for k in range(rank):
        is_pivot[pivots[k]] = True
    nfree = ncols - rank
    out = np.zeros((nfree, (ncols + 63) // 64), dtype=np.uint64)
    j = 0
    for f in range(ncols):
        if is_pivot[f]:
            continue
        w = f >> 6
        bit = np.uint64(1) << np.uint64(f & 63)
        out[j, w] |= bit
        for k in range(rank):
            if rref[k, w] & bit:
                p = pivots[k]
                out[j, p >> 6] |= np.uint64(1) << np.uint64(p & 63)
        j += 1
    return out


@numba.njit(cache=True)
def _transpose(data, nrows, ncols):
    out = np.zeros((ncols, (nrows + 63) // 64), dtype=np.uint64)
    for r in range(nrows):
        rw = r >> 6
        rbit = np.uint64(1) << np.uint64(r & 63)
        for w in range(data.shape[1]):
            x = data[r, w]
            while x:
                b = 0
                y = x
                while not y & np.uint64(1):
                    y >>= np.uint64(1)
                    b += 1
                out[w * 64 + b, rw] |= rbit
                x &= x - np.uint64(1)
    return out


@numba.njit(cache=True)
def _vecmat(vec, data):
    out = np.zeros(data.shape[1], dtype=np.uint64)
    for r in range(data.shape[0]):
        if vec[r >> 6] & (np.uint64(1) << np.uint64(r & 63)):
            for j in range(data.shape[1]):
                out[j] ^= data[r, j]
    return out


# ---------------------------------------------------------------- packing


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """(rows, cols) 0/1 array -> (rows, words) uint64 array."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8) & 1)
    rows, cols = bits.shape
    packed = np.packbits(bits, axis=1, bitorder="little")
    out = np.zeros((rows, n_words(cols) * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8").astype(np.uint64)


def unpack_bits(data: np.ndarray, cols: int) -> np.ndarray:
    raw = np.ascontiguousarray(data.astype("<u8")).view(np.uint8)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :cols]


class BitMatrix:
    """Dense GF(2) matrix with word-packed rows."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray | None = None) -> None:
        self.rows = int(rows)
        self.cols = int(cols)
        if data is None:
            data = np.zeros((self.rows, n_words(self.cols)), dtype=np.uint64)
        if data.shape != (self.rows, n_words(self.cols)) or data.dtype != np.uint64:
            raise ParameterError(
                f"packed data has shape {data.shape}/{data.dtype}, "
                f"expected {(self.rows, n_words(self.cols))}/uint64"
            )
        self.data = np.ascontiguousarray(data)

    @classmethod
    def from_dense(cls, bits) -> "BitMatrix":
        arr = np.atleast_2d(np.asarray(bits))
        return cls(arr.shape[0], arr.shape[1], pack_bits(arr))

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        m = cls(size, size)
        idx = np.arange(size)
        m.data[idx, idx >> 6] = np.uint64(1) << (idx & 63).astype(np.uint64)
        return m

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> "BitMatrix":
        data = rng.integers(0, 2**64, size=(rows, n_words(cols)), dtype=np.uint64)
        m = cls(rows, cols, data)
        m._clear_padding()
        return m

    def _clear_padding(self) -> None:
        tail = self.cols % WORD_BITS
        if tail and self.data.size:
            self.data[:, -1] &= np.uint64((1 << tail) - 1)

    def to_dense(self) -> np.ndarray:
        return unpack_bits(self.data, self.cols)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    def get(self, i: int, j: int) -> int:
        return int((int(self.data[i, j >> 6]) >> (j & 63)) & 1)

    def row_support(self, i: int) -> np.ndarray:
        return np.flatnonzero(unpack_bits(self.data[i : i + 1], self.cols)[0])

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self.data).sum(axis=1, dtype=np.int64)

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.cols, self.rows, _transpose(self.data, self.rows, self.cols))

    def take_rows(self, order) -> "BitMatrix":
        order = np.asarray(order, dtype=np.int64)
        return BitMatrix(order.size, self.cols, self.data[order].copy())

    def vecmat(self, vec: np.ndarray) -> np.ndarray:
        """Packed row vector times matrix: XOR of the rows selected by ``vec``."""
        return _vecmat(np.ascontiguousarray(vec, dtype=np.uint64), self.data)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and self.transpose() == self

    # -------------------------------------------------------- serialization

    def dumps(self) -> str:
        lines = [f"gf2 {self.rows} {self.cols}"]
        for row in self.data:
            lines.append(" ".join(f"{int(w):016x}" for w in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "BitMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ParseError("empty matrix text")
        head = lines[0].split()
        if len(head) != 3 or head[0] != "gf2":
            raise ParseError(f"bad matrix header {lines[0]!r}")
        rows, cols = int(head[1]), int(head[2])
        if len(lines) - 1 != rows:
            raise ParseError(f"expected {rows} rows, found {len(lines) - 1}")
        width = n_words(cols)
        data = np.zeros((rows, width), dtype=np.uint64)
        for i, line in enumerate(lines[1:]):
            words = line.split()
            if len(words) != width:
                raise ParseError(f"row {i}: expected {width} words, got {len(words)}")
            data[i] = [int(w, 16) for w in words]
        m = cls(rows, cols, data)
        check = m.copy()
        check._clear_padding()
        if check != m:
            raise ParseError("nonzero padding bits")
        return m


# ---------------------------------------------------------------- elimination


@dataclass(frozen=True)
class Echelon:
    """Result of an elimination: the reduced matrix and its pivot columns."""

    matrix: BitMatrix
    pivots: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.pivots.size)


def row_echelon(m: BitMatrix, *, parallel: bool = False) -> Echelon:
    """Forward elimination on a copy; pivot = lowest column, first row holding it."""
    work = m.copy()
    kernel = _forward_parallel if parallel else _forward
    _, pivots = kernel(work.data, work.cols)
    return Echelon(work, pivots)


def reduced_row_echelon(m: BitMatrix, *, parallel: bool = False) -> Echelon:
    work = m.copy()
    kernel = _gauss_jordan_parallel if parallel else _gauss_jordan
    _, pivots = kernel(work.data, work.cols)
    return Echelon(work, pivots)


def rank(m: BitMatrix, *, parallel: bool = False) -> int:
    return row_echelon(m, parallel=parallel).rank


def rank_by_insertion(m: BitMatrix) -> int:
    """Rank via row-at-a-time insertion into a lowest-bit basis.

    Independent of :func:`rank`'s column-order sweep; used to cross-check it.
    """
    builder = SpanBuilder(m.cols)
    builder.add_rows(m.data)
    return builder.dim


# ---------------------------------------------------------------- subspaces


class SubspaceBasis:
    """Linearly independent vectors spanning a subspace of F_2^ambient_dim.

    Rows are stored in reduced echelon form when ``pivots`` is known; bases
    produced by :func:`nullspace` are only guaranteed independent until
    :meth:`reduced` is called.
    """

    __slots__ = ("ambient_dim", "vectors", "pivots")

    def __init__(self, ambient_dim: int, vectors: BitMatrix, pivots: np.ndarray | None = None):
        if vectors.cols != ambient_dim:
            raise ParameterError(f"vectors have {vectors.cols} columns, ambient is {ambient_dim}")
        self.ambient_dim = ambient_dim
        self.vectors = vectors
        self.pivots = pivots

    @classmethod
    def span(cls, m: BitMatrix) -> "SubspaceBasis":
        ech = reduced_row_echelon(m)
        return cls._from_echelon(ech)

    @classmethod
    def _from_echelon(cls, ech: Echelon) -> "SubspaceBasis":
        r = ech.rank
        vecs = BitMatrix(r, ech.matrix.cols, ech.matrix.data[:r].copy())
        return cls(ech.matrix.cols, vecs, ech.pivots)

    @property
    def dim(self) -> int:
        return self.vectors.rows

    def __repr__(self) -> str:
        return f"SubspaceBasis(dim={self.dim}, ambient={self.ambient_dim})"

    def reduced(self) -> "SubspaceBasis":
        if self.pivots is not None:
            return self
        return SubspaceBasis.span(self.vectors)

    def reduce(self, vecs: np.ndarray) -> np.ndarray:
        """Residues of packed vectors modulo this subspace."""
        red = self.reduced()
        out = np.array(np.atleast_2d(vecs), dtype=np.uint64, copy=True)
        _reduce_against(red.vectors.data, red.pivots, out)
        return out

    def contains(self, vecs: np.ndarray) -> bool:
        """True iff every packed vector in ``vecs`` lies in the span."""
        return not self.reduce(vecs).any()

    def contains_subspace(self, other: "SubspaceBasis") -> bool:
        _same_ambient(self, other)
        return other.dim == 0 or self.contains(other.vectors.data)

    def same_span(self, other: "SubspaceBasis") -> bool:
        return (
            self.dim == other.dim
            and self.contains_subspace(other)
            and other.contains_subspace(self)
        )


def _same_ambient(a: SubspaceBasis, b: SubspaceBasis) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise ParameterError(f"ambient mismatch: {a.ambient_dim} vs {b.ambient_dim}")


class SpanBuilder:
    """Accumulates vectors into a reduced basis one row at a time (early exit at full rank)."""

    def __init__(self, ambient_dim: int, capacity: int | None = None) -> None:
        self.ambient_dim = ambient_dim
        cap = ambient_dim if capacity is None else min(capacity, ambient_dim)
        self._basis = np.zeros((cap, n_words(ambient_dim)), dtype=np.uint64)
        self._owner = np.full(ambient_dim, -1, dtype=np.int64)
        self.dim = 0

    @property
    def full(self) -> bool:
        return self.dim == self.ambient_dim

    def add_rows(self, rows: np.ndarray) -> int:
        rows = np.ascontiguousarray(np.atleast_2d(rows), dtype=np.uint64)
        if self.dim + rows.shape[0] > self._basis.shape[0] and self._basis.shape[0] < self.ambient_dim:
            grow = min(self.ambient_dim, max(2 * self._basis.shape[0], self.dim + rows.shape[0]))
            bigger = np.zeros((grow, self._basis.shape[1]), dtype=np.uint64)
            bigger[: self.dim] = self._basis[: self.dim]
            self._basis = bigger
        self.dim = int(_insert_rows(self._basis, self._owner, self.dim, rows))
        return self.dim

    def residue(self, row: np.ndarray) -> np.ndarray:
        return _residue(self._basis, self._owner, np.ascontiguousarray(row, dtype=np.uint64))

    def contains(self, row: np.ndarray) -> bool:
        return not self.residue(row).any()

    def basis(self) -> SubspaceBasis:
        pivots = np.flatnonzero(self._owner >= 0)
        rows = self._basis[self._owner[pivots]]
        return SubspaceBasis(self.ambient_dim, BitMatrix(self.dim, self.ambient_dim, rows), pivots)


def nullspace(m: BitMatrix, *, side: str = "left") -> SubspaceBasis:
    """Basis of {c : c M = 0} (``side="left"``) or {c : M c^T = 0} (``"right"``).

    For symmetric matrices both coincide and ``side="right"`` skips a transpose.
    """
    if side == "left":
        target = m.transpose()
    elif side == "right":
        target = m
    else:
        raise ParameterError(f"side must be 'left' or 'right', got {side!r}")
    ech = reduced_row_echelon(target)
    rref = ech.matrix.data[: ech.rank]
    kern = _kernel_from_rref(np.ascontiguousarray(rref), ech.pivots, target.cols)
    return SubspaceBasis(target.cols, BitMatrix(kern.shape[0], target.cols, kern))


def subspace_sum(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    _same_ambient(a, b)
    stacked = np.vstack([a.vectors.data, b.vectors.data])
    return SubspaceBasis.span(BitMatrix(stacked.shape[0], a.ambient_dim, stacked))


def _hstack(left: np.ndarray, right: np.ndarray, cols: int) -> tuple[np.ndarray, int]:
    if cols % WORD_BITS == 0:
        return np.hstack([left, right]), 2 * cols
    bits = np.hstack([unpack_bits(left, cols), unpack_bits(right, cols)])
    return pack_bits(bits), 2 * cols


def _rows_matrix(bits: np.ndarray, cols: int) -> BitMatrix:
    """BitMatrix from a (possibly empty) 0/1 array with ``cols`` columns."""
    if bits.shape[0] == 0:
        return BitMatrix(0, cols)
    return BitMatrix(bits.shape[0], cols, pack_bits(bits))


def subspace_intersection(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    """Zassenhaus: echelonize [[A, A], [B, 0]]; rows with empty left half span A ∩ B."""
    _same_ambient(a, b)
    d = a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return SubspaceBasis(d, BitMatrix(0, d), np.zeros(0, dtype=np.int64))
    top, width = _hstack(a.vectors.data, a.vectors.data, d)
    bottom, _ = _hstack(b.vectors.data, np.zeros_like(b.vectors.data), d)
    stacked = np.vstack([top, bottom])
    ech = row_echelon(BitMatrix(stacked.shape[0], width, stacked))
    n_left = int(np.count_nonzero(ech.pivots < d))
    right = unpack_bits(ech.matrix.data[n_left : ech.rank], width)[:, d:]
    return SubspaceBasis.span(_rows_matrix(right, d))


# ------------------------------------------------------- algebra operators


_SWAP_MASKS = np.array(
    [
        0x5555555555555555,
        0x3333333333333333,
        0x0F0F0F0F0F0F0F0F,
        0x00FF00FF00FF00FF,
        0x0000FFFF0000FFFF,
        0x00000000FFFFFFFF,
    ],
    dtype=np.uint64,
)


@numba.njit(cache=True)
def _xor_permute_word(x, t, masks):
    """Move bit b of ``x`` to bit b ^ t (0 <= t < 64)."""
    for level in range(6):
        if (t >> level) & 1:
            s = np.uint64(1 << level)
            m = masks[level]
            x = ((x & m) << s) | ((x >> s) & m)
    return x


@numba.njit(cache=True)
def _translates(row0, size, masks):
    """Rows r_v with r_v[u] = row0[u ^ v], for all v < size."""
    width = row0.shape[0]
    out = np.zeros((size, width), dtype=np.uint64)
    if size < 64:
        for v in range(size):
            for u in range(size):
                if (row0[0] >> np.uint64(u ^ v)) & np.uint64(1):
                    out[v, 0] |= np.uint64(1) << np.uint64(u)
        return out
    variants = np.empty((64, width), dtype=np.uint64)
    for t in range(64):
        for j in range(width):
            variants[t, j] = _xor_permute_word(row0[j], t, masks)
    for v in range(size):
        low = v & 63
        high = v >> 6
        for j in range(width):
            out[v, j] = variants[low, j ^ high]
    return out


def mult_operator_matrix(f: AlgebraElement) -> BitMatrix:
    """2^n x 2^n matrix whose row v holds the coefficients of x^v * f.

    Row v is row 0 (the coefficients of f) permuted by u -> u XOR v.
    """
    check_dense_arity(f.arity)
    size = 1 << f.arity
    row0 = pack_bits(f.coeffs[None, :])[0]
    return BitMatrix(size, size, _translates(row0, size, _SWAP_MASKS))


def elements_to_rows(elems) -> np.ndarray:
    """Pack coefficient vectors of algebra elements into matrix rows."""
    elems = list(elems)
    if not elems:
        raise ParameterError("no elements given")
    return pack_bits(np.stack([e.coeffs for e in elems]))
