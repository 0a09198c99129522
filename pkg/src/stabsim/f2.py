"""Packed bit vectors and matrices over GF(2), with mod-4 phase vectors.

Bits are packed LSB-first into uint64 words; all mod-2 additions are
word-wise XOR.  These containers back every tableau and quadratic form in
the package, so the layout (row-major packed rows) is part of the internal
ABI shared with the compiled kernels.
"""

from __future__ import annotations

import numpy as np

WORD_BITS = 64
_ONE = np.uint64(1)


def n_words(nbits: int) -> int:
    """Number of uint64 words needed to hold ``nbits`` bits."""
    return max(1, (nbits + WORD_BITS - 1) // WORD_BITS)


def tail_mask(nbits: int) -> np.ndarray:
    """Word array with ones in the first ``nbits`` bit positions."""
    w = n_words(nbits)
    mask = np.full(w, ~np.uint64(0), dtype=np.uint64)
    rem = nbits % WORD_BITS
    if rem:
        mask[-1] = (_ONE << np.uint64(rem)) - _ONE
    if nbits == 0:
        mask[:] = 0
    return mask


def pack_bits(bits) -> np.ndarray:
    """Pack an iterable of 0/1 ints into a uint64 word array."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    w = n_words(n)
    padded = np.zeros(bits.shape[:-1] + (w * WORD_BITS,), dtype=np.uint8)
    padded[..., :n] = bits & 1
    shaped = padded.reshape(bits.shape[:-1] + (w, WORD_BITS))
    weights = (_ONE << np.arange(WORD_BITS, dtype=np.uint64))
    return (shaped.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


def unpack_bits(words: np.ndarray, nbits: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a uint8 array of 0/1."""
    words = np.asarray(words, dtype=np.uint64)
    shifts = np.arange(WORD_BITS, dtype=np.uint64)
    bits = (words[..., :, None] >> shifts) & _ONE
    flat = bits.reshape(words.shape[:-1] + (-1,))
    return flat[..., :nbits].astype(np.uint8)


def parity_words(words: np.ndarray, axis: int = -1) -> np.ndarray:
    """Parity of the popcount over ``axis`` of a word array."""
    return (np.bitwise_count(words).sum(axis=axis) & 1).astype(np.uint8)


def popcount_words(words: np.ndarray, axis: int = -1) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=axis)


class BitVec:
    """Fixed-length bit vector packed into uint64 words.

    The length is immutable after construction; out-of-range access raises
    ``IndexError``.
    """

    __slots__ = ("n", "words")

    def __init__(self, n: int, words: np.ndarray | None = None):
        self.n = int(n)
        if words is None:
            self.words = np.zeros(n_words(self.n), dtype=np.uint64)
        else:
            words = np.asarray(words, dtype=np.uint64)
            if words.shape != (n_words(self.n),):
                raise ValueError("word array has wrong shape")
            self.words = words.copy()

    @classmethod
    def from_bits(cls, bits) -> "BitVec":
        bits = list(bits)
        v = cls(len(bits))
        v.words = pack_bits(bits)
        return v

    @classmethod
    def from_int_support(cls, n: int, support) -> "BitVec":
        v = cls(n)
        for j in support:
            v[j] = 1
        return v

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "BitVec":
        v = cls(n)
        v.words = rng.integers(0, 2**64, size=n_words(n), dtype=np.uint64)
        v.words &= tail_mask(n)
        return v

    def _check(self, j: int) -> int:
        j = int(j)
        if not 0 <= j < self.n:
            raise IndexError(f"bit index {j} out of range for length {self.n}")
        return j

    def __getitem__(self, j: int) -> int:
        j = self._check(j)
        return int((self.words[j // WORD_BITS] >> np.uint64(j % WORD_BITS)) & _ONE)

    def __setitem__(self, j: int, value: int) -> None:
        j = self._check(j)
        w, b = j // WORD_BITS, np.uint64(j % WORD_BITS)
        if value & 1:
            self.words[w] |= _ONE << b
        else:
            self.words[w] &= ~(_ONE << b)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVec)
            and self.n == other.n
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self):
        return hash((self.n, self.words.tobytes()))

    def __xor__(self, other: "BitVec") -> "BitVec":
        if self.n != other.n:
            raise ValueError("length mismatch")
        out = BitVec(self.n)
        out.words = self.words ^ other.words
        return out

    def copy(self) -> "BitVec":
        return BitVec(self.n, self.words)

    def popcount(self) -> int:
        return int(popcount_words(self.words))

    def parity_and(self, other: "BitVec") -> int:
        """Parity of the AND with ``other`` (the GF(2) dot product)."""
        return int(parity_words(self.words & other.words))

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.n)

    def to_string(self) -> str:
        return "".join(str(b) for b in self.to_bits())

    def __repr__(self) -> str:
        return f"BitVec({self.to_string()!r})"


class BitMatrix:
    """Dense bit matrix with row-major packed rows over GF(2)."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray | None = None):
        self.rows = int(rows)
        self.cols = int(cols)
        w = n_words(self.cols)
        if words is None:
            self.words = np.zeros((self.rows, w), dtype=np.uint64)
        else:
            words = np.asarray(words, dtype=np.uint64)
            if words.shape != (self.rows, w):
                raise ValueError("word array has wrong shape")
            self.words = words.copy()

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls(n, n)
        for j in range(n):
            m[j, j] = 1
        return m

    @classmethod
    def from_array(cls, arr) -> "BitMatrix":
        arr = np.asarray(arr, dtype=np.uint8) & 1
        m = cls(arr.shape[0], arr.shape[1])
        m.words = pack_bits(arr)
        return m

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> "BitMatrix":
        m = cls(rows, cols)
        m.words = rng.integers(0, 2**64, size=m.words.shape, dtype=np.uint64)
        m.words &= tail_mask(cols)
        return m

    def _check(self, i: int, j: int):
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index ({i},{j}) out of range for {self.rows}x{self.cols}")

    def __getitem__(self, ij) -> int:
        i, j = ij
        self._check(i, j)
        return int((self.words[i, j // WORD_BITS] >> np.uint64(j % WORD_BITS)) & _ONE)

    def __setitem__(self, ij, value: int) -> None:
        i, j = ij
        self._check(i, j)
        w, b = j // WORD_BITS, np.uint64(j % WORD_BITS)
        if value & 1:
            self.words[i, w] |= _ONE << b
        else:
            self.words[i, w] &= ~(_ONE << b)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.words.tobytes()))

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.words)

    def row(self, i: int) -> BitVec:
        v = BitVec(self.cols)
        v.words = self.words[i].copy()
        return v

    def set_row(self, i: int, v: BitVec) -> None:
        self.words[i] = v.words

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_array(self.to_array().T)

    def to_array(self) -> np.ndarray:
        return unpack_bits(self.words, self.cols)

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def matmul_f2(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Product over GF(2): C[i,j] = XOR_k A[i,k] B[k,j]."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.cols} != {b.rows}")
    out = BitMatrix(a.rows, b.cols)
    # row i of C is the XOR of the rows of B selected by row i of A
    abits = a.to_array().astype(bool)
    for i in range(a.rows):
        sel = b.words[abits[i]]
        if sel.size:
            out.words[i] = np.bitwise_xor.reduce(sel, axis=0)
    return out


def matvec_f2(a: BitMatrix, x: BitVec) -> BitVec:
    """Matrix-vector product over GF(2): y[i] = XOR_j A[i,j] x[j]."""
    if a.cols != x.n:
        raise ValueError(f"dimension mismatch: {a.cols} != {x.n}")
    par = parity_words(a.words & x.words, axis=-1)
    y = BitVec(a.rows)
    y.words = pack_bits(par)
    return y


def rank_f2(a: BitMatrix) -> int:
    """Rank over GF(2) by Gaussian elimination on packed rows."""
    work = a.words.copy()
    rank = 0
    for j in range(a.cols):
        w, b = j // WORD_BITS, np.uint64(j % WORD_BITS)
        col = (work[rank:, w] >> b) & _ONE
        hits = np.nonzero(col)[0]
        if hits.size == 0:
            continue
        piv = rank + int(hits[0])
        work[[rank, piv]] = work[[piv, rank]]
        mask = ((work[:, w] >> b) & _ONE).astype(bool)
        mask[rank] = False
        work[mask] ^= work[rank]
        rank += 1
        if rank == a.rows:
            break
    return rank


class PhaseVecZ4:
    """Length-n vector of Z4 phases (entries always reduced mod 4)."""

    __slots__ = ("n", "vals")

    def __init__(self, n: int, vals: np.ndarray | None = None):
        self.n = int(n)
        if vals is None:
            self.vals = np.zeros(self.n, dtype=np.uint8)
        else:
            vals = np.asarray(vals)
            if vals.shape != (self.n,):
                raise ValueError("phase vector has wrong shape")
            self.vals = (vals.astype(np.int64) % 4).astype(np.uint8)

    def __getitem__(self, j: int) -> int:
        return int(self.vals[j])

    def __setitem__(self, j: int, value: int) -> None:
        self.vals[j] = value % 4

    def add(self, j: int, delta: int) -> None:
        self.vals[j] = (int(self.vals[j]) + delta) % 4

    def copy(self) -> "PhaseVecZ4":
        return PhaseVecZ4(self.n, self.vals)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PhaseVecZ4)
            and self.n == other.n
            and bool(np.array_equal(self.vals, other.vals))
        )

    def __repr__(self) -> str:
        return f"PhaseVecZ4({list(self.vals)})"
