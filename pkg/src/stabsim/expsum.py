"""Exact exponential sums Z(B) = sum_x i^{x B x^T} for Z4 quadratic forms.

The forms live in the class of symmetric matrices with {0,1} off-diagonal
and Z4 diagonal.  Sums are evaluated by eliminating two variables per step
after reducing the Z4 form to a pair of Z2 forms that share one quadratic
part; results are exact Gaussian integers of the shape a*2^p + i*b*2^q.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .f2 import pack_bits, unpack_bits


class QuadFormZ2:
    """Q(x) = x M x^T + L x^T over GF(2), canonicalized to strict-upper M."""

    __slots__ = ("m", "upper", "linear")

    def __init__(self, m: int, matrix, linear):
        self.m = int(m)
        mat = (np.asarray(matrix, dtype=np.uint8) & 1) if m else np.zeros((0, 0), np.uint8)
        lin = (np.asarray(linear, dtype=np.uint8) & 1) if m else np.zeros(0, np.uint8)
        if mat.shape != (m, m) or lin.shape != (m,):
            raise ValueError("bad quadratic form shape")
        # diagonal terms are linear over GF(2); off-diagonal pairs fold together
        self.upper = (np.triu(mat ^ mat.T, 1)).astype(np.uint8)
        self.linear = (lin ^ np.diag(mat)).astype(np.uint8)

    def evaluate(self, x) -> int:
        x = np.asarray(x, dtype=np.uint8) & 1
        quad = int(x @ self.upper.astype(np.int32) @ x) & 1
        return (quad ^ int(self.linear @ x & 1)) & 1


class QuadFormZ4:
    """Symmetric Z4 form: {0,1} off-diagonal bits, Z4 diagonal."""

    __slots__ = ("n", "upper", "diag")

    def __init__(self, n: int, upper, diag):
        self.n = int(n)
        up = (np.asarray(upper, dtype=np.uint8) & 1) if n else np.zeros((0, 0), np.uint8)
        dg = np.asarray(diag, dtype=np.int64) % 4 if n else np.zeros(0, np.int64)
        if up.shape != (n, n) or dg.shape != (n,):
            raise ValueError("bad quadratic form shape")
        self.upper = np.triu(up, 1).astype(np.uint8)
        self.diag = dg.astype(np.uint8)

    @classmethod
    def from_dense(cls, mat) -> "QuadFormZ4":
        mat = np.asarray(mat, dtype=np.int64)
        n = mat.shape[0]
        off = mat % 2
        if not np.array_equal(np.triu(off, 1), np.tril(off, -1).T):
            raise ValueError("off-diagonal part must be symmetric")
        return cls(n, np.triu(off, 1), np.diag(mat))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "QuadFormZ4":
        up = np.triu(rng.integers(0, 2, size=(n, n)), 1) if n else np.zeros((0, 0), int)
        dg = rng.integers(0, 4, size=n) if n else np.zeros(0, int)
        return cls(n, up, dg)

    def to_dense(self) -> np.ndarray:
        full = (self.upper + self.upper.T).astype(np.int64)
        np.fill_diagonal(full, self.diag)
        return full

    def evaluate(self, x) -> int:
        """x B x^T mod 4 for a bit vector x."""
        x = np.asarray(x, dtype=np.int64) & 1
        pairs = int(x @ self.upper.astype(np.int64) @ x)
        return int(x @ self.diag.astype(np.int64) + 2 * pairs) % 4

    def relabel(self, perm) -> "QuadFormZ4":
        full = self.to_dense()[np.ix_(perm, perm)]
        return QuadFormZ4.from_dense(full)


def expsum_z2(form: QuadFormZ2):
    """sum_x (-1)^{Q(x)} as (sign, power) meaning sign * 2^power."""
    if form.m == 0:
        return (1, 0)
    rows = pack_bits(form.upper)
    lin = pack_bits(form.linear)
    return kernels.z2_exponential_sum(rows, lin, form.m)


def expsum_z4(form: QuadFormZ4):
    """Z(B) = sum_x i^{x B x^T} as exact (a, p, b, q): a*2^p + i*b*2^q."""
    if form.n == 0:
        return (1, 0, 0, 0)
    rows = pack_bits(form.upper)
    return kernels.z4_exponential_sum(rows, form.diag, form.n)


def expsum_z4_complex(form: QuadFormZ4) -> complex:
    a, p, b, q = expsum_z4(form)
    return a * 2.0**p + 1j * b * 2.0**q


def brute_force_z4(form: QuadFormZ4) -> complex:
    """Direct 2^n enumeration; the independent oracle used in tests."""
    n = form.n
    total = 0j
    xs = unpack_bits(np.arange(2**n, dtype=np.uint64)[:, None], n) if n else np.zeros((1, 0))
    dense = form.to_dense()
    for x in xs:
        xi = x.astype(np.int64)
        total += 1j ** (int(xi @ dense @ xi) % 4)
    return total


def brute_force_z2(form: QuadFormZ2) -> int:
    m = form.m
    total = 0
    xs = unpack_bits(np.arange(2**m, dtype=np.uint64)[:, None], m) if m else np.zeros((1, 0))
    for x in xs:
        total += -1 if form.evaluate(x) else 1
    return total
