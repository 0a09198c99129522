import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabsim.f2 import BitMatrix, BitVec, PhaseVecZ4, matmul_f2, matvec_f2, rank_f2


def naive_matmul(a, b):
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0
            for k in range(a.shape[1]):
                acc ^= a[i, k] & b[k, j]
            out[i, j] = acc
    return out


def naive_rank(a):
    m = a.astype(np.int64) % 2
    rank = 0
    for col in range(m.shape[1]):
        pivots = [r for r in range(rank, m.shape[0]) if m[r, col]]
        if not pivots:
            continue
        m[[rank, pivots[0]]] = m[[pivots[0], rank]]
        for r in range(m.shape[0]):
            if r != rank and m[r, col]:
                m[r] = (m[r] + m[rank]) % 2
        rank += 1
    return rank


def test_matmul_identity():
    eye = BitMatrix.identity(4)
    assert matmul_f2(eye, eye) == eye


def test_matmul_single_row_parity():
    a = BitMatrix.from_array([[1, 1]])
    got = matmul_f2(a, a.transpose())
    assert got.to_array().tolist() == [[0]]


def test_matmul_random_vs_naive(rng):
    for _ in range(20):
        a = BitMatrix.random(8, 8, rng)
        b = BitMatrix.random(8, 8, rng)
        assert np.array_equal(matmul_f2(a, b).to_array(), naive_matmul(a.to_array(), b.to_array()))


def test_matmul_dimension_mismatch():
    with pytest.raises(ValueError):
        matmul_f2(BitMatrix(2, 3), BitMatrix(2, 2))


def test_matvec_identity_and_zero(rng):
    x = BitVec.random(6, rng)
    assert matvec_f2(BitMatrix.identity(6), x) == x
    assert matvec_f2(BitMatrix(6, 6), x) == BitVec(6)


def test_matvec_random_vs_naive(rng):
    for _ in range(20):
        a = BitMatrix.random(10, 10, rng)
        x = BitVec.random(10, rng)
        want = naive_matmul(a.to_array(), x.to_bits()[:, None])[:, 0]
        assert np.array_equal(matvec_f2(a, x).to_bits(), want)


def test_matvec_unit_vectors_give_columns(rng):
    a = BitMatrix.random(9, 9, rng)
    cols = a.to_array()
    for j in range(9):
        e = BitVec(9)
        e[j] = 1
        assert np.array_equal(matvec_f2(a, e).to_bits(), cols[:, j])


def test_rank_known_cases(rng):
    assert rank_f2(BitMatrix.identity(5)) == 5
    assert rank_f2(BitMatrix.from_array(np.ones((3, 3), dtype=int))) == 1
    for _ in range(15):
        a = BitMatrix.random(12, 12, rng)
        assert rank_f2(a) == naive_rank(a.to_array())


def test_rank_transpose_invariant(rng):
    for _ in range(15):
        a = BitMatrix.random(7, 11, rng)
        assert rank_f2(a) == rank_f2(a.transpose())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**30), st.integers(2, 9))
def test_matmul_associative(seed, n):
    rng = np.random.default_rng(seed)
    a = BitMatrix.random(n, n, rng)
    b = BitMatrix.random(n, n, rng)
    c = BitMatrix.random(n, n, rng)
    assert matmul_f2(matmul_f2(a, b), c) == matmul_f2(a, matmul_f2(b, c))


def test_bitvec_out_of_range():
    v = BitVec(5)
    with pytest.raises(IndexError):
        v[5]
    with pytest.raises(IndexError):
        v[-1] = 1


def test_bitvec_words_above_length_stay_zero(rng):
    v = BitVec.random(70, rng)
    assert v.popcount() == int(np.sum(v.to_bits()))
    assert (v ^ v) == BitVec(70)


def test_transpose_involution(rng):
    a = BitMatrix.random(6, 13, rng)
    assert a.transpose().transpose() == a


def test_phase_vec_mod4():
    p = PhaseVecZ4(3, np.array([5, -1, 2]))
    assert list(p.vals) == [1, 3, 2]
    p.add(0, -3)
    assert p[0] == 2
