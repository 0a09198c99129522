import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabsim.expsum import (
    QuadFormZ2,
    QuadFormZ4,
    brute_force_z2,
    brute_force_z4,
    expsum_z2,
    expsum_z4,
    expsum_z4_complex,
)


def test_z2_empty_form():
    assert expsum_z2(QuadFormZ2(0, [], [])) == (1, 0)


def test_z2_single_pair():
    # Q = x1 x2: values 1 + 1 + 1 - 1 = 2
    q = QuadFormZ2(2, [[0, 1], [0, 0]], [0, 0])
    assert expsum_z2(q) == (1, 1)


def test_z2_random_vs_brute_force(rng):
    for _ in range(300):
        m = int(rng.integers(0, 12))
        form = QuadFormZ2(m, rng.integers(0, 2, size=(m, m)), rng.integers(0, 2, size=m))
        sign, power = expsum_z2(form)
        assert sign * 2**power == brute_force_z2(form)


def test_z4_one_variable_cases():
    assert expsum_z4_complex(QuadFormZ4(1, [[0]], [0])) == 2
    assert expsum_z4_complex(QuadFormZ4(1, [[0]], [1])) == 1 + 1j
    assert expsum_z4_complex(QuadFormZ4(1, [[0]], [2])) == 0
    assert expsum_z4_complex(QuadFormZ4(1, [[0]], [3])) == 1 - 1j


def test_z4_random_vs_brute_force(rng):
    for _ in range(250):
        n = int(rng.integers(0, 11))
        form = QuadFormZ4.random(n, rng)
        assert abs(expsum_z4_complex(form) - brute_force_z4(form)) < 1e-9


def test_z4_magnitude_is_power_of_two(rng):
    for _ in range(150):
        form = QuadFormZ4.random(int(rng.integers(1, 10)), rng)
        mag2 = abs(expsum_z4_complex(form)) ** 2
        if mag2 > 1e-12:
            assert abs(np.log2(mag2) - round(np.log2(mag2))) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**30), st.integers(2, 9))
def test_z4_relabeling_invariance(seed, n):
    rng = np.random.default_rng(seed)
    form = QuadFormZ4.random(n, rng)
    perm = rng.permutation(n)
    assert expsum_z4_complex(form) == expsum_z4_complex(form.relabel(perm))


def test_z4_reduction_consistent_with_z2(rng):
    """Re/Im of Z(B) are half-sums of two (n+1)-variable Z2 forms sharing
    the quadratic part; cross-check against direct enumeration."""
    for _ in range(60):
        n = int(rng.integers(1, 8))
        form = QuadFormZ4.random(n, rng)
        a, p, b, q = expsum_z4(form)
        val = brute_force_z4(form)
        assert a * 2.0**p == pytest.approx(val.real, abs=1e-9)
        assert b * 2.0**q == pytest.approx(val.imag, abs=1e-9)
        assert a in (-1, 0, 1) and b in (-1, 0, 1)
        assert p >= 0 and q >= 0


def test_z4_exhaustive_small():
    """All members of the form class for n <= 2."""
    for n in (1, 2):
        pairs = (n * (n - 1)) // 2
        for diag_code in range(4**n):
            diag = [(diag_code >> (2 * j)) & 3 for j in range(n)]
            for off_code in range(2**pairs):
                upper = np.zeros((n, n), dtype=int)
                bit = 0
                for a in range(n):
                    for b2 in range(a + 1, n):
                        upper[a, b2] = (off_code >> bit) & 1
                        bit += 1
                form = QuadFormZ4(n, upper, diag)
                assert abs(expsum_z4_complex(form) - brute_force_z4(form)) < 1e-12


def test_quadform_validation():
    with pytest.raises(ValueError):
        QuadFormZ4.from_dense(np.array([[0, 1], [0, 0]]))  # asymmetric off-diag
    q = QuadFormZ4.from_dense(np.array([[3, 1], [1, 2]]))
    assert q.evaluate([1, 1]) == (3 + 2 + 2) % 4
