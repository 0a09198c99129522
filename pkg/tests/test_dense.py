import numpy as np
import pytest

from stabsim.circuit import parse
from stabsim.dense import DenseState, dense_run, gate_matrix, max_dense_qubits


def kron_on(n, mat, qubits):
    """Reference embedding via the permutation-free kron route."""
    full = np.eye(1, dtype=complex)
    # build by applying to a fresh state for each basis vector
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        st = DenseState(n)
        st.amps[:] = 0
        st.amps[col] = 1
        st.apply_unitary(mat, qubits)
        out[:, col] = st.amps
    return out


def test_bell_circuit():
    st = dense_run(parse("qubits 2\nH 0\nCX 0 1\n"))
    np.testing.assert_allclose(st.amps, [2**-0.5, 0, 0, 2**-0.5], atol=1e-15)


def test_t_on_plus():
    st = dense_run(parse("qubits 1\nH 0\nT 0\n"))
    want = np.array([1, np.exp(1j * np.pi / 4)]) / np.sqrt(2)
    np.testing.assert_allclose(st.amps, want, atol=1e-15)


def test_gate_kernels_match_matrices(rng):
    """Bit-indexed kernels equal explicit matrix application."""
    for name, arity in [("X", 1), ("Y", 1), ("Z", 1), ("H", 1), ("S", 1), ("SDG", 1),
                        ("T", 1), ("TDG", 1), ("CX", 2), ("CZ", 2), ("CCZ", 3), ("CCX", 3)]:
        n = 4
        st = DenseState(n)
        st.amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        qubits = [int(q) for q in rng.choice(n, size=arity, replace=False)]
        ref = kron_on(n, gate_matrix(name), qubits) @ st.amps
        st.apply_gate(name, qubits)
        np.testing.assert_allclose(st.amps, ref, atol=1e-12, err_msg=name)


def test_rz_phase_gates(rng):
    st = DenseState(2)
    st.apply_gate("H", [0])
    st.apply_gate("RZ", [0], angle=0.7)
    want = np.array([np.exp(-0.35j), np.exp(0.35j), 0, 0]) / np.sqrt(2)
    np.testing.assert_allclose(st.amps, want, atol=1e-15)


def test_unitarity(rng):
    from conftest import random_clifford_circuit

    c = random_clifford_circuit(6, 80, rng)
    c.add("T", 0)
    c.add("RZ", 3, angle=1.2)
    st = dense_run(c)
    assert st.norm_squared() == pytest.approx(1.0, abs=1e-10)


def test_distribution_and_inner(rng):
    st = DenseState(2)
    st.apply_gate("H", [0])
    np.testing.assert_allclose(st.distribution(), [0.5, 0.5, 0, 0], atol=1e-15)
    other = DenseState(2)
    assert st.inner(other) == pytest.approx(2**-0.5)
    assert st.inner(st) == pytest.approx(st.norm_squared())


def test_qubit_cap(monkeypatch):
    monkeypatch.setenv("STABSIM_MAX_DENSE_QUBITS", "6")
    assert max_dense_qubits() == 6
    with pytest.raises(ValueError):
        DenseState(7)
    DenseState(6)


def test_inner_dimension_mismatch():
    with pytest.raises(ValueError):
        DenseState(2).inner(DenseState(3))
