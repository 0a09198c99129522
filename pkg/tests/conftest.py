import numpy as np
import pytest

from stabsim.chform import CHForm
from stabsim.circuit import Circuit
from stabsim.dense import DenseState

CLIFFORD_1Q = ["H", "S", "SDG", "X", "Y", "Z"]
CLIFFORD_2Q = ["CX", "CZ"]


def random_clifford_gates(n, count, rng):
    """Gate list over the Clifford IR set, two-qubit fraction ~0.45."""
    gates = []
    for _ in range(count):
        if n == 1 or rng.random() < 0.55:
            gates.append((CLIFFORD_1Q[rng.integers(0, len(CLIFFORD_1Q))],
                          (int(rng.integers(0, n)),)))
        else:
            q, r = rng.choice(n, size=2, replace=False)
            gates.append((CLIFFORD_2Q[rng.integers(0, 2)], (int(q), int(r))))
    return gates


def random_ch_state(n, rng, gates=60):
    ch = CHForm.init_zero(n)
    for name, qubits in random_clifford_gates(n, gates, rng):
        ch.apply_gate(name, *qubits)
    return ch


def random_clifford_pair(n, rng, gates=60):
    """(CHForm, DenseState) evolved through the same random Clifford circuit."""
    ch = CHForm.init_zero(n)
    de = DenseState(n)
    for name, qubits in random_clifford_gates(n, gates, rng):
        ch.apply_gate(name, *qubits)
        de.apply_gate(name, list(qubits))
    return ch, de


def random_clifford_circuit(n, count, rng):
    c = Circuit(n)
    for name, qubits in random_clifford_gates(n, count, rng):
        c.add(name, *qubits)
    return c


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
