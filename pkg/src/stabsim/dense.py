"""Brute-force statevector simulator used as the ground-truth oracle.

Capped at a small qubit count (STABSIM_MAX_DENSE_QUBITS, default 14);
gates are applied as bit-indexed kernels without materializing matrices
above two qubits.
"""

from __future__ import annotations

import math
import os

import numpy as np

DEFAULT_MAX_QUBITS = 14


def max_dense_qubits() -> int:
    return int(os.environ.get("STABSIM_MAX_DENSE_QUBITS", DEFAULT_MAX_QUBITS))


_SQ2 = 1.0 / math.sqrt(2.0)

_ONE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    "TDG": np.array([[1, 0], [0, np.exp(-1j * math.pi / 4)]], dtype=complex),
}


def gate_matrix(name: str, angle: float | None = None) -> np.ndarray:
    """Unitary matrix of a named gate (little-endian qubit order)."""
    name = name.upper()
    if name in _ONE_QUBIT:
        return _ONE_QUBIT[name]
    if name == "RZ":
        return np.array(
            [[np.exp(-1j * angle / 2), 0], [0, np.exp(1j * angle / 2)]], dtype=complex
        )
    if name == "PHASE":
        return np.array([[1, 0], [0, np.exp(1j * angle)]], dtype=complex)
    if name == "CX":
        m = np.eye(4, dtype=complex)
        # basis order |q1 q0>: control is the first listed qubit (bit 0)
        m[[1, 3]] = m[[3, 1]]
        return m
    if name == "CZ":
        m = np.eye(4, dtype=complex)
        m[3, 3] = -1
        return m
    if name in ("CCZ", "CCX"):
        m = np.eye(8, dtype=complex)
        if name == "CCZ":
            m[7, 7] = -1
        else:
            m[[3, 7]] = m[[7, 3]]
        return m
    raise ValueError(f"unknown gate {name}")


class DenseState:
    """2^n complex amplitudes with in-place gate kernels."""

    def __init__(self, n: int, cap: int | None = None):
        cap = max_dense_qubits() if cap is None else cap
        if n > cap:
            raise ValueError(f"dense oracle capped at {cap} qubits (requested {n})")
        self.n = n
        self.amps = np.zeros(2**n, dtype=complex)
        self.amps[0] = 1.0

    def _idx(self):
        return np.arange(2**self.n)

    def apply_1q(self, mat: np.ndarray, q: int) -> None:
        a = self.amps.reshape(2 ** (self.n - q - 1), 2, 2**q)
        a0 = a[:, 0, :].copy()
        a1 = a[:, 1, :].copy()
        a[:, 0, :] = mat[0, 0] * a0 + mat[0, 1] * a1
        a[:, 1, :] = mat[1, 0] * a0 + mat[1, 1] * a1

    def apply_phase_mask(self, qubits, phase: complex, controls_all_ones=True) -> None:
        idx = self._idx()
        sel = np.ones(len(idx), dtype=bool)
        for q in qubits:
            sel &= ((idx >> q) & 1).astype(bool)
        self.amps[sel] *= phase

    def apply_gate(self, name: str, qubits, angle: float | None = None) -> None:
        name = name.upper()
        if name == "I":
            return
        if name in _ONE_QUBIT and name not in ("I",):
            self.apply_1q(_ONE_QUBIT[name], qubits[0])
            return
        if name in ("RZ", "PHASE"):
            self.apply_1q(gate_matrix(name, angle), qubits[0])
            return
        idx = self._idx()
        if name == "CX":
            c, t = qubits
            sel = (((idx >> c) & 1) == 1) & (((idx >> t) & 1) == 0)
            src = idx[sel]
            dst = src | (1 << t)
            tmp = self.amps[src].copy()
            self.amps[src] = self.amps[dst]
            self.amps[dst] = tmp
            return
        if name == "CZ":
            self.apply_phase_mask(qubits, -1.0)
            return
        if name == "CCZ":
            self.apply_phase_mask(qubits, -1.0)
            return
        if name == "CCX":
            a, b, t = qubits
            sel = (((idx >> a) & 1) & ((idx >> b) & 1)).astype(bool) & (
                ((idx >> t) & 1) == 0
            )
            src = idx[sel]
            dst = src | (1 << t)
            tmp = self.amps[src].copy()
            self.amps[src] = self.amps[dst]
            self.amps[dst] = tmp
            return
        raise ValueError(f"unknown gate {name}")

    def apply_unitary(self, mat: np.ndarray, qubits) -> None:
        """Apply an arbitrary unitary on up to three listed qubits."""
        t = len(qubits)
        full = self.amps.reshape([2] * self.n)
        # move the listed qubits (bit q -> axis n-1-q) to the front, low bit last
        axes = [self.n - 1 - q for q in reversed(qubits)]
        rest = [ax for ax in range(self.n) if ax not in axes]
        perm = axes + rest
        moved = np.transpose(full, perm).reshape(2**t, -1)
        moved = mat @ moved
        moved = moved.reshape([2] * t + [2] * (self.n - t))
        inv = np.argsort(perm)
        self.amps = np.transpose(moved, inv).reshape(-1)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def distribution(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def inner(self, other: "DenseState") -> complex:
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return complex(np.vdot(self.amps, other.amps))


def dense_run(circuit, cap: int | None = None) -> DenseState:
    """Run a circuit IR on |0^n> exactly."""
    state = DenseState(circuit.n, cap=cap)
    for gate in circuit.gates:
        state.apply_gate(gate.name, gate.qubits, gate.angle)
    return state


def dense_inner(a: DenseState, b: DenseState) -> complex:
    return a.inner(b)


def dense_norm2(state: DenseState) -> float:
    return state.norm_squared()


def dense_distribution(state: DenseState) -> np.ndarray:
    return state.distribution()
