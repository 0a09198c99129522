"""Phase-exact stabilizer states in CH canonical form.

A state is held as ``|phi> = omega * U_C * U_H |s>`` where ``U_C`` is a
control-type Clifford (fixes |0^n>), ``U_H`` is a layer of Hadamards given
by the bit vector ``v``, ``s`` is a basis string and ``omega`` an exact
global phase.  ``U_C`` is tracked through its tableau: binary matrices
``F, G, M`` and a Z4 phase vector ``gamma`` with

    U_C^-1 Z_p U_C = Z(G_p)           (row p of G)
    U_C^-1 X_p U_C = i^gamma_p X(F_p) Z(M_p)

Clifford gates, Pauli operators and Pauli projectors are applied exactly,
including the global phase, so superpositions of these states keep their
relative phases bit-exact.
"""

from __future__ import annotations

import cmath
import json
import math

import numpy as np

from .f2 import (
    WORD_BITS,
    BitMatrix,
    BitVec,
    PhaseVecZ4,
    n_words,
    pack_bits,
    parity_words,
    unpack_bits,
)

_ONE = np.uint64(1)


class GlobalPhase:
    """Exact scalar of the form e^{i pi q/4} * 2^{p/2}, or exactly zero."""

    __slots__ = ("zero", "q", "p")

    def __init__(self, q: int = 0, p: int = 0, zero: bool = False):
        self.zero = bool(zero)
        self.q = 0 if self.zero else q % 8
        self.p = 0 if self.zero else int(p)

    @classmethod
    def one(cls) -> "GlobalPhase":
        return cls(0, 0)

    def copy(self) -> "GlobalPhase":
        return GlobalPhase(self.q, self.p, self.zero)

    def set_zero(self) -> None:
        self.zero, self.q, self.p = True, 0, 0

    def mul_phase8(self, k: int) -> None:
        if not self.zero:
            self.q = (self.q + k) % 8

    def mul_i_pow(self, k: int) -> None:
        self.mul_phase8(2 * k)

    def mul_minus_one(self) -> None:
        self.mul_phase8(4)

    def mul_sqrt2_pow(self, k: int) -> None:
        if not self.zero:
            self.p += k

    def mul(self, other: "GlobalPhase") -> "GlobalPhase":
        if self.zero or other.zero:
            return GlobalPhase(zero=True)
        return GlobalPhase(self.q + other.q, self.p + other.p)

    def to_complex(self) -> complex:
        if self.zero:
            return 0j
        return cmath.exp(1j * math.pi * self.q / 4) * 2.0 ** (self.p / 2)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GlobalPhase)
            and (self.zero, self.q, self.p) == (other.zero, other.q, other.p)
        )

    def __repr__(self) -> str:
        if self.zero:
            return "GlobalPhase(0)"
        return f"GlobalPhase(e^(i*pi*{self.q}/4)*2^({self.p}/2))"


def _build_single_qubit_table():
    """Closure table for |y> + i^delta |1-y> (optionally Hadamard-ed).

    Maps (v_q, y_q, delta) -> (a, b, c, q8) meaning the state equals
    e^{i pi q8/4} * sqrt(2) * S^a H^b |c>.
    """
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    s_mat = np.array([[1, 0], [0, 1j]], dtype=complex)
    table = {}
    for vq in (0, 1):
        for yq in (0, 1):
            for delta in range(4):
                vec = np.zeros(2, dtype=complex)
                vec[yq] = 1.0
                vec[1 - yq] += 1j**delta
                if vq:
                    vec = h @ vec
                for a in (0, 1):
                    for b in (0, 1):
                        for c in (0, 1):
                            target = np.zeros(2, dtype=complex)
                            target[c] = 1.0
                            if b:
                                target = h @ target
                            if a:
                                target = s_mat @ target
                            nz = 0 if abs(target[0]) > 1e-9 else 1
                            ratio = vec[nz] / target[nz]
                            if abs(abs(ratio) - math.sqrt(2)) > 1e-9:
                                continue
                            if np.max(np.abs(vec - ratio * target)) > 1e-9:
                                continue
                            q8 = round((cmath.phase(ratio) / (math.pi / 4))) % 8
                            resid = abs(ratio - cmath.exp(1j * math.pi * q8 / 4) * math.sqrt(2))
                            if resid > 1e-9:
                                continue
                            table[(vq, yq, delta)] = (a, b, c, q8)
                            break
                        else:
                            continue
                        break
                    else:
                        continue
                    break
                else:
                    raise AssertionError("no closure for single-qubit pair state")
    return table


_PAIR_TABLE = _build_single_qubit_table()


def _pair_table_array() -> np.ndarray:
    """The closure table as int8[(vq*8 + yq*4 + delta), 4] for the kernels."""
    out = np.zeros((16, 4), dtype=np.int8)
    for (vq, yq, delta), (a, b, c, q8) in _PAIR_TABLE.items():
        out[vq * 8 + yq * 4 + delta] = (a, b, c, q8)
    return out


PAIR_TABLE_ARRAY = _pair_table_array()

# op codes for compiled gate sequences: (code, arg0, arg1)
OP_S, OP_SDG, OP_CZ, OP_CX, OP_H, OP_X, OP_Y, OP_Z, OP_PHASE8 = range(9)
_OP_BY_NAME = {
    "S": OP_S, "SDG": OP_SDG, "CZ": OP_CZ, "CX": OP_CX, "H": OP_H,
    "X": OP_X, "Y": OP_Y, "Z": OP_Z,
}


def compile_clifford_ops(gates) -> np.ndarray:
    """Encode (name, qubits[, angle]) Clifford gates as int32 op triples.

    Clifford-angle RZ/PHASE map onto S powers plus a global-phase op.
    """
    ops = []
    for entry in gates:
        name, qubits = entry[0], entry[1]
        angle = entry[2] if len(entry) > 2 else None
        name = name.upper()
        if name == "I":
            continue
        if name in ("RZ", "PHASE"):
            m = round(angle / (math.pi / 2))
            if abs(angle - m * math.pi / 2) > 1e-9:
                raise ValueError(f"{name}({angle}) is not a Clifford angle")
            r = m % 4
            q = qubits[0]
            if r == 1:
                ops.append((OP_S, q, 0))
            elif r == 2:
                ops.append((OP_Z, q, 0))
            elif r == 3:
                ops.append((OP_SDG, q, 0))
            if name == "RZ" and m % 8:
                ops.append((OP_PHASE8, (-m) % 8, 0))
            continue
        code = _OP_BY_NAME.get(name)
        if code is None:
            raise ValueError(f"not a Clifford gate: {name}")
        q0 = qubits[0]
        q1 = qubits[1] if len(qubits) > 1 else 0
        ops.append((code, q0, q1))
    return np.array(ops, dtype=np.int32).reshape(-1, 3)


def _lowest_bit(words: np.ndarray) -> int:
    for wi, word in enumerate(words):
        iw = int(word)
        if iw:
            return wi * WORD_BITS + (iw & -iw).bit_length() - 1
    raise ValueError("no set bit")


class PauliOp:
    """Signed Pauli operator i^theta * X(x) * Z(z) on n qubits."""

    __slots__ = ("n", "theta", "x", "z")

    def __init__(self, n: int, theta: int, x: BitVec, z: BitVec):
        if x.n != n or z.n != n:
            raise ValueError("Pauli support length mismatch")
        self.n = n
        self.theta = theta % 4
        self.x = x
        self.z = z

    @classmethod
    def from_label(cls, label: str, n: int | None = None, sign: complex = 1) -> "PauliOp":
        """Build from a string over IXYZ, e.g. ``"XIZY"`` (qubit 0 first)."""
        if n is None:
            n = len(label)
        x, z = BitVec(n), BitVec(n)
        theta = {1: 0, 1j: 1, -1: 2, -1j: 3}[sign]
        for j, ch in enumerate(label.upper()):
            if ch == "X":
                x[j] = 1
            elif ch == "Z":
                z[j] = 1
            elif ch == "Y":
                x[j] = 1
                z[j] = 1
                theta = (theta + 1) % 4
            elif ch != "I":
                raise ValueError(f"bad Pauli letter {ch!r}")
        return cls(n, theta, x, z)

    def is_hermitian(self) -> bool:
        return (self.theta - self.x.parity_and(self.z)) % 2 == 0


class CHForm:
    """Stabilizer state with exact global phase, mutated in place."""

    __slots__ = ("n", "F", "G", "M", "gamma", "v", "s", "omega")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = int(n)
        self.F = BitMatrix.identity(n)
        self.G = BitMatrix.identity(n)
        self.M = BitMatrix(n, n)
        self.gamma = PhaseVecZ4(n)
        self.v = BitVec(n)
        self.s = BitVec(n)
        self.omega = GlobalPhase.one()

    # -- construction -------------------------------------------------

    @classmethod
    def init_zero(cls, n: int) -> "CHForm":
        """The trivial CH-form of |0^n>."""
        return cls(n)

    def copy(self) -> "CHForm":
        other = CHForm.__new__(CHForm)
        other.n = self.n
        other.F = self.F.copy()
        other.G = self.G.copy()
        other.M = self.M.copy()
        other.gamma = self.gamma.copy()
        other.v = self.v.copy()
        other.s = self.s.copy()
        other.omega = self.omega.copy()
        return other

    # -- left multiplications (gate applied to the state) -------------

    def _check_q(self, *qs):
        seen = set()
        for q in qs:
            if not 0 <= q < self.n:
                raise IndexError(f"qubit {q} out of range")
            if q in seen:
                raise IndexError("qubit indices must be distinct")
            seen.add(q)

    def apply_s(self, q: int) -> None:
        self._check_q(q)
        self.M.words[q] ^= self.G.words[q]
        self.gamma.add(q, -1)

    def apply_sdg(self, q: int) -> None:
        self._check_q(q)
        self.M.words[q] ^= self.G.words[q]
        self.gamma.add(q, 1)

    def apply_cz(self, q: int, r: int) -> None:
        self._check_q(q, r)
        self.M.words[q] ^= self.G.words[r]
        self.M.words[r] ^= self.G.words[q]

    def apply_cx(self, q: int, r: int) -> None:
        self._check_q(q, r)
        # gamma update reads the pre-update tableau
        mf = int(parity_words(self.M.words[q] & self.F.words[r]))
        self.gamma[q] = (self.gamma[q] + self.gamma[r] + 2 * mf) % 4
        self.G.words[r] ^= self.G.words[q]
        self.F.words[q] ^= self.F.words[r]
        self.M.words[q] ^= self.M.words[r]

    def apply_x(self, q: int) -> None:
        self._check_q(q)
        x = BitVec(self.n)
        x[q] = 1
        self.apply_pauli(PauliOp(self.n, 0, x, BitVec(self.n)))

    def apply_y(self, q: int) -> None:
        self._check_q(q)
        x = BitVec(self.n)
        x[q] = 1
        z = BitVec(self.n)
        z[q] = 1
        self.apply_pauli(PauliOp(self.n, 1, x, z))

    def apply_z(self, q: int) -> None:
        self._check_q(q)
        z = BitVec(self.n)
        z[q] = 1
        self.apply_pauli(PauliOp(self.n, 0, BitVec(self.n), z))

    def apply_h(self, p: int) -> None:
        self._check_q(p)
        if self.omega.zero:
            return
        gp, fp, mp = self.G.words[p], self.F.words[p], self.M.words[p]
        vw, sw = self.v.words, self.s.words
        t = sw ^ (gp & vw)
        u = sw ^ (fp & ~vw) ^ (mp & vw)
        alpha = int(parity_words(gp & ~vw & sw))
        beta = int(parity_words(mp & ~vw & sw)) ^ int(parity_words(fp & vw & (mp ^ sw)))
        gp_phase = self.gamma[p]
        if np.array_equal(t, u):
            # omega *= 2^(-1/2) * ((-1)^alpha + i^gamma_p (-1)^beta)
            self.s.words = t.copy()
            re = -1 if alpha else 1
            other = (1j**gp_phase) * (-1 if beta else 1)
            val = re + other
            if abs(val) < 1e-12:
                self.omega.set_zero()
            elif gp_phase % 2 == 0:
                # val = ±2
                self.omega.mul_sqrt2_pow(1)
                if val.real < 0:
                    self.omega.mul_minus_one()
            else:
                # val = ±1 ± i, magnitude sqrt2
                q8 = round(cmath.phase(val) / (math.pi / 4)) % 8
                self.omega.mul_phase8(q8)
            return
        delta = (gp_phase + 2 * (alpha + beta)) % 4
        self.omega.mul_sqrt2_pow(-1)
        if alpha:
            self.omega.mul_minus_one()
        self._absorb_pair(t, u, delta)

    def apply_ops(self, ops: np.ndarray) -> None:
        """Run a compiled op sequence (see compile_clifford_ops).

        Dispatches to the compiled gate kernel when available; the Python
        gate methods are the semantically identical fallback.
        """
        from . import kernels

        if kernels.ch_apply_ops is not None and ops.shape[0]:
            omega_state = np.array(
                [self.omega.q, self.omega.p, 1 if self.omega.zero else 0], dtype=np.int64
            )
            kernels.ch_apply_ops(
                self.F.words, self.G.words, self.M.words, self.gamma.vals,
                self.v.words, self.s.words, omega_state,
                np.ascontiguousarray(ops, dtype=np.int32), PAIR_TABLE_ARRAY, self.n,
            )
            if omega_state[2]:
                self.omega.set_zero()
            else:
                self.omega.q = int(omega_state[0]) % 8
                self.omega.p = int(omega_state[1])
            return
        handlers = [
            self.apply_s, self.apply_sdg, self.apply_cz, self.apply_cx,
            self.apply_h, self.apply_x, self.apply_y, self.apply_z,
        ]
        for code, a, b in ops:
            if code == OP_PHASE8:
                self.omega.mul_phase8(int(a))
            elif code in (OP_CZ, OP_CX):
                handlers[code](int(a), int(b))
            else:
                handlers[code](int(a))

    def apply_gate(self, name: str, *qubits: int) -> None:
        """Apply a named Clifford gate from {I,X,Y,Z,H,S,SDG,CX,CZ}."""
        name = name.upper()
        if name == "I":
            return
        handler = {
            "X": self.apply_x,
            "Y": self.apply_y,
            "Z": self.apply_z,
            "H": self.apply_h,
            "S": self.apply_s,
            "SDG": self.apply_sdg,
            "CX": self.apply_cx,
            "CZ": self.apply_cz,
        }.get(name)
        if handler is None:
            raise ValueError(f"not a Clifford gate: {name}")
        handler(*qubits)

    # -- right multiplications of U_C (batched, used internally) ------

    def _right_s(self, q: int) -> None:
        wq, bq = q // WORD_BITS, np.uint64(q % WORD_BITS)
        fq = (self.F.words[:, wq] >> bq) & _ONE
        self.M.words[:, wq] ^= fq << bq
        self.gamma.vals = ((self.gamma.vals - fq.astype(np.int64)) % 4).astype(np.uint8)

    def _right_cx_control_batch(self, q: int, mask: np.ndarray) -> None:
        # product over i in mask of CX with control q, target i
        if not mask.any():
            return
        wq, bq = q // WORD_BITS, np.uint64(q % WORD_BITS)
        gpar = parity_words(self.G.words & mask, axis=1).astype(np.uint64)
        mpar = parity_words(self.M.words & mask, axis=1).astype(np.uint64)
        fsel = ((self.F.words[:, wq] >> bq) & _ONE).astype(bool)
        self.G.words[:, wq] ^= gpar << bq
        self.M.words[:, wq] ^= mpar << bq
        self.F.words[fsel] ^= mask

    def _right_cz_batch(self, q: int, mask: np.ndarray) -> None:
        # product over i in mask of CZ between q and i
        if not mask.any():
            return
        wq, bq = q // WORD_BITS, np.uint64(q % WORD_BITS)
        fpar = parity_words(self.F.words & mask, axis=1)
        fq = ((self.F.words[:, wq] >> bq) & _ONE).astype(np.uint8)
        self.M.words[:, wq] ^= (fpar.astype(np.uint64) & _ONE) << bq
        self.M.words[fq.astype(bool)] ^= mask
        self.gamma.vals = ((self.gamma.vals + 2 * fq * (fpar & 1)) % 4).astype(np.uint8)

    def _right_cx_target_batch(self, q: int, mask: np.ndarray) -> None:
        # product over i in mask of CX with control i, target q
        if not mask.any():
            return
        wq, bq = q // WORD_BITS, np.uint64(q % WORD_BITS)
        gsel = ((self.G.words[:, wq] >> bq) & _ONE).astype(bool)
        msel = ((self.M.words[:, wq] >> bq) & _ONE).astype(bool)
        fpar = parity_words(self.F.words & mask, axis=1).astype(np.uint64)
        self.G.words[gsel] ^= mask
        self.F.words[:, wq] ^= fpar << bq
        self.M.words[msel] ^= mask

    def _absorb_pair(self, t: np.ndarray, u: np.ndarray, delta: int) -> None:
        """Rewrite U_H (|t> + i^delta |u>) as omega~ W_C W_H |s'>, t != u.

        W_C consists of O(n) gates absorbed into U_C by right multiplication;
        the pivot comes from the Hadamard-free difference positions when any
        exist, else from the Hadamard ones.
        """
        diff = t ^ u
        vw = self.v.words
        v0 = diff & ~vw
        v1 = diff & vw
        if v0.any():
            q = _lowest_bit(v0)
            wq, bq = q // WORD_BITS, np.uint64(q % WORD_BITS)
            mask_cx = v0.copy()
            mask_cx[wq] &= ~(_ONE << bq)
            self._right_cx_control_batch(q, mask_cx)
            self._right_cz_batch(q, v1)
        else:
            q = _lowest_bit(v1)
            wq, bq = q // WORD_BITS, np.uint64(q % WORD_BITS)
            mask = v1.copy()
            mask[wq] &= ~(_ONE << bq)
            self._right_cx_target_batch(q, mask)
        tq = int((t[wq] >> bq) & _ONE)
        if tq:
            y = u.copy()
            y[wq] ^= _ONE << bq
        else:
            y = t.copy()
        vq = int((vw[wq] >> bq) & _ONE)
        a, b, c, q8 = _PAIR_TABLE[(vq, tq, delta)]
        if a:
            self._right_s(q)
        self.omega.mul_phase8(q8)
        self.omega.mul_sqrt2_pow(1)
        self.v[q] = b
        y[wq] &= ~(_ONE << bq)
        y[wq] |= np.uint64(c) << bq
        self.s.words = y

    # -- Pauli operators and projectors --------------------------------

    def _pauli_to_s_level(self, pauli: PauliOp):
        """Commute i^theta X(x) Z(z) through U_C then U_H.

        Returns (nu, a, b) describing the image i^nu X(a) Z(b) acting
        directly on |s>.
        """
        nu = pauli.theta
        a = np.zeros_like(self.s.words)
        b = np.zeros_like(self.s.words)
        for p in np.nonzero(unpack_bits(pauli.x.words, self.n))[0]:
            nu += self.gamma[int(p)] + 2 * int(parity_words(b & self.F.words[int(p)]))
            a ^= self.F.words[int(p)]
            b ^= self.M.words[int(p)]
        for p in np.nonzero(unpack_bits(pauli.z.words, self.n))[0]:
            b ^= self.G.words[int(p)]
        vw = self.v.words
        nu += 2 * int(parity_words(a & b & vw))
        a_new = (a & ~vw) | (b & vw)
        b_new = (b & ~vw) | (a & vw)
        return nu % 4, a_new, b_new

    def apply_pauli(self, pauli: PauliOp) -> None:
        """Apply a signed Pauli operator exactly (cost O(n^2))."""
        if self.omega.zero:
            return
        nu, a, b = self._pauli_to_s_level(pauli)
        nu = (nu + 2 * int(parity_words(b & self.s.words))) % 4
        self.s.words = self.s.words ^ a
        self.omega.mul_i_pow(nu)

    def apply_projector(self, pauli: PauliOp, sign: int = 1) -> None:
        """Apply (I + sign*P)/2 for a Hermitian Pauli P; may zero the state."""
        if self.omega.zero:
            return
        if not pauli.is_hermitian():
            raise ValueError("projector requires a Hermitian Pauli (P^2 = I)")
        nu, a, b = self._pauli_to_s_level(pauli)
        delta = (nu + 2 * int(parity_words(b & self.s.words)) + (0 if sign > 0 else 2)) % 4
        t = self.s.words ^ a
        if np.array_equal(t, self.s.words):
            if delta == 0:
                return
            if delta == 2:
                self.omega.set_zero()
                return
            raise AssertionError("non-Hermitian image in projector")
        self.omega.mul_sqrt2_pow(-2)
        self._absorb_pair(self.s.words.copy(), t, delta)

    def project_z(self, q: int, bit: int) -> None:
        """Project qubit q onto |bit> via (I + (-1)^bit Z_q)/2."""
        z = BitVec(self.n)
        z[q] = 1
        self.apply_projector(PauliOp(self.n, 0, BitVec(self.n), z), 1 if bit == 0 else -1)

    # -- readout -------------------------------------------------------

    def amplitude_exact(self, x: BitVec):
        """<x|phi> as (zero, q8, p) with value e^{i pi q8/4} 2^{p/2}."""
        if x.n != self.n:
            raise ValueError("bit string length mismatch")
        if self.omega.zero:
            return (True, 0, 0)
        mu = 0
        u = np.zeros_like(self.s.words)
        t = np.zeros_like(self.s.words)
        for p in np.nonzero(x.to_bits())[0]:
            mu += self.gamma[int(p)] + 2 * int(parity_words(t & self.F.words[int(p)]))
            u ^= self.F.words[int(p)]
            t ^= self.M.words[int(p)]
        vw, sw = self.v.words, self.s.words
        if not np.array_equal(u & ~vw, sw & ~vw):
            return (True, 0, 0)
        sign = int(parity_words(t & sw & ~vw)) ^ int(parity_words(u & vw & (t ^ sw)))
        q8 = (self.omega.q + 2 * mu + 4 * sign) % 8
        p_pow = self.omega.p - self.v.popcount()
        return (False, q8, p_pow)

    def amplitude(self, x: BitVec) -> complex:
        """<x|phi> as a complex double (the value itself is exact)."""
        zero, q8, p_pow = self.amplitude_exact(x)
        if zero:
            return 0j
        return cmath.exp(1j * math.pi * q8 / 4) * 2.0 ** (p_pow / 2)

    def sample_basis(self, rng: np.random.Generator) -> BitVec:
        """Draw x with probability |<x|phi>|^2 / ||phi||^2."""
        if self.omega.zero:
            raise ValueError("cannot sample from the zero state")
        rand = rng.integers(0, 2**64, size=self.s.words.shape, dtype=np.uint64)
        w = (self.s.words & ~self.v.words) | (rand & self.v.words)
        par = parity_words(self.G.words & w[None, :], axis=1)
        out = BitVec(self.n)
        out.words = pack_bits(par)
        return out

    def sample_basis_many(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Vectorized sampling: (count, n) bit array of i.i.d. draws."""
        if self.omega.zero:
            raise ValueError("cannot sample from the zero state")
        rand = rng.integers(0, 2**64, size=(count,) + self.s.words.shape, dtype=np.uint64)
        w = (self.s.words & ~self.v.words)[None, :] | (rand & self.v.words[None, :])
        return parity_words(self.G.words[None, :, :] & w[:, None, :], axis=2)

    def norm_squared(self) -> float:
        return 0.0 if self.omega.zero else 2.0**self.omega.p

    # -- diagnostics / serialization -----------------------------------

    def check_invariants(self) -> None:
        """FG^T = I and MF^T symmetric (mod 2); raises on violation."""
        if self.omega.zero:
            return
        from .f2 import matmul_f2

        fgt = matmul_f2(self.F, self.G.transpose())
        if fgt != BitMatrix.identity(self.n):
            raise AssertionError("FG^T != I")
        mft = matmul_f2(self.M, self.F.transpose())
        if mft != mft.transpose():
            raise AssertionError("MF^T not symmetric")

    def _rows_hex(self, m: BitMatrix):
        out = []
        for i in range(m.rows):
            val = 0
            for wi, word in enumerate(m.words[i]):
                val |= int(word) << (WORD_BITS * wi)
            out.append(format(val, "x"))
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "F": self._rows_hex(self.F),
                "G": self._rows_hex(self.G),
                "M": self._rows_hex(self.M),
                "gamma": [int(g) for g in self.gamma.vals],
                "v": self.v.to_string(),
                "s": self.s.to_string(),
                "omega": {"q": self.omega.q, "p": self.omega.p, "zero": self.omega.zero},
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CHForm":
        data = json.loads(text)
        n = data["n"]
        state = cls(n)

        def rows_from_hex(rows_hex):
            m = BitMatrix(n, n)
            for i, h in enumerate(rows_hex):
                val = int(h, 16)
                for wi in range(n_words(n)):
                    m.words[i, wi] = np.uint64((val >> (WORD_BITS * wi)) & (2**64 - 1))
            return m

        state.F = rows_from_hex(data["F"])
        state.G = rows_from_hex(data["G"])
        state.M = rows_from_hex(data["M"])
        state.gamma = PhaseVecZ4(n, np.array(data["gamma"], dtype=np.uint8))
        state.v = BitVec.from_bits(int(c) for c in data["v"])
        state.s = BitVec.from_bits(int(c) for c in data["s"])
        om = data["omega"]
        state.omega = GlobalPhase(om["q"], om["p"], om["zero"])
        return state

    def to_statevector(self) -> np.ndarray:
        """Dense amplitude vector (exponential in n; for tests only)."""
        out = np.zeros(2**self.n, dtype=complex)
        if self.omega.zero:
            return out
        for idx in range(2**self.n):
            bits = [(idx >> j) & 1 for j in range(self.n)]
            out[idx] = self.amplitude(BitVec.from_bits(bits))
        return out
