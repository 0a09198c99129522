"""Stabilizer superpositions: sparsified sum-over-Cliffords construction,
equatorial inner products, Monte Carlo norm estimation and the
approximation-quality tail bound.

Norm estimation follows the unbiased-estimator scheme: draw a random
equatorial state phi_A, compute eta_A = 2^n |<phi_A|psi>|^2, average over
L = ceil(4/eps^2) draws and take a median over independent batches.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import kernels
from .chform import CHForm
from .expsum import QuadFormZ4, expsum_z4_complex
from .f2 import n_words, pack_bits, parity_words, popcount_words, unpack_bits

_ONE = np.uint64(1)


class EquatorialState:
    """phi_A = 2^{-n/2} sum_x i^{x A x^T} |x> for A with bit off-diagonal
    and Z4 diagonal."""

    __slots__ = ("n", "form")

    def __init__(self, form: QuadFormZ4):
        self.n = form.n
        self.form = form

    def to_statevector(self) -> np.ndarray:
        n = self.n
        xs = unpack_bits(np.arange(2**n, dtype=np.uint64)[:, None], n)
        dense = self.form.to_dense()
        phases = np.array([1j ** (int(x @ dense @ x) % 4) for x in xs.astype(np.int64)])
        return phases / 2 ** (n / 2)

    def diagonal_clifford_gates(self):
        """Gate list for K_A with phi_A = K_A H^{x n} |0^n>: S powers and CZs."""
        gates = []
        for j in range(self.n):
            for _ in range(int(self.form.diag[j]) % 4):
                gates.append(("S", (j,)))
        for a in range(self.n):
            for b in range(a + 1, self.n):
                if self.form.upper[a, b]:
                    gates.append(("CZ", (a, b)))
        return gates


def random_equatorial(n: int, rng: np.random.Generator) -> EquatorialState:
    """Uniform draw from the 2^{n(n-1)/2} * 4^n equatorial states."""
    return EquatorialState(QuadFormZ4.random(n, rng))


class StabilizerSuperposition:
    """Sum_alpha b_alpha |phi_alpha> with CH-form terms.

    Zero-flagged terms are dropped on insert; an empty term list represents
    the zero vector.  ``l1`` records the 1-norm of the source decomposition
    when built by sparsification.
    """

    def __init__(self, n: int, l1: float | None = None, target_delta: float | None = None):
        self.n = n
        self.terms: list[tuple[complex, CHForm]] = []
        self.l1 = l1
        self.target_delta = target_delta

    def add_term(self, b: complex, phi: CHForm) -> None:
        if phi.n != self.n:
            raise ValueError("qubit count mismatch")
        if not phi.omega.zero and b != 0:
            self.terms.append((complex(b), phi))

    @property
    def k(self) -> int:
        return len(self.terms)

    def copy(self) -> "StabilizerSuperposition":
        out = StabilizerSuperposition(self.n, self.l1, self.target_delta)
        out.terms = [(b, phi.copy()) for b, phi in self.terms]
        return out

    def apply_projector_all(self, q: int, bit: int) -> None:
        """Project qubit q of every term onto |bit>; drops annihilated terms."""
        kept = []
        for b, phi in self.terms:
            phi.project_z(q, bit)
            if not phi.omega.zero:
                kept.append((b, phi))
        self.terms = kept

    def to_statevector(self) -> np.ndarray:
        out = np.zeros(2**self.n, dtype=complex)
        for b, phi in self.terms:
            out += b * phi.to_statevector()
        return out


def apply_projector_all(psi: StabilizerSuperposition, q: int, bit: int) -> None:
    psi.apply_projector_all(q, bit)


# -- equatorial inner product ------------------------------------------


def inner_equatorial(phi: CHForm, eq: EquatorialState) -> complex:
    """<phi|phi_A> including the global phase of phi; cost O(n^3).

    Uses K = G^T (A + J) G with J assembled from gamma and M F^T, reducing
    the amplitude sum to an exponential sum over the Hadamard support.
    """
    if phi.n != eq.n:
        raise ValueError("dimension mismatch")
    if phi.omega.zero:
        return 0j
    n = phi.n
    g = phi.G.to_array().astype(np.int64)
    m = phi.M.to_array().astype(np.int64)
    f = phi.F.to_array().astype(np.int64)
    j_mat = (m @ f.T) % 2
    np.fill_diagonal(j_mat, phi.gamma.vals)
    c = eq.form.to_dense() + j_mat
    k_mat = g.T @ c @ g
    s = phi.s.to_bits().astype(np.int64)
    v = phi.v.to_bits().astype(np.int64)
    sks = int(s @ k_mat @ s) % 4
    sk = (s @ k_mat) % 2
    sup = np.nonzero(v)[0]
    diag = (np.diag(k_mat)[sup] + 2 * (s[sup] ^ sk[sup])) % 4
    upper = np.triu(k_mat[np.ix_(sup, sup)] % 2, 1)
    z = expsum_z4_complex(QuadFormZ4(len(sup), upper, diag))
    nv = len(sup)
    pref = 2.0 ** (-(n + nv) / 2) * (1j**sks) * (-1.0) ** int((s @ v) % 2)
    return complex(phi.omega.to_complex().conjugate() * pref * z)


# -- frozen arrays for the kernels --------------------------------------


def freeze_norm_data(psi: StabilizerSuperposition) -> kernels.NormData:
    """Stack per-term tableaux into the packed layout the kernels consume."""
    k, n = psi.k, psi.n
    w = n_words(n)
    if k == 0:
        raise ValueError("empty superposition")
    g = np.stack([phi.G.words for _, phi in psi.terms])
    f = np.stack([phi.F.words for _, phi in psi.terms])
    m = np.stack([phi.M.words for _, phi in psi.terms])
    gamma = np.stack([phi.gamma.vals for _, phi in psi.terms])
    v = np.stack([phi.v.words for _, phi in psi.terms])
    s = np.stack([phi.s.words for _, phi in psi.terms])
    gt = np.zeros_like(g)
    j2 = np.zeros_like(g)
    for a in range(n):
        wa, ba = a // 64, np.uint64(a % 64)
        col = ((g[:, :, wa] >> ba) & _ONE).astype(np.uint8)
        gt[:, a, :] = pack_bits(col)
        par = parity_words(f & m[:, a, None, :], axis=2)
        j2[:, a, :] = pack_bits(par)
        j2[:, a, wa] &= ~(_ONE << ba)
        j2[:, a, wa] |= (gamma[:, a].astype(np.uint64) & _ONE) << ba
    nv = popcount_words(v, axis=1).astype(np.int32)
    sv = parity_words(s & v, axis=1).astype(np.int64)
    wts = np.array(
        [
            b * phi.omega.to_complex() * 2.0 ** (-(n + int(nv[i])) / 2)
            for i, (b, phi) in enumerate(psi.terms)
        ],
        dtype=np.complex128,
    )
    wts *= np.where(sv, -1.0, 1.0)
    return kernels.NormData(
        k=k, n=n, gt=np.ascontiguousarray(gt), g=np.ascontiguousarray(g),
        j2=np.ascontiguousarray(j2), gamma=np.ascontiguousarray(gamma),
        v=np.ascontiguousarray(v), s=np.ascontiguousarray(s), nv=nv, w=wts,
    )


def _probe_arrays(eq: EquatorialState):
    up = eq.form.upper
    sym = (up + up.T) % 2
    np.fill_diagonal(sym, eq.form.diag & 1)
    return pack_bits(sym.astype(np.uint8)), eq.form.diag.astype(np.uint8)


def random_probe_batch(n: int, count: int, rng: np.random.Generator):
    """Packed (A2, Ad) arrays for ``count`` uniform equatorial probes."""
    upper = np.triu(rng.integers(0, 2, size=(count, n, n), dtype=np.uint8), 1)
    sym = upper | np.swapaxes(upper, 1, 2)
    ad = rng.integers(0, 4, size=(count, n), dtype=np.uint8)
    idx = np.arange(n)
    sym[:, idx, idx] = ad & 1
    return pack_bits(sym), ad


def norm_probe_samples(
    nd: kernels.NormData, count: int, rng: np.random.Generator, workers: int = 1
) -> np.ndarray:
    """eta_A = 2^n |<phi_A|psi>|^2 for ``count`` independent probes."""
    a2, ad = random_probe_batch(nd.n, count, rng)
    scale = 2.0**nd.n
    if workers > 1 and count >= 2 * workers:
        bounds = np.linspace(0, count, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(
                lambda i: kernels.norm_sum_probes(nd, a2[bounds[i]:bounds[i + 1]],
                                                  ad[bounds[i]:bounds[i + 1]]),
                range(workers),
            )
            sums = np.concatenate(list(parts))
    else:
        sums = kernels.norm_sum_probes(nd, a2, ad)
    return scale * np.abs(sums) ** 2


def median_batches(p_fail: float) -> int:
    """Number of median batches; 1 when Chebyshev alone reaches p_fail."""
    if not 0 < p_fail < 1:
        raise ValueError("p_fail must be in (0,1)")
    if p_fail >= 0.25:
        return 1
    return 2 * math.ceil(3 * math.log2(1.0 / p_fail)) + 1


def estimate_norm(
    psi: StabilizerSuperposition,
    eps: float,
    p_fail: float,
    rng: np.random.Generator,
    workers: int = 1,
) -> float:
    """Estimate ||psi||^2 to relative error eps with confidence 1 - p_fail.

    Median of ``median_batches(p_fail)`` means of L = ceil(4/eps^2)
    samples of the unbiased equatorial estimator.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0,1)")
    if psi.k == 0:
        return 0.0
    nd = freeze_norm_data(psi)
    return estimate_norm_from_data(nd, eps, p_fail, rng, workers)


def estimate_norm_from_data(
    nd: kernels.NormData,
    eps: float,
    p_fail: float,
    rng: np.random.Generator,
    workers: int = 1,
) -> float:
    n_batches = median_batches(p_fail)
    l_samples = math.ceil(4.0 / eps**2)
    means = []
    for _ in range(n_batches):
        etas = norm_probe_samples(nd, l_samples, rng, workers=workers)
        means.append(float(etas.mean()))
    return float(np.median(means))


# -- sparsified sum-over-Cliffords --------------------------------------


def choose_k(l1: float, delta: float) -> int:
    """Term count floor((||c||_1 / delta)^2), at least 1."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return max(1, math.floor((l1 / delta) ** 2))


def apply_clifford_ir_gate(phi: CHForm, name: str, qubits, angle: float | None = None) -> None:
    """Apply a Clifford IR gate, mapping Clifford-angle RZ/PHASE onto S powers."""
    name = name.upper()
    if name in ("RZ", "PHASE"):
        m = round(angle / (math.pi / 2))
        if abs(angle - m * math.pi / 2) > 1e-9:
            raise ValueError(f"{name}({angle}) is not a Clifford angle")
        q = qubits[0]
        r = m % 4
        if r == 1:
            phi.apply_s(q)
        elif r == 2:
            phi.apply_z(q)
        elif r == 3:
            phi.apply_sdg(q)
        if name == "RZ":
            # RZ(m pi/2) = (e^{-i pi/4} S)^m
            phi.omega.mul_phase8((-m) % 8)
        return
    phi.apply_gate(name, *qubits)


def _compile_sparsifier_plan(circuit, registry):
    """Split the circuit into fixed Clifford op blocks and sampled slots."""
    from .chform import compile_clifford_ops

    fixed: list = []
    slots = []
    pending = []
    l1_total = 1.0
    for gate in circuit.gates:
        if registry.is_clifford_gate(gate):
            pending.append((gate.name, gate.qubits, gate.angle))
            continue
        dec = registry.decomposition_for(gate)
        l1_total *= dec.l1
        fixed.append(compile_clifford_ops(pending))
        pending = []
        frag_ops = [
            compile_clifford_ops(
                [(fn, tuple(gate.qubits[t] for t in fq)) for fn, fq in frag]
            )
            for frag in dec.fragments
        ]
        probs = dec.probabilities
        phases = np.asarray(dec.coefficients) / np.abs(dec.coefficients)
        slots.append((np.cumsum(probs), phases, frag_ops))
    fixed.append(compile_clifford_ops(pending))
    return fixed, slots, l1_total


def build_sparse_sum_over_cliffords(
    circuit,
    registry,
    k: int,
    rng: np.random.Generator,
) -> StabilizerSuperposition:
    """Draw k stabilizer terms approximating U|0^n>.

    Each term runs one CH-form pass over the circuit; every non-Clifford
    gate contributes one Clifford fragment drawn with probability
    |c_j| / ||c||_1, with the unit-modulus phase of c_j folded into the
    term coefficient.  E||psi - Omega||^2 is bounded by ||c||_1^2 / k
    (the exact mean is (||c||_1^2 - ||psi||^2) / k).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    fixed, slots, l1_total = _compile_sparsifier_plan(circuit, registry)
    psi = StabilizerSuperposition(circuit.n, l1=l1_total)
    base = l1_total / k
    for _ in range(k):
        phi = CHForm.init_zero(circuit.n)
        phase = complex(1.0)
        pieces = [fixed[0]]
        for slot_idx, (cum, phases, frag_ops) in enumerate(slots):
            j = int(np.searchsorted(cum, rng.random(), side="right"))
            j = min(j, len(phases) - 1)
            phase *= phases[j]
            pieces.append(frag_ops[j])
            pieces.append(fixed[slot_idx + 1])
        ops = np.concatenate(pieces) if pieces else np.zeros((0, 3), np.int32)
        phi.apply_ops(ops)
        psi.add_term(base * phase, phi)
    return psi


def build_gadget_fixed_superposition(gadget, registry) -> StabilizerSuperposition:
    """Exact stabilizer decomposition of U|0^n> (x) |0^tau> via gadgets.

    Expands every magic state |V> = V|+^t> through its exact decomposition
    (the term count is the product of per-gate term counts), runs the
    gadgetized Clifford, postselects every ancilla on 0 and rescales by
    2^{tau/2}.  The result has norm exactly 1.
    """
    import itertools

    decs = [registry.decomposition_for(gate) for gate, _ in gadget.magic]
    ancillas = [ancs for _, ancs in gadget.magic]
    n_tot = gadget.n + gadget.tau
    psi = StabilizerSuperposition(n_tot, l1=None)
    index_sets = [range(len(d.coefficients)) for d in decs]
    for combo in itertools.product(*index_sets):
        coeff = complex(gadget.renormalization)
        phi = CHForm.init_zero(n_tot)
        for anc in ancillas:
            for a in anc:
                phi.apply_h(a)
        for dec, anc, j in zip(decs, ancillas, combo):
            coeff *= dec.coefficients[j]
            for fname, fqubits in dec.fragments[j]:
                apply_clifford_ir_gate(phi, fname, tuple(anc[t] for t in fqubits))
        for gate in gadget.clifford.gates:
            apply_clifford_ir_gate(phi, gate.name, gate.qubits, gate.angle)
        for anc in ancillas:
            for a in anc:
                phi.project_z(a, 0)
                if phi.omega.zero:
                    break
            if phi.omega.zero:
                break
        psi.add_term(coeff, phi)
    return psi


def tail_check(
    l1: float,
    omega: StabilizerSuperposition,
    delta: float,
    eps: float,
    p_fail: float,
    rng: np.random.Generator,
    workers: int = 1,
) -> float:
    """Upper bound <Omega|Omega> - 1 + delta^2 on ||psi - Omega||^2.

    Valid with probability >= 1 - 2 exp(-delta^2 / 8F(psi)) when
    k >= ||c||_1^2 / delta^2; the norm is estimated to relative error eps.
    """
    if omega.k < l1**2 / delta**2 - 1e-9:
        raise ValueError("tail bound requires k >= (||c||_1/delta)^2")
    eta = estimate_norm(omega, eps, p_fail, rng, workers=workers)
    return eta - 1.0 + delta**2
