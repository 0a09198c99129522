"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -s``).

Expected values are either trivial constants, independently derived by the
stated oracle (dense statevector, brute-force enumeration, naive loops), or
frozen closed-form constants verified by the small-n solvers.
"""

import math
import resource
import time

import numpy as np
import pytest

from conftest import random_clifford_gates, random_ch_state
from stabsim.chform import CHForm
from stabsim.circuit import (
    Circuit,
    gen_hidden_shift,
    gen_qaoa_e3lin2,
    cost_e3lin2_bits,
    mc_expectation_e3lin2,
)
from stabsim.decompose import (
    default_registry,
    enumerate_stabilizers,
    l1_product,
    solve_extent,
    stabilizer_fidelity,
)
from stabsim.dense import DenseState, dense_run
from stabsim.expsum import QuadFormZ4, brute_force_z4, expsum_z4_complex
from stabsim.f2 import BitVec
from stabsim.sampler import ChainRuleTree, MetropolisSampler
from stabsim.superposition import (
    StabilizerSuperposition,
    build_sparse_sum_over_cliffords,
    choose_k,
    estimate_norm,
    freeze_norm_data,
    norm_probe_samples,
)


def report(num, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {num:>2} {name}: {status} ({detail})")
    assert ok, f"criterion {num} {name}: {detail}"


def _criterion7_circuit(n, m_t, n_ccz, seed):
    """Clifford scaffold with interleaved T/CCZ gates; the frozen seeds give
    full single-flip-connected output support (checked against the oracle
    when the circuits were selected)."""
    rng = np.random.default_rng(seed)
    c = Circuit(n)
    for q in range(n):
        c.add("H", q)
    specials = (["T"] * m_t) + (["CCZ"] * n_ccz)
    rng.shuffle(specials)
    for sp in specials:
        for name, qubits in random_clifford_gates(n, 6, rng):
            c.add(name, *qubits)
        if sp == "T":
            c.add("T", int(rng.integers(0, n)))
        else:
            qs = rng.choice(n, size=3, replace=False)
            c.add("CCZ", int(qs[0]), int(qs[1]), int(qs[2]))
    for name, qubits in random_clifford_gates(n, 6, rng):
        c.add(name, *qubits)
    return c


def test_criterion_01_clifford_exactness():
    """200 random Clifford circuits: every amplitude equals the dense oracle
    in the exact representation (zero tolerance on the snapped phase/power)."""
    t0 = time.time()
    rng = np.random.default_rng(101)
    checked = 0
    for trial in range(200):
        n = 2 + trial % 9  # n in 2..10
        ch = CHForm.init_zero(n)
        de = DenseState(n)
        for name, qubits in random_clifford_gates(n, 100, rng):
            ch.apply_gate(name, *qubits)
            de.apply_gate(name, list(qubits))
        for idx in range(2**n):
            bits = [(idx >> j) & 1 for j in range(n)]
            zero, q8, p = ch.amplitude_exact(BitVec.from_bits(bits))
            amp = de.amps[idx]
            if zero:
                assert abs(amp) < 1e-9, "dense amplitude nonzero where CH is zero"
            else:
                p_dense = round(2 * math.log2(abs(amp)))
                q_dense = round(4 * np.angle(amp) / math.pi) % 8
                snapped = np.exp(1j * math.pi * q_dense / 4) * 2.0 ** (p_dense / 2)
                assert abs(amp - snapped) < 1e-9, "dense amplitude not of exact form"
                assert (zero, q8, p) == (False, q_dense, p_dense)
            checked += 1
    elapsed = time.time() - t0
    report(1, "Clifford exactness", elapsed < 60,
           f"{checked} amplitudes across 200 circuits exact, {elapsed:.1f}s < 60s")


def test_criterion_02_exponential_sums():
    """Exhaustive n <= 4 plus 1e4 random n <= 10 forms against brute force."""
    t0 = time.time()
    count = 0
    for n in range(1, 5):
        pairs = n * (n - 1) // 2
        for diag_code in range(4**n):
            diag = [(diag_code >> (2 * j)) & 3 for j in range(n)]
            for off_code in range(2**pairs):
                upper = np.zeros((n, n), dtype=int)
                bit = 0
                for a in range(n):
                    for b in range(a + 1, n):
                        upper[a, b] = (off_code >> bit) & 1
                        bit += 1
                form = QuadFormZ4(n, upper, diag)
                assert abs(expsum_z4_complex(form) - brute_force_z4(form)) < 1e-9
                count += 1
    rng = np.random.default_rng(202)
    for _ in range(10_000):
        n = int(rng.integers(1, 11))
        form = QuadFormZ4.random(n, rng)
        assert abs(expsum_z4_complex(form) - brute_force_z4(form)) < 1e-9
        count += 1
    elapsed = time.time() - t0
    report(2, "Exponential sums", elapsed < 60,
           f"{count} forms exact vs brute force, {elapsed:.1f}s < 60s")


def test_criterion_03_norm_estimation_contract():
    """(eps, p_fail) = (0.1, 0.05) contract on random 8-qubit superpositions
    plus the unit variance bound of the equatorial estimator."""
    t0 = time.time()
    rng = np.random.default_rng(303)
    n = 8
    hits = 0
    trials = 200
    for t in range(trials):
        k = int(rng.integers(2, 33))
        sup = StabilizerSuperposition(n)
        for _ in range(k):
            sup.add_term(complex(rng.normal(), rng.normal()), random_ch_state(n, rng, 50))
        true = float(np.sum(np.abs(sup.to_statevector()) ** 2))
        eta = estimate_norm(sup, 0.1, 0.05, np.random.default_rng(7000 + t))
        hits += 0.9 * true <= eta <= 1.1 * true
    # pooled variance of eta_A / ||psi||^2 over fresh states
    ratios = []
    for t in range(20):
        sup = StabilizerSuperposition(n)
        for _ in range(int(rng.integers(2, 33))):
            sup.add_term(complex(rng.normal(), rng.normal()), random_ch_state(n, rng, 50))
        true = float(np.sum(np.abs(sup.to_statevector()) ** 2))
        etas = norm_probe_samples(freeze_norm_data(sup), 5000, rng)
        ratios.append(etas / true)
    pooled_var = float(np.concatenate(ratios).var())
    elapsed = time.time() - t0
    ok = hits >= 0.95 * trials and pooled_var <= 1.1 and elapsed < 300
    report(3, "Norm estimation contract", ok,
           f"{hits}/200 within eps, Var(eta)/norm^4 = {pooled_var:.3f} <= 1.1, "
           f"{elapsed:.0f}s < 300s")


def _criterion4_samples(ks=(4, 16, 64), reps=200):
    rng = np.random.default_rng(404)
    c = Circuit(6)
    for q in range(6):
        c.add("H", q)
    c.add("T", 0)
    c.add("CX", 0, 1)
    c.add("CZ", 1, 2)
    c.add("T", 2)
    c.add("CX", 2, 3)
    c.add("H", 1)
    c.add("CZ", 3, 4)
    c.add("CX", 4, 5)
    reg = default_registry()
    l1 = l1_product(c, reg)
    target = dense_run(c).amps
    out = {}
    for k in ks:
        errs = np.empty(reps)
        for r in range(reps):
            sup = build_sparse_sum_over_cliffords(c, reg, k, rng)
            errs[r] = np.sum(np.abs(sup.to_statevector() - target) ** 2)
        out[k] = errs
    return l1, out


def test_criterion_04_sparsification_mean():
    """n=6 circuit with two T gates: dense-oracle mean of ||psi - Omega||^2.

    The i.i.d. sparsification construction satisfies exactly
    E||psi - Omega||^2 = (l1^2 - ||psi||^2)/k, of which the quoted l1^2/k
    is the upper bound (drop the -||psi||^2/k term).  The mean is asserted
    against the exact law at 3 standard errors and against the bound
    one-sidedly; the literal mean-equals-bound reading is kept as the
    strict-xfail companion test below.
    """
    t0 = time.time()
    l1, samples = _criterion4_samples()
    details = []
    ok = True
    for k, errs in samples.items():
        se = errs.std(ddof=1) / math.sqrt(len(errs))
        sharp = (l1**2 - 1) / k
        ok &= abs(errs.mean() - sharp) <= 3 * se
        ok &= errs.mean() <= l1**2 / k + 3 * se
        details.append(f"k={k}: mean={errs.mean():.4f} law={sharp:.4f} "
                       f"bound={l1**2 / k:.4f} se={se:.4f}")
    elapsed = time.time() - t0
    report(4, "Sparsification mean", ok and elapsed < 300,
           "; ".join(details) + f", {elapsed:.0f}s < 300s")


@pytest.mark.xfail(
    strict=True,
    reason="the mean-error law is (l1^2 - 1)/k; l1^2/k is only an upper "
    "bound, so reading it as the mean cannot hold at 3 standard errors",
)
def test_criterion_04_literal_mean_equality():
    l1, samples = _criterion4_samples(ks=(16,), reps=200)
    errs = samples[16]
    se = errs.std(ddof=1) / math.sqrt(len(errs))
    assert abs(errs.mean() - l1**2 / 16) <= 3 * se


def test_criterion_05_extent_fidelity_constants():
    t0 = time.time()
    t_state = np.array([1, np.exp(1j * math.pi / 4)]) / math.sqrt(2)
    ccz_state = np.ones(8, dtype=complex)
    ccz_state[7] = -1
    ccz_state /= math.sqrt(8)
    theta = math.acos(1 / math.sqrt(3))
    face = np.array([math.cos(theta / 2), np.exp(1j * math.pi / 4) * math.sin(theta / 2)])
    checks = []
    for name, state, xi_want in [
        ("T", t_state, 4 - 2 * math.sqrt(2)),
        ("CCZ", ccz_state, 16 / 9),
        ("face", face, 2 / (1 + 1 / math.sqrt(3))),
    ]:
        res = solve_extent(state, tol=1e-6)
        checks.append(abs(res.xi - xi_want) < 1e-5 and res.gap <= 1e-6)
    f_t = stabilizer_fidelity(t_state)
    f_ccz = stabilizer_fidelity(ccz_state)
    checks.append(abs(f_t - math.cos(math.pi / 8) ** 2) < 1e-5)
    checks.append(abs(f_ccz - 9 / 16) < 1e-5)
    counts = [enumerate_stabilizers(n).count for n in (1, 2, 3)]
    checks.append(counts == [6, 60, 1080])
    elapsed = time.time() - t0
    report(5, "Extent/fidelity constants", all(checks) and elapsed < 120,
           f"xi(T),xi(CCZ),xi(face) within 1e-5 (gaps<=1e-6), F(T),F(CCZ) exact, "
           f"counts {counts}, {elapsed:.0f}s < 120s")


def test_criterion_06_fidelity_multiplicativity():
    t0 = time.time()
    rng = np.random.default_rng(606)

    def haar(n):
        v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        return v / np.linalg.norm(v)

    worst = 0.0
    for _ in range(100):
        a, b = haar(1), haar(1)
        lhs = stabilizer_fidelity(np.kron(b, a), 2)
        rhs = stabilizer_fidelity(a, 1) * stabilizer_fidelity(b, 1)
        worst = max(worst, abs(lhs - rhs))
    for _ in range(100):
        a, b = haar(1), haar(2)
        lhs = stabilizer_fidelity(np.kron(b, a), 3)
        rhs = stabilizer_fidelity(a, 1) * stabilizer_fidelity(b, 2)
        worst = max(worst, abs(lhs - rhs))
    elapsed = time.time() - t0
    report(6, "Fidelity multiplicativity", worst < 1e-9 and elapsed < 120,
           f"max |F(a x b) - F(a)F(b)| = {worst:.2e} < 1e-9, {elapsed:.0f}s < 120s")


def test_criterion_07_end_to_end_distribution():
    """n=8, m in {2,4} T gates and a CCZ variant at delta=0.1: TV of 1e5
    chain-rule samples and of the Metropolis stream vs the dense oracle."""
    t0 = time.time()
    delta = 0.1
    budget = 2 * delta + 0.03
    reg = default_registry()
    details = []
    ok = True
    for label, (m_t, n_ccz, seed) in [
        ("2T", (2, 0, 1)), ("4T", (4, 0, 1)), ("CCZ", (0, 1, 0)),
    ]:
        c = _criterion7_circuit(8, m_t, n_ccz, seed)
        p = dense_run(c).distribution()
        k = choose_k(l1_product(c, reg), delta)
        psi = build_sparse_sum_over_cliffords(c, reg, k, np.random.default_rng(42))
        tree = ChainRuleTree(psi, 8, np.random.default_rng(1), p_fail=0.25)
        cr = tree.sample_many(100_000, np.random.default_rng(2))
        idx = cr @ (1 << np.arange(8))
        tv_chain = 0.5 * np.abs(np.bincount(idx, minlength=256) / 1e5 - p).sum()
        ms = MetropolisSampler(psi, np.random.default_rng(3))
        mb = ms.run(100_000, 10_000)
        idx = mb @ (1 << np.arange(8))
        tv_metro = 0.5 * np.abs(np.bincount(idx, minlength=256) / 1e5 - p).sum()
        ok &= tv_chain <= budget and tv_metro <= budget
        details.append(f"{label}: k={k} TV_chain={tv_chain:.3f} TV_metro={tv_metro:.3f}")
    elapsed = time.time() - t0
    report(7, "End-to-end distribution", ok and elapsed < 900,
           "; ".join(details) + f" (bound {budget}), {elapsed:.0f}s < 900s")


def test_criterion_08_hidden_shift_40():
    """n=40 hidden shift, delta=0.3: the rounded marginal vector recovers the
    planted shift in >= 90% of 20 seeded runs for u in {2, 4, 6}, with k
    matching floor(((3/4)^-u / delta)^2) exactly."""
    t0 = time.time()
    reg = default_registry()
    delta, eps, p_fail = 0.3, 0.3, 0.25
    details = []
    ok = True
    for u in (2, 4, 6):
        k_formula = math.floor(((3 / 4) ** (-u) / delta) ** 2)
        recovered = 0
        for run in range(20):
            seed = 8000 + 100 * u + run
            circuit, shift = gen_hidden_shift(40, u, seed=seed)
            l1 = l1_product(circuit, reg)
            k = choose_k(l1, delta)
            assert k == k_formula, f"k={k} != formula {k_formula}"
            psi = build_sparse_sum_over_cliffords(
                circuit, reg, k, np.random.default_rng(seed)
            )
            rng = np.random.default_rng(seed + 1)
            den = estimate_norm(psi, eps, p_fail, rng)
            marg = np.zeros(40)
            for q in range(40):
                num_sup = psi.copy()
                num_sup.apply_projector_all(q, 1)
                num = estimate_norm(num_sup, eps, p_fail, rng) if num_sup.k else 0.0
                marg[q] = num / den
            recovered += np.array_equal(np.round(marg).astype(int), shift)
        ok &= recovered >= 18
        details.append(f"u={u}: k={k_formula}, recovered {recovered}/20")
    elapsed = time.time() - t0
    report(8, "Hidden shift n=40", ok, "; ".join(details) + f", {elapsed:.0f}s")


def test_criterion_09_qaoa_cross_check():
    """n=14, D=4, beta=pi/4, eight gamma points: sum-over-Cliffords/Metropolis
    estimate within 3 batch-means standard errors of the dense oracle; the
    Monte Carlo estimator agrees as the second method; exact antisymmetry."""
    t0 = time.time()
    n, deg, seed, delta = 14, 4, 909, 0.05
    reg = default_registry()
    gammas = [0.15, 0.35, 0.55, 0.75]
    xs = np.arange(2**n)
    bits_all = ((xs[:, None] >> np.arange(n)) & 1).astype(np.uint8)
    ok = True
    details = []
    e_dense_by_gamma = {}
    for gamma in gammas + [-g for g in gammas]:
        c, inst = gen_qaoa_e3lin2(n, deg, gamma, seed=seed)
        costs = cost_e3lin2_bits(inst, bits_all)
        e_dense = float(dense_run(c).distribution() @ costs)
        e_dense_by_gamma[gamma] = e_dense
        if gamma < 0:
            continue  # simulate the positive half; negatives check antisymmetry
        k = choose_k(l1_product(c, reg), delta)
        psi = build_sparse_sum_over_cliffords(c, reg, k, np.random.default_rng(seed))
        ms = MetropolisSampler(psi, np.random.default_rng(seed + 1))
        samples = ms.run(40_000, 10_000)
        cs = cost_e3lin2_bits(inst, samples)
        e_sim = float(cs.mean())
        nb = 50
        batches = cs[: nb * (len(cs) // nb)].reshape(nb, -1).mean(axis=1)
        se = float(batches.std(ddof=1) / math.sqrt(nb))
        e_mc, se_mc = mc_expectation_e3lin2(
            inst, gamma, 200_000, np.random.default_rng(seed + 2)
        )
        ok &= abs(e_sim - e_dense) <= 3 * se
        ok &= abs(e_mc - e_dense) <= 4 * se_mc + 1e-6
        details.append(
            f"g={gamma}: k={k} E={e_dense:.3f} sim={e_sim:.3f}+-{se:.3f} mc={e_mc:.3f}"
        )
    anti = max(
        abs(e_dense_by_gamma[g] + e_dense_by_gamma[-g]) for g in gammas
    )
    ok &= anti < 1e-10
    elapsed = time.time() - t0
    report(9, "QAOA cross-check", ok and elapsed < 7200,
           "; ".join(details) + f"; antisymmetry {anti:.1e}, {elapsed:.0f}s < 7200s")


def test_criterion_10_superposition_scale():
    """k = 1e5 terms at n = 40: single-pass norm estimate under 8 GB with
    runtime scaling linearly in k (doubling ratio 2.0 +- 0.3)."""
    circuit, _ = gen_hidden_shift(40, 6, seed=1010)
    reg = default_registry()

    def run(k):
        start = time.perf_counter()
        psi = build_sparse_sum_over_cliffords(
            circuit, reg, k, np.random.default_rng(5)
        )
        eta = estimate_norm(psi, 0.2, 0.25, np.random.default_rng(6))
        return time.perf_counter() - start, eta

    t_small, eta_small = run(100_000)
    t_big, eta_big = run(200_000)
    ratio = t_big / t_small
    peak_gb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024**2
    ok = (
        1.7 <= ratio <= 2.3
        and peak_gb < 8.0
        and 0.5 <= eta_small <= 1.5
        and 0.5 <= eta_big <= 1.5
    )
    report(10, "Superposition scale", ok,
           f"t(1e5)={t_small:.0f}s t(2e5)={t_big:.0f}s ratio={ratio:.2f} in [1.7,2.3], "
           f"peak RSS {peak_gb:.2f} GB < 8 GB, eta={eta_small:.3f},{eta_big:.3f}")
