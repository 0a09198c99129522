"""Benchmark the compiled kernel core against the pure-numpy fallback.

Times the three hot paths (Z4 exponential sums, equatorial probe batches,
Clifford gate sequences) on representative sizes and prints a table.

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import sys
import time

import numpy as np

sys.path.insert(0, "tests")

from stabsim import kernels
from stabsim.chform import CHForm, compile_clifford_ops
from stabsim.f2 import pack_bits
from stabsim.superposition import (
    StabilizerSuperposition,
    freeze_norm_data,
    random_probe_batch,
)


def random_gates(n, count, rng):
    names1 = ["H", "S", "SDG", "X", "Y", "Z"]
    gates = []
    for _ in range(count):
        if n == 1 or rng.random() < 0.55:
            gates.append((names1[rng.integers(0, len(names1))], (int(rng.integers(0, n)),)))
        else:
            q, r = rng.choice(n, size=2, replace=False)
            gates.append(("CX" if rng.random() < 0.5 else "CZ", (int(q), int(r))))
    return gates


def bench_z4(backend, n, reps, rng):
    ups = [np.triu(rng.integers(0, 2, size=(n, n), dtype=np.uint8), 1) for _ in range(reps)]
    dgs = [rng.integers(0, 4, size=n).astype(np.uint8) for _ in range(reps)]
    rows = [pack_bits(u) for u in ups]
    t0 = time.perf_counter()
    for r in range(reps):
        backend.z4_exponential_sum(rows[r], dgs[r], n)
    return (time.perf_counter() - t0) / reps


def bench_probes(backend, n, k, probes, rng):
    sup = StabilizerSuperposition(n)
    ch = CHForm.init_zero(n)
    ops = compile_clifford_ops(random_gates(n, 4 * n, rng))
    for _ in range(k):
        term = CHForm.init_zero(n)
        term.apply_ops(ops)
        term.apply_ops(compile_clifford_ops(random_gates(n, 8, rng)))
        sup.add_term(1.0 / k, term)
    nd = freeze_norm_data(sup)
    a2, ad = random_probe_batch(n, probes, rng)
    t0 = time.perf_counter()
    backend.norm_sum_probes(nd, a2, ad)
    return (time.perf_counter() - t0) / probes


def bench_gates(use_compiled, n, gate_count, reps, rng):
    ops = compile_clifford_ops(random_gates(n, gate_count, rng))
    saved = kernels.ch_apply_ops
    if not use_compiled:
        kernels.ch_apply_ops = None
    try:
        t0 = time.perf_counter()
        for _ in range(reps):
            CHForm.init_zero(n).apply_ops(ops)
        return (time.perf_counter() - t0) / (reps * gate_count)
    finally:
        kernels.ch_apply_ops = saved


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller sizes")
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    backends = {"purepy": kernels.get_backend("purepy")}
    try:
        backends["compiled"] = kernels.get_backend("compiled")
    except RuntimeError:
        print("compiled kernels unavailable; benchmarking the fallback only")

    rows = []
    z4_sizes = [10, 20, 40] if not args.quick else [10, 20]
    for n in z4_sizes:
        times = {}
        for name, backend in backends.items():
            reps = 2000 if name == "compiled" else 200
            times[name] = bench_z4(backend, n, reps, rng)
        rows.append((f"z4 sum, n={n}", times))

    probe_sizes = [(8, 140, 2000), (40, 350, 400)] if not args.quick else [(8, 60, 200)]
    for n, k, probes in probe_sizes:
        times = {}
        for name, backend in backends.items():
            p = probes if name == "compiled" else max(10, probes // 50)
            times[name] = bench_probes(backend, n, k, p, rng) / k
        rows.append((f"probe/term, n={n} k={k}", times))

    gate_sizes = [(40, 200)] if not args.quick else [(16, 100)]
    for n, count in gate_sizes:
        times = {}
        if "compiled" in backends and kernels.ch_apply_ops is not None:
            times["compiled"] = bench_gates(True, n, count, 200, rng)
        times["purepy"] = bench_gates(False, n, count, 20, rng)
        rows.append((f"clifford gate, n={n}", times))

    print(f"{'kernel':<28} {'compiled':>12} {'purepy':>12} {'speedup':>9}")
    for label, times in rows:
        comp = times.get("compiled")
        pure = times.get("purepy")
        comp_s = f"{comp * 1e6:.2f} us" if comp else "-"
        pure_s = f"{pure * 1e6:.2f} us" if pure else "-"
        speed = f"{pure / comp:.1f}x" if comp and pure else "-"
        print(f"{label:<28} {comp_s:>12} {pure_s:>12} {speed:>9}")


if __name__ == "__main__":
    main()
