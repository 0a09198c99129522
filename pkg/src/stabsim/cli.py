"""Command-line front end: parse -> decompose -> sparsify -> simulate.

Samples go to --out (or stdout) as newline bit strings or JSONL; a summary
JSON with the extent bound, k, seed and wall time goes to stdout (stderr
when samples occupy stdout).  All randomness flows from counter-based
Philox streams keyed by (seed, worker, purpose), so a fixed seed and
worker count reproduce byte-identical sample output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import circuit as circ
from . import decompose as dec
from .kernels import backend_name
from .sampler import ChainRuleTree, MetropolisSampler, estimate_output_probability
from .superposition import (
    build_sparse_sum_over_cliffords,
    choose_k,
    estimate_norm,
)

_PURPOSE = {"build": 1, "sample": 2, "norm": 3, "instance": 4}


def make_rng(seed: int, worker: int = 0, purpose: str = "build") -> np.random.Generator:
    key = np.array([np.uint64(seed), np.uint64((worker << 8) | _PURPOSE[purpose])])
    return np.random.Generator(np.random.Philox(key=key))


def _load_circuit(path: str) -> circ.Circuit:
    with open(path) as fh:
        return circ.parse(fh.read())


def _build_superposition(circuit, registry, delta, seed):
    l1 = dec.l1_product(circuit, registry)
    has_non_clifford = any(not registry.is_clifford_gate(g) for g in circuit.gates)
    k = choose_k(l1, delta) if has_non_clifford else 1
    psi = build_sparse_sum_over_cliffords(circuit, registry, k, make_rng(seed, 0, "build"))
    return psi, k, l1


def _registry_from_args(args) -> dec.DecompositionRegistry:
    registry = dec.default_registry()
    if getattr(args, "decompositions", None):
        with open(args.decompositions) as fh:
            registry.load_json(fh.read())
    return registry


def _emit_samples(samples: np.ndarray, out_path: str | None, fmt: str):
    lines = []
    for i, row in enumerate(samples):
        bits = "".join(str(int(b)) for b in row)
        if fmt == "jsonl":
            lines.append(json.dumps({"sample": bits, "step_index": i}))
        else:
            lines.append(bits)
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
        return False
    sys.stdout.write(text)
    return True


def cmd_simulate(args) -> int:
    registry = _registry_from_args(args)
    circuit = _load_circuit(args.circuit)
    t0 = time.perf_counter()
    if args.method == "gadget-fixed":
        from .superposition import build_gadget_fixed_superposition

        # exact decomposition via magic-state gadgets; k is the exact rank
        psi = build_gadget_fixed_superposition(circ.gadgetize(circuit), registry)
        k, l1 = psi.k, dec.l1_product(circuit, registry)
    else:
        psi, k, l1 = _build_superposition(circuit, registry, args.delta, args.seed)
    extent_bound = dec.extent_product_bound(circuit, registry)
    rng = make_rng(args.seed, 0, "sample")
    width = args.width or circuit.n
    if args.sampler == "metropolis":
        sampler = MetropolisSampler(psi, rng)
        samples = sampler.run(args.samples, args.burnin)[:, :width]
    else:
        tree = ChainRuleTree(
            psi, width, make_rng(args.seed, 0, "norm"),
            p_fail=args.pfail, workers=args.workers,
        )
        samples = tree.sample_many(args.samples, rng)
    wall = time.perf_counter() - t0
    to_stdout = _emit_samples(samples, args.out, args.format)
    summary = {
        "n": circuit.n,
        "method": args.method,
        "sampler": args.sampler,
        "k": k,
        "l1": l1,
        "extent_bound": extent_bound,
        "delta": args.delta,
        "seed": args.seed,
        "samples": int(samples.shape[0]),
        "burnin": args.burnin if args.sampler == "metropolis" else None,
        "workers": args.workers,
        "kernel_backend": backend_name(),
        "wall_time": wall,
    }
    print(json.dumps(summary), file=sys.stderr if to_stdout else sys.stdout)
    return 0


def cmd_probability(args) -> int:
    registry = _registry_from_args(args)
    circuit = _load_circuit(args.circuit)
    assignment = {}
    for q, ch in enumerate(args.bits):
        if ch in "01":
            assignment[q] = int(ch)
        elif ch not in "?x.":
            raise SystemExit(f"bad bit character {ch!r} (use 0, 1 or ? for free)")
    if len(args.bits) > circuit.n:
        raise SystemExit("bit pattern longer than register")
    t0 = time.perf_counter()
    if args.method == "gadget-fixed":
        from .superposition import build_gadget_fixed_superposition

        gadget = circ.gadgetize(circuit)
        psi = build_gadget_fixed_superposition(gadget, registry)
        k = psi.k
        # the gadget superposition equals U|0^n> (x) |0^tau> exactly: norm 1
        num = psi.copy()
        for q, bit in sorted(assignment.items()):
            num.apply_projector_all(q, bit)
        rng = make_rng(args.seed, 0, "norm")
        est = (
            estimate_norm(num, args.eps, args.pfail, rng, workers=args.workers)
            if num.k
            else 0.0
        )
    else:
        psi, k, _ = _build_superposition(circuit, registry, args.delta, args.seed)
        rng = make_rng(args.seed, 0, "norm")
        est = estimate_output_probability(
            psi, assignment, args.eps, args.pfail, rng, workers=args.workers
        )
    wall = time.perf_counter() - t0
    print(
        json.dumps(
            {
                "probability": est,
                "bits": args.bits,
                "method": args.method,
                "k": k,
                "eps": args.eps,
                "pfail": args.pfail,
                "seed": args.seed,
                "wall_time": wall,
            }
        )
    )
    return 0


def cmd_extent(args) -> int:
    target = args.target
    if target.startswith("@"):
        with open(target[1:]) as fh:
            raw = json.load(fh)
        psi = np.array([complex(re, im) for re, im in raw])
        psi = psi / np.linalg.norm(psi)
    else:
        name = target.upper()
        angle = None
        if ":" in name:
            name, angle_text = name.split(":", 1)
            angle = float(angle_text)
        if name in ("T", "TDG", "CCZ", "RZ", "PHASE"):
            registry = dec.default_registry()
            gate = circ.Gate(name, tuple(range(circ.GATE_ARITY[name])), angle)
            d = registry.decomposition_for(gate)
            t = d.arity
            plus = np.ones(2**t) / math.sqrt(2**t)
            psi = d.unitary @ plus
        elif set(name) <= {"0", "1"}:
            idx = int(name[::-1], 2)
            psi = np.zeros(2 ** len(name), dtype=complex)
            psi[idx] = 1.0
        else:
            raise SystemExit(f"unknown extent target {target!r}")
    n = psi.shape[0].bit_length() - 1
    if n > 3:
        raise SystemExit("extent solver supports up to 3 qubits")
    result = dec.solve_extent(psi, n, tol=args.tol)
    fidelity = dec.stabilizer_fidelity(psi, n)
    print(
        json.dumps(
            {
                "target": args.target,
                "extent": result.xi,
                "fidelity": fidelity,
                "witness_lower_bound": result.witness_lower_bound,
                "certificate_gap": result.gap,
            }
        )
    )
    return 0


def _bench_hidden_shift(args, writer) -> None:
    registry = dec.default_registry()
    for u in args.ccz:
        for run in range(args.runs):
            seed = args.seed + 1000 * u + run
            circuit, shift = circ.gen_hidden_shift(args.n, u, seed)
            t0 = time.perf_counter()
            psi, k, l1 = _build_superposition(circuit, registry, args.delta, seed)
            rng = make_rng(seed, 0, "norm")
            den = estimate_norm(psi, args.eps, args.pfail, rng, workers=args.workers)
            marginals = np.zeros(args.n)
            for q in range(args.n):
                num_sup = psi.copy()
                num_sup.apply_projector_all(q, 1)
                num = (
                    estimate_norm(num_sup, args.eps, args.pfail, rng, workers=args.workers)
                    if num_sup.k
                    else 0.0
                )
                marginals[q] = num / den
            wall = time.perf_counter() - t0
            linf = float(np.max(np.abs(marginals - shift)))
            recovered = int(np.array_equal(np.round(marginals).astype(int), shift))
            writer(
                [
                    f"hidden-shift-n{args.n}-u{u}-run{run}",
                    k,
                    f"{wall:.3f}",
                    f"{linf:.4f}",
                    recovered,
                ]
            )


def _bench_qaoa(args, writer) -> None:
    registry = dec.default_registry()
    for gamma in args.gammas:
        seed = args.seed
        circuit, inst = circ.gen_qaoa_e3lin2(args.n, args.degree, gamma, seed)
        t0 = time.perf_counter()
        psi, k, l1 = _build_superposition(circuit, registry, args.delta, seed)
        sampler = MetropolisSampler(psi, make_rng(seed, 0, "sample"))
        bits = sampler.run(args.samples, args.burnin)
        costs = circ.cost_e3lin2_bits(inst, bits)
        e_sim = float(costs.mean())
        nb = max(2, min(50, args.samples // 100))
        batches = costs[: nb * (len(costs) // nb)].reshape(nb, -1).mean(axis=1)
        stderr = float(batches.std(ddof=1) / math.sqrt(nb))
        e_mc, mc_err = circ.mc_expectation_e3lin2(
            inst, gamma, args.mc_samples, make_rng(seed, 1, "instance")
        )
        wall = time.perf_counter() - t0
        writer(
            [
                f"qaoa-n{args.n}-D{args.degree}-g{gamma:.4f}",
                k,
                f"{wall:.3f}",
                f"{e_sim:.4f}",
                f"{stderr:.4f}",
                f"{e_mc:.4f}",
                f"{mc_err:.4f}",
            ]
        )


def cmd_bench(args) -> int:
    out = open(args.out, "w") if args.out else sys.stdout

    def writer(fields):
        print(",".join(str(f) for f in fields), file=out)

    try:
        if args.suite == "hidden-shift":
            writer(["instance", "k", "runtime_s", "linf_error", "recovered"])
            if args.n and args.ccz:
                _bench_hidden_shift(args, writer)
        else:
            writer(["instance", "k", "runtime_s", "e_sim", "e_sim_stderr", "e_mc", "e_mc_stderr"])
            if args.n and args.gammas:
                _bench_qaoa(args, writer)
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stabsim")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--method", choices=["sum-over-cliffords", "gadget-fixed"],
                        default="sum-over-cliffords")
        sp.add_argument("--delta", type=float, default=0.1)
        sp.add_argument("--eps", type=float, default=0.1)
        sp.add_argument("--pfail", type=float, default=0.05)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--decompositions", help="JSON file of extra gate decompositions")

    sim = sub.add_parser("simulate", help="sample the output distribution")
    sim.add_argument("circuit")
    common(sim)
    sim.add_argument("--sampler", choices=["metropolis", "chain-rule"], default="metropolis")
    sim.add_argument("--steps", type=int, default=None, help="alias for --samples")
    sim.add_argument("--burnin", type=int, default=10000)
    sim.add_argument("--samples", type=int, default=10000)
    sim.add_argument("--width", type=int, default=None, help="bits to sample (chain-rule)")
    sim.add_argument("--out")
    sim.add_argument("--format", choices=["bits", "jsonl"], default="bits")
    sim.set_defaults(func=cmd_simulate)

    prob = sub.add_parser("probability", help="estimate an output probability")
    prob.add_argument("circuit")
    prob.add_argument("bits", help="pattern like 0110 or 01??1 (? = marginalized)")
    common(prob)
    prob.set_defaults(func=cmd_probability)

    ext = sub.add_parser("extent", help="stabilizer extent/fidelity of a gate or state")
    ext.add_argument("target", help="T | TDG | CCZ | RZ:<angle> | bit string | @state.json")
    ext.add_argument("--tol", type=float, default=1e-6)
    ext.set_defaults(func=cmd_extent)

    bench = sub.add_parser("bench", help="benchmark suites (CSV output)")
    bench.add_argument("suite", choices=["hidden-shift", "qaoa"])
    common(bench)
    bench.add_argument("--n", type=int, default=0)
    bench.add_argument("--ccz", type=lambda s: [int(x) for x in s.split(",") if x], default=[])
    bench.add_argument("--runs", type=int, default=1)
    bench.add_argument("--degree", type=int, default=4)
    bench.add_argument("--gammas", type=lambda s: [float(x) for x in s.split(",") if x],
                       default=[])
    bench.add_argument("--samples", type=int, default=40000)
    bench.add_argument("--burnin", type=int, default=10000)
    bench.add_argument("--mc-samples", type=int, default=200000)
    bench.add_argument("--out")
    bench.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "steps", None) is not None:
        args.samples = args.steps
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
