import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabsim.circuit import (
    Circuit,
    CircuitParseError,
    E3Lin2Instance,
    classify,
    cost_e3lin2,
    cost_e3lin2_bits,
    gadgetize,
    gen_e3lin2_instance,
    gen_hidden_shift,
    gen_qaoa_e3lin2,
    mc_expectation_e3lin2,
    parse,
    render,
)
from stabsim.decompose import default_registry
from stabsim.dense import dense_run
from stabsim.superposition import build_gadget_fixed_superposition

# -- parser ------------------------------------------------------------------


def test_parse_bell():
    c = parse("qubits 2\nH 0\nCX 0 1\n")
    assert c.n == 2
    assert [(g.name, g.qubits) for g in c.gates] == [("H", (0,)), ("CX", (0, 1))]


def test_parse_angles():
    c = parse("qubits 1\nRZ pi/4 0\nRZ 2pi 0\nRZ -3pi/8 0\nPHASE 0.25 0\n")
    angles = [g.angle for g in c.gates]
    assert angles[0] == pytest.approx(math.pi / 4)
    assert angles[1] == pytest.approx(2 * math.pi)
    assert angles[2] == pytest.approx(-3 * math.pi / 8)
    assert angles[3] == pytest.approx(0.25)


def test_parse_case_insensitive_and_comments():
    c = parse("# a comment\nQUBITS 2\nh 0  # trailing\ncx 0 1\n")
    assert [g.name for g in c.gates] == ["H", "CX"]


def test_parse_errors():
    with pytest.raises(CircuitParseError, match="header"):
        parse("H 0\n")
    with pytest.raises(CircuitParseError, match="unknown gate"):
        parse("qubits 1\nFOO 0\n")
    with pytest.raises(CircuitParseError, match="declared count"):
        parse("qubits 2\nH 2\n")
    with pytest.raises(CircuitParseError, match="malformed angle"):
        parse("qubits 1\nRZ abc 0\n")
    with pytest.raises(CircuitParseError, match="requires an angle"):
        parse("qubits 1\nRZ\n")
    with pytest.raises(CircuitParseError, match="line 3"):
        parse("qubits 2\nH 0\nCX 0 0\n")
    with pytest.raises(CircuitParseError):
        parse("")


def test_ccx_canonicalized():
    c = parse("qubits 3\nCCX 0 1 2\n")
    assert [g.name for g in c.gates] == ["H", "CCZ", "H"]
    prof = classify(c)
    assert len(prof.non_clifford) == 1 and prof.non_clifford[0].name == "CCZ"
    # matrix identity H_t CCZ H_t = CCX, exercised on a full superposition
    rewritten = parse("qubits 3\nH 0\nH 1\nS 2\nH 2\nCCX 1 2 0\n")
    from stabsim.dense import DenseState

    direct = DenseState(3)
    for name, qubits in [("H", [0]), ("H", [1]), ("S", [2]), ("H", [2])]:
        direct.apply_gate(name, qubits)
    direct.apply_gate("CCX", [1, 2, 0])
    np.testing.assert_allclose(dense_run(rewritten).amps, direct.amps, atol=1e-12)


_NAMES = ["I", "X", "Y", "Z", "H", "S", "SDG", "T", "TDG", "CX", "CZ", "CCZ", "RZ", "PHASE"]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31))
def test_parse_render_round_trip(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    c = Circuit(n)
    for _ in range(int(rng.integers(0, 25))):
        name = _NAMES[rng.integers(0, len(_NAMES))]
        arity = {"CX": 2, "CZ": 2, "CCZ": 3}.get(name, 1)
        qubits = [int(q) for q in rng.choice(n, size=arity, replace=False)]
        angle = float(rng.uniform(-7, 7)) if name in ("RZ", "PHASE") else None
        c.add(name, *qubits, angle=angle)
    assert parse(render(c)) == c


# -- classify ----------------------------------------------------------------


def test_classify_clifford_only():
    c = parse("qubits 2\nH 0\nCX 0 1\nS 1\nRZ pi/2 0\n")
    prof = classify(c)
    assert prof.clifford_count == 4 and prof.non_clifford == []


def test_classify_mixed():
    c = parse("qubits 3\nH 0\nT 0\nRZ 0.3 1\nCCZ 0 1 2\nRZ pi 2\n")
    prof = classify(c)
    names = [g.name for g in prof.non_clifford]
    assert names == ["T", "RZ", "CCZ"]
    assert prof.clifford_count == 2


# -- gadgetizer ---------------------------------------------------------------


def test_gadgetize_clifford_only_is_identity():
    c = parse("qubits 2\nH 0\nCX 0 1\n")
    g = gadgetize(c)
    assert g.tau == 0 and g.clifford.n == 2 and g.magic == []


def test_gadgetize_single_t_matches_dense(rng):
    c = parse("qubits 1\nH 0\nT 0\n")
    g = gadgetize(c)
    assert g.tau == 1
    psi = build_gadget_fixed_superposition(g, default_registry())
    vec = psi.to_statevector()
    np.testing.assert_allclose(vec[:2], dense_run(c).amps, atol=1e-12)
    assert np.abs(vec[2:]).max() < 1e-12  # ancilla pinned to 0
    assert np.sum(np.abs(vec) ** 2) == pytest.approx(1.0)


def test_gadgetize_ccz_consumes_three_ancillas(rng):
    c = parse("qubits 3\nH 0\nH 1\nH 2\nCCZ 0 1 2\nH 0\n")
    g = gadgetize(c)
    assert g.tau == 3
    assert g.renormalization == pytest.approx(2 ** 1.5)
    psi = build_gadget_fixed_superposition(g, default_registry())
    vec = psi.to_statevector()
    np.testing.assert_allclose(vec[:8], dense_run(c).amps, atol=1e-12)


def test_gadgetize_mixed_circuit_amplitudes(rng):
    c = parse("qubits 2\nH 0\nT 0\nCX 0 1\nRZ 0.7 1\nH 1\n")
    g = gadgetize(c)
    assert g.tau == 2
    psi = build_gadget_fixed_superposition(g, default_registry())
    vec = psi.to_statevector()
    np.testing.assert_allclose(vec[:4], dense_run(c).amps, atol=1e-12)


def test_gadgetize_rejects_non_diagonal():
    c = Circuit(2)
    c.add("H", 0)
    from stabsim.circuit import Gate

    c.gates.append(Gate("RX", (0,), 0.3))  # not in the diagonal set
    with pytest.raises(ValueError):
        gadgetize(c)


# -- hidden shift --------------------------------------------------------------


def test_hidden_shift_clifford_only_point_mass():
    c, s = gen_hidden_shift(8, 0, seed=5)
    state = dense_run(c)
    idx = int(sum(int(b) << j for j, b in enumerate(s)))
    assert abs(state.amps[idx]) == pytest.approx(1.0, abs=1e-12)
    assert classify(c).non_clifford == []


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_hidden_shift_with_ccz_point_mass(seed):
    c, s = gen_hidden_shift(12, 2, seed=seed)  # generator self-verifies at n<=12
    prof = classify(c)
    assert [g.name for g in prof.non_clifford] == ["CCZ", "CCZ"]


def test_hidden_shift_ccz_count():
    c, s = gen_hidden_shift(12, 4, seed=9)
    assert sum(1 for g in c.gates if g.name == "CCZ") == 4


def test_hidden_shift_parameter_validation():
    with pytest.raises(ValueError):
        gen_hidden_shift(7, 0, 0)
    with pytest.raises(ValueError):
        gen_hidden_shift(8, 3, 0)
    with pytest.raises(ValueError):
        gen_hidden_shift(4, 2, 0)  # n/2 < 3 cannot host cubic terms


# -- QAOA / E3LIN2 --------------------------------------------------------------


def test_e3lin2_instance_degrees():
    rng = np.random.default_rng(3)
    inst = gen_e3lin2_instance(14, 4, rng)
    counts = np.zeros(14, dtype=int)
    for (u, v, w, d) in inst.terms:
        assert u < v < w
        assert d in (-1, 1)
        counts[[u, v, w]] += 1
    assert inst.m == (14 * 4) // 3
    # every variable in exactly D terms except (at most) one with fewer
    ordered = sorted(counts)
    assert ordered[1:] == [4] * 13 and ordered[0] <= 4
    assert counts.sum() == 3 * inst.m


def test_e3lin2_instance_json_round_trip():
    rng = np.random.default_rng(4)
    inst = gen_e3lin2_instance(9, 4, rng)
    back = E3Lin2Instance.from_json(inst.to_json())
    assert back.n == inst.n and back.degree == inst.degree and back.terms == inst.terms
    data = json.loads(inst.to_json())
    assert set(data) == {"n", "D", "terms"}


def test_cost_function():
    inst = E3Lin2Instance(n=4, degree=1, terms=[(0, 1, 2, 1)])
    assert cost_e3lin2(inst, [1, 1, 1, 1]) == 0.5
    rng = np.random.default_rng(0)
    inst = gen_e3lin2_instance(9, 4, rng)
    z = rng.choice([-1, 1], size=9)
    assert cost_e3lin2(inst, -z) == -cost_e3lin2(inst, z)
    bits = ((1 - z) // 2).astype(np.uint8)
    assert cost_e3lin2_bits(inst, bits)[0] == pytest.approx(cost_e3lin2(inst, z))


def test_qaoa_circuit_structure():
    c, inst = gen_qaoa_e3lin2(9, 4, 0.4, seed=7)
    prof = classify(c)
    assert len(prof.non_clifford) == inst.m  # one rotation per term
    assert all(g.name == "RZ" for g in prof.non_clifford)
    # gamma = pi/2 makes every rotation Clifford
    c2, _ = gen_qaoa_e3lin2(9, 4, math.pi / 2, seed=7)
    assert classify(c2).non_clifford == []


def test_qaoa_gamma_zero_expectation():
    """E(0) = <+|C|+> = 0: every ZZZ term has zero expectation in |+>^n."""
    c, inst = gen_qaoa_e3lin2(9, 4, 0.0, seed=2)
    probs = dense_run(c).distribution()
    xs = np.arange(2**9)
    bits = ((xs[:, None] >> np.arange(9)) & 1).astype(np.uint8)
    e0 = probs @ cost_e3lin2_bits(inst, bits)
    assert e0 == pytest.approx(0.0, abs=1e-12)


def test_qaoa_dense_antisymmetry():
    seed = 11
    xs = np.arange(2**9)
    bits = ((xs[:, None] >> np.arange(9)) & 1).astype(np.uint8)
    _, inst = gen_qaoa_e3lin2(9, 4, 0.5, seed=seed)
    costs = cost_e3lin2_bits(inst, bits)
    vals = {}
    for gamma in (0.5, -0.5):
        c, inst2 = gen_qaoa_e3lin2(9, 4, gamma, seed=seed)
        assert inst2.terms == inst.terms
        vals[gamma] = float(dense_run(c).distribution() @ costs)
    assert vals[0.5] == pytest.approx(-vals[-0.5], abs=1e-12)


def test_mc_estimator_matches_dense():
    rng = np.random.default_rng(1)
    xs = np.arange(2**9)
    bits = ((xs[:, None] >> np.arange(9)) & 1).astype(np.uint8)
    for gamma in (0.25, 0.8):
        c, inst = gen_qaoa_e3lin2(9, 4, gamma, seed=5)
        e_dense = float(dense_run(c).distribution() @ cost_e3lin2_bits(inst, bits))
        e_mc, se = mc_expectation_e3lin2(inst, gamma, 300_000, rng)
        assert e_mc == pytest.approx(e_dense, abs=4 * se + 1e-6)
