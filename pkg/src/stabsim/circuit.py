"""Circuit IR, the line-based text format, the fixed-sample gadgetizer and
benchmark instance generators (Hidden Shift, QAOA Max E3LIN2).

The IR gate set is {I, X, Y, Z, H, S, SDG, CX, CZ, CCZ, T, TDG, RZ, PHASE};
CCX in the text format is canonicalized to H.CCZ.H at parse time so all
non-Clifford handling downstream deals with diagonal gates only.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

GATE_ARITY = {
    "I": 1, "X": 1, "Y": 1, "Z": 1, "H": 1, "S": 1, "SDG": 1,
    "T": 1, "TDG": 1, "RZ": 1, "PHASE": 1,
    "CX": 2, "CZ": 2, "CCZ": 3, "CCX": 3,
}
ANGLE_GATES = {"RZ", "PHASE"}
CLIFFORD_NAMES = {"I", "X", "Y", "Z", "H", "S", "SDG", "CX", "CZ"}
DIAGONAL_NON_CLIFFORD = {"T", "TDG", "RZ", "PHASE", "CCZ"}


def is_clifford_angle(angle: float, tol: float = 1e-12) -> bool:
    m = round(angle / (math.pi / 2))
    return abs(angle - m * math.pi / 2) <= tol


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple
    angle: float | None = None

    def render(self) -> str:
        parts = [self.name]
        if self.angle is not None:
            parts.append(repr(self.angle))
        parts.extend(str(q) for q in self.qubits)
        return " ".join(parts)


@dataclass
class Circuit:
    n: int
    gates: list = field(default_factory=list)

    def add(self, name: str, *qubits: int, angle: float | None = None) -> None:
        name = name.upper()
        arity = GATE_ARITY.get(name)
        if arity is None:
            raise ValueError(f"unknown gate {name}")
        if len(qubits) != arity:
            raise ValueError(f"{name} takes {arity} qubit(s)")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{name} qubits must be distinct")
        for q in qubits:
            if not 0 <= q < self.n:
                raise ValueError(f"qubit {q} out of range (n={self.n})")
        if (name in ANGLE_GATES) != (angle is not None):
            raise ValueError(f"angle required iff gate is RZ/PHASE (got {name})")
        if angle is not None and not math.isfinite(angle):
            raise ValueError("angle must be finite")
        if name == "CCX":
            # canonical form: all non-Cliffords diagonal
            a, b, t = qubits
            self.gates.append(Gate("H", (t,)))
            self.gates.append(Gate("CCZ", (a, b, t)))
            self.gates.append(Gate("H", (t,)))
        else:
            self.gates.append(Gate(name, tuple(qubits), angle))

    def render(self) -> str:
        lines = [f"qubits {self.n}"]
        lines.extend(g.render() for g in self.gates)
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Circuit)
            and self.n == other.n
            and self.gates == other.gates
        )


class CircuitParseError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


_ANGLE_PI = re.compile(r"^([+-]?\d+)?pi(?:/(\d+))?$", re.IGNORECASE)


def _parse_angle(token: str, line_no: int, col: int) -> float:
    m = _ANGLE_PI.match(token)
    if m:
        num = int(m.group(1)) if m.group(1) else 1
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise CircuitParseError("zero denominator in angle", line_no, col)
        return num * math.pi / den
    try:
        return float(token)
    except ValueError:
        raise CircuitParseError(f"malformed angle {token!r}", line_no, col) from None


def parse(text: str) -> Circuit:
    """Parse the line-based circuit format (case-insensitive).

    Grammar: a mandatory ``qubits N`` header, then one gate per line as
    ``NAME angle? INT+`` where the angle is a float literal or a rational
    multiple of pi like ``pi/4`` or ``3pi/8``; ``#`` starts a comment.
    """
    circuit = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if circuit is None:
            if tokens[0].lower() != "qubits" or len(tokens) != 2:
                raise CircuitParseError("expected 'qubits N' header", line_no)
            try:
                n = int(tokens[1])
            except ValueError:
                raise CircuitParseError("qubit count must be an integer", line_no, 8) from None
            if n < 1:
                raise CircuitParseError("qubit count must be positive", line_no, 8)
            circuit = Circuit(n)
            continue
        name = tokens[0].upper()
        if name not in GATE_ARITY:
            raise CircuitParseError(f"unknown gate {tokens[0]!r}", line_no)
        rest = tokens[1:]
        angle = None
        if name in ANGLE_GATES:
            if not rest:
                raise CircuitParseError(f"{name} requires an angle", line_no)
            angle = _parse_angle(rest[0], line_no, len(tokens[0]) + 2)
            rest = rest[1:]
        if len(rest) != GATE_ARITY[name]:
            raise CircuitParseError(
                f"{name} takes {GATE_ARITY[name]} qubit index(es), got {len(rest)}", line_no
            )
        try:
            qubits = [int(tok) for tok in rest]
        except ValueError:
            raise CircuitParseError("qubit indices must be integers", line_no) from None
        for q in qubits:
            if not 0 <= q < circuit.n:
                raise CircuitParseError(f"qubit index {q} >= declared count {circuit.n}", line_no)
        try:
            circuit.add(name, *qubits, angle=angle)
        except ValueError as exc:
            raise CircuitParseError(str(exc), line_no) from None
    if circuit is None:
        raise CircuitParseError("empty circuit file", 1)
    return circuit


def render(circuit: Circuit) -> str:
    return circuit.render()


def gate_is_clifford(gate: Gate) -> bool:
    if gate.name in CLIFFORD_NAMES:
        return True
    if gate.name in ANGLE_GATES:
        return is_clifford_angle(gate.angle)
    return False


@dataclass
class CircuitProfile:
    clifford_count: int
    non_clifford: list  # of Gate


def classify(circuit: Circuit) -> CircuitProfile:
    """Partition gates into Clifford and non-Clifford (decomposition-needing)."""
    nc = [g for g in circuit.gates if not gate_is_clifford(g)]
    return CircuitProfile(clifford_count=len(circuit.gates) - len(nc), non_clifford=nc)


# -- fixed-sample gadgetizer ---------------------------------------------


@dataclass
class GadgetizedCircuit:
    """U|0^n> = 2^{tau/2} (1 x <0|^tau) C |0^n>|Psi>, all non-Cliffords
    replaced by CX blocks consuming magic states on ancilla qubits."""

    n: int
    tau: int
    clifford: Circuit  # on n + tau qubits
    magic: list  # of (Gate, ancilla qubit tuple)

    @property
    def renormalization(self) -> float:
        return 2.0 ** (self.tau / 2)


def gadgetize(circuit: Circuit) -> GadgetizedCircuit:
    profile = classify(circuit)
    for g in profile.non_clifford:
        if g.name not in DIAGONAL_NON_CLIFFORD:
            raise ValueError(f"gadgetizer requires diagonal non-Clifford gates, got {g.name}")
    tau = sum(len(g.qubits) for g in profile.non_clifford)
    out = Circuit(circuit.n + tau)
    magic = []
    next_anc = circuit.n
    for gate in circuit.gates:
        if gate_is_clifford(gate):
            out.add(gate.name, *gate.qubits, angle=gate.angle)
            continue
        ancs = tuple(range(next_anc, next_anc + len(gate.qubits)))
        next_anc += len(gate.qubits)
        for q, a in zip(gate.qubits, ancs):
            out.add("CX", q, a)
        magic.append((gate, ancs))
    return GadgetizedCircuit(n=circuit.n, tau=tau, clifford=out, magic=magic)


# -- Hidden Shift benchmark ----------------------------------------------


def gen_hidden_shift(n: int, ccz_count: int, seed, verify: bool | None = None):
    """Hidden-shift instance whose ideal output is the basis state |s>.

    Built from pairs of Maiorana-McFarland bent functions f(x,y) = x.y + h(y)
    with cubic terms in h supplying CCZ gates (half in the shifted oracle,
    half in the dual oracle).  Returns (circuit, shift bits as uint8 array).
    """
    if n % 2 or n < 2:
        raise ValueError("n must be even and >= 2")
    if ccz_count % 2 or ccz_count < 0:
        raise ValueError("ccz_count must be even and >= 0")
    n2 = n // 2
    if ccz_count and n2 < 3:
        raise ValueError("need n/2 >= 3 for cubic terms")
    rng = np.random.default_rng(seed)
    shift = rng.integers(0, 2, size=n).astype(np.uint8)
    n_triples = ccz_count // 2
    triples = []
    seen = set()
    while len(triples) < n_triples:
        t = tuple(sorted(rng.choice(n2, size=3, replace=False).tolist()))
        if t not in seen:
            seen.add(t)
            triples.append(t)
    c = Circuit(n)

    def h_all():
        for q in range(n):
            c.add("H", q)

    def oracle(offset: int):
        # phase oracle for x.y plus the cubic part of h on the given half
        for i in range(n2):
            c.add("CZ", i, n2 + i)
        for (a, b, d) in triples:
            c.add("CCZ", offset + a, offset + b, offset + d)

    h_all()
    for q in np.nonzero(shift)[0]:
        c.add("X", int(q))
    oracle(n2)  # g(z) = f(z + s): shifted f, cubic terms on the y half
    for q in np.nonzero(shift)[0]:
        c.add("X", int(q))
    h_all()
    oracle(0)  # dual bent function: cubic terms on the x half
    h_all()

    from .dense import dense_run, max_dense_qubits

    if verify is None:
        verify = n <= min(12, max_dense_qubits())
    if verify:
        state = dense_run(c)
        idx = int(sum(int(b) << j for j, b in enumerate(shift)))
        if abs(abs(state.amps[idx]) - 1.0) > 1e-9:
            raise AssertionError("hidden-shift self-check failed: output is not |s>")
    return c, shift


# -- QAOA / Max E3LIN2 benchmark -----------------------------------------


@dataclass
class E3Lin2Instance:
    """Random degree-D instance of Max E3LIN2: C(z) = 1/2 sum d_uvw z_u z_v z_w."""

    n: int
    degree: int
    terms: list  # of (u, v, w, d) with d in {-1, +1}

    @property
    def m(self) -> int:
        return len(self.terms)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "D": self.degree, "terms": [list(t) for t in self.terms]})

    @classmethod
    def from_json(cls, text: str) -> "E3Lin2Instance":
        data = json.loads(text)
        return cls(n=data["n"], degree=data["D"], terms=[tuple(t) for t in data["terms"]])


def gen_e3lin2_instance(n: int, degree: int, rng: np.random.Generator) -> E3Lin2Instance:
    """Each variable appears in exactly ``degree`` terms (one variable may
    appear in fewer when n*degree is not a multiple of 3)."""
    if n < 3 or degree < 1:
        raise ValueError("need n >= 3 and degree >= 1")
    stubs = np.repeat(np.arange(n), degree)
    drop = (n * degree) % 3
    if drop:
        stubs = stubs[:-drop]  # the last variable appears in fewer terms
    m = len(stubs) // 3
    for _attempt in range(500):
        perm = rng.permutation(stubs)
        triples = perm.reshape(m, 3)
        keys = set()
        ok = True
        for t in triples:
            key = tuple(sorted(int(x) for x in t))
            if len(set(key)) != 3 or key in keys:
                ok = False
                break
            keys.add(key)
        if ok:
            signs = rng.choice([-1, 1], size=m)
            terms = [
                (*tuple(sorted(int(x) for x in t)), int(d)) for t, d in zip(triples, signs)
            ]
            return E3Lin2Instance(n=n, degree=degree, terms=terms)
    raise ValueError(f"could not build a degree-{degree} instance on {n} variables")


def gen_qaoa_e3lin2(n: int, degree: int, gamma: float, seed):
    """QAOA circuit e^{-i(pi/4)B} e^{-i gamma C} H^n for a random instance.

    Each cost term becomes a CX-conjugated RZ (one non-Clifford rotation per
    term); the beta = pi/4 mixer layer is exactly Clifford (H RZ(pi/2) H).
    Returns (circuit, instance).
    """
    rng = np.random.default_rng(seed)
    inst = gen_e3lin2_instance(n, degree, rng)
    c = Circuit(n)
    for q in range(n):
        c.add("H", q)
    for (u, v, w, d) in inst.terms:
        c.add("CX", u, w)
        c.add("CX", v, w)
        c.add("RZ", w, angle=d * gamma)
        c.add("CX", v, w)
        c.add("CX", u, w)
    for q in range(n):
        c.add("H", q)
        c.add("RZ", q, angle=math.pi / 2)
        c.add("H", q)
    return c, inst


def cost_e3lin2(inst: E3Lin2Instance, z) -> float:
    """C(z) = 1/2 sum d_uvw z_u z_v z_w for z in {-1,+1}^n."""
    z = np.asarray(z)
    total = 0.0
    for (u, v, w, d) in inst.terms:
        total += d * z[u] * z[v] * z[w]
    return 0.5 * total


def cost_e3lin2_bits(inst: E3Lin2Instance, bits: np.ndarray) -> np.ndarray:
    """Vectorized cost for bit arrays (rows of {0,1}^n), z = (-1)^bit."""
    bits = np.atleast_2d(bits)
    z = 1.0 - 2.0 * bits
    tv = _term_values(inst, z)
    return 0.5 * tv.sum(axis=1)


def _term_values(inst: E3Lin2Instance, z: np.ndarray) -> np.ndarray:
    u = np.array([t[0] for t in inst.terms])
    v = np.array([t[1] for t in inst.terms])
    w = np.array([t[2] for t in inst.terms])
    d = np.array([t[3] for t in inst.terms], dtype=float)
    return d * z[:, u] * z[:, v] * z[:, w]


def mc_expectation_e3lin2(
    inst: E3Lin2Instance, gamma: float, samples: int, rng: np.random.Generator
):
    """Monte Carlo estimate of E(gamma) = <psi|C|psi> at beta = pi/4.

    Uniform sampling of basis states against the sparse conjugated cost
    operator; additive-error estimator with O(m^2) work per sample batch.
    Returns (estimate, standard_error).
    """
    m = inst.m
    tsets = [frozenset(t[:3]) for t in inst.terms]
    odd = np.zeros((m, m), dtype=bool)
    for a in range(m):
        for b in range(m):
            odd[a, b] = len(tsets[a] & tsets[b]) % 2 == 1
    bits = rng.integers(0, 2, size=(samples, inst.n))
    z = 1.0 - 2.0 * bits
    tv = _term_values(inst, z)  # (samples, m), includes the d coefficient
    delta_c = -(tv @ odd.T)  # C(x + e_t) - C(x)
    # beta = pi/4 conjugates each Z_j to Y_j; <x|YYY|x+e_t> = i (-1)^{sigma}
    vals = 0.5j * (tv * np.exp(-1j * gamma * delta_c)).sum(axis=1)
    re = vals.real
    return float(re.mean()), float(re.std(ddof=1) / math.sqrt(samples))
