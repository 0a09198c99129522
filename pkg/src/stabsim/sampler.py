"""Output sampling from stabilizer superpositions: a heuristic Metropolis
chain with O(kn) steps via cached Pauli accumulators, and the rigorous
chain-rule sampler driven by norm estimation.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .f2 import parity_words, popcount_words, unpack_bits
from .superposition import (
    StabilizerSuperposition,
    estimate_norm,
    freeze_norm_data,
    norm_probe_samples,
)

_ONE = np.uint64(1)


def _freeze_metropolis(psi: StabilizerSuperposition) -> kernels.MetropolisData:
    f = np.stack([phi.F.words for _, phi in psi.terms])
    m = np.stack([phi.M.words for _, phi in psi.terms])
    gamma = np.stack([phi.gamma.vals for _, phi in psi.terms])
    v = np.stack([phi.v.words for _, phi in psi.terms])
    s = np.stack([phi.s.words for _, phi in psi.terms])
    nv = popcount_words(v, axis=1)
    wamp = np.array(
        [b * phi.omega.to_complex() for b, phi in psi.terms], dtype=np.complex128
    ) * 2.0 ** (-nv.astype(float) / 2)
    return kernels.MetropolisData(f=f, m=m, gamma=gamma, v=v, s=s, wamp=wamp)


class MetropolisSampler:
    """Markov chain on bit strings with stationary distribution
    |<x|psi>|^2 / ||psi||^2 (assuming irreducibility, which is heuristic).

    Each step proposes one uniformly random bit flip and accepts with
    min(1, P(y)/P(x)); the amplitude ratio is computed in O(kn) by updating
    one cached Pauli per term.
    """

    def __init__(
        self,
        psi: StabilizerSuperposition,
        rng: np.random.Generator,
        max_init_tries: int = 100,
        debug: bool = False,
    ):
        if psi.k == 0:
            raise ValueError("empty superposition")
        self.psi = psi
        self.rng = rng
        self.debug = debug
        self.data = _freeze_metropolis(psi)
        self.n = psi.n
        self.k = psi.k
        probs = np.abs(np.array([b for b, _ in psi.terms])) ** 2
        probs /= probs.sum()
        for _ in range(max_init_tries):
            alpha = int(rng.choice(self.k, p=probs))
            x = psi.terms[alpha][1].sample_basis(rng)
            self._set_state(x.words)
            if abs(self.amp) > 1e-14:
                return
        raise RuntimeError("could not find a nonzero-probability starting string")

    def _fresh_q(self, x_words: np.ndarray):
        """Recompute the cached Paulis Q_x = prod_p (U_C^-1 X_p U_C)^{x_p}."""
        k = self.k
        mu = np.zeros(k, dtype=np.uint8)
        u = np.zeros_like(self.data.v)
        t = np.zeros_like(self.data.v)
        for p in np.nonzero(unpack_bits(x_words, self.n))[0]:
            p = int(p)
            mu = (
                mu.astype(np.int64)
                + self.data.gamma[:, p]
                + 2 * parity_words(t & self.data.f[:, p, :], axis=1)
            ) % 4
            mu = mu.astype(np.uint8)
            u = u ^ self.data.f[:, p, :]
            t = t ^ self.data.m[:, p, :]
        return mu, u, t

    def _set_state(self, x_words: np.ndarray) -> None:
        self.x_words = x_words.copy()
        self.mu, self.u, self.t = self._fresh_q(x_words)
        self.amp = complex(
            kernels.metropolis_amplitudes(self.data, self.mu, self.u, self.t).sum()
        )

    def current_bits(self) -> np.ndarray:
        return unpack_bits(self.x_words, self.n)

    def step(self) -> bool:
        """One Metropolis move; returns True if the proposal was accepted."""
        j = int(self.rng.integers(0, self.n))
        mu2, u2, t2 = kernels.metropolis_update(self.data, j, self.mu, self.u, self.t)
        amp2 = complex(kernels.metropolis_amplitudes(self.data, mu2, u2, t2).sum())
        p_x = abs(self.amp) ** 2
        p_y = abs(amp2) ** 2
        accept = p_y >= p_x or self.rng.random() * p_x < p_y
        if accept:
            self.mu, self.u, self.t = mu2, u2, t2
            self.x_words[j // 64] ^= _ONE << np.uint64(j % 64)
            self.amp = amp2
            if self.debug and self.rng.random() < 0.02:
                fm, fu, ft = self._fresh_q(self.x_words)
                if not (
                    np.array_equal(fm, self.mu)
                    and np.array_equal(fu, self.u)
                    and np.array_equal(ft, self.t)
                ):
                    raise AssertionError("cached Pauli accumulators diverged")
        return accept

    def run(self, steps: int, burn_in: int) -> np.ndarray:
        """Emit the chain state after each post-burn-in step: (steps, n) bits."""
        for _ in range(burn_in):
            self.step()
        out = np.empty((steps, self.n), dtype=np.uint8)
        for i in range(steps):
            self.step()
            out[i] = self.current_bits()
        return out


def metropolis_sample(
    psi: StabilizerSuperposition,
    steps: int,
    burn_in: int,
    rng: np.random.Generator,
    debug: bool = False,
) -> np.ndarray:
    """Draw ``steps`` correlated samples after ``burn_in`` Metropolis moves."""
    return MetropolisSampler(psi, rng, debug=debug).run(steps, burn_in)


# -- chain-rule sampler --------------------------------------------------


def _default_eps(w: int) -> float:
    return min(0.1, 1.0 / (4 * w))


def _branch_norms(
    psi: StabilizerSuperposition,
    qubit: int,
    eps: float,
    p_fail: float,
    rng: np.random.Generator,
    workers: int = 1,
):
    psi0 = psi.copy()
    psi0.apply_projector_all(qubit, 0)
    psi1 = psi.copy()
    psi1.apply_projector_all(qubit, 1)
    eta0 = estimate_norm(psi0, eps, p_fail, rng, workers=workers) if psi0.k else 0.0
    eta1 = estimate_norm(psi1, eps, p_fail, rng, workers=workers) if psi1.k else 0.0
    return psi0, eta0, psi1, eta1


def chain_rule_sample(
    psi: StabilizerSuperposition,
    w: int,
    rng: np.random.Generator,
    eps_norm: float | None = None,
    p_fail: float = 0.25,
    max_retries: int = 20,
    workers: int = 1,
) -> np.ndarray:
    """Sample the first w output bits via conditional norm estimates.

    Bit j is drawn proportionally to the estimated norms of the two
    single-qubit projections of the prefix-conditioned state; a prefix
    whose branch norms both collapse below 1e-3 of the parent estimate is
    declared inconsistent and resampled from scratch.
    """
    if w > psi.n:
        raise ValueError("w exceeds qubit count")
    eps = _default_eps(w) if eps_norm is None else eps_norm
    for _retry in range(max_retries):
        current = psi
        parent = estimate_norm(psi, eps, p_fail, rng, workers=workers)
        if parent <= 0:
            raise ValueError("cannot sample from a zero-norm superposition")
        bits = np.zeros(w, dtype=np.uint8)
        dead = False
        for j in range(w):
            psi0, eta0, psi1, eta1 = _branch_norms(current, j, eps, p_fail, rng, workers)
            if eta0 + eta1 < 1e-3 * parent:
                dead = True
                break
            p1 = eta1 / (eta0 + eta1)
            bit = int(rng.random() < p1)
            bits[j] = bit
            current = psi1 if bit else psi0
            parent = eta1 if bit else eta0
        if not dead:
            return bits
    raise RuntimeError("chain-rule sampler kept hitting an inconsistent prefix")


class ChainRuleTree:
    """Lazily-estimated conditional probability tree over the first w bits.

    Each visited prefix gets its two branch norms estimated once and the
    split probability cached, so drawing many samples costs O(w) per sample
    once the high-mass paths are explored.  The probe budget per node scales
    with the node's estimated mass fraction (power 2/3, floored), since a
    subtree of mass f can shift the sampled distribution by at most f.
    """

    def __init__(
        self,
        psi: StabilizerSuperposition,
        w: int,
        rng: np.random.Generator,
        eps_norm: float | None = None,
        p_fail: float = 0.25,
        prune: float = 1e-3,
        floor_samples: int = 64,
        workers: int = 1,
        norm_estimator=None,
    ):
        if w > psi.n:
            raise ValueError("w exceeds qubit count")
        if psi.k == 0:
            raise ValueError("cannot sample from a zero superposition")
        self.psi = psi
        self.w = w
        self.rng = rng
        self.eps = _default_eps(w) if eps_norm is None else eps_norm
        self.full_samples = math.ceil(4.0 / self.eps**2)
        self.floor_samples = min(floor_samples, self.full_samples)
        self.workers = workers
        # overriding the estimator (e.g. with an exact oracle) turns the
        # sampler into an exact one; used by tests
        self._norm_estimator = norm_estimator
        self.p1: dict = {}
        self._sup_cache: dict = {}
        self._cache_cap = max(64, int(2e8 / max(1, psi.k * psi.n * 24)))
        self.root_norm = self._estimate(psi, self.full_samples)
        if self.root_norm <= 0:
            raise ValueError("cannot sample from a zero-norm superposition")
        self.floor = prune * self.root_norm

    def _node_samples(self, mass: float) -> int:
        frac = max(min(mass / self.root_norm, 1.0), 0.0)
        want = math.ceil(self.full_samples * frac ** (2.0 / 3.0))
        return int(min(self.full_samples, max(self.floor_samples, want)))

    def _estimate(self, sup: StabilizerSuperposition, count: int) -> float:
        if sup.k == 0:
            return 0.0
        if self._norm_estimator is not None:
            return float(self._norm_estimator(sup, count))
        nd = freeze_norm_data(sup)
        return float(norm_probe_samples(nd, count, self.rng, workers=self.workers).mean())

    def _expand(self, prefix) -> None:
        """Estimate the branch split at ``prefix``."""
        sup = self._sup_cache.pop(prefix, None)
        if sup is None:
            sup = self.psi
            for j, bit in enumerate(prefix):
                sup = sup.copy()
                sup.apply_projector_all(j, int(bit))
        j = len(prefix)
        mass = self._parent_mass(prefix) if prefix else self.root_norm
        count = self._node_samples(mass)
        sup0 = sup.copy()
        sup0.apply_projector_all(j, 0)
        sup1 = sup.copy()
        sup1.apply_projector_all(j, 1)
        eta0 = self._estimate(sup0, count)
        eta1 = self._estimate(sup1, count)
        if j + 1 < self.w and len(self._sup_cache) < self._cache_cap:
            self._sup_cache[prefix + (0,)] = sup0
            self._sup_cache[prefix + (1,)] = sup1
        total = eta0 + eta1
        if total <= 0:
            self.p1[prefix] = (None, 0.0)
            return
        self.p1[prefix] = (eta1 / total, total)

    def _parent_mass(self, prefix) -> float:
        entry = self.p1.get(prefix[:-1])
        if entry is None:
            return self.root_norm
        p1, total = entry
        if p1 is None:
            return 0.0
        return total * (p1 if prefix[-1] else 1.0 - p1)

    def sample(self, rng: np.random.Generator | None = None) -> np.ndarray:
        rng = self.rng if rng is None else rng
        bits = np.zeros(self.w, dtype=np.uint8)
        prefix = ()
        for j in range(self.w):
            if prefix not in self.p1:
                self._expand(prefix)
            p1, _total = self.p1[prefix]
            if p1 is None:
                p1 = 0.5  # dead branch: reachable only with vanishing probability
            bit = int(rng.random() < p1)
            bits[j] = bit
            prefix = prefix + (bit,)
        return bits

    def sample_many(self, count: int, rng: np.random.Generator | None = None) -> np.ndarray:
        out = np.empty((count, self.w), dtype=np.uint8)
        for i in range(count):
            out[i] = self.sample(rng)
        return out


def estimate_output_probability(
    psi: StabilizerSuperposition,
    assignment,
    eps: float,
    p_fail: float,
    rng: np.random.Generator,
    workers: int = 1,
) -> float:
    """P(assigned bits) = ||Pi psi||^2 / ||psi||^2 to relative error eps.

    ``assignment`` maps qubit index -> bit.  Both norms are estimated to
    relative error eps/3 so the ratio lands within eps.
    """
    items = sorted(assignment.items()) if isinstance(assignment, dict) else list(assignment)
    for q, _ in items:
        if not 0 <= q < psi.n:
            raise ValueError(f"assigned qubit {q} out of range")
    den = estimate_norm(psi, eps / 3, p_fail / 2, rng, workers=workers)
    if den < 1e-12:
        raise ValueError("denominator norm estimate is (near) zero")
    num_sup = psi.copy()
    for q, bit in items:
        num_sup.apply_projector_all(q, bit)
    if num_sup.k == 0:
        return 0.0
    num = estimate_norm(num_sup, eps / 3, p_fail / 2, rng, workers=workers)
    return num / den
