"""Pure-numpy kernels: quadratic-form exponential sums and the equatorial
inner-product batch used by norm estimation.

This is the fallback twin of the compiled core (_corecy); both implement
the same packed-word interfaces and are differentially tested against
each other.
"""

from __future__ import annotations

import numpy as np

from ..f2 import n_words, pack_bits, parity_words, unpack_bits

_ONE = np.uint64(1)


def _lowest_bit(words) -> int:
    for wi, word in enumerate(words):
        iw = int(word)
        if iw:
            return wi * 64 + (iw & -iw).bit_length() - 1
    return -1


def _dual_z2_sum(m_rows: np.ndarray, l0: np.ndarray, l1: np.ndarray, m: int):
    """Evaluate sum_x (-1)^{x M x^T + L x^T} for two linear parts at once.

    The two forms share the quadratic part, so the two-variable elimination
    follows the same pivots; only the linear bookkeeping differs.  Returns
    ((sign0, pow0), (sign1, pow1)) with each sum equal to sign * 2^pow.
    """
    w = n_words(m)
    mrows = m_rows.astype(np.uint64).copy()
    mt = pack_bits(unpack_bits(mrows, m).T) if m else np.zeros((0, w), np.uint64)
    lvecs = [l0.astype(np.uint64).copy(), l1.astype(np.uint64).copy()]
    signs = [1, 1]
    active = pack_bits(np.ones(m, dtype=np.uint8)) if m else np.zeros(w, np.uint64)
    power = 0
    nact = m
    while True:
        diff = (mrows ^ mt) & active
        alive = np.nonzero(unpack_bits(active, m))[0] if m else []
        pivot = None
        for i in alive:
            j = _lowest_bit(diff[i])
            if j >= 0:
                pivot = (int(i), j)
                break
        if pivot is None:
            # symmetric residual: purely linear form
            diag = np.zeros(w, dtype=np.uint64)
            for i in alive:
                wi, bi = i // 64, np.uint64(i % 64)
                diag[wi] |= ((mrows[i, wi] >> bi) & _ONE) << bi
            out = []
            for r in range(2):
                if np.any((lvecs[r] ^ diag) & active):
                    out.append((0, 0))
                else:
                    out.append((signs[r], power + nact))
            return out[0], out[1]
        i, j = pivot
        eij = np.zeros(w, dtype=np.uint64)
        eij[i // 64] |= _ONE << np.uint64(i % 64)
        eij[j // 64] |= _ONE << np.uint64(j % 64)
        keep = active & ~eij
        m1 = (mrows[i] ^ mt[i]) & keep
        m2 = (mrows[j] ^ mt[j]) & keep
        mii = int((mrows[i, i // 64] >> np.uint64(i % 64)) & _ONE)
        mjj = int((mrows[j, j // 64] >> np.uint64(j % 64)) & _ONE)
        for r in range(2):
            c1 = int((lvecs[r][i // 64] >> np.uint64(i % 64)) & _ONE) ^ mii
            c2 = int((lvecs[r][j // 64] >> np.uint64(j % 64)) & _ONE) ^ mjj
            if c1 and c2:
                signs[r] = -signs[r]
            upd = np.zeros(w, dtype=np.uint64)
            if c1:
                upd ^= m2
            if c2:
                upd ^= m1
            lvecs[r] ^= upd
        sel1 = unpack_bits(m1, m).astype(bool)
        sel2 = unpack_bits(m2, m).astype(bool)
        mrows[sel1] ^= m2
        mt[sel2] ^= m1
        active = keep
        nact -= 2
        power += 1


def z2_exponential_sum(m_rows: np.ndarray, l_bits: np.ndarray, m: int):
    """sum_x (-1)^{x M x^T + L x^T} over {0,1}^m as (sign, power)."""
    zeros = np.zeros_like(l_bits)
    (s0, p0), _ = _dual_z2_sum(m_rows, l_bits, zeros, m)
    return s0, p0


def z4_exponential_sum(upper_rows: np.ndarray, diag: np.ndarray, n: int):
    """sum_x i^{x B x^T} over {0,1}^n for B with strict-upper bits and Z4 diag.

    Returns (a, p, b, q) meaning the exact Gaussian integer a*2^p + i*b*2^q
    with a, b in {-1, 0, +1}.  The Z4 form is reduced to a pair of Z2 forms
    on n+1 variables sharing one quadratic part.
    """
    mv = n + 1
    w2 = n_words(mv)
    kbits = (diag & 1).astype(np.uint8)
    lbits = ((diag >> 1) & 1).astype(np.uint8)
    m2_bits = np.zeros((mv, mv), dtype=np.uint8)
    if n:
        m2_bits[:n, :n] = unpack_bits(upper_rows, n)
        # strict-upper correction K_a K_b, plus coupling K_a to the new variable
        kk = np.triu(np.outer(kbits, kbits), 1)
        m2_bits[:n, :n] ^= kk.astype(np.uint8)
        m2_bits[:n, n] = kbits
    m2 = pack_bits(m2_bits)
    l0_bits = np.zeros(mv, dtype=np.uint8)
    l0_bits[:n] = lbits
    l1_bits = l0_bits.copy()
    l1_bits[n] ^= 1
    l0, l1 = pack_bits(l0_bits), pack_bits(l1_bits)
    (s0, p0), (s1, p1) = _dual_z2_sum(m2, l0, l1, mv)
    re = (s0, p0 - 1) if s0 else (0, 0)
    im = (s1, p1 - 1) if s1 else (0, 0)
    return re[0], re[1], im[0], im[1]


def _term_phase_matrices(gt_b, g_b, csym_b, d_c):
    """K2 = Gt Csym G mod 2 and diag(K) mod 4 for one term (uint8 math)."""
    gt_i = gt_b.astype(np.int32)
    cs_i = csym_b.astype(np.int32)
    g_i = g_b.astype(np.int32)
    k2 = (gt_i @ cs_i @ g_i) % 2
    count = np.einsum("ai,ij,aj->a", gt_i, cs_i, gt_i)
    dsum = gt_i @ (d_c & 1).astype(np.int32)
    pairs = ((count - dsum) >> 1) & 1
    kdiag = (gt_i @ d_c.astype(np.int32) + 2 * pairs) % 4
    return k2.astype(np.uint8), kdiag.astype(np.uint8)


def _quadform_z4_eval(diag4, mat2, sel):
    """q = sum_a diag4[a] sel[a] + 2 * #{a<b in sel: mat2[a,b]=1} (mod 4)."""
    sel_i = sel.astype(np.int32)
    lin = int(sel_i @ diag4.astype(np.int32))
    count = int(sel_i @ mat2.astype(np.int32) @ sel_i)
    dsum = int(sel_i @ np.diag(mat2).astype(np.int32))
    pairs = ((count - dsum) >> 1) & 1
    return (lin + 2 * pairs) % 4


def equatorial_inner_pieces(gt_b, g_b, j2_b, gamma_row, v_b, s_b, a2_b, ad):
    """Shared math of the equatorial inner product for one CH term.

    Returns (s_k_s mod 4, (a, p, b, q)) so that

      <phi|phi_A> = conj(omega) 2^{-(n+|v|)/2} i^{sKs} (-1)^{s.v} Z(B).
    """
    csym = (j2_b ^ a2_b).astype(np.uint8)
    d_c = ((gamma_row.astype(np.int32) + ad.astype(np.int32)) % 4).astype(np.uint8)
    np.fill_diagonal(csym, d_c & 1)
    k2, kdiag = _term_phase_matrices(gt_b, g_b, csym, d_c)
    sks = _quadform_z4_eval(kdiag, k2, s_b)
    sk2 = (s_b.astype(np.int32) @ k2.astype(np.int32)) % 2
    vars_ = np.nonzero(v_b)[0]
    nv = len(vars_)
    bdiag = ((kdiag[vars_].astype(np.int32) + 2 * (s_b[vars_] ^ sk2[vars_])) % 4).astype(np.uint8)
    sub = k2[np.ix_(vars_, vars_)]
    upper = np.triu(sub, 1).astype(np.uint8)
    upper_rows = pack_bits(upper) if nv else np.zeros((0, 1), np.uint64)
    z = z4_exponential_sum(upper_rows, bdiag, nv)
    return sks, z


def norm_sum_one_probe(norm_data, a2_rows: np.ndarray, ad: np.ndarray) -> complex:
    """S_A = sum_alpha w_alpha * conj-free inner pieces for one probe A.

    ``w_alpha`` already folds b_alpha, omega, 2^{-(n+|v|)/2} and (-1)^{s.v};
    this returns sum_alpha w_alpha i^{-sKs} conj(Z(B)).
    """
    n = norm_data.n
    a2_b = unpack_bits(a2_rows, n)
    total = 0j
    ipow = (1j) ** np.arange(4)
    for alpha in range(norm_data.k):
        gt_b = unpack_bits(norm_data.gt[alpha], n)
        g_b = unpack_bits(norm_data.g[alpha], n)
        j2_b = unpack_bits(norm_data.j2[alpha], n)
        v_b = unpack_bits(norm_data.v[alpha], n)
        s_b = unpack_bits(norm_data.s[alpha], n)
        sks, (ra, rp, ib, iq) = equatorial_inner_pieces(
            gt_b, g_b, j2_b, norm_data.gamma[alpha], v_b, s_b, a2_b, ad
        )
        z_conj = ra * 2.0**rp - 1j * ib * 2.0**iq
        total += norm_data.w[alpha] * ipow[(-sks) % 4] * z_conj
    return total


def norm_sum_probes(norm_data, a2_batch: np.ndarray, ad_batch: np.ndarray) -> np.ndarray:
    """Batched form of norm_sum_one_probe (one probe per leading index)."""
    return np.array(
        [
            norm_sum_one_probe(norm_data, a2_batch[p], ad_batch[p])
            for p in range(a2_batch.shape[0])
        ],
        dtype=np.complex128,
    )


def metropolis_update(mdata, j: int, mu, u, t):
    """Multiply each cached Pauli by U_C^-1 X_j U_C; returns new (mu, u, t)."""
    fj = mdata.f[:, j, :]
    mj = mdata.m[:, j, :]
    gj = mdata.gamma[:, j].astype(np.int64)
    phase = (mu.astype(np.int64) + gj + 2 * parity_words(mj & u, axis=1)) % 4
    return phase.astype(np.uint8), u ^ fj, t ^ mj


def metropolis_amplitudes(mdata, mu, u, t):
    """Per-term <x|phi_alpha> for the cached Paulis, as complex weights."""
    vw = mdata.v
    sw = mdata.s
    ok = ~np.any((u & ~vw) ^ (sw & ~vw), axis=1)
    sign = parity_words(t & sw & ~vw, axis=1) ^ parity_words(u & vw & (t ^ sw), axis=1)
    ipow = (1j) ** np.arange(4)
    amp = ipow[mu % 4] * np.where(sign, -1.0, 1.0)
    return np.where(ok, amp, 0.0) * mdata.wamp
