# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: exponential sums and the equatorial inner-product batch.

Mirrors the pure-numpy twin in _purepy.py on the same packed-word layout;
see that module for the algorithm-level commentary.
"""

from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memset

import numpy as np

cdef extern from *:
    """
    #include <stdint.h>
    static inline int popcount64(uint64_t x) { return __builtin_popcountll(x); }
    static inline int ctz64(uint64_t x) { return __builtin_ctzll(x); }
    """
    int popcount64(unsigned long long x) nogil
    int ctz64(unsigned long long x) nogil

ctypedef unsigned long long u64
ctypedef unsigned char u8


cdef struct DualSum:
    # sign_r * 2^pow_r for the two linear parts; sign 0 means the sum is 0
    int sign0
    int pow0
    int sign1
    int pow1


cdef inline int _get_bit(u64 *words, int j) nogil:
    return (words[j >> 6] >> (j & 63)) & 1


cdef inline void _flip_bit(u64 *words, int j) noexcept nogil:
    words[j >> 6] ^= (<u64>1) << (j & 63)


cdef DualSum _dual_z2_sum_c(u64 *m_rows, u64 *mt_rows, u64 *l0, u64 *l1,
                            u64 *active, u64 *scratch, int m, int w) nogil:
    """Destructive two-variable elimination on packed rows (see _purepy)."""
    cdef DualSum out
    cdef int power = 0, nact = m
    cdef int sign[2]
    cdef u64 *lvec[2]
    cdef int i, j, wi, r, c1, c2, mii, mjj, a
    cdef u64 d, word
    cdef u64 *m1 = scratch
    cdef u64 *m2 = scratch + w
    sign[0] = 1
    sign[1] = 1
    lvec[0] = l0
    lvec[1] = l1
    while True:
        # find the first active row i with an asymmetric partner j
        i = -1
        j = -1
        for a in range(m):
            if not _get_bit(active, a):
                continue
            for wi in range(w):
                d = (m_rows[a * w + wi] ^ mt_rows[a * w + wi]) & active[wi]
                if d != 0:
                    i = a
                    j = (wi << 6) + ctz64(d)
                    break
            if i >= 0:
                break
        if i < 0:
            # symmetric residual: linear form; zero unless L == diag(M)
            out.sign0 = sign[0]
            out.sign1 = sign[1]
            out.pow0 = power + nact
            out.pow1 = power + nact
            for a in range(m):
                if not _get_bit(active, a):
                    continue
                mii = _get_bit(m_rows + a * w, a)
                if (_get_bit(l0, a) ^ mii) and out.sign0:
                    out.sign0 = 0
                    out.pow0 = 0
                if (_get_bit(l1, a) ^ mii) and out.sign1:
                    out.sign1 = 0
                    out.pow1 = 0
            return out
        # pivot pair (i, j): eliminate both variables
        mii = _get_bit(m_rows + i * w, i)
        mjj = _get_bit(m_rows + j * w, j)
        _flip_bit(active, i)
        _flip_bit(active, j)
        for wi in range(w):
            m1[wi] = (m_rows[i * w + wi] ^ mt_rows[i * w + wi]) & active[wi]
            m2[wi] = (m_rows[j * w + wi] ^ mt_rows[j * w + wi]) & active[wi]
        for r in range(2):
            c1 = _get_bit(lvec[r], i) ^ mii
            c2 = _get_bit(lvec[r], j) ^ mjj
            if c1 and c2:
                sign[r] = -sign[r]
            if c1:
                for wi in range(w):
                    lvec[r][wi] ^= m2[wi]
            if c2:
                for wi in range(w):
                    lvec[r][wi] ^= m1[wi]
        for wi in range(w):
            word = m1[wi]
            while word != 0:
                a = (wi << 6) + ctz64(word)
                word &= word - 1
                for r in range(w):
                    m_rows[a * w + r] ^= m2[r]
        for wi in range(w):
            word = m2[wi]
            while word != 0:
                a = (wi << 6) + ctz64(word)
                word &= word - 1
                for r in range(w):
                    mt_rows[a * w + r] ^= m1[r]
        power += 1
        nact -= 2


cdef int _words_for(int bits) nogil:
    return 1 if bits <= 0 else (bits + 63) >> 6


def z2_exponential_sum(m_rows, l_bits, int m):
    """sum_x (-1)^{x M x^T + L x^T} as (sign, power); matches _purepy."""
    cdef int w = _words_for(m)
    rows = np.ascontiguousarray(m_rows, dtype=np.uint64)
    lin = np.ascontiguousarray(l_bits, dtype=np.uint64)
    cdef u64[:, ::1] rows_v = rows
    cdef u64[::1] lin_v = lin
    cdef u64 *mbuf = <u64 *>calloc(m * w * 2 + 4 * w, sizeof(u64))
    if mbuf == NULL:
        raise MemoryError
    cdef u64 *mtbuf = mbuf + m * w
    cdef u64 *l0 = mtbuf + m * w
    cdef u64 *l1 = l0 + w
    cdef u64 *active = l1 + w
    cdef u64 *scratch = <u64 *>calloc(2 * w, sizeof(u64))
    if scratch == NULL:
        free(mbuf)
        raise MemoryError
    cdef int a, b, wi
    cdef DualSum res
    try:
        for a in range(m):
            for wi in range(w):
                mbuf[a * w + wi] = rows_v[a, wi]
        for a in range(m):
            for b in range(m):
                if _get_bit(mbuf + a * w, b):
                    _flip_bit(mtbuf + b * w, a)
        for wi in range(w):
            l0[wi] = lin_v[wi] if wi < lin.shape[0] else 0
        for a in range(m):
            _flip_bit(active, a)
        res = _dual_z2_sum_c(mbuf, mtbuf, l0, l1, active, scratch, m, w)
        return res.sign0, res.pow0
    finally:
        free(scratch)
        free(mbuf)


cdef DualSum _z4_sum_c(u64 *upper, u8 *diag, int n, u64 *work) nogil:
    """Z4 form -> dual Z2 forms on n+1 variables sharing the quadratic part.

    ``upper`` holds strict-upper rows at width w2 = words(n+1); ``work``
    must hold (2*(n+1) + 5) * w2 words.  Returns Re = sign0*2^{pow0-1},
    Im = sign1*2^{pow1-1} encoded with UNSHIFTED powers (caller adjusts).
    """
    cdef int mv = n + 1
    cdef int w2 = _words_for(mv)
    cdef u64 *mbuf = work
    cdef u64 *mtbuf = work + mv * w2
    cdef u64 *l0 = mtbuf + mv * w2
    cdef u64 *l1 = l0 + w2
    cdef u64 *active = l1 + w2
    cdef u64 *scratch = active + w2
    cdef int a, b, wi, ka
    cdef u64 word
    memset(mbuf, 0, (2 * mv + 5) * w2 * sizeof(u64))
    for a in range(n):
        ka = diag[a] & 1
        for wi in range(w2):
            mbuf[a * w2 + wi] = upper[a * w2 + wi]
        if ka:
            # strict-upper correction K_a K_b and the new-variable coupling
            for b in range(a + 1, n):
                if diag[b] & 1:
                    _flip_bit(mbuf + a * w2, b)
            _flip_bit(mbuf + a * w2, n)
        if (diag[a] >> 1) & 1:
            _flip_bit(l0, a)
    for a in range(mv):
        for wi in range(w2):
            word = mbuf[a * w2 + wi]
            while word != 0:
                b = (wi << 6) + ctz64(word)
                word &= word - 1
                _flip_bit(mtbuf + b * w2, a)
    for wi in range(w2):
        l1[wi] = l0[wi]
    _flip_bit(l1, n)
    for a in range(mv):
        _flip_bit(active, a)
    return _dual_z2_sum_c(mbuf, mtbuf, l0, l1, active, scratch, mv, w2)


def z4_exponential_sum(upper_rows, diag, int n):
    """Z(B) as exact (a, p, b, q) = a*2^p + i*b*2^q; matches _purepy."""
    cdef int w_in, w2 = _words_for(n + 1)
    up = np.ascontiguousarray(upper_rows, dtype=np.uint64)
    dg = np.ascontiguousarray(diag, dtype=np.uint8)
    cdef u64[:, ::1] up_v = up
    cdef u8[::1] dg_v = dg
    w_in = up.shape[1] if n else 0
    cdef u64 *upbuf = <u64 *>calloc(max(n, 1) * w2, sizeof(u64))
    cdef u64 *work = <u64 *>calloc((2 * (n + 1) + 5) * w2, sizeof(u64))
    if upbuf == NULL or work == NULL:
        free(upbuf)
        free(work)
        raise MemoryError
    cdef int a, wi
    cdef DualSum res
    try:
        for a in range(n):
            for wi in range(w_in):
                if wi < w2:
                    upbuf[a * w2 + wi] = up_v[a, wi]
        res = _z4_sum_c(upbuf, &dg_v[0] if n else NULL, n, work)
        if res.sign0:
            re = (res.sign0, res.pow0 - 1)
        else:
            re = (0, 0)
        if res.sign1:
            im = (res.sign1, res.pow1 - 1)
        else:
            im = (0, 0)
        return re[0], re[1], im[0], im[1]
    finally:
        free(upbuf)
        free(work)


cdef struct ProbeScratch:
    u64 *csym
    u64 *tmat
    u64 *k2
    u8 *d_c
    u8 *kdiag
    u8 *sk2
    int *vidx
    u64 *bupper
    u8 *bdiag
    u64 *work


cdef int _alloc_scratch(ProbeScratch *sc, int n, int w, int w2) noexcept:
    sc.csym = <u64 *>malloc(n * w * sizeof(u64))
    sc.tmat = <u64 *>malloc(n * w * sizeof(u64))
    sc.k2 = <u64 *>malloc(n * w * sizeof(u64))
    sc.d_c = <u8 *>malloc(n)
    sc.kdiag = <u8 *>malloc(n)
    sc.sk2 = <u8 *>malloc(n)
    sc.vidx = <int *>malloc(n * sizeof(int))
    sc.bupper = <u64 *>malloc(max(n, 1) * w2 * sizeof(u64))
    sc.bdiag = <u8 *>malloc(max(n, 1))
    sc.work = <u64 *>malloc((2 * (n + 1) + 5) * w2 * sizeof(u64))
    if (sc.csym == NULL or sc.tmat == NULL or sc.k2 == NULL or sc.d_c == NULL
            or sc.kdiag == NULL or sc.sk2 == NULL or sc.vidx == NULL
            or sc.bupper == NULL or sc.bdiag == NULL or sc.work == NULL):
        return -1
    return 0


cdef void _free_scratch(ProbeScratch *sc) noexcept:
    free(sc.csym); free(sc.tmat); free(sc.k2); free(sc.d_c); free(sc.kdiag)
    free(sc.sk2); free(sc.vidx); free(sc.bupper); free(sc.bdiag); free(sc.work)


cdef double complex _probe_terms(
        u64[:, :, ::1] gt, u64[:, :, ::1] g, u64[:, :, ::1] j2,
        u8[:, ::1] gamma, u64[:, ::1] vv, u64[:, ::1] ss,
        double complex[::1] wts,
        u64 *a2, u8 *advec, int k, int n, int w, int w2,
        ProbeScratch *sc) nogil:
    """sum over terms of w_alpha i^{-sKs} conj(Z(B_alpha)) for one probe."""
    cdef double complex total = 0
    cdef double complex ip[4]
    cdef double complex zc
    cdef int alpha, a, b, wi, i, nv, lin, cnt, dsum, sks, sb, pairs, w2nv
    cdef u64 word
    cdef DualSum res
    cdef double re_val, im_val
    ip[0] = 1
    ip[1] = 1j
    ip[2] = -1
    ip[3] = -1j
    for alpha in range(k):
        # Csym = J2 xor A2 (diag bit = (gamma + Ad) mod 2 by construction)
        for a in range(n):
            sc.d_c[a] = (gamma[alpha, a] + advec[a]) & 3
            for wi in range(w):
                sc.csym[a * w + wi] = j2[alpha, a, wi] ^ a2[a * w + wi]
        # T = Gt . Csym over GF(2), iterating set bits of each Gt row
        for a in range(n):
            for wi in range(w):
                sc.tmat[a * w + wi] = 0
            for b in range(w):
                word = gt[alpha, a, b]
                while word != 0:
                    i = (b << 6) + ctz64(word)
                    word &= word - 1
                    for wi in range(w):
                        sc.tmat[a * w + wi] ^= sc.csym[i * w + wi]
        # K2 = T . G over GF(2)
        for a in range(n):
            for wi in range(w):
                sc.k2[a * w + wi] = 0
            for b in range(w):
                word = sc.tmat[a * w + b]
                while word != 0:
                    i = (b << 6) + ctz64(word)
                    word &= word - 1
                    for wi in range(w):
                        sc.k2[a * w + wi] ^= g[alpha, i, wi]
        # diag(K) mod 4 via the quadratic form of each column of G
        for a in range(n):
            lin = 0
            cnt = 0
            dsum = 0
            for b in range(w):
                word = gt[alpha, a, b]
                while word != 0:
                    i = (b << 6) + ctz64(word)
                    word &= word - 1
                    lin += sc.d_c[i]
                    dsum += sc.d_c[i] & 1
                    for wi in range(w):
                        cnt += popcount64(sc.csym[i * w + wi] & gt[alpha, a, wi])
            pairs = ((cnt - dsum) >> 1) & 1
            sc.kdiag[a] = (lin + 2 * pairs) & 3
        # sKs mod 4 and sK2 bits
        lin = 0
        cnt = 0
        dsum = 0
        for a in range(n):
            sc.sk2[a] = 0
            for wi in range(w):
                sc.sk2[a] ^= <u8>(popcount64(sc.k2[a * w + wi] & ss[alpha, wi]) & 1)
            if _get_bit(&ss[alpha, 0], a):
                lin += sc.kdiag[a]
                dsum += sc.kdiag[a] & 1
                for wi in range(w):
                    cnt += popcount64(sc.k2[a * w + wi] & ss[alpha, wi])
        pairs = ((cnt - dsum) >> 1) & 1
        sks = (lin + 2 * pairs) & 3
        # restrict K to the Hadamard support; row stride words(nv+1)
        nv = 0
        for a in range(n):
            if _get_bit(&vv[alpha, 0], a):
                sc.vidx[nv] = a
                nv += 1
        w2nv = _words_for(nv + 1)
        for a in range(nv):
            for wi in range(w2nv):
                sc.bupper[a * w2nv + wi] = 0
            i = sc.vidx[a]
            sb = _get_bit(&ss[alpha, 0], i) ^ sc.sk2[i]
            sc.bdiag[a] = (sc.kdiag[i] + 2 * sb) & 3
            for b in range(a + 1, nv):
                if _get_bit(sc.k2 + i * w, sc.vidx[b]):
                    _flip_bit(sc.bupper + a * w2nv, b)
        res = _z4_sum_c(sc.bupper, sc.bdiag, nv, sc.work)
        re_val = 0
        im_val = 0
        if res.sign0:
            re_val = res.sign0 * (2.0 ** (res.pow0 - 1))
        if res.sign1:
            im_val = res.sign1 * (2.0 ** (res.pow1 - 1))
        zc = re_val - 1j * im_val
        total = total + wts[alpha] * ip[(4 - sks) & 3] * zc
    return total


def norm_sum_probes(norm_data, a2_batch, ad_batch):
    """S_A for a batch of probes; returns a complex array of length P."""
    cdef u64[:, :, ::1] gt = norm_data.gt
    cdef u64[:, :, ::1] g = norm_data.g
    cdef u64[:, :, ::1] j2 = norm_data.j2
    cdef u8[:, ::1] gamma = norm_data.gamma
    cdef u64[:, ::1] vv = norm_data.v
    cdef u64[:, ::1] ss = norm_data.s
    cdef double complex[::1] wts = norm_data.w
    a2c = np.ascontiguousarray(a2_batch, dtype=np.uint64)
    adc = np.ascontiguousarray(ad_batch, dtype=np.uint8)
    cdef u64[:, :, ::1] a2 = a2c
    cdef u8[:, ::1] ad = adc
    cdef int n_probes = a2c.shape[0]
    cdef int k = norm_data.k
    cdef int n = norm_data.n
    cdef int w = norm_data.gt.shape[2]
    cdef int w2 = _words_for(n + 1)
    out = np.empty(n_probes, dtype=np.complex128)
    cdef double complex[::1] out_v = out
    cdef ProbeScratch sc
    if _alloc_scratch(&sc, n, w, w2) != 0:
        _free_scratch(&sc)
        raise MemoryError
    cdef int p
    try:
        with nogil:
            for p in range(n_probes):
                out_v[p] = _probe_terms(
                    gt, g, j2, gamma, vv, ss, wts,
                    &a2[p, 0, 0], &ad[p, 0], k, n, w, w2, &sc,
                )
    finally:
        _free_scratch(&sc)
    return out


def norm_sum_one_probe(norm_data, a2_rows, ad) -> complex:
    """S_A = sum_alpha w_alpha i^{-sKs} conj(Z(B_alpha)); matches _purepy."""
    batch = norm_sum_probes(
        norm_data,
        np.asarray(a2_rows, dtype=np.uint64)[None, :, :],
        np.asarray(ad, dtype=np.uint8)[None, :],
    )
    return complex(batch[0])


# -- CH-form gate sequences -------------------------------------------------

cdef inline int _parity_and(u64 *a, u64 *b, int w) nogil:
    cdef int wi, acc = 0
    for wi in range(w):
        acc ^= popcount64(a[wi] & b[wi])
    return acc & 1


cdef inline int _lowest_bit_words(u64 *words, int w) nogil:
    cdef int wi
    for wi in range(w):
        if words[wi] != 0:
            return (wi << 6) + ctz64(words[wi])
    return -1


cdef void _ch_absorb_pair(u64 *f, u64 *g, u64 *m, u8 *gamma, u64 *v, u64 *s,
                          long long *om, u64 *t, u64 *u, int delta,
                          const signed char[:, ::1] pair_table,
                          int n, int w, u64 *scratch) noexcept nogil:
    """U_H(|t> + i^delta |u>) -> omega~ W_C W_H |s'>; mirrors CHForm._absorb_pair."""
    cdef u64 *v0 = scratch
    cdef u64 *v1 = scratch + w
    cdef u64 *mask = scratch + 2 * w
    cdef u64 *y = scratch + 3 * w
    cdef int wi, p, q, tq, vq, case_a, cnt, gpar, mpar, fpar, fq, gq, mq
    cdef int ta, tb, tc, tq8, idx
    for wi in range(w):
        v0[wi] = (t[wi] ^ u[wi]) & ~v[wi]
        v1[wi] = (t[wi] ^ u[wi]) & v[wi]
    q = _lowest_bit_words(v0, w)
    case_a = q >= 0
    if case_a:
        for wi in range(w):
            mask[wi] = v0[wi]
        mask[q >> 6] ^= (<u64>1) << (q & 63)
        # product of CX(control q -> targets in mask): reads then column/row XORs
        if _lowest_bit_words(mask, w) >= 0:
            for p in range(n):
                gpar = _parity_and(g + p * w, mask, w)
                mpar = _parity_and(m + p * w, mask, w)
                fq = _get_bit(f + p * w, q)
                if gpar:
                    _flip_bit(g + p * w, q)
                if mpar:
                    _flip_bit(m + p * w, q)
                if fq:
                    for wi in range(w):
                        f[p * w + wi] ^= mask[wi]
        # product of CZ(q, i in V1)
        if _lowest_bit_words(v1, w) >= 0:
            for p in range(n):
                cnt = 0
                for wi in range(w):
                    cnt += popcount64(f[p * w + wi] & v1[wi])
                fq = _get_bit(f + p * w, q)
                if cnt & 1:
                    _flip_bit(m + p * w, q)
                if fq:
                    for wi in range(w):
                        m[p * w + wi] ^= v1[wi]
                    gamma[p] = <u8>((gamma[p] + 2 * (cnt & 1)) & 3)
    else:
        q = _lowest_bit_words(v1, w)
        for wi in range(w):
            mask[wi] = v1[wi]
        mask[q >> 6] ^= (<u64>1) << (q & 63)
        # product of CX(controls in mask -> target q)
        if _lowest_bit_words(mask, w) >= 0:
            for p in range(n):
                gq = _get_bit(g + p * w, q)
                mq = _get_bit(m + p * w, q)
                fpar = _parity_and(f + p * w, mask, w)
                if gq:
                    for wi in range(w):
                        g[p * w + wi] ^= mask[wi]
                if fpar:
                    _flip_bit(f + p * w, q)
                if mq:
                    for wi in range(w):
                        m[p * w + wi] ^= mask[wi]
    tq = _get_bit(t, q)
    if tq:
        for wi in range(w):
            y[wi] = u[wi]
        _flip_bit(y, q)
    else:
        for wi in range(w):
            y[wi] = t[wi]
    vq = _get_bit(v, q)
    idx = vq * 8 + tq * 4 + delta
    ta = pair_table[idx, 0]
    tb = pair_table[idx, 1]
    tc = pair_table[idx, 2]
    tq8 = pair_table[idx, 3]
    if ta:
        # right multiplication by S_q
        for p in range(n):
            fq = _get_bit(f + p * w, q)
            if fq:
                _flip_bit(m + p * w, q)
                gamma[p] = <u8>((gamma[p] + 3) & 3)
    om[0] = (om[0] + tq8) % 8
    om[1] += 1
    if _get_bit(v, q) != tb:
        _flip_bit(v, q)
    if _get_bit(y, q) != tc:
        _flip_bit(y, q)
    for wi in range(w):
        s[wi] = y[wi]


cdef void _ch_pauli(u64 *f, u64 *g, u64 *m, u8 *gamma, u64 *v, u64 *s,
                    long long *om, int code, int q, int n, int w,
                    u64 *scratch) noexcept nogil:
    """Single-qubit X/Y/Z applied through the tableau; mirrors apply_pauli."""
    cdef u64 *a = scratch
    cdef u64 *b = scratch + w
    cdef u64 *a2 = scratch + 2 * w
    cdef u64 *b2 = scratch + 3 * w
    cdef int nu = 0, wi
    for wi in range(w):
        a[wi] = 0
        b[wi] = 0
    if code == 5 or code == 6:  # X or Y
        nu = gamma[q] + (1 if code == 6 else 0)
        for wi in range(w):
            a[wi] = f[q * w + wi]
            b[wi] = m[q * w + wi]
    else:  # Z
        nu = 0
    if code == 7 or code == 6:
        for wi in range(w):
            b[wi] ^= g[q * w + wi]
    nu += 2 * _parity_and3(a, b, v, w)
    for wi in range(w):
        a2[wi] = (a[wi] & ~v[wi]) | (b[wi] & v[wi])
        b2[wi] = (b[wi] & ~v[wi]) | (a[wi] & v[wi])
    nu += 2 * _parity_and(b2, s, w)
    for wi in range(w):
        s[wi] ^= a2[wi]
    om[0] = (om[0] + 2 * nu) % 8


cdef inline int _parity_and3(u64 *a, u64 *b, u64 *c, int w) nogil:
    cdef int wi, acc = 0
    for wi in range(w):
        acc ^= popcount64(a[wi] & b[wi] & c[wi])
    return acc & 1


def ch_apply_ops(f_arr, g_arr, m_arr, gamma_arr, v_arr, s_arr, omega_state,
                 ops, pair_table, int n):
    """Execute an encoded Clifford gate sequence on CH-form arrays in place.

    Mirrors the per-gate methods of CHForm exactly (differentially tested);
    omega_state is int64[q, p, zero].
    """
    cdef u64[:, ::1] fv = f_arr
    cdef u64[:, ::1] gv = g_arr
    cdef u64[:, ::1] mv = m_arr
    cdef u8[::1] gammav = gamma_arr
    cdef u64[::1] vv = v_arr
    cdef u64[::1] sv = s_arr
    cdef long long[::1] omv = omega_state
    cdef const int[:, ::1] opsv = ops
    cdef const signed char[:, ::1] table = pair_table
    cdef int w = f_arr.shape[1]
    cdef u64 *f = &fv[0, 0]
    cdef u64 *g = &gv[0, 0]
    cdef u64 *m = &mv[0, 0]
    cdef u8 *gamma = &gammav[0]
    cdef u64 *vw = &vv[0]
    cdef u64 *sw = &sv[0]
    cdef long long *om = &omv[0]
    cdef u64 *scratch = <u64 *>malloc(8 * w * sizeof(u64))
    if scratch == NULL:
        raise MemoryError
    cdef u64 *t = scratch + 4 * w
    cdef u64 *u = scratch + 5 * w
    cdef int i, code, a, b, wi, q, r, alpha, beta, gp, mf, delta, re, im_s, t_eq_u
    try:
        with nogil:
            for i in range(opsv.shape[0]):
                code = opsv[i, 0]
                a = opsv[i, 1]
                b = opsv[i, 2]
                if code == 0:  # S a
                    for wi in range(w):
                        m[a * w + wi] ^= g[a * w + wi]
                    gamma[a] = <u8>((gamma[a] + 3) & 3)
                elif code == 1:  # SDG a
                    for wi in range(w):
                        m[a * w + wi] ^= g[a * w + wi]
                    gamma[a] = <u8>((gamma[a] + 1) & 3)
                elif code == 2:  # CZ a b
                    for wi in range(w):
                        m[a * w + wi] ^= g[b * w + wi]
                        m[b * w + wi] ^= g[a * w + wi]
                elif code == 3:  # CX a b (gamma from the pre-update tableau)
                    mf = _parity_and(m + a * w, f + b * w, w)
                    gamma[a] = <u8>((gamma[a] + gamma[b] + 2 * mf) & 3)
                    for wi in range(w):
                        g[b * w + wi] ^= g[a * w + wi]
                        f[a * w + wi] ^= f[b * w + wi]
                        m[a * w + wi] ^= m[b * w + wi]
                elif code == 4:  # H a
                    if om[2]:
                        continue
                    gp = gamma[a]
                    alpha = 0
                    beta = 0
                    t_eq_u = 1
                    for wi in range(w):
                        t[wi] = sw[wi] ^ (g[a * w + wi] & vw[wi])
                        u[wi] = sw[wi] ^ (f[a * w + wi] & ~vw[wi]) ^ (m[a * w + wi] & vw[wi])
                        alpha ^= popcount64(g[a * w + wi] & ~vw[wi] & sw[wi]) & 1
                        beta ^= popcount64(m[a * w + wi] & ~vw[wi] & sw[wi]) & 1
                        beta ^= popcount64(f[a * w + wi] & vw[wi] & (m[a * w + wi] ^ sw[wi])) & 1
                        if t[wi] != u[wi]:
                            t_eq_u = 0
                    if t_eq_u:
                        for wi in range(w):
                            sw[wi] = t[wi]
                        re = -1 if alpha else 1
                        if gp % 2 == 0:
                            im_s = -1 if ((gp >> 1) ^ beta) else 1
                            if re + im_s == 0:
                                om[2] = 1
                                om[0] = 0
                                om[1] = 0
                            else:
                                om[1] += 1
                                if re + im_s < 0:
                                    om[0] = (om[0] + 4) % 8
                        else:
                            im_s = (1 if gp == 1 else -1) * (-1 if beta else 1)
                            # re + i*im_s = sqrt2 e^{i pi q8/4}
                            if re > 0:
                                om[0] = (om[0] + (1 if im_s > 0 else 7)) % 8
                            else:
                                om[0] = (om[0] + (3 if im_s > 0 else 5)) % 8
                    else:
                        delta = (gp + 2 * (alpha + beta)) % 4
                        om[1] -= 1
                        if alpha:
                            om[0] = (om[0] + 4) % 8
                        _ch_absorb_pair(f, g, m, gamma, vw, sw, om, t, u, delta,
                                        table, n, w, scratch)
                elif code == 8:  # global phase e^{i pi a / 4}
                    om[0] = (om[0] + a) % 8
                else:  # X/Y/Z Pauli
                    if om[2]:
                        continue
                    _ch_pauli(f, g, m, gamma, vw, sw, om, code, a, n, w, scratch)
    finally:
        free(scratch)
