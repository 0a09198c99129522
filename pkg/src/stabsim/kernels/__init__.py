"""Kernel backend selection: compiled Cython core with pure-numpy fallback.

The hot kernels (exponential sums, equatorial inner-product batches) exist
twice: ``_corecy`` (Cython) and ``_purepy`` (numpy).  The compiled core is
preferred at import; ``STABSIM_FORCE_PUREPY=1`` forces the fallback.  Both
share the packed-word data layout defined here.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _purepy

_compiled = None
if not os.environ.get("STABSIM_FORCE_PUREPY"):
    try:
        from . import _corecy as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "purepy"
_active = _compiled if _compiled is not None else _purepy


@dataclass
class NormData:
    """Frozen per-term arrays consumed by the norm-estimation kernel.

    All bit rows are packed uint64 words; ``w`` folds the coefficient,
    global phase, 2^{-(n+|v|)/2} and (-1)^{s.v} of each term.
    """

    k: int
    n: int
    gt: np.ndarray  # (k, n, W) columns of G, packed
    g: np.ndarray  # (k, n, W) rows of G
    j2: np.ndarray  # (k, n, W) M F^T mod 2, diag bit = gamma mod 2
    gamma: np.ndarray  # (k, n) uint8
    v: np.ndarray  # (k, W)
    s: np.ndarray  # (k, W)
    nv: np.ndarray  # (k,) int32
    w: np.ndarray  # (k,) complex128


@dataclass
class MetropolisData:
    """Frozen per-term arrays for the Metropolis amplitude cache."""

    f: np.ndarray  # (k, n, W)
    m: np.ndarray  # (k, n, W)
    gamma: np.ndarray  # (k, n) uint8
    v: np.ndarray  # (k, W)
    s: np.ndarray  # (k, W)
    wamp: np.ndarray  # (k,) complex128: b * omega * 2^{-|v|/2}


def backend_name() -> str:
    return BACKEND


def get_backend(name: str):
    """Return the kernel module for 'compiled' or 'purepy' (for benchmarks)."""
    if name == "purepy":
        return _purepy
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def z2_exponential_sum(m_rows, l_bits, m):
    return _active.z2_exponential_sum(m_rows, l_bits, m)


def z4_exponential_sum(upper_rows, diag, n):
    return _active.z4_exponential_sum(upper_rows, diag, n)


def norm_sum_one_probe(norm_data: NormData, a2_rows, ad) -> complex:
    return _active.norm_sum_one_probe(norm_data, a2_rows, ad)


def norm_sum_probes(norm_data: NormData, a2_batch, ad_batch):
    return _active.norm_sum_probes(norm_data, a2_batch, ad_batch)


# the Metropolis helpers are vectorized across terms; numpy is already fast
metropolis_update = _purepy.metropolis_update
metropolis_amplitudes = _purepy.metropolis_amplitudes

# compiled Clifford gate-sequence kernel; None selects the Python gate path
ch_apply_ops = getattr(_compiled, "ch_apply_ops", None)
