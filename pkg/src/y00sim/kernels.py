"""Hot numeric kernels with two interchangeable backends.

Every kernel exists twice: a loop implementation compiled with numba's
``@njit`` and a pure-numpy implementation. The active backend is picked at
import time; set the environment variable ``Y00SIM_NO_NUMBA=1`` to force the
numpy path (it is also used automatically when numba is unavailable). Both
backends produce bit-identical outputs: all floating-point work is
elementwise with the same evaluation order, and reductions are integer
counts. ``python -m y00sim.bench`` times one against the other.
"""

from __future__ import annotations

import os

import numpy as np

_FORCED_OFF = os.environ.get("Y00SIM_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = numba is not None and not _FORCED_OFF


# ---------------------------------------------------------------------------
# Galois LFSR keystream
# ---------------------------------------------------------------------------

def _lfsr_fill_py(state, mask, out):
    # right-shift Galois form; output bit is the bit shifted out
    s = int(state)
    m = int(mask)
    for i in range(out.shape[0]):
        lsb = s & 1
        s >>= 1
        if lsb:
            s ^= m
        out[i] = lsb
    return np.uint64(s)


def _lfsr_fill_loops(state, mask, out):
    s = state
    one = np.uint64(1)
    for i in range(out.shape[0]):
        lsb = s & one
        s >>= one
        if lsb:
            s ^= mask
        out[i] = lsb
    return s


# ---------------------------------------------------------------------------
# Per-symbol measurement sampling for the square-root-measurement receiver
# ---------------------------------------------------------------------------

def _srm_sample_np(cdf, level_idx, u, out):
    # outcome = number of cdf entries strictly below u, i.e. the first j
    # with u <= cdf[level, j]; clip guards u landing past the final entry
    hits = (u[:, None] > cdf[level_idx]).sum(axis=1)
    np.minimum(hits, cdf.shape[1] - 1, out=out)
    return out


def _srm_sample_loops(cdf, level_idx, u, out):
    n_out = cdf.shape[1]
    for k in range(level_idx.shape[0]):
        row = level_idx[k]
        uk = u[k]
        j = n_out - 1
        for c in range(n_out):
            if uk <= cdf[row, c]:
                j = c
                break
        out[k] = j
    return out


# ---------------------------------------------------------------------------
# Bob's thresholded direct-detection decisions
# ---------------------------------------------------------------------------

def _bob_errors_np(level_idx, basis, polarity, bits, z, mean_i, sigma_i, thr):
    current = mean_i[level_idx] + sigma_i[level_idx] * z
    decided_high = current > thr[basis]
    bit_hat = decided_high.astype(np.uint8) ^ polarity
    return int(np.count_nonzero(bit_hat != bits))


def _bob_errors_loops(level_idx, basis, polarity, bits, z, mean_i, sigma_i, thr):
    errors = 0
    for k in range(level_idx.shape[0]):
        li = level_idx[k]
        current = mean_i[li] + sigma_i[li] * z[k]
        decided_high = np.uint8(1) if current > thr[basis[k]] else np.uint8(0)
        if (decided_high ^ polarity[k]) != bits[k]:
            errors += 1
    return errors


# ---------------------------------------------------------------------------
# Keyed 3-symbol repetition blocks through the noisy link
# ---------------------------------------------------------------------------

def _coded_errors_np(basis, polarity, code_id, bits, z, mean_i, sigma_i, thr, patterns, m_bases):
    tx = patterns[code_id, bits ^ polarity]              # (n, 3) high flags
    level_idx = basis[:, None] + m_bases * tx
    current = mean_i[level_idx] + sigma_i[level_idx] * z
    hard = (current > thr[basis][:, None]).astype(np.uint8)
    matches_one = (hard == patterns[code_id, 1]).sum(axis=1)
    table_side = (matches_one >= 2).astype(np.uint8)
    decoded = table_side ^ polarity
    return int(np.count_nonzero(decoded != bits))


def _coded_errors_loops(basis, polarity, code_id, bits, z, mean_i, sigma_i, thr, patterns, m_bases):
    errors = 0
    for k in range(basis.shape[0]):
        c = code_id[k]
        side = bits[k] ^ polarity[k]
        t = thr[basis[k]]
        matches_one = 0
        for s in range(3):
            li = basis[k] + m_bases * patterns[c, side, s]
            current = mean_i[li] + sigma_i[li] * z[k, s]
            hard = np.uint8(1) if current > t else np.uint8(0)
            if hard == patterns[c, 1, s]:
                matches_one += 1
        table_side = np.uint8(1) if matches_one >= 2 else np.uint8(0)
        if (table_side ^ polarity[k]) != bits[k]:
            errors += 1
    return errors


# ---------------------------------------------------------------------------
# Majority vote over independent symbol flips (analytic-law cross-check)
# ---------------------------------------------------------------------------

def _majority_block_errors_np(flips):
    per_block = flips[:, 0].astype(np.int64) + flips[:, 1] + flips[:, 2]
    return int(np.count_nonzero(per_block >= 2))


def _majority_block_errors_loops(flips):
    errors = 0
    for k in range(flips.shape[0]):
        if int(flips[k, 0]) + int(flips[k, 1]) + int(flips[k, 2]) >= 2:
            errors += 1
    return errors


# ---------------------------------------------------------------------------
# Backend selection
# ---------------------------------------------------------------------------

NUMPY_IMPL = {
    "lfsr_fill": _lfsr_fill_py,
    "srm_sample": _srm_sample_np,
    "bob_errors": _bob_errors_np,
    "coded_errors": _coded_errors_np,
    "majority_block_errors": _majority_block_errors_np,
}

if numba is not None:
    _jit = numba.njit(cache=True, nogil=True)
    NUMBA_IMPL = {
        "lfsr_fill": _jit(_lfsr_fill_loops),
        "srm_sample": _jit(_srm_sample_loops),
        "bob_errors": _jit(_bob_errors_loops),
        "coded_errors": _jit(_coded_errors_loops),
        "majority_block_errors": _jit(_majority_block_errors_loops),
    }
else:  # pragma: no cover
    NUMBA_IMPL = None

_ACTIVE = NUMBA_IMPL if NUMBA_ENABLED else NUMPY_IMPL

lfsr_fill = _ACTIVE["lfsr_fill"]
srm_sample = _ACTIVE["srm_sample"]
bob_errors = _ACTIVE["bob_errors"]
coded_errors = _ACTIVE["coded_errors"]
majority_block_errors = _ACTIVE["majority_block_errors"]


def backend_name() -> str:
    """Name of the active kernel backend ("numba" or "numpy")."""
    return "numba" if NUMBA_ENABLED else "numpy"
