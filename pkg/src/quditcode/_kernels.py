"""Hot numeric kernels, compiled with numba when available.

Every kernel has a pure-numpy twin with identical semantics. The numba
versions are used unless numba is missing or ``QUDITCODE_DISABLE_NUMBA`` is
set to a truthy value before import. Both variants stay importable under
their ``*_numpy`` / ``*_numba`` names so they can be compared directly.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

__all__ = [
    "NUMBA_AVAILABLE",
    "USE_NUMBA",
    "digit_table",
    "ball_incidence",
    "ball_sums",
    "product_trials",
]

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get(
    "QUDITCODE_DISABLE_NUMBA", ""
).strip().lower() not in ("1", "true", "yes", "on")

# bytes of boolean scratch the numpy path may allocate per chunk
_CHUNK_BYTES = 1 << 24


def digit_table(n, d):
    """All length-``n`` base-``d`` strings in lexicographic order.

    Row ``i`` holds the digits of basis index ``i`` with qudit 1 as the most
    significant digit.
    """
    idx = np.arange(d**n, dtype=np.int64)
    powers = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] // powers[None, :]) % d).astype(np.int64)


# ---------------------------------------------------------------------------
# numpy reference versions
# ---------------------------------------------------------------------------


def ball_incidence_numpy(strings, radius):
    strings = np.ascontiguousarray(strings)
    N, n = strings.shape
    out = np.empty((N, N), dtype=np.bool_)
    if n == 0:
        out[:] = radius >= 0
        return out
    rows = max(1, _CHUNK_BYTES // max(1, N * n))
    for start in range(0, N, rows):
        stop = min(N, start + rows)
        diff = strings[start:stop, None, :] != strings[None, :, :]
        out[start:stop] = diff.sum(axis=-1) <= radius
    return out


def ball_sums_numpy(strings, weights, radius):
    strings = np.ascontiguousarray(strings)
    weights = np.asarray(weights, dtype=np.float64)
    N, n = strings.shape
    out = np.empty(N, dtype=np.float64)
    rows = max(1, _CHUNK_BYTES // max(1, N * max(n, 1)))
    for start in range(0, N, rows):
        stop = min(N, start + rows)
        diff = (strings[start:stop, None, :] != strings[None, :, :]).sum(axis=-1)
        out[start:stop] = np.where(diff <= radius, weights[None, :], 0.0).sum(axis=1)
    return out


def product_trials_numpy(amps, uniforms, strings, subset_mask, ball, agree, dim, cutoff):
    T, n, _ = amps.shape
    N = strings.shape[0]
    outcome = np.empty(T, dtype=np.int64)
    success = np.empty(T, dtype=np.bool_)
    cond = np.empty(T, dtype=np.float64)
    fidelity = np.full(T, np.nan)
    ball_f = ball.astype(np.float64)
    rows = max(1, _CHUNK_BYTES // max(1, 16 * N))
    for start in range(0, T, rows):
        stop = min(T, start + rows)
        a = amps[start:stop]
        psi = np.ones((stop - start, N), dtype=np.complex128)
        target = np.ones((stop - start, N), dtype=np.complex128)
        for t in range(n):
            factor = a[:, t, strings[:, t]]
            psi *= factor
            if subset_mask[t]:
                target *= factor
        w = psi.real**2 + psi.imag**2
        probs = (w @ ball_f.T) / dim
        clipped = np.where(probs < cutoff, 0.0, probs)
        cdf = np.cumsum(clipped, axis=1)
        thresh = uniforms[start:stop, 0] * cdf[:, -1]
        idx = np.argmax(cdf > thresh[:, None], axis=1)
        keep = agree[idx]
        joint = np.where(keep, w, 0.0).sum(axis=1) / dim
        p_m = probs[np.arange(stop - start), idx]
        c = joint / p_m
        ok = uniforms[start:stop, 1] < c
        rec = np.where(keep, psi, 0.0)
        tgt = np.where(keep, target, 0.0)
        overlap = np.abs((tgt.conj() * rec).sum(axis=1)) ** 2
        norms = (np.abs(tgt) ** 2).sum(axis=1) * (np.abs(rec) ** 2).sum(axis=1)
        outcome[start:stop] = idx
        success[start:stop] = ok
        cond[start:stop] = c
        fidelity[start:stop] = np.where(ok, overlap / norms, np.nan)
    return outcome, success, cond, fidelity


# ---------------------------------------------------------------------------
# numba versions
# ---------------------------------------------------------------------------

if NUMBA_AVAILABLE:

    @numba.njit(cache=True)
    def ball_incidence_numba(strings, radius):
        N, n = strings.shape
        out = np.empty((N, N), dtype=np.bool_)
        for i in range(N):
            for j in range(N):
                dist = 0
                for t in range(n):
                    if strings[i, t] != strings[j, t]:
                        dist += 1
                out[i, j] = dist <= radius
        return out

    @numba.njit(cache=True)
    def ball_sums_numba(strings, weights, radius):
        N, n = strings.shape
        out = np.zeros(N, dtype=np.float64)
        for i in range(N):
            acc = 0.0
            for j in range(N):
                dist = 0
                for t in range(n):
                    if strings[i, t] != strings[j, t]:
                        dist += 1
                        if dist > radius:
                            break
                if dist <= radius:
                    acc += weights[j]
            out[i] = acc
        return out

    @numba.njit(cache=True)
    def _neighbour_lists(mask):
        # CSR form of a boolean incidence table, ascending column order
        N = mask.shape[0]
        ptr = np.zeros(N + 1, dtype=np.int64)
        for i in range(N):
            ptr[i + 1] = ptr[i] + mask[i].sum()
        idx = np.empty(ptr[N], dtype=np.int64)
        for i in range(N):
            pos = ptr[i]
            for j in range(mask.shape[1]):
                if mask[i, j]:
                    idx[pos] = j
                    pos += 1
        return ptr, idx

    @numba.njit(cache=True)
    def _ball_sums_by_axis(w, d, n, radius, shells, out):
        # shells[r, x]: weight at exact distance r over the axes seen so far
        N = w.shape[0]
        shells[:] = 0.0
        shells[0] = w
        stride = 1
        for _ in range(n):
            block = stride * d
            for r in range(radius, 0, -1):
                for base in range(0, N, block):
                    for off in range(stride):
                        fiber = 0.0
                        for j in range(d):
                            fiber += shells[r - 1, base + off + j * stride]
                        for j in range(d):
                            x = base + off + j * stride
                            shells[r, x] += fiber - shells[r - 1, x]
            stride = block
        for x in range(N):
            acc = 0.0
            for r in range(radius + 1):
                acc += shells[r, x]
            out[x] = acc

    @numba.njit(cache=True)
    def product_trials_numba(amps, uniforms, strings, subset_mask, ball, agree, dim, cutoff):
        T, n, _ = amps.shape
        N = strings.shape[0]
        outcome = np.empty(T, dtype=np.int64)
        success = np.empty(T, dtype=np.bool_)
        cond = np.empty(T, dtype=np.float64)
        fidelity = np.full(T, np.nan)
        b_ptr, b_idx = _neighbour_lists(ball)
        a_ptr, a_idx = _neighbour_lists(agree)
        radius = 0
        for q in range(b_ptr[0], b_ptr[1]):
            dist = 0
            for t in range(n):
                if strings[b_idx[q], t] != strings[0, t]:
                    dist += 1
            radius = max(radius, dist)
        d = amps.shape[2]
        psi = np.empty(N, dtype=np.complex128)
        target = np.empty(N, dtype=np.complex128)
        w = np.empty(N, dtype=np.float64)
        probs = np.empty(N, dtype=np.float64)
        shells = np.empty((radius + 1, N), dtype=np.float64)
        by_axis = b_ptr[1] - b_ptr[0] > 2 * n * radius + radius
        for s in range(T):
            for x in range(N):
                amp = 1.0 + 0.0j
                tgt = 1.0 + 0.0j
                for t in range(n):
                    f = amps[s, t, strings[x, t]]
                    amp *= f
                    if subset_mask[t]:
                        tgt *= f
                psi[x] = amp
                target[x] = tgt
                w[x] = amp.real * amp.real + amp.imag * amp.imag
            if by_axis:
                _ball_sums_by_axis(w, d, n, radius, shells, probs)
            else:
                for m in range(N):
                    acc = 0.0
                    for q in range(b_ptr[m], b_ptr[m + 1]):
                        acc += w[b_idx[q]]
                    probs[m] = acc
            total = 0.0
            for m in range(N):
                probs[m] /= dim
                if probs[m] >= cutoff:
                    total += probs[m]
            thresh = uniforms[s, 0] * total
            running = 0.0
            idx = N - 1
            for m in range(N):
                if probs[m] >= cutoff:
                    running += probs[m]
                    if running > thresh:
                        idx = m
                        break
            joint = 0.0
            overlap = 0.0 + 0.0j
            n_tgt = 0.0
            for q in range(a_ptr[idx], a_ptr[idx + 1]):
                x = a_idx[q]
                joint += w[x]
                overlap += target[x].conjugate() * psi[x]
                n_tgt += target[x].real ** 2 + target[x].imag ** 2
            c = (joint / dim) / probs[idx]
            ok = uniforms[s, 1] < c
            outcome[s] = idx
            success[s] = ok
            cond[s] = c
            if ok:
                fidelity[s] = (overlap.real**2 + overlap.imag**2) / (joint * n_tgt)
        return outcome, success, cond, fidelity

else:  # pragma: no cover
    ball_incidence_numba = ball_incidence_numpy
    ball_sums_numba = ball_sums_numpy
    product_trials_numba = product_trials_numpy


if USE_NUMBA:
    ball_incidence = ball_incidence_numba
    ball_sums = ball_sums_numba
    product_trials = product_trials_numba
else:
    ball_incidence = ball_incidence_numpy
    ball_sums = ball_sums_numpy
    product_trials = product_trials_numpy
