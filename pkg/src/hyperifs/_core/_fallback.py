"""Pure-numpy versions of the compiled kernels.

Same semantics as ``_kernels``; chunked so memory stays bounded on
large nets.
"""

import numpy as np

_CHUNK = 512


def _pairwise_sq(a, b, wrap):
    d = np.abs(a[:, None, :] - b[None, :, :])
    if wrap:
        d = d % 1.0
        d = np.minimum(d, 1.0 - d)
    return np.sum(d * d, axis=-1)


def directed_hausdorff(a, b, wrap):
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    cmax = 0.0
    for i in range(0, a.shape[0], _CHUNK):
        sq = _pairwise_sq(a[i:i + _CHUNK], b, wrap)
        m = float(np.max(np.min(sq, axis=1)))
        if m > cmax:
            cmax = m
    return float(np.sqrt(cmax))


def min_distances(a, b, wrap):
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    out = np.empty(a.shape[0])
    for i in range(0, a.shape[0], _CHUNK):
        sq = _pairwise_sq(a[i:i + _CHUNK], b, wrap)
        out[i:i + _CHUNK] = np.sqrt(np.min(sq, axis=1))
    return out
