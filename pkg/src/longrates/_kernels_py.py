"""Pure numpy path-simulation kernels (fallback backend).

The compiled extension (``longrates._kernels``) implements the same
functions with identical stream semantics; ``longrates._backend`` picks
whichever is available. Randomness is counter-based Philox4x32-10 keyed by
the 64-bit seed with counter words (path, step, slot, tag), so every normal
draw is a pure function of those five integers: ensembles are reproducible
bit-for-bit regardless of how paths are chunked across workers, and both
backends consume identical uniform streams.
"""

from __future__ import annotations

import numpy as np

from .errors import ModelError

_MASK32 = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53
_TWO_PI = 6.283185307179586476925287


def _philox4x32(c0, c1, c2, c3, k0, k1):
    """One Philox4x32-10 block per element of c0 (uint64 arrays, values < 2^32)."""
    x0, x1, x2, x3 = c0, c1, c2, c3
    for r in range(10):
        kr0 = (k0 + np.uint64(r) * _W0) & _MASK32
        kr1 = (k1 + np.uint64(r) * _W1) & _MASK32
        p0 = _M0 * x0
        p1 = _M1 * x2
        hi0, lo0 = p0 >> np.uint64(32), p0 & _MASK32
        hi1, lo1 = p1 >> np.uint64(32), p1 & _MASK32
        x0 = hi1 ^ x1 ^ kr0
        x1 = lo1
        x2 = hi0 ^ x3 ^ kr1
        x3 = lo0
    return x0, x1, x2, x3


def uniform_pair(seed, path_ids, step, slot, tag):
    """Two uniforms in [0, 1) per path id, from one Philox block each."""
    c0 = np.asarray(path_ids, dtype=np.uint64)
    c1 = np.full_like(c0, np.uint64(step))
    c2 = np.full_like(c0, np.uint64(slot))
    c3 = np.full_like(c0, np.uint64(tag))
    k0 = np.uint64(seed) & _MASK32
    k1 = (np.uint64(seed) >> np.uint64(32)) & _MASK32
    x0, x1, x2, x3 = _philox4x32(c0, c1, c2, c3, k0, k1)
    a = (x0 << np.uint64(32)) | x1
    b = (x2 << np.uint64(32)) | x3
    u0 = (a >> np.uint64(11)).astype(np.float64) * _INV53
    u1 = (b >> np.uint64(11)).astype(np.float64) * _INV53
    return u0, u1


def normal_pair(seed, path_ids, step, slot, tag):
    """Two standard normals per path id via Box-Muller on the uniform pair."""
    u0, u1 = uniform_pair(seed, path_ids, step, slot, tag)
    r = np.sqrt(-2.0 * np.log1p(-u0))
    angle = _TWO_PI * u1
    return r * np.cos(angle), r * np.sin(angle)


def gbm_paths(seed, path0, n_paths, dts, sigma, m0):
    """Exact log-normal steps of a geometric Brownian martingale.

    Returns (n_paths, len(dts)+1); column 0 is m0. Step j uses the z0 normal
    of counter (path, j, 0, tag=1).
    """
    dts = np.asarray(dts, dtype=float)
    out = np.empty((n_paths, dts.size + 1), dtype=float)
    out[:, 0] = m0
    ids = np.arange(path0, path0 + n_paths, dtype=np.uint64)
    m = np.full(n_paths, float(m0))
    for j, dt in enumerate(dts, start=1):
        z0, _ = normal_pair(seed, ids, j, 0, 1)
        m = m * np.exp(sigma * np.sqrt(dt) * z0 - 0.5 * sigma * sigma * dt)
        out[:, j] = m
    return out


def bm_paths(seed, path0, n_paths, dts):
    """Standard Brownian paths started at 0; step j uses counter (path, j, 0, tag=3)."""
    dts = np.asarray(dts, dtype=float)
    out = np.empty((n_paths, dts.size + 1), dtype=float)
    out[:, 0] = 0.0
    ids = np.arange(path0, path0 + n_paths, dtype=np.uint64)
    w = np.zeros(n_paths)
    for j, dt in enumerate(dts, start=1):
        z0, _ = normal_pair(seed, ids, j, 0, 3)
        w = w + np.sqrt(dt) * z0
        out[:, j] = w
    return out


def ou_paths(seed, path0, n_paths, dts, k, theta, sigma, x0, lo, hi, max_attempts=100):
    """Mean-reverting Gaussian factor paths confined to a box by resampling.

    Each step applies the exact Ornstein-Uhlenbeck conditional law; Gaussian
    increments that would leave [lo, hi] are redrawn (attempt index a enters
    the counter slot a*ceil(d/2)+pair, tag=2, so the resampling sequence is
    itself reproducible). Returns (values, n_resampled).
    """
    dts = np.asarray(dts, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = theta.size
    pairs = (d + 1) // 2
    out = np.empty((n_paths, dts.size + 1, d), dtype=float)
    x_init = np.asarray(x0, dtype=float)
    out[:, 0, :] = x_init
    ids = np.arange(path0, path0 + n_paths, dtype=np.uint64)
    x = np.tile(x_init, (n_paths, 1))
    n_resampled = 0
    for j, dt in enumerate(dts, start=1):
        decay = np.exp(-k * dt)
        if k > 0.0:
            sd = sigma * np.sqrt((1.0 - np.exp(-2.0 * k * dt)) / (2.0 * k))
        else:
            sd = sigma * np.sqrt(dt)
        mean = theta + (x - theta) * decay
        xnew = np.empty_like(x)
        pending = np.arange(n_paths)
        for attempt in range(max_attempts):
            z = np.empty((pending.size, d))
            for p in range(pairs):
                z0, z1 = normal_pair(seed, ids[pending], j, attempt * pairs + p, 2)
                z[:, 2 * p] = z0
                if 2 * p + 1 < d:
                    z[:, 2 * p + 1] = z1
            cand = mean[pending] + sd * z
            ok = np.all((cand >= lo) & (cand <= hi), axis=1)
            xnew[pending[ok]] = cand[ok]
            pending = pending[~ok]
            if pending.size == 0:
                break
            n_resampled += pending.size
        else:
            raise ModelError(
                f"box resampling exhausted {max_attempts} attempts for "
                f"{pending.size} paths at step {j}; the box is too tight for the volatility"
            )
        x = xnew
        out[:, j, :] = x
    return out, n_resampled
