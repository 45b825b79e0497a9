"""Pure-Python/numpy implementations of the hot kernels.

These mirror the compiled routines in ``_kernels.pyx`` one for one and are
used whenever the extension is not built (or ``RELAYLAB_PURE=1``).
"""

import math

import numpy as np


def segment_shot_noise(x, y, marks, counts, rx, ry, power, alpha):
    """Per-realization shot noise for a batch of point fields stored flat.

    ``counts[k]`` consecutive entries of ``x``, ``y``, ``marks`` belong to
    realization ``k``. Returns ``power * sum(mark * dist**-alpha)`` per
    realization.
    """
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.shape[0]
    if x.shape[0] == 0:
        return np.zeros(n)
    d2 = (x - rx) ** 2 + (y - ry) ** 2
    if np.any(d2 == 0.0):
        raise ZeroDivisionError("singular distance")
    contrib = marks * d2 ** (-0.5 * alpha)
    seg = np.repeat(np.arange(n), counts)
    return power * np.bincount(seg, weights=contrib, minlength=n)


def polar_shot_noise(u_rad, u_ang, counts, cx, cy, radius, receivers, marks, power, alpha):
    """Shot noise at several receivers for flat batches of disk points.

    Points are ``(cx, cy) + radius * sqrt(u_rad) * (cos, sin)(2 pi u_ang)``;
    ``marks[m]`` is the fading towards ``receivers[m]``. Returns an array of
    shape ``(len(receivers), len(counts))``.
    """
    counts = np.asarray(counts, dtype=np.int64)
    receivers = np.asarray(receivers, dtype=float).reshape(-1, 2)
    marks = np.asarray(marks, dtype=float).reshape(receivers.shape[0], -1)
    rad = radius * np.sqrt(u_rad)
    ang = 2.0 * np.pi * u_ang
    x = cx + rad * np.cos(ang)
    y = cy + rad * np.sin(ang)
    return np.stack([segment_shot_noise(x, y, marks[m], counts, rx, ry, power, alpha)
                     for m, (rx, ry) in enumerate(receivers)])


def kl_bernoulli(p, q):
    if p == q:
        return 0.0
    out = 0.0
    if p > 0.0:
        if q <= 0.0:
            return math.inf
        out += p * math.log(p / q)
    if p < 1.0:
        if q >= 1.0:
            return math.inf
        out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out


def kl_ucb_bound(mean, budget, tol=1e-9, dtol=1e-10):
    """Largest q in [mean, 1] with kl(mean, q) <= budget, by bisection."""
    if mean >= 1.0:
        return 1.0
    if budget <= 0.0:
        return mean
    if kl_bernoulli(mean, 1.0) <= budget:
        return 1.0
    lo, hi = mean, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if kl_bernoulli(mean, mid) <= budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol and budget - kl_bernoulli(mean, lo) <= dtol:
            break
    return lo
