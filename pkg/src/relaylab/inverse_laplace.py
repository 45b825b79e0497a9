"""Numerical inverse Laplace transforms.

Two independent back-ends:

* :func:`talbot` -- fixed Talbot contour (Abate & Valko), vectorised over
  the evaluation points, double precision.
* :func:`gaver_stehfest` -- Gaver-Stehfest acceleration evaluated in
  multiprecision arithmetic (mpmath), so the alternating Stehfest weights do
  not wipe out the result. Much slower; used for cross-validation.
"""

import functools
import math

import mpmath
import numpy as np


_MAX_LOG_TERM = math.log(1e15)
_MAX_GROWTH = math.log(1e6)


def talbot(F, t, M=32, log=False):
    """Invert ``F`` at the points ``t`` with the fixed Talbot contour.

    Parameters
    ----------
    F : callable
        Laplace-domain function accepting a complex ndarray ``s`` (any
        shape) and returning an array of the same shape. It must be analytic
        off the negative real axis.
    t : array_like
        Positive evaluation points.
    M : int
        Number of contour nodes.
    log : bool
        If true, ``F`` returns ``log F(s)``; exponentials are then combined
        before evaluation, which avoids overflow when ``F`` grows on the
        left half of the contour faster than ``exp(t s)`` decays.

    Returns
    -------
    ndarray
        ``f(t)`` with the shape of ``t``. Points where the contour terms
        exceed ``1e15`` in magnitude (``F`` outgrowing ``exp(t s)``) come back
        as NaN: the cancellation there leaves no correct digits.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("talbot inversion needs t > 0")
    shape = t.shape
    tt = t.reshape(-1, 1)
    r = 2.0 * M / (5.0 * tt)
    theta = np.pi * np.arange(1, M) / M
    cot = 1.0 / np.tan(theta)
    s = r * theta * (cot + 1j)
    sigma = theta + (theta * cot - 1.0) * cot
    # node 0 sits on the real axis at s = r
    s0 = r[:, 0].astype(complex)
    with np.errstate(over="ignore", invalid="ignore"):
        if log:
            expo = tt * s + F(s)
            head_expo = s0 * tt[:, 0] + F(s0)
            head = 0.5 * np.real(np.exp(head_expo))
            body = np.exp(expo) * (1.0 + 1j * sigma)
            # contour terms must not dwarf the real-axis node
            bad = np.max(expo.real, axis=1) > head_expo.real + _MAX_GROWTH
        else:
            head = 0.5 * np.exp(r[:, 0] * tt[:, 0]) * np.real(F(s0))
            body = np.exp(tt * s) * F(s) * (1.0 + 1j * sigma)
            bad = ~(np.max(np.abs(body), axis=1) < np.exp(_MAX_LOG_TERM))
        out = (r[:, 0] / M) * (head + np.sum(body.real, axis=1))
    out[bad] = np.nan
    return out.reshape(shape)


@functools.lru_cache(maxsize=None)
def _stehfest_weights(N, dps):
    with mpmath.workdps(dps):
        half = N // 2
        weights = []
        for k in range(1, N + 1):
            acc = mpmath.mpf(0)
            for j in range((k + 1) // 2, min(k, half) + 1):
                acc += (mpmath.mpf(j) ** half * mpmath.factorial(2 * j)
                        / (mpmath.factorial(half - j) * mpmath.factorial(j)
                           * mpmath.factorial(j - 1) * mpmath.factorial(k - j)
                           * mpmath.factorial(2 * j - k)))
            weights.append((-1) ** (k + half) * acc)
        return tuple(weights)


def gaver_stehfest(F_mp, t, N=100, dps=None):
    """Invert ``F_mp`` at ``t`` with the Gaver-Stehfest formula.

    ``F_mp`` takes and returns mpmath reals. ``N`` must be even; ``dps``
    defaults to ``2.1 * N`` decimal digits, enough to absorb the
    cancellation between the Stehfest weights.
    """
    if N % 2:
        raise ValueError("N must be even")
    if dps is None:
        dps = int(2.1 * N) + 10
    weights = _stehfest_weights(N, dps)
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= 0):
        raise ValueError("Gaver-Stehfest inversion needs t > 0")
    out = np.empty(ts.shape)
    with mpmath.workdps(dps):
        ln2 = mpmath.log(2)
        for idx, tv in np.ndenumerate(ts):
            a = ln2 / mpmath.mpf(float(tv))
            acc = mpmath.fsum(w * F_mp(k * a) for k, w in enumerate(weights, start=1))
            out[idx] = float(a * acc)
    return out[0] if scalar else out
