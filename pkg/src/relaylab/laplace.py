"""Laplace functionals of Poisson shot noise with Rayleigh fading.

For a PPP of density ``z`` whose points transmit with power ``p`` through
unit-mean exponential fading and path loss ``r**-alpha``, the aggregate power
``I`` at a receiver has

    E[exp(-s I)] = exp(-(2/alpha) pi^2 z (s p)^(2/alpha) csc(2 pi / alpha)).

:func:`laplace_joint` gives E[exp(-s1 I_R - s2 I_D)] for two receivers
``d_RD`` apart that see the same points through independent fading.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate


class NonConvergenceError(RuntimeError):
    """A numerical routine could not reach its accuracy target."""


class QuadratureError(NonConvergenceError):
    """Adaptive quadrature failed to reach its tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    inversion_nodes: int = 32

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.inversion_nodes < 8:
            raise ValueError("inverse-Laplace node count must be >= 8")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def _check_alpha(alpha):
    if not alpha > 2:
        raise ValueError("non-integrable path loss: exponent must exceed 2")


def shot_noise_coefficient(tx_power, density, alpha):
    """``c`` such that E[exp(-s I)] = exp(-c s**(2/alpha))."""
    _check_alpha(alpha)
    delta = 2.0 / alpha
    return delta * math.pi ** 2 * density * tx_power ** delta / math.sin(math.pi * delta)


def laplace_single(s, tx_power, density, alpha):
    """Closed-form Laplace transform of PPP shot noise, in (0, 1].

    ``s`` may be a scalar or an array (real or complex; complex values use
    the principal branch of ``s**(2/alpha)``).
    """
    c = shot_noise_coefficient(tx_power, density, alpha)
    s = np.asarray(s)
    if not np.iscomplexobj(s) and np.any(s < 0):
        raise ValueError("transform argument must be nonnegative")
    out = np.exp(-c * s ** (2.0 / alpha))
    return out if out.ndim else float(out)


def _quad_raw(f, a, b, spec, **kw):
    val, err, *rest = integrate.quad(
        f, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions, full_output=1, **kw)
    return val, err


def _quad(f, a, b, spec, **kw):
    val, err = _quad_raw(f, a, b, spec, **kw)
    if err > 10 * max(spec.abs_tol, spec.rel_tol * abs(val)):
        raise QuadratureError(
            f"quadrature did not converge on [{a:g}, {b:g}]: estimate {val:.6g}, error {err:.3g}",
            estimate=val, error=err)
    return val


def _piecewise(f, edges, spec):
    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _quad_raw(f, lo, hi, spec)
        total += v
        err += e
    if err > 10 * max(spec.abs_tol, spec.rel_tol * abs(total)):
        raise QuadratureError(
            f"radial quadrature did not converge: estimate {total:.6g}, error {err:.3g}",
            estimate=total, error=err)
    return total


def _radial_edges(d, scale, r_max):
    edges = {0.0, r_max}
    for e in (0.5 * d, d, 1.5 * d, 2.0 * d, scale, 2 * scale):
        if 0 < e < r_max:
            edges.add(e)
    e = 4.0 * max(d, scale, 1e-9)
    while e < r_max:
        edges.add(e)
        e *= 4.0
    return sorted(edges)


def _truncation_radius(s1, s2, tx_power, alpha, d, cutoff=1e-12):
    # bracket <= s1 P r^-alpha + s2 P (r - d)^-alpha for r > d
    amp = (s1 + s2) * tx_power
    return d + (amp / cutoff) ** (1.0 / alpha) + 1.0


def joint_exponent_2d(s1, s2, tx_power, alpha, d_RD, spec=DEFAULT_QUADRATURE):
    """Raw double integral of ``1 - A(r) B(r, theta)`` times ``r`` (no density).

    Nested adaptive quadrature over theta in [0, pi] (doubled by symmetry)
    and r in [0, r_max], with r_max where the bracket drops below 1e-12.
    """
    _check_alpha(alpha)
    if s1 == 0 and s2 == 0:
        return 0.0
    a1, a2, d = s1 * tx_power, s2 * tx_power, d_RD
    inner_spec = QuadratureSpec(rel_tol=spec.rel_tol * 1e-2, abs_tol=spec.abs_tol * 1e-2,
                                max_subdivisions=spec.max_subdivisions)

    def inner(r):
        A = 1.0 / (1.0 + a1 * r ** -alpha) if r > 0 else 0.0

        def g(th):
            l2 = r * r + d * d - 2.0 * r * d * math.cos(th)
            B = l2 ** (0.5 * alpha) / (l2 ** (0.5 * alpha) + a2) if l2 > 0 else 0.0
            return 1.0 - A * B

        pts = (0.0,) if abs(r - d) < 0.5 * d else None
        return 2.0 * _quad(g, 0.0, math.pi, inner_spec, points=pts) * r

    scale = max(a1, a2) ** (1.0 / alpha)
    r_max = _truncation_radius(s1, s2, tx_power, alpha, d)
    edges = _radial_edges(d, scale, r_max)
    return _piecewise(inner, edges, spec)


def _inner_closed_form(r, a2, d):
    # integral over theta in [0, 2pi] of a2 / (l^4 + a2), alpha = 4
    b = math.sqrt(a2)
    u = r * r + d * d
    v = 2.0 * r * d
    w = complex(u, b)
    root = np.sqrt(w - v) * np.sqrt(w + v)
    return -2.0 * math.pi * b * (1.0 / root).imag


def joint_exponent_split(s1, s2, tx_power, alpha, d_RD, spec=DEFAULT_QUADRATURE):
    """Same quantity as :func:`joint_exponent_2d`, computed as the
    single-receiver part (closed form) plus a 1-D radial correction.

    Uses ``1 - AB = (1 - A) + A (1 - B)``; for ``alpha == 4`` the angular
    integral of ``1 - B`` is evaluated in closed form.
    """
    _check_alpha(alpha)
    if s1 == 0 and s2 == 0:
        return 0.0
    delta = 2.0 / alpha
    a1, a2, d = s1 * tx_power, s2 * tx_power, d_RD
    single = delta * math.pi ** 2 * a1 ** delta / math.sin(math.pi * delta)
    if a2 == 0:
        return single

    if alpha == 4:
        def angular(r):
            return _inner_closed_form(r, a2, d)
    else:
        def angular(r):
            def g(th):
                l2 = r * r + d * d - 2.0 * r * d * math.cos(th)
                la = l2 ** (0.5 * alpha)
                return a2 / (la + a2)
            pts = (0.0,) if abs(r - d) < 0.5 * d else None
            return 2.0 * _quad(g, 0.0, math.pi, spec, points=pts)

    def radial(r):
        if r == 0:
            return 0.0
        ra = r ** alpha
        return ra / (ra + a1) * angular(r) * r

    scale = max(a1, a2) ** (1.0 / alpha)
    r_max = _truncation_radius(0.0, s2, tx_power, alpha, d)
    edges = _radial_edges(d, scale, r_max)
    corr = _piecewise(radial, edges, spec)
    return single + corr


def laplace_joint(s1, s2, tx_power, density, alpha, d_RD, spec=DEFAULT_QUADRATURE,
                  method="split"):
    """Joint Laplace transform E[exp(-s1 I_R - s2 I_D)], in (0, 1].

    ``method="split"`` (default) is the fast path; ``"2d"`` integrates the
    raw double integral and serves as its cross-check.
    """
    if s1 < 0 or s2 < 0:
        raise ValueError("transform arguments must be nonnegative")
    if density == 0:
        return 1.0
    fn = joint_exponent_split if method == "split" else joint_exponent_2d
    return math.exp(-density * fn(s1, s2, tx_power, alpha, d_RD, spec))
