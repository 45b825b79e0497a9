"""Success probability of the hybrid relay under optimal mode selection.

The optimal-selection probability splits into three disjoint events:

* ``P_A`` -- active mode succeeds (``E_R > E_A``);
* ``J``   -- active fails at the destination but backscatter succeeds,
  ``E_R > E_A``;
* ``K``   -- backscatter succeeds with ``E_P < E_R < E_A``.

Each is a one-dimensional integral over the harvested power ``Q_R`` whose
density comes from numerically inverting the closed-form Laplace transform
of the carrier-emitter shot noise.
"""

from dataclasses import dataclass
import logging
import math
import warnings

import numpy as np
from scipy import integrate, special
from scipy.interpolate import PchipInterpolator

from .inverse_laplace import gaver_stehfest, talbot
from .laplace import (DEFAULT_QUADRATURE, NonConvergenceError, QuadratureError, laplace_joint,
                      laplace_single, shot_noise_coefficient)

log = logging.getLogger(__name__)

POWER_RULES = ("proof", "transmit")


class HarvestedPower:
    """Distribution of ``Q_R``, the shot noise of the carrier-emitter field.

    Parameters
    ----------
    tx_power, density, alpha : float
        Carrier-emitter power (W), density (1/m^2) and path-loss exponent.
    nodes : int
        Talbot contour nodes.
    grid_points : int
        Size of the log-spaced table used by :meth:`pdf_table` and
        :meth:`cdf_table`; the table spans ``[1e-4, 1e4] * scale``.
    """

    def __init__(self, tx_power, density, alpha, nodes=32, grid_points=256):
        if density <= 0 or tx_power <= 0:
            raise ValueError("harvested power is degenerate at zero density or power")
        self.alpha = alpha
        self.delta = 2.0 / alpha
        self.coef = shot_noise_coefficient(tx_power, density, alpha)
        self.scale = self.coef ** (alpha / 2.0)
        self.nodes = nodes
        self.min_excursion = 0.0
        self._build_table(grid_points)

    def transform(self, s):
        return np.exp(-self.coef * s ** self.delta)

    def _transform_mp(self, s):
        import mpmath
        return mpmath.exp(-self.coef * s ** self.delta)

    def log_transform(self, s):
        return -self.coef * s ** self.delta

    def _raw_pdf(self, q):
        return self._fill_tail(q, talbot(self.log_transform, q, self.nodes, log=True))

    def _fill_tail(self, q, raw):
        # The inversion loses all digits only deep in the left tail, where
        # the stable law is super-exponentially thin: exactly zero in double.
        bad = np.isnan(raw)
        if np.any(bad & (q >= 0.1 * self.scale)):
            raise NonConvergenceError("inverse Laplace transform failed inside the bulk of Q_R")
        return np.where(bad, 0.0, raw)

    def pdf(self, q, method="talbot"):
        """Density of ``Q_R`` by direct inversion (negative ringing clamped)."""
        q = np.asarray(q, dtype=float)
        if np.any(q <= 0):
            raise ValueError("pdf_QR is defined for q > 0 only")
        if method == "talbot":
            raw = self._raw_pdf(q)
        elif method == "stehfest":
            raw = gaver_stehfest(self._transform_mp, q)
        else:
            raise ValueError(f"unknown inversion method {method!r}")
        raw = np.asarray(raw, dtype=float)
        neg = raw.min(initial=0.0)
        if neg < 0:
            log.debug("clamped inverse-Laplace ringing of %.3g", neg)
        out = np.maximum(raw, 0.0)
        return out if out.ndim else float(out)

    def cdf(self, q, method="talbot"):
        q = np.asarray(q, dtype=float)
        if np.any(q <= 0):
            raise ValueError("cdf_QR is defined for q > 0 only")
        if method == "talbot":
            raw = self._fill_tail(q, talbot(lambda s: self.log_transform(s) - np.log(s), q,
                                            self.nodes, log=True))
        elif method == "stehfest":
            raw = gaver_stehfest(lambda s: self._transform_mp(s) / s, q)
        else:
            raise ValueError(f"unknown inversion method {method!r}")
        out = np.clip(np.asarray(raw, dtype=float), 0.0, 1.0)
        return out if out.ndim else float(out)

    def _build_table(self, n):
        self.grid = np.logspace(-4, 4, n) * self.scale
        raw = self._raw_pdf(self.grid)
        peak = raw.max()
        self.min_excursion = min(0.0, raw.min()) / peak
        if self.min_excursion < -1e-4:
            warnings.warn(f"inverse-Laplace ringing reaches {self.min_excursion:.2e} of the peak")
        self.pdf_grid = np.maximum(raw, 0.0)
        self.cdf_grid = np.maximum.accumulate(self.cdf(self.grid))
        # interpolate logs over the strictly positive stretch of the table;
        # the left tail below it is zero to double precision
        pos = np.flatnonzero(self.pdf_grid > 0)
        self._pdf_lo = self.grid[pos[0]]
        self._pdf_interp = PchipInterpolator(np.log(self.grid[pos]),
                                             np.log(self.pdf_grid[pos]), extrapolate=False)
        pos = np.flatnonzero(self.cdf_grid > 0)
        self._cdf_lo = self.grid[pos[0]]
        self._cdf_interp = PchipInterpolator(np.log(self.grid[pos]),
                                             np.log(self.cdf_grid[pos]), extrapolate=False)

    def pdf_table(self, q):
        """Tabulated density; power-law tail beyond the table, zero below."""
        q = np.asarray(q, dtype=float)
        out = np.zeros(q.shape)
        hi = self.grid[-1]
        inside = (q >= self._pdf_lo) & (q <= hi)
        out[inside] = np.exp(self._pdf_interp(np.log(q[inside])))
        above = q > hi
        out[above] = self.pdf_grid[-1] * (q[above] / hi) ** (-1.0 - self.delta)
        return out if out.ndim else float(out)

    def cdf_table(self, q):
        q = np.asarray(q, dtype=float)
        out = np.zeros(q.shape)
        hi = self.grid[-1]
        inside = (q >= self._cdf_lo) & (q <= hi)
        out[inside] = np.exp(self._cdf_interp(np.log(q[inside])))
        above = q > hi
        out[above] = 1.0 - (1.0 - self.cdf_grid[-1]) * (q[above] / hi) ** (-self.delta)
        return out if out.ndim else float(out)


_DIST_CACHE = {}


def harvested_power(params, spec=DEFAULT_QUADRATURE):
    key = (params.Ptilde_T, params.zeta_tilde, params.alpha_tilde, spec.inversion_nodes)
    dist = _DIST_CACHE.get(key)
    if dist is None:
        dist = HarvestedPower(params.Ptilde_T, params.zeta_tilde, params.alpha_tilde,
                              nodes=spec.inversion_nodes)
        _DIST_CACHE[key] = dist
    return dist


def pdf_QR(q, params, spec=DEFAULT_QUADRATURE):
    """Density of the harvested power ``Q_R`` (1/W)."""
    return harvested_power(params, spec).pdf(q)


def cdf_QR(q, params, spec=DEFAULT_QUADRATURE):
    return harvested_power(params, spec).cdf(q)


@dataclass(frozen=True)
class TheoremTerms:
    P_A: float
    J: float
    K: float
    total: float
    power_rule: str

    def as_dict(self):
        return {"P_A": self.P_A, "J": self.J, "K": self.K, "total": self.total}


class _Model:
    """Shared pieces of the three terms for one parameter set."""

    def __init__(self, params, spec, power_rule):
        if power_rule not in POWER_RULES:
            raise ValueError(f"power_rule must be one of {POWER_RULES}")
        p = params
        self.p = p
        self.spec = spec
        hf = p.harvest_factor
        self.B1 = p.E_C / hf
        self.B2 = p.E_P / hf
        self.B3 = p.E_A / hf
        if power_rule == "proof":
            # stored energy capped at E_C, circuit drawn from it
            self.q_sat, self.p_sat = self.B1, p.E_C
        else:
            # circuit drawn first, surplus capped at E_C
            self.q_sat, self.p_sat = (p.E_A + p.E_C) / hf, p.E_A + p.E_C
        self.g1 = p.d_SR ** p.alpha * p.tau_A / p.P_S if p.P_S > 0 else math.inf
        self.degenerate = p.zeta_tilde == 0 or p.Ptilde_T == 0
        self.dist = None if self.degenerate else harvested_power(p, spec)
        self.LIR_g1 = self.laplace_R(self.g1)

    def laplace_R(self, s):
        if math.isinf(s):
            return 0.0
        if self.p.zeta == 0:
            return 1.0
        return laplace_single(s, self.p.P_T, self.p.zeta, self.p.alpha)

    def g2(self, energy, v=None):
        """Active-hop inverse SINR scale for stored energy ``energy``."""
        p = self.p
        v = p.tau_A if v is None else v
        surplus = energy - p.E_A
        if surplus <= 0:
            return math.inf
        return p.d_RD ** p.alpha * v * (1 - p.eta) / (2.0 * surplus)

    def g3(self, q):
        p = self.p
        return p.d_RD ** p.alpha * p.tau_P / (p.Gamma * p.xi * q)

    def active_hop(self, g2):
        """exp(-g2 sigma^2) * L_{I_R,I_D}(g1, g2): P[nu_R, nu_D^A above tau_A | Q_R]."""
        p = self.p
        if math.isinf(g2) or math.isinf(self.g1) or g2 * p.sigma2 > 700:
            return 0.0
        if p.zeta == 0:
            lj = 1.0
        else:
            lj = laplace_joint(self.g1, g2, p.P_T, p.zeta, p.alpha, p.d_RD, self.spec)
        return math.exp(-g2 * p.sigma2) * lj

    def passive_hop(self, q):
        return math.exp(-self.g3(q) * self.p.sigma2_tilde) if q > 0 else 0.0

    def integrate(self, f, a, b):
        if not b > a:
            return 0.0
        s = self.spec
        val, err = integrate.quad(f, a, b, epsabs=1e-10, epsrel=1e-7,
                                  limit=s.max_subdivisions, points=self._points(a, b))[:2]
        if err > 1e-6 + 1e-5 * abs(val):
            raise QuadratureError(f"q-integral on [{a:g}, {b:g}] did not converge",
                                  estimate=val, error=err)
        return val

    def _points(self, a, b):
        grid = self.dist.scale * np.logspace(-3, 3, 13)
        pts = [x for x in grid if a < x < b]
        return pts or None

    def tail_passive(self, a):
        """Integral of exp(-g3(q) sigma~^2) f(q) over [a, inf)."""
        d = self.dist
        hi = d.grid[-1]
        if a >= hi:
            return self._powerlaw_passive(a)
        inside = self.integrate(lambda q: self.passive_hop(q) * d.pdf_table(q), a, hi)
        return inside + self._powerlaw_passive(hi)

    def _powerlaw_passive(self, x):
        # beyond the table f ~ q**(-1 - delta); with b = g3(q) q sigma~^2 the
        # integral is mass * Gamma(1 + delta) * P(delta, b/x) * (b/x)**-delta
        d = self.dist
        mass = 1.0 - d.cdf_table(x)
        z = self.g3(1.0) * self.p.sigma2_tilde / x
        if z == 0.0:
            return mass
        if z < 1e-8:
            return mass * (1.0 - d.delta * z / (1.0 + d.delta))
        return mass * special.gamma(1.0 + d.delta) * special.gammainc(d.delta, z) * z ** -d.delta


def _weight(term):
    return max(0.0, term)


def term_PA(params, spec=DEFAULT_QUADRATURE, power_rule="proof", model=None):
    """P[nu_R > tau_A, nu_D^A > tau_A, E_R > E_A]."""
    m = model or _Model(params, spec, power_rule)
    p = params
    if m.degenerate or m.p_sat <= p.E_A or m.LIR_g1 == 0:
        return 0.0
    d = m.dist
    pre = math.exp(-m.g1 * p.sigma2)
    hf = p.harvest_factor
    body = m.integrate(lambda q: m.active_hop(m.g2(hf * q)) * d.pdf_table(q), m.B3, m.q_sat)
    sat = m.active_hop(m.g2(m.p_sat)) * (1.0 - d.cdf_table(m.q_sat))
    return _weight(pre * (body + sat))


def term_J(params, spec=DEFAULT_QUADRATURE, power_rule="proof", model=None):
    """P[nu_R > tau_A, nu_D^P > tau_P, nu_D^A <= tau_A, E_R > E_A]."""
    m = model or _Model(params, spec, power_rule)
    p = params
    if m.degenerate or m.LIR_g1 == 0:
        return 0.0
    d = m.dist
    pre = math.exp(-m.g1 * p.sigma2)
    hf = p.harvest_factor
    lo = m.B3
    q_sat = max(m.q_sat, lo)

    def body(q):
        fail = m.LIR_g1 - m.active_hop(m.g2(hf * q))
        return m.passive_hop(q) * fail * d.pdf_table(q)

    mid = m.integrate(body, lo, q_sat)
    fail_sat = m.LIR_g1 - m.active_hop(m.g2(m.p_sat))
    sat = fail_sat * m.tail_passive(q_sat)
    return _weight(pre * (mid + sat))


def term_K(params, spec=DEFAULT_QUADRATURE, power_rule="proof", model=None):
    """P[nu_R > tau_A, nu_D^P > tau_P, E_A > E_R > E_P]."""
    m = model or _Model(params, spec, power_rule)
    p = params
    if m.degenerate or m.LIR_g1 == 0 or not m.B3 > m.B2:
        return 0.0
    d = m.dist
    pre = math.exp(-m.g1 * p.sigma2) * m.LIR_g1
    return _weight(pre * m.integrate(lambda q: m.passive_hop(q) * d.pdf_table(q), m.B2, m.B3))


def theorem_terms(params, spec=DEFAULT_QUADRATURE, power_rule="proof"):
    """All three terms and their clamped sum."""
    m = _Model(params, spec, power_rule)
    pa = term_PA(params, spec, power_rule, m)
    j = term_J(params, spec, power_rule, m)
    k = term_K(params, spec, power_rule, m)
    total = pa + j + k
    tol = 3e-4
    if total > 1 + tol or total < -tol:
        warnings.warn(f"success probability {total:.6f} outside [0, 1]; clamping")
    return TheoremTerms(pa, j, k, min(max(total, 0.0), 1.0), power_rule)


def success_prob_optimal(params, spec=DEFAULT_QUADRATURE, power_rule="proof"):
    """Success probability of the hybrid relay with optimal mode selection."""
    return theorem_terms(params, spec, power_rule).total
