"""Monte Carlo simulation of the hybrid relay, one time slot at a time.

Layout: relay R at the origin, source S at ``(-d_SR, 0)``, destination D at
``(d_RD, 0)``. Both Poisson fields live on a disk of radius ``r_max``
centred midway between R and D. Every slot is scored under *both* modes on
the same randomness, so any mode-selection rule can be replayed later.

Points beyond ``r_max`` are not drawn. With ``far_field=True`` (default)
their mean contribution is added to every shot-noise sum instead; for
path-loss exponent 3 the carriers outside 500 m still add about 1e-4 W,
which moves the lower tail of the harvested power noticeably.
"""

from dataclasses import dataclass
import math

import numpy as np

from .geometry import (FieldClass, SimulationRegion, far_field_mean, sample_ppp_batch,
                       shot_noise, shot_noise_batch)

POWER_RULES = ("transmit", "proof")
CHUNK = 2048


def transmit_power_active(Q_R, params, rule="transmit"):
    """Relay transmit power in the active mode (W) given incident power ``Q_R``.

    ``rule="transmit"`` follows the three-branch power rule (circuit energy
    first, surplus capped at ``E_C``); ``rule="proof"`` caps the harvested
    energy at ``E_C`` before the circuit draw, which is the form the
    closed-form analysis integrates.
    """
    p = params
    Q = np.asarray(Q_R, dtype=float)
    if np.any(Q < 0):
        raise ValueError("incident power must be nonnegative")
    E_R = p.harvest_factor * Q
    k = 2.0 / (1.0 - p.eta)
    if rule == "transmit":
        out = np.where(E_R >= p.E_A + p.E_C, k * p.E_C,
                       np.where(E_R >= p.E_A, k * (E_R - p.E_A), 0.0))
    elif rule == "proof":
        out = np.where(E_R >= p.E_A, k * np.maximum(np.minimum(E_R, p.E_C) - p.E_A, 0.0), 0.0)
    else:
        raise ValueError(f"unknown power rule {rule!r}")
    return out if out.ndim else float(out)


def backscatter_power(Q_R, params):
    """Backscattered power ``Gamma * xi * Q_R`` (W)."""
    Q = np.asarray(Q_R, dtype=float)
    if np.any(Q < 0):
        raise ValueError("incident power must be nonnegative")
    out = params.Gamma * params.xi * Q
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SlotOutcome:
    Q_R: float
    E_R: float
    nu_R: float
    P_A_tx: float
    nu_D_active: float
    nu_D_passive: float
    success_active: bool
    success_passive: bool

    def success(self, mode):
        """Reward of playing ``mode`` (0 = active, 1 = passive) in this slot."""
        return self.success_active if mode == 0 else self.success_passive


@dataclass
class SlotBatch:
    """Column-wise outcomes of many slots."""

    Q_R: np.ndarray
    E_R: np.ndarray
    nu_R: np.ndarray
    P_A_tx: np.ndarray
    nu_D_active: np.ndarray
    nu_D_passive: np.ndarray
    success_active: np.ndarray
    success_passive: np.ndarray

    def __len__(self):
        return self.Q_R.shape[0]

    def outcome(self, k):
        return SlotOutcome(*(v[k].item() for v in self.__dict__.values()))

    def rewards(self):
        """``(n, 2)`` int8 matrix: column 0 active success, column 1 passive."""
        return np.column_stack([self.success_active, self.success_passive]).astype(np.int8)

    @classmethod
    def concat(cls, batches):
        keys = cls.__dataclass_fields__.keys()
        return cls(**{k: np.concatenate([getattr(b, k) for b in batches]) for k in keys})


def evaluate_slots(params, Q_R, I_R, I_D, h_SR, h_RD, h_RD_passive, power_rule="transmit"):
    """Score slots from their sufficient statistics (vectorised)."""
    p = params
    Q_R = np.asarray(Q_R, dtype=float)
    E_R = p.harvest_factor * Q_R
    with np.errstate(divide="ignore", invalid="ignore"):
        nu_R = p.P_S * np.asarray(h_SR) * p.d_SR ** -p.alpha / (np.asarray(I_R) + p.sigma2)
        P_A = np.asarray(transmit_power_active(Q_R, p, power_rule))
        nu_A = P_A * np.asarray(h_RD) * p.d_RD ** -p.alpha / (np.asarray(I_D) + p.sigma2)
        P_P = np.asarray(backscatter_power(Q_R, p))
        nu_P = P_P * np.asarray(h_RD_passive) * p.d_RD ** -p.alpha / p.sigma2_tilde
    nu_R = np.nan_to_num(nu_R, nan=0.0)
    nu_A = np.nan_to_num(nu_A, nan=0.0)
    nu_P = np.nan_to_num(nu_P, nan=0.0)
    link_R = nu_R > p.tau_A
    ok_A = (E_R > p.E_A) & link_R & (nu_A > p.tau_A)
    ok_P = (E_R > p.E_P) & link_R & (nu_P > p.tau_P)
    return SlotBatch(Q_R, E_R, nu_R, P_A, nu_A, nu_P, ok_A, ok_P)


def layout(params):
    """Positions of S, R, D and the simulation disk."""
    S = (-params.d_SR, 0.0)
    R = (0.0, 0.0)
    D = (params.d_RD, 0.0)
    region = SimulationRegion(center=(0.5 * params.d_RD, 0.0), radius=params.r_max)
    return S, R, D, region


def evaluate_fields(params, carriers, interferers, interferer_marks_D, h_SR, h_RD,
                    h_RD_passive, power_rule="transmit"):
    """One slot from explicit fields; handy for hand-built configurations."""
    p = params
    _, R, D, _ = layout(p)
    Q_R = shot_noise(carriers, R, p.Ptilde_T, p.alpha_tilde)
    I_R = shot_noise(interferers, R, p.P_T, p.alpha)
    I_D = shot_noise(interferers.with_marks(interferer_marks_D), D, p.P_T, p.alpha)
    b = evaluate_slots(p, [Q_R], [I_R], [I_D], [h_SR], [h_RD], [h_RD_passive], power_rule)
    return b.outcome(0)


def far_field_offsets(params):
    """Mean carrier power and interference from beyond ``r_max``."""
    p = params
    return (far_field_mean(p.zeta_tilde, p.Ptilde_T, p.alpha_tilde, p.r_max),
            far_field_mean(p.zeta, p.P_T, p.alpha, p.r_max))


def _simulate_chunk(params, n, psi_rng, phi_rng, fade_rng, power_rule, far_field):
    p = params
    _, R, D, region = layout(p)
    psi = sample_ppp_batch(p.zeta_tilde, region, n, psi_rng)
    Q_R = shot_noise_batch(psi, psi_rng.standard_exponential(psi.size), [R],
                           p.Ptilde_T, p.alpha_tilde)[0]
    phi = sample_ppp_batch(p.zeta, region, n, phi_rng)
    I_R, I_D = shot_noise_batch(phi, phi_rng.standard_exponential((2, phi.size)), [R, D],
                                p.P_T, p.alpha)
    if far_field:
        q_far, i_far = far_field_offsets(p)
        Q_R += q_far
        I_R += i_far
        I_D += i_far
    h = fade_rng.standard_exponential((3, n))
    return evaluate_slots(p, Q_R, I_R, I_D, h[0], h[1], h[2], power_rule)


def simulate_slots(params, n, rng, power_rule="transmit", chunk=CHUNK, far_field=True):
    """Simulate ``n`` independent slots.

    ``rng`` is a :class:`numpy.random.Generator`; three child streams are
    spawned from it (carrier field, interferer field, link fading) so that
    changing one density leaves the other components' randomness intact.
    ``far_field`` adds the mean contribution of the fields beyond ``r_max``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    psi_rng, phi_rng, fade_rng = rng.spawn(3)
    parts = []
    done = 0
    while done < n:
        m = min(chunk, n - done)
        parts.append(_simulate_chunk(params, m, psi_rng, phi_rng, fade_rng, power_rule,
                                     far_field))
        done += m
    if not parts:
        return _simulate_chunk(params, 0, psi_rng, phi_rng, fade_rng, power_rule, far_field)
    return SlotBatch.concat(parts)


def simulate_slot(params, rng, power_rule="transmit", far_field=True):
    """One slot with freshly sampled fields and fading."""
    return simulate_slots(params, 1, rng, power_rule, far_field=far_field).outcome(0)


def term_events(batch, params):
    """Indicators of the three disjoint events of the optimal-selection split."""
    p = params
    pa = batch.success_active
    j = batch.success_passive & ~(batch.nu_D_active > p.tau_A) & (batch.E_R > p.E_A)
    k = batch.success_passive & (batch.E_R < p.E_A)
    return {"P_A": pa, "J": j, "K": k}


@dataclass(frozen=True)
class Estimate:
    value: float
    se: float
    n: int

    @classmethod
    def from_counts(cls, hits, n):
        v = hits / n
        return cls(v, math.sqrt(max(v * (1 - v), 0.0) / n), n)


@dataclass(frozen=True)
class SuccessEstimates:
    p_active: Estimate
    p_passive: Estimate
    p_optimal: Estimate

    def as_dict(self):
        return {k: getattr(self, k) for k in ("p_active", "p_passive", "p_optimal")}


def success_counts(batch):
    """Integer hit counts (active, passive, either) of a slot batch."""
    a = batch.success_active
    b = batch.success_passive
    return int(a.sum()), int(b.sum()), int((a | b).sum())


def estimate_success_probs(params, n_slots, rng, power_rule="transmit", far_field=True):
    """Monte Carlo success probabilities of each mode and of optimal selection."""
    if n_slots < 1:
        raise ValueError("n_slots must be >= 1")
    batch = simulate_slots(params, n_slots, rng, power_rule, far_field=far_field)
    a, b, u = success_counts(batch)
    return SuccessEstimates(Estimate.from_counts(a, n_slots), Estimate.from_counts(b, n_slots),
                            Estimate.from_counts(u, n_slots))
