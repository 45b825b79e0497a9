"""Physical constants of the hybrid relay model (SI units, linear scale)."""

from dataclasses import dataclass, fields, replace
import math


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


class ParamError(ValueError):
    """A parameter violates the model's domain; ``field`` names it."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class SystemParams:
    """Every constant of the relay model.

    Defaults reproduce the reference scenario: 5 m hops, interferers at
    3 dBm, carrier emitters at 40 dBm, both with density 1e-3 per m^2,
    thresholds 0 dB (active) and 20 dB (passive). Energies are joules per
    slot (slot duration normalised to 1). ``r_max`` is the radius of the
    simulation disk and only affects Monte Carlo.
    """

    d_SR: float = 5.0
    d_RD: float = 5.0
    P_T: float = dbm_to_watts(3.0)
    Ptilde_T: float = dbm_to_watts(40.0)
    zeta: float = 1e-3
    zeta_tilde: float = 1e-3
    P_S: float = 0.002
    E_A: float = 200e-6
    E_P: float = 10e-6
    E_C: float = 0.002
    alpha: float = 4.0
    alpha_tilde: float = 3.0
    beta: float = 0.5
    Gamma: float = 0.375
    eta: float = 0.4
    xi: float = 0.3
    sigma2: float = 1e-10
    sigma2_tilde: float = 1e-9
    tau_A: float = db_to_linear(0.0)
    tau_P: float = db_to_linear(20.0)
    r_max: float = 500.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or math.isnan(v):
                raise ParamError(f.name, f"must be a number, got {v!r}")
            if v < 0:
                raise ParamError(f.name, f"must be nonnegative, got {v!r}")
        for name in ("d_SR", "d_RD", "r_max"):
            if getattr(self, name) <= 0:
                raise ParamError(name, "must be positive")
        if not 0 < self.eta < 1:
            raise ParamError("eta", "must lie in (0, 1)")
        for name in ("beta", "Gamma", "xi"):
            if not 0 < getattr(self, name) <= 1:
                raise ParamError(name, "must lie in (0, 1]")
        for name in ("alpha", "alpha_tilde"):
            if not getattr(self, name) > 2:
                raise ParamError(name, "path-loss exponent must exceed 2")
        if not self.E_A > self.E_P:
            raise ParamError("E_A", "active circuit energy must exceed E_P")

    def replace(self, **changes):
        return replace(self, **changes)

    @property
    def harvest_factor(self):
        """eta * beta: joules harvested per watt of incident power."""
        return self.eta * self.beta
