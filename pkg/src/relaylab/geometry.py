"""Poisson point fields with Rayleigh fading marks and their shot noise.

Single-realization helpers (:func:`sample_ppp`, :func:`shot_noise`) plus
flat batched versions used by the simulator, where many independent
realizations are stored back to back and reduced by the compiled kernel.
"""

from dataclasses import dataclass, field
import enum
import math

import numpy as np

from . import _backend


class FieldClass(enum.Enum):
    INTERFERER = "phi"
    CARRIER = "psi"


class SingularDistanceError(ZeroDivisionError):
    """A point coincides with the receiver."""


@dataclass(frozen=True)
class SimulationRegion:
    center: tuple = (0.0, 0.0)
    radius: float = 500.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("region radius must be positive")

    @property
    def area(self):
        return math.pi * self.radius ** 2


@dataclass(frozen=True)
class PointField:
    """One realization of a marked PPP.

    ``points`` is an ``(n, 2)`` array of coordinates in metres and
    ``marks`` the fading power gains ``|h|^2`` seen by one receiver.
    """

    points: np.ndarray
    marks: np.ndarray
    kind: FieldClass = FieldClass.INTERFERER
    region: SimulationRegion = field(default_factory=SimulationRegion)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        mk = np.asarray(self.marks, dtype=float).reshape(-1)
        if pts.shape[0] != mk.shape[0]:
            raise ValueError("points and marks differ in length")
        if np.any(mk < 0):
            raise ValueError("fading marks must be nonnegative")
        c = np.asarray(self.region.center, dtype=float)
        if pts.shape[0] and np.max(np.hypot(*(pts - c).T)) > self.region.radius * (1 + 1e-12):
            raise ValueError("points fall outside the simulation region")
        pts.setflags(write=False)
        mk.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "marks", mk)

    def __len__(self):
        return self.marks.shape[0]

    def with_marks(self, marks):
        """Same points, new fading (e.g. towards a second receiver)."""
        return PointField(self.points, marks, self.kind, self.region)


def _uniform_disk(n, region, rng):
    rad = region.radius * np.sqrt(rng.random(n))
    ang = 2.0 * np.pi * rng.random(n)
    cx, cy = region.center
    return cx + rad * np.cos(ang), cy + rad * np.sin(ang)


def sample_ppp(density, region, rng, kind=FieldClass.INTERFERER):
    """Homogeneous PPP on the disk with unit-mean exponential marks."""
    if density < 0:
        raise ValueError("density must be nonnegative")
    n = int(rng.poisson(density * region.area))
    x, y = _uniform_disk(n, region, rng)
    marks = rng.standard_exponential(n)
    return PointField(np.column_stack([x, y]), marks, kind, region)


def shot_noise(field, receiver, tx_power, path_loss_exp):
    """``tx_power * sum(mark_i * |x_i - receiver|**-path_loss_exp)`` in watts."""
    if not path_loss_exp > 2:
        raise ValueError("path-loss exponent must exceed 2")
    if len(field) == 0:
        return 0.0
    pts = field.points
    try:
        out = _backend.segment_shot_noise(
            np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]),
            np.ascontiguousarray(field.marks), np.array([len(field)]),
            float(receiver[0]), float(receiver[1]), float(tx_power), float(path_loss_exp))
    except ZeroDivisionError:
        raise SingularDistanceError("singular distance: a point sits on the receiver") from None
    return float(out[0])


def far_field_mean(density, tx_power, path_loss_exp, radius):
    """Mean shot noise of the field outside a disk of ``radius``, unit-mean marks.

    Exact for a receiver at the disk center; an offset ``a`` changes it by a
    relative ``O((a / radius)**2)``.
    """
    if not path_loss_exp > 2:
        raise ValueError("path-loss exponent must exceed 2")
    if not radius > 0:
        raise ValueError("radius must be positive")
    a = path_loss_exp
    return 2.0 * math.pi * density * tx_power * radius ** (2.0 - a) / (a - 2.0)


@dataclass
class FieldBatch:
    """``counts.size`` independent realizations on one disk, stored flat.

    Positions are kept as the two uniform variates that generated them; the
    shot-noise kernel maps them to the disk on the fly.
    """

    u_rad: np.ndarray
    u_ang: np.ndarray
    counts: np.ndarray
    region: SimulationRegion

    @property
    def size(self):
        return self.u_rad.shape[0]

    def xy(self):
        rad = self.region.radius * np.sqrt(self.u_rad)
        ang = 2.0 * np.pi * self.u_ang
        cx, cy = self.region.center
        return cx + rad * np.cos(ang), cy + rad * np.sin(ang)

    def field(self, k, marks, kind=FieldClass.INTERFERER):
        start = int(self.counts[:k].sum())
        stop = start + int(self.counts[k])
        x, y = self.xy()
        pts = np.column_stack([x[start:stop], y[start:stop]])
        return PointField(pts, marks[start:stop], kind, self.region)


def sample_ppp_batch(density, region, n, rng):
    """Positions of ``n`` independent PPP realizations (marks drawn separately)."""
    if density < 0:
        raise ValueError("density must be nonnegative")
    counts = rng.poisson(density * region.area, size=n).astype(np.int64)
    total = int(counts.sum())
    return FieldBatch(rng.random(total), rng.random(total), counts, region)


def shot_noise_batch(batch, marks, receivers, tx_power, path_loss_exp):
    """Shot noise of every realization at every receiver.

    ``marks`` has one row of fading gains per receiver; the result has shape
    ``(len(receivers), batch.counts.size)``.
    """
    if not path_loss_exp > 2:
        raise ValueError("path-loss exponent must exceed 2")
    rx = np.ascontiguousarray(receivers, dtype=float).reshape(-1, 2)
    mk = np.ascontiguousarray(marks, dtype=float).reshape(rx.shape[0], -1)
    cx, cy = batch.region.center
    try:
        return _backend.polar_shot_noise(
            batch.u_rad, batch.u_ang, batch.counts, float(cx), float(cy),
            float(batch.region.radius), rx, mk, float(tx_power), float(path_loss_exp))
    except ZeroDivisionError:
        raise SingularDistanceError("singular distance: a point sits on the receiver") from None
