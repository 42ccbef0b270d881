"""Quadrature-variance model of a squeezed-vacuum source.

A parametric amplifier pumped at power ``p`` squeezes one quadrature of the
vacuum and anti-squeezes the other.  With total optical loss ``L`` folded in,
the two variance levels relative to vacuum (= 1) are

    r_minus = L + (1 - L) * exp(-2 * sqrt(a * p))
    r_plus  = L + (1 - L) * exp(+2 * sqrt(a * p))

where ``a`` is the nonlinear efficiency in 1/W.  The variance measured along
an arbitrary phase mixes the two levels with cos^2/sin^2 weights.

All values in this module are linear variance ratios; decibels appear only at
I/O boundaries via :func:`db_from_ratio` / :func:`ratio_from_db`.  The loss
``L`` is treated as flat across the optical band.
"""

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "SqueezerParams",
    "QuadLevels",
    "true_levels",
    "variance_at_phase",
    "apply_loss",
    "db_from_ratio",
    "ratio_from_db",
]


@dataclass(frozen=True)
class SqueezerParams:
    """Source parameters: nonlinear efficiency a [1/W], loss L, pump power p [W]."""

    a_per_w: float
    loss: float
    pump_w: float

    def __post_init__(self):
        if not (self.a_per_w > 0.0 and math.isfinite(self.a_per_w)):
            raise DomainError(f"nonlinear efficiency must be > 0, got {self.a_per_w}")
        if not (0.0 <= self.loss < 1.0):
            raise DomainError(f"optical loss must lie in [0, 1), got {self.loss}")
        if not (self.pump_w >= 0.0 and math.isfinite(self.pump_w)):
            raise DomainError(f"pump power must be >= 0, got {self.pump_w}")


@dataclass(frozen=True)
class QuadLevels:
    """Squeezing / anti-squeezing variance pair, vacuum = 1."""

    r_minus: float
    r_plus: float

    def __post_init__(self):
        if not (0.0 < self.r_minus <= self.r_plus) or not math.isfinite(self.r_plus):
            raise DomainError(
                f"levels must satisfy 0 < r_minus <= r_plus, got "
                f"({self.r_minus}, {self.r_plus})"
            )

    @classmethod
    def from_db(cls, r_minus_db, r_plus_db):
        return cls(ratio_from_db(r_minus_db), ratio_from_db(r_plus_db))

    @property
    def r_minus_db(self):
        return db_from_ratio(self.r_minus)

    @property
    def r_plus_db(self):
        return db_from_ratio(self.r_plus)


def true_levels(params):
    """Squeezing and anti-squeezing levels produced at the given pump power.

    Returns a :class:`QuadLevels` with r_minus <= 1 <= r_plus; both equal 1
    exactly at zero pump.
    """
    s = 2.0 * math.sqrt(params.a_per_w * params.pump_w)
    one_minus_l = 1.0 - params.loss
    return QuadLevels(
        r_minus=params.loss + one_minus_l * math.exp(-s),
        r_plus=params.loss + one_minus_l * math.exp(s),
    )


def variance_at_phase(levels, theta):
    """Quadrature variances (vx, vp) at source phase ``theta`` [rad].

    vx = r_minus cos^2(theta) + r_plus sin^2(theta) and vp the complement;
    the sum vx + vp = r_minus + r_plus for every theta, and both are
    pi-periodic in theta.
    """
    if not math.isfinite(theta):
        raise DomainError(f"phase must be finite, got {theta}")
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    vx = levels.r_minus * c2 + levels.r_plus * s2
    vp = levels.r_minus * s2 + levels.r_plus * c2
    return vx, vp


def apply_loss(levels, loss):
    """Mix the levels with vacuum through an extra loss (1 - transmission).

    A passive element of transmission T = 1 - loss maps each variance r
    to T*r + (1 - T).
    """
    if not (0.0 <= loss < 1.0):
        raise DomainError(f"extra loss must lie in [0, 1), got {loss}")
    t = 1.0 - loss
    return QuadLevels(t * levels.r_minus + loss, t * levels.r_plus + loss)


def db_from_ratio(r):
    """Linear variance ratio -> decibels (10 log10 r). Requires r > 0."""
    if not (r > 0.0):
        raise DomainError(f"ratio must be > 0 for dB conversion, got {r}")
    return 10.0 * math.log10(r)


def ratio_from_db(x):
    """Decibels -> linear variance ratio (10^(x/10))."""
    if not math.isfinite(x):
        raise DomainError(f"dB value must be finite, got {x}")
    return 10.0 ** (x / 10.0)
