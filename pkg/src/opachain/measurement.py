"""Finite-gain readout of squeezing through a second parametric amplifier.

The second amplifier boosts one quadrature by the power gain G and deamplifies
the conjugate by 1/G, so the intensity extremes seen on an optical power
detector, normalized to the amplified-vacuum intensity, are

    r_minus_meas = (G^2 r_minus + r_plus ) / (1 + G^2)
    r_plus_meas  = (G^2 r_plus  + r_minus) / (1 + G^2)

The leakage of the conjugate quadrature biases the reading exactly like a
phase deviation of theta_eff = arcsin(sqrt(1/(1+G^2))), and for G > 1 the
bias can be removed exactly by inverting the linear map.
"""

import math
from dataclasses import dataclass

from .errors import DomainError, SingularCorrectionError, UnphysicalInputError
from .sideband import QuadLevels, db_from_ratio, ratio_from_db

__all__ = [
    "OpaGain",
    "MeasuredLevels",
    "measured_from_true",
    "true_from_measured",
    "effective_phase_deviation",
    "required_gain",
]


@dataclass(frozen=True)
class OpaGain:
    """Linear power gain of the readout amplifier (> 0; > 1 to amplify)."""

    g: float

    def __post_init__(self):
        if not (self.g > 0.0 and math.isfinite(self.g)):
            raise DomainError(f"gain must be finite and > 0, got {self.g}")

    @classmethod
    def from_db(cls, g_db):
        return cls(ratio_from_db(g_db))

    @property
    def db(self):
        return db_from_ratio(self.g)


@dataclass(frozen=True)
class MeasuredLevels:
    """Vacuum-normalized intensity extremes read after the second amplifier."""

    r_minus_meas: float
    r_plus_meas: float

    def __post_init__(self):
        if not (0.0 < self.r_minus_meas <= self.r_plus_meas):
            raise DomainError(
                f"measured levels must satisfy 0 < r_minus_meas <= r_plus_meas, "
                f"got ({self.r_minus_meas}, {self.r_plus_meas})"
            )

    @property
    def r_minus_db(self):
        return db_from_ratio(self.r_minus_meas)

    @property
    def r_plus_db(self):
        return db_from_ratio(self.r_plus_meas)


def measured_from_true(levels, gain):
    """Levels read at finite gain from the true (r_minus, r_plus) pair.

    For g < 1 the readout deamplifies and the two phase settings swap which
    one yields the intensity maximum; the returned pair is always ordered
    (min, max).
    """
    g2 = gain.g * gain.g
    denom = 1.0 + g2
    low = (g2 * levels.r_minus + levels.r_plus) / denom
    high = (g2 * levels.r_plus + levels.r_minus) / denom
    if low > high:
        low, high = high, low
    return MeasuredLevels(r_minus_meas=low, r_plus_meas=high)


def true_from_measured(meas, gain):
    """Exact inverse of :func:`measured_from_true`; requires gain > 1.

    Raises :class:`SingularCorrectionError` at g <= 1 and
    :class:`UnphysicalInputError` when the corrected squeezing level comes out
    non-positive (the measured pair cannot originate from a physical state at
    this gain).
    """
    g2 = gain.g * gain.g
    if g2 <= 1.0:
        raise SingularCorrectionError(
            f"correction is singular at gain {gain.g} (needs g > 1)"
        )
    denom = g2 - 1.0
    r_minus = (g2 * meas.r_minus_meas - meas.r_plus_meas) / denom
    r_plus = (g2 * meas.r_plus_meas - meas.r_minus_meas) / denom
    if r_minus <= 0.0:
        raise UnphysicalInputError(
            f"corrected r_minus = {r_minus} <= 0: measured pair "
            f"({meas.r_minus_meas}, {meas.r_plus_meas}) is inconsistent at gain {gain.g}"
        )
    return QuadLevels(r_minus, r_plus)


def effective_phase_deviation(gain):
    """Phase deviation [rad] equivalent to the finite-gain readout bias.

    theta_eff = arcsin(sqrt(1/(1+G^2))), in (0, pi/2]; 45 deg at G = 1.
    """
    return math.asin(math.sqrt(1.0 / (1.0 + gain.g * gain.g)))


_GAIN_BRACKET_HI = 1.0e6
_BISECTION_STEPS = 200


def required_gain(levels, digit_tolerance_db=0.05, db_step=1.0):
    """Smallest readout gain whose squeezing reading is within tolerance.

    Finds, by bisection on the monotone bias curve, the smallest G for which
    |dB(r_minus_meas) - dB(r_minus)| <= digit_tolerance_db.  Gain is specified
    the way amplifiers are: in whole dB steps of ``db_step`` (the continuous
    bisection bound rounds up to the next step).  Pass ``db_step=None`` for
    the raw continuous bound.
    """
    if not (digit_tolerance_db > 0.0):
        raise DomainError(f"tolerance must be > 0 dB, got {digit_tolerance_db}")
    if db_step is not None and not (db_step > 0.0):
        raise DomainError(f"db_step must be > 0 or None, got {db_step}")

    def bias_db(g):
        meas = measured_from_true(levels, OpaGain(g))
        return db_from_ratio(meas.r_minus_meas) - db_from_ratio(levels.r_minus)

    if bias_db(1.0) <= digit_tolerance_db:
        return OpaGain(1.0)
    if bias_db(_GAIN_BRACKET_HI) > digit_tolerance_db:
        raise DomainError(
            f"tolerance {digit_tolerance_db} dB unreachable for gain <= {_GAIN_BRACKET_HI}"
        )
    lo, hi = 1.0, _GAIN_BRACKET_HI
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if bias_db(mid) <= digit_tolerance_db:
            hi = mid
        else:
            lo = mid
    if db_step is None:
        return OpaGain(hi)
    steps = math.ceil(db_from_ratio(hi) / db_step - 1e-12)
    return OpaGain(ratio_from_db(steps * db_step))
