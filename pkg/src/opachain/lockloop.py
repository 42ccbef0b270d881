"""Discrete-time simulation of the integral phase lock.

A narrow bandpass filter picks one wavelength out of the rippled spectrum;
its vacuum-normalized power is the error-signal input.  Each step the
controller subtracts the reading from a target value, time-integrates, and
drives the phase with the integral (pure integral control, no P/D terms).
Because dispersion maps wavelength to phase, moving the filter wavelength
moves the locked phase: the loop can park the phase anywhere on the slope of
the ripple, but not on its extrema where the slope vanishes.

The plant model adds an optional Wiener phase drift and Gaussian read noise;
a run is deterministic for a given seed.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .dispersion import frequency_thz, phase_at
from .errors import DomainError

__all__ = [
    "LockLoopConfig",
    "LockLoopState",
    "LockResult",
    "pd3_model",
    "response_slope",
    "step",
    "run_lock",
]

_INTEGRATOR_OVERFLOW = 1.0e8  # rad; beyond this the loop is declared unstable


@dataclass(frozen=True)
class LockLoopConfig:
    """Controller and plant-noise settings for one lock run."""

    ki: float                 # integrator gain magnitude, 1/(value*s)
    dt_s: float               # controller step, s
    target: float             # error-point target, vacuum-normalized
    lock_nm: float            # bandpass-filter center wavelength
    noise_rms: float = 0.0    # additive Gaussian noise on the reading
    drift_rate: float = 0.0   # phase random walk, rad/sqrt(s)
    max_steps: int = 2000
    tolerance: float | None = None  # |error| tolerance; None -> 1% of (r+ - r-)

    def __post_init__(self):
        if not (self.dt_s > 0.0 and math.isfinite(self.dt_s)):
            raise DomainError(f"step time must be > 0 s, got {self.dt_s}")
        if not math.isfinite(self.ki):
            raise DomainError(f"integrator gain must be finite, got {self.ki}")
        if not (self.lock_nm > 0.0):
            raise DomainError(f"lock wavelength must be > 0 nm, got {self.lock_nm}")
        if self.noise_rms < 0.0 or self.drift_rate < 0.0:
            raise DomainError("noise_rms and drift_rate must be >= 0")
        if self.max_steps < 1:
            raise DomainError(f"max_steps must be >= 1, got {self.max_steps}")
        if self.tolerance is not None and not (self.tolerance > 0.0):
            raise DomainError(f"tolerance must be > 0, got {self.tolerance}")


@dataclass(frozen=True)
class LockLoopState:
    """Loop state after a step: integrator, phases, and the latest reading."""

    step: int
    integrator: float
    phi_actuated: float
    phi_drift: float
    pd3: float


@dataclass(frozen=True)
class LockResult:
    """Outcome of a lock run."""

    locked: bool
    settle_step: int | None
    steady_state_rms_error: float
    trace: tuple
    diverged: bool = False
    stability_factor: float | None = None  # ki*dt*|slope| at the target point
    tolerance: float = 0.0


def _total_phase(model, lock_nm, phi_total):
    # dispersion phase at the filter wavelength, with the model's static
    # lock-point offset replaced by the loop-owned phase
    f = float(frequency_thz(lock_nm))
    return phase_at(model, f) - model.phi0_rad + phi_total


def pd3_model(model, levels, lock_nm, phi_total):
    """Vacuum-normalized reading at the filter wavelength for a total phase.

    Evaluates the rippled spectrum at lock_nm with the lock-point phase
    replaced by ``phi_total`` (the loop owns the phase; the model's static
    offset is ignored).
    """
    phi = _total_phase(model, lock_nm, phi_total)
    c2 = math.cos(phi) ** 2
    return levels.r_plus * c2 + levels.r_minus * (1.0 - c2)


def response_slope(model, levels, lock_nm, phi_total):
    """d(reading)/d(phase) at the operating point: (r- - r+) sin(2 phi)."""
    phi = _total_phase(model, lock_nm, phi_total)
    return (levels.r_minus - levels.r_plus) * math.sin(2.0 * phi)


def step(config, model, levels, state, rng=None):
    """Advance the loop one controller step.

    The integrator accumulates ki * (target - reading) * dt using the reading
    already in ``state``; the actuated phase equals the integrator; the drift
    then takes a Wiener increment and a fresh (noisy) reading is taken.
    Starting exactly on target with no noise or drift is a fixed point.
    """
    error = config.target - state.pd3
    integrator = state.integrator + config.ki * error * config.dt_s
    phi_actuated = integrator
    phi_drift = state.phi_drift
    if config.drift_rate > 0.0:
        if rng is None:
            raise DomainError("drift_rate > 0 requires a random generator")
        phi_drift += rng.normal(0.0, config.drift_rate * math.sqrt(config.dt_s))
    pd3 = pd3_model(model, levels, config.lock_nm, phi_actuated + phi_drift)
    if config.noise_rms > 0.0:
        if rng is None:
            raise DomainError("noise_rms > 0 requires a random generator")
        pd3 += rng.normal(0.0, config.noise_rms)
    return LockLoopState(state.step + 1, integrator, phi_actuated, phi_drift, pd3)


def _stability_factor(config, levels):
    """ki*dt*|slope| at the target fixed point, or None if there is none."""
    span = levels.r_plus - levels.r_minus
    if span <= 0.0:
        return None
    q = (config.target - levels.r_minus) / span
    if not (0.0 <= q <= 1.0):
        return None
    # |sin(2 phi*)| with cos^2(phi*) = q
    return abs(config.ki) * config.dt_s * span * 2.0 * math.sqrt(q * (1.0 - q))


def run_lock(config, model, levels, seed=0, initial_phase=0.0):
    """Run the lock for max_steps and judge whether it settled.

    The sign of the integrator gain is chosen once at startup from the local
    response slope (a noiseless probe), the way a lock box is flipped by hand.
    The run is deterministic for a given seed.  ``locked`` requires the rms
    error over the last 20% of steps to stay within the tolerance (default:
    1% of the ripple span) AND a strictly positive response slope at the
    target: integral control has no restoring action where the slope
    vanishes, so a target at or beyond a ripple extremum is flagged
    non-locking no matter how small the residual error.  ``settle_step`` is
    the first step after which the error never leaves the tolerance band.
    Integrator overflow or a linear-instability factor ki*dt*|slope| > 2 at
    the target marks the run as diverged rather than raising.
    """
    rng = np.random.default_rng(seed)
    tolerance = config.tolerance
    if tolerance is None:
        tolerance = 0.01 * (levels.r_plus - levels.r_minus)
        if tolerance <= 0.0:
            tolerance = 1e-6
    slope0 = response_slope(model, levels, config.lock_nm, initial_phase)
    ki_signed = abs(config.ki) * (1.0 if slope0 >= 0.0 else -1.0)
    cfg = replace(config, ki=ki_signed)

    state = LockLoopState(
        step=0,
        integrator=initial_phase,
        phi_actuated=initial_phase,
        phi_drift=0.0,
        pd3=pd3_model(model, levels, cfg.lock_nm, initial_phase),
    )
    if cfg.noise_rms > 0.0:
        state = replace(state, pd3=state.pd3 + rng.normal(0.0, cfg.noise_rms))

    trace = [state]
    diverged = False
    for _ in range(cfg.max_steps):
        state = step(cfg, model, levels, state, rng)
        trace.append(state)
        if not math.isfinite(state.integrator) or abs(state.integrator) > _INTEGRATOR_OVERFLOW:
            diverged = True
            break

    errors = np.array([cfg.target - s.pd3 for s in trace])
    tail = errors[-max(1, math.ceil(0.2 * len(trace))):]
    rms = float(np.sqrt(np.mean(tail**2)))
    kappa = _stability_factor(cfg, levels)
    if kappa is not None and kappa > 2.0:
        diverged = True
    on_slope = kappa is not None and kappa > 0.0
    locked = (not diverged) and on_slope and rms <= tolerance

    settle = None
    if locked:
        outside = np.nonzero(np.abs(errors) > tolerance)[0]
        settle = int(outside[-1]) + 1 if outside.size else 0
    return LockResult(
        locked=locked,
        settle_step=settle,
        steady_state_rms_error=rms,
        trace=tuple(trace),
        diverged=diverged,
        stability_factor=kappa,
        tolerance=tolerance,
    )
