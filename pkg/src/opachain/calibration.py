"""Pump-sweep calibration: fit (a, L) and compose detection-loss chains.

The source model

    r_pm(p) = L + (1 - L) * exp(+-2 * sqrt(a * p))

is fitted to measured (pump, squeezing dB, anti-squeezing dB) sweeps with a
damped Gauss-Newton iteration implemented here (no external solver).
Residuals are fractional deviations of the linear levels,
(model - data) / data, which weights the squeezing and anti-squeezing
branches equally; plain linear residuals would let the anti-squeezing branch
dominate by orders of magnitude.

Loss chains multiply element transmissions, and a known upstream transmission
can be divided out of a total to attribute the remaining loss to one stage.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FitNotConvergedError, InconsistentEfficiencyError
from .sideband import ratio_from_db

__all__ = [
    "SweepPoint",
    "FitResult",
    "LossChain",
    "fit",
    "chain_efficiency",
    "infer_stage_efficiency",
]


@dataclass(frozen=True)
class SweepPoint:
    """One pump-sweep sample: pump power [W] and both levels in dB."""

    pump_w: float
    r_minus_db: float
    r_plus_db: float

    def __post_init__(self):
        if not (self.pump_w >= 0.0 and math.isfinite(self.pump_w)):
            raise DomainError(f"pump power must be >= 0 W, got {self.pump_w}")
        if not (math.isfinite(self.r_minus_db) and math.isfinite(self.r_plus_db)):
            raise DomainError("sweep levels must be finite dB values")
        # Raw data may be noisy: a squeezing level above vacuum or an
        # anti-squeezing level below it is suspicious but not rejected.


@dataclass(frozen=True)
class FitResult:
    """Fitted nonlinear efficiency and loss with fit-quality diagnostics."""

    a_per_w: float
    loss: float
    residual_rms_db: float
    covariance: np.ndarray  # 2x2, order (a, loss)
    iterations: int

    def __post_init__(self):
        if not (self.a_per_w > 0.0):
            raise DomainError(f"fitted efficiency must be > 0, got {self.a_per_w}")
        if not (0.0 <= self.loss < 1.0):
            raise DomainError(f"fitted loss must lie in [0, 1), got {self.loss}")


@dataclass(frozen=True)
class LossChain:
    """Ordered (label, transmission) pairs; transmissions in (0, 1]."""

    elements: tuple = field(default_factory=tuple)

    def __post_init__(self):
        elems = tuple((str(label), float(t)) for label, t in self.elements)
        for label, t in elems:
            if not (0.0 < t <= 1.0):
                raise DomainError(
                    f"element {label!r} transmission must lie in (0, 1], got {t}"
                )
        object.__setattr__(self, "elements", elems)


def _model_levels(a, loss, pumps):
    s = 2.0 * np.sqrt(a * pumps)
    one_minus_l = 1.0 - loss
    return loss + one_minus_l * np.exp(-s), loss + one_minus_l * np.exp(s)


def _residuals_and_jacobian(a, loss, pumps, data_minus, data_plus):
    s = 2.0 * np.sqrt(a * pumps)
    em, ep = np.exp(-s), np.exp(s)
    one_minus_l = 1.0 - loss
    rm = loss + one_minus_l * em
    rp = loss + one_minus_l * ep
    # d s / d a = sqrt(p / a); zero at p = 0
    ds_da = np.sqrt(pumps / a)
    drm_da = -one_minus_l * em * ds_da
    drp_da = one_minus_l * ep * ds_da
    drm_dl = 1.0 - em
    drp_dl = 1.0 - ep
    res = np.concatenate([(rm - data_minus) / data_minus, (rp - data_plus) / data_plus])
    jac = np.vstack([
        np.concatenate([drm_da / data_minus, drp_da / data_plus]),
        np.concatenate([drm_dl / data_minus, drp_dl / data_plus]),
    ]).T
    return res, jac


def _initial_guess(pumps, data_minus_db, data_plus_db):
    # Loss seed: complement of the best observed squeezing ratio.
    l0 = 1.0 - ratio_from_db(float(np.min(data_minus_db)))
    l0 = min(max(l0, 0.05), 0.9)
    # Efficiency seed: invert the model at the largest-pump anti-squeezing point.
    k = int(np.argmax(pumps))
    rp = ratio_from_db(float(data_plus_db[k]))
    excess = max((rp - l0) / (1.0 - l0), 1.0 + 1e-6)
    a0 = (0.5 * math.log(excess)) ** 2 / pumps[k]
    return max(a0, 1e-3), l0


_DAMPING_START = 1e-3
_DAMPING_UP = 10.0
_DAMPING_DOWN = 10.0
_MAX_DAMPING = 1e14


def fit(points, max_iter=500, step_tol=1e-10, on_step=None):
    """Fit (a, L) to a pump sweep by damped Gauss-Newton.

    Parameters
    ----------
    points : sequence of SweepPoint
        At least two samples with distinct, not-all-zero pump powers.
    max_iter : int
        Iteration budget before :class:`FitNotConvergedError`.
    step_tol : float
        Converged once the proposed parameter step norm falls below this.
    on_step : callable, optional
        Diagnostic hook called as ``on_step(iteration, objective, accepted,
        damping)`` after every proposed step.

    Returns
    -------
    FitResult
        Fitted parameters, the rms of the dB residuals at the solution,
        and the 2x2 parameter covariance estimate sigma^2 (J^T J)^-1.

    Notes
    -----
    Damping follows the usual schedule: the normal equations are augmented
    with lam * diag(J^T J); lam shrinks tenfold on an accepted step (one that
    lowers the objective) and grows tenfold on a rejected one, so the
    objective decreases monotonically across accepted steps.  Steps leaving
    the physical domain (a <= 0 or L outside [0, 1)) are rejected the same
    way.
    """
    pts = list(points)
    if len(pts) < 2 or len({p.pump_w for p in pts}) < 2:
        raise DomainError("need at least 2 sweep points with distinct pump powers")
    pumps = np.array([p.pump_w for p in pts])
    if np.all(pumps == 0.0):
        raise DomainError("all pump powers are zero; (a, L) are unconstrained")
    dm_db = np.array([p.r_minus_db for p in pts])
    dp_db = np.array([p.r_plus_db for p in pts])
    data_minus = 10.0 ** (dm_db / 10.0)
    data_plus = 10.0 ** (dp_db / 10.0)

    a, loss = _initial_guess(pumps, dm_db, dp_db)
    res, jac = _residuals_and_jacobian(a, loss, pumps, data_minus, data_plus)
    objective = float(res @ res)
    lam = _DAMPING_START
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        jtj = jac.T @ jac
        jtr = jac.T @ res
        try:
            delta = np.linalg.solve(jtj + lam * np.diag(np.diag(jtj)), -jtr)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(jtj + lam * np.eye(2), -jtr, rcond=None)[0]
        step_norm = float(np.linalg.norm(delta))
        if step_norm < step_tol:
            converged = True
            break
        a_new, loss_new = a + delta[0], loss + delta[1]
        in_domain = a_new > 0.0 and 0.0 <= loss_new < 1.0
        if in_domain:
            res_new, jac_new = _residuals_and_jacobian(
                a_new, loss_new, pumps, data_minus, data_plus)
            obj_new = float(res_new @ res_new)
        accepted = in_domain and obj_new < objective
        if accepted:
            a, loss = a_new, loss_new
            res, jac, objective = res_new, jac_new, obj_new
            lam = max(lam / _DAMPING_DOWN, 1e-14)
        else:
            lam *= _DAMPING_UP
        if on_step is not None:
            on_step(iterations, objective, accepted, lam)
        if not accepted and lam > _MAX_DAMPING:
            # Damping saturated: no improving direction is left.
            converged = True
            break

    if not converged:
        raise FitNotConvergedError(
            f"no convergence in {max_iter} iterations (objective {objective:.3e}, "
            f"damping {lam:.1e}, a={a:.6g}, L={loss:.6g})",
            iterations=iterations, objective=objective, damping=lam,
            params=(a, loss),
        )

    model_minus, model_plus = _model_levels(a, loss, pumps)
    res_db = np.concatenate([
        10.0 * np.log10(model_minus) - dm_db,
        10.0 * np.log10(model_plus) - dp_db,
    ])
    residual_rms_db = float(np.sqrt(np.mean(res_db**2)))
    n_res, n_par = res.size, 2
    dof = max(n_res - n_par, 1)
    sigma2 = objective / dof
    try:
        covariance = sigma2 * np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        covariance = np.full((2, 2), np.nan)
    return FitResult(a, loss, residual_rms_db, covariance, iterations)


def chain_efficiency(chain):
    """Total transmission of a loss chain: the product of its elements.

    Order-invariant and multiplicative; an empty chain transmits perfectly.
    """
    total = 1.0
    for _, t in chain.elements:
        total *= t
    return total


def infer_stage_efficiency(total_transmission, known_upstream_transmission):
    """Transmission of the remaining stage once the upstream part is known.

    Divides the total by the upstream transmission.  A quotient above 1 means
    the two numbers cannot both be right and raises
    :class:`InconsistentEfficiencyError`.
    """
    for name, v in (("total", total_transmission),
                    ("upstream", known_upstream_transmission)):
        if not (0.0 < v <= 1.0):
            raise DomainError(f"{name} transmission must lie in (0, 1], got {v}")
    ratio = total_transmission / known_upstream_transmission
    if ratio > 1.0:
        raise InconsistentEfficiencyError(
            f"stage transmission {ratio:.4f} > 1: total {total_transmission} "
            f"exceeds upstream {known_upstream_transmission}"
        )
    return ratio
