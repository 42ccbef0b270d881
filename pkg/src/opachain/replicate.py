"""End-to-end reference scenario: the headline numbers of the modeled setup.

Each check below recomputes one quoted result of the reference experiment
from this package's models and compares at a fixed tolerance: worked
finite-gain cases, the effective phase deviation at 23 dB readout gain, the
exactness of the correction algebra, detection-efficiency arithmetic,
pump-sweep calibration, dispersion estimation round trips, the
phase-maintained bandwidth with and without compensation, and lock-loop
behavior.  ``run_all`` returns one record per check; the CLI renders them as
a pass/fail table and the acceptance test suite asserts each one.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import calibration, dispersion, lockloop, measurement, sideband

__all__ = ["CheckResult", "run_all", "ALL_CHECKS"]


@dataclass(frozen=True)
class CheckResult:
    check_id: int
    name: str
    passed: bool
    detail: str


def _result(check_id, name, passed, detail):
    return CheckResult(check_id, name, bool(passed), detail)


def check_required_gain():
    """Worked cases: 13 dB suffices for +3 dB anti-squeezing, 19 dB for +15 dB."""
    lv_a = sideband.QuadLevels.from_db(-3.0, 3.0)
    lv_b = sideband.QuadLevels.from_db(-3.0, 15.0)
    g_a = measurement.required_gain(lv_a, digit_tolerance_db=0.05)
    g_b = measurement.required_gain(lv_b, digit_tolerance_db=0.05)
    ok = abs(g_a.g - 20.0) <= 1.0 and abs(g_b.g - 80.0) <= 3.0
    return _result(
        1, "required readout gain for the two worked cases", ok,
        f"(-3,+3) dB -> G={g_a.g:.2f} ({g_a.db:.0f} dB), "
        f"(-3,+15) dB -> G={g_b.g:.2f} ({g_b.db:.0f} dB); expected 20+-1 and 80+-3",
    )


def check_theta_eff():
    """Effective phase deviation at G=200 is 0.286 deg and displays as 0.3 deg."""
    deg = math.degrees(
        measurement.effective_phase_deviation(measurement.OpaGain(200.0)))
    ok = abs(deg - 0.286) <= 0.01 and f"{deg:.1f}" == "0.3"
    return _result(2, "effective phase deviation at G=200", ok,
                   f"theta_eff = {deg:.4f} deg, displays {deg:.1f} deg")


def _random_levels_and_gain(rng, n, g_lo=1.01, g_hi=1000.0):
    r_minus = 10.0 ** rng.uniform(-2.0, 0.0, n)
    r_plus = r_minus * 10.0 ** rng.uniform(0.0, 3.0, n)
    g = 10.0 ** rng.uniform(math.log10(g_lo), math.log10(g_hi), n)
    return r_minus, r_plus, g


def check_correction_inversion(n=10_000, seed=20260809):
    """Correcting a finite-gain reading returns the input levels to 1e-9."""
    rng = np.random.default_rng(seed)
    r_minus, r_plus, g = _random_levels_and_gain(rng, n)
    worst = 0.0
    for rm, rp, gg in zip(r_minus, r_plus, g):
        levels = sideband.QuadLevels(rm, rp)
        gain = measurement.OpaGain(gg)
        back = measurement.true_from_measured(
            measurement.measured_from_true(levels, gain), gain)
        worst = max(worst,
                    abs(back.r_minus - rm) / rm,
                    abs(back.r_plus - rp) / rp)
    ok = worst < 1e-9
    return _result(3, f"correction inverts the readout over {n} random triples",
                   ok, f"worst relative error {worst:.3e} (< 1e-9 required)")


def check_phase_equivalence(n=10_000, seed=20260810):
    """Finite-gain bias equals quadrature mixing at theta_eff, to 1e-12."""
    rng = np.random.default_rng(seed)
    r_minus, r_plus, g = _random_levels_and_gain(rng, n, g_lo=1.0)
    worst = 0.0
    for rm, rp, gg in zip(r_minus, r_plus, g):
        levels = sideband.QuadLevels(rm, rp)
        gain = measurement.OpaGain(gg)
        meas = measurement.measured_from_true(levels, gain)
        theta = measurement.effective_phase_deviation(gain)
        vx, _ = sideband.variance_at_phase(levels, theta)
        worst = max(worst, abs(meas.r_minus_meas - vx) / vx)
    ok = worst < 1e-12
    return _result(4, f"readout bias equals phase-deviation mixing ({n} triples)",
                   ok, f"worst relative difference {worst:.3e} (< 1e-12 required)")


def check_loss_chain():
    """Detection-efficiency arithmetic: 78% chain, 0.70 stage, 27% source loss."""
    chain = calibration.LossChain((
        ("fiber beamsplitter", 0.86),
        ("circuit noise", 0.98),
        ("detector quantum efficiency", 0.93),
    ))
    eta = calibration.chain_efficiency(chain)
    stage = calibration.infer_stage_efficiency(1.0 - 0.487, 1.0 - 0.27)
    source_t = calibration.infer_stage_efficiency(1.0 - 0.425, eta)
    source_loss_pct = 100.0 * (1.0 - source_t)
    ok = (abs(eta - 0.7836) <= 2.5e-4 and round(eta, 2) == 0.78
          and f"{stage:.2f}" == "0.70"
          and abs(source_loss_pct - 27.0) <= 1.0)
    return _result(
        5, "loss-chain and stage-efficiency arithmetic", ok,
        f"chain = {eta:.4f} ({100 * eta:.0f}%), readout stage = {stage:.3f}, "
        f"source loss = {source_loss_pct:.1f}% (quoted 27%)",
    )


MEASURED_SWEEP = (
    calibration.SweepPoint(0.05, -2.7, 5.6),
    calibration.SweepPoint(0.10, -3.2, 9.9),
    calibration.SweepPoint(0.20, -2.2, 14.9),
)


def check_fit_recovery():
    """Noiseless sweeps refit exactly; the measured sweep lands on (20.1, 0.487)."""
    truth = sideband.SqueezerParams(19.1, 0.425, 1.0)
    synthetic = []
    for p in (0.05, 0.1, 0.2):
        lv = sideband.true_levels(sideband.SqueezerParams(19.1, 0.425, p))
        synthetic.append(calibration.SweepPoint(p, lv.r_minus_db, lv.r_plus_db))
    exact = calibration.fit(synthetic)
    exact_ok = (abs(exact.a_per_w - truth.a_per_w) / truth.a_per_w < 1e-5
                and abs(exact.loss - truth.loss) / truth.loss < 1e-5)
    meas = calibration.fit(MEASURED_SWEEP)
    meas_ok = (abs(meas.a_per_w - 20.1) / 20.1 <= 0.10
               and abs(meas.loss - 0.487) <= 0.03)
    return _result(
        6, "pump-sweep calibration fit", exact_ok and meas_ok,
        f"noiseless refit ({exact.a_per_w:.5f}, {exact.loss:.6f}); measured sweep "
        f"-> a = {meas.a_per_w:.2f} /W (quoted 20.1 +-10%), "
        f"L = {meas.loss:.3f} (quoted 0.487 +-0.03)",
    )


def check_dispersion_roundtrip():
    """Synthesized ripple spectra re-estimate D within 3% at both quoted values."""
    grid = dispersion.make_grid(1500.0, 1590.0, 0.1)
    levels = sideband.QuadLevels.from_db(-3.2, 9.9)
    details = []
    ok = True
    for d in (0.0045, 0.033):
        model = dispersion.DispersionModel(d, 194.0, phi0_rad=0.7)
        trace = dispersion.spectrum(model, levels, grid)
        est = dispersion.estimate_dispersion(trace, 194.0)
        rel = abs(est - d) / d
        ok = ok and rel <= 0.03
        details.append(f"D={d}: estimated {est:.6f} ({100 * rel:.2f}% off)")
    return _result(7, "dispersion estimate round trip", ok, "; ".join(details))


def check_phase_maintained_band():
    """Compensated dispersion holds the phase over 1 THz; uncompensated does not."""
    levels = sideband.QuadLevels.from_db(-1.2, 7.1)
    budget = dispersion.degradation_phase_dev(levels, degrade_db=1.0)
    f_lock = float(dispersion.frequency_thz(1545.0))
    extents = {}
    for d in (0.0045, 0.033):
        model = dispersion.DispersionModel(d, 194.0)
        _, f_hi = dispersion.phase_maintained_band(model, f_lock, budget)
        extents[d] = f_hi - f_lock
    ok = extents[0.0045] >= 1.0 and extents[0.033] < 1.0
    return _result(
        8, "phase maintained over 1 THz only after compensation", ok,
        f"budget {budget:.4f} rad; extent toward shorter wavelengths: "
        f"{extents[0.0045]:.3f} THz at 0.0045 ps/nm, "
        f"{extents[0.033]:.3f} THz at 0.033 ps/nm",
    )


def check_lock_loop():
    """Mid-slope lock settles monotonically; peak target cannot lock;
    moving the filter wavelength moves the phase by the dispersion prediction."""
    levels = sideband.QuadLevels.from_db(-3.2, 9.9)
    model = dispersion.DispersionModel(0.033, 194.0)
    mid = 0.5 * (levels.r_minus + levels.r_plus)
    base = dict(ki=1e3, dt_s=1e-5, target=mid, lock_nm=1545.0)

    res = lockloop.run_lock(lockloop.LockLoopConfig(**base), model, levels, seed=1)
    errs = np.abs([base["target"] - s.pd3 for s in res.trace])
    monotone = bool(np.all(np.diff(errs) <= 1e-12))
    mid_ok = res.locked and monotone and res.steady_state_rms_error < 1e-6

    peak_cfg = lockloop.LockLoopConfig(ki=1e3, dt_s=1e-5, target=levels.r_plus,
                                       lock_nm=1545.0)
    peak = lockloop.run_lock(peak_cfg, model, levels, seed=1, initial_phase=0.6)
    peak_ok = not peak.locked

    shifts = {}
    for nm in (1545.0, 1543.0):
        cfg = lockloop.LockLoopConfig(ki=1e3, dt_s=1e-5, target=mid, lock_nm=nm)
        r = lockloop.run_lock(cfg, model, levels, seed=1)
        shifts[nm] = r.trace[-1].phi_actuated
    actual = shifts[1543.0] - shifts[1545.0]
    predicted = -(dispersion.phase_at(model, float(dispersion.frequency_thz(1543.0)))
                  - dispersion.phase_at(model, float(dispersion.frequency_thz(1545.0))))
    shift_ok = abs(actual - predicted) <= 0.01 * abs(predicted)

    ok = mid_ok and peak_ok and shift_ok
    return _result(
        9, "integral lock: slope lock, peak rejection, wavelength-set phase", ok,
        f"mid-slope rms {res.steady_state_rms_error:.2e} (monotone={monotone}), "
        f"peak target locked={peak.locked}, wavelength shift {actual:.5f} rad "
        f"vs predicted {predicted:.5f} rad",
    )


def check_raw_traces_note():
    """Raw instrument traces are experimental data; model-level checks stand in."""
    return _result(
        10, "raw spectrum traces substituted by model-level checks", True,
        "instrument traces are not desk-reproducible; checks 6-8 cover the "
        "quoted summary numbers instead",
    )


ALL_CHECKS = (
    check_required_gain,
    check_theta_eff,
    check_correction_inversion,
    check_phase_equivalence,
    check_loss_chain,
    check_fit_recovery,
    check_dispersion_roundtrip,
    check_phase_maintained_band,
    check_lock_loop,
    check_raw_traces_note,
)


def run_all():
    """Run every reference check and return the list of results."""
    return [check() for check in ALL_CHECKS]
