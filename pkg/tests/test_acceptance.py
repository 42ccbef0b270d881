"""Acceptance gate: every reference criterion at its stated tolerance.

Each test prints one ``PASS criterion N`` line on success (run with
``pytest -s`` to see them all); a failing assertion is the FAIL line.  The
``opachain replicate-paper`` subcommand renders the same checks as a table.
"""

import math

import numpy as np
import pytest

from opachain import (
    DispersionModel,
    LockLoopConfig,
    LossChain,
    OpaGain,
    QuadLevels,
    SqueezerParams,
    SweepPoint,
    chain_efficiency,
    degradation_phase_dev,
    effective_phase_deviation,
    estimate_dispersion,
    fit,
    frequency_thz,
    infer_stage_efficiency,
    make_grid,
    measured_from_true,
    phase_at,
    phase_maintained_band,
    required_gain,
    run_lock,
    spectrum,
    true_from_measured,
    true_levels,
    variance_at_phase,
)
from opachain import replicate


def _passed(n, detail):
    print(f"PASS criterion {n}: {detail}")


def test_criterion_1_finite_gain_worked_cases():
    g1 = required_gain(QuadLevels.from_db(-3.0, 3.0), digit_tolerance_db=0.05)
    assert abs(g1.g - 20.0) <= 1.0
    assert round(g1.db) == 13
    g2 = required_gain(QuadLevels.from_db(-3.0, 15.0), digit_tolerance_db=0.05)
    assert abs(g2.g - 80.0) <= 3.0
    assert round(g2.db) == 19
    _passed(1, f"smallest gains G={g1.g:.2f} (13 dB) and G={g2.g:.2f} (19 dB)")


def test_criterion_2_effective_phase_deviation():
    deg = math.degrees(effective_phase_deviation(OpaGain(200.0)))
    assert deg == pytest.approx(0.286, abs=0.01)
    assert f"{deg:.1f}" == "0.3"
    _passed(2, f"theta_eff(G=200) = {deg:.4f} deg, displays 0.3 deg")


def test_criterion_3_correction_inversion_10k():
    rng = np.random.default_rng(20260809)
    worst = 0.0
    for _ in range(10_000):
        rm = 10.0 ** rng.uniform(-2, 0)
        rp = rm * 10.0 ** rng.uniform(0, 3)
        g = 10.0 ** rng.uniform(math.log10(1.01), 3)
        lv = QuadLevels(rm, rp)
        gain = OpaGain(g)
        back = true_from_measured(measured_from_true(lv, gain), gain)
        worst = max(worst, abs(back.r_minus - rm) / rm, abs(back.r_plus - rp) / rp)
    assert worst < 1e-9
    _passed(3, f"round-trip worst relative error {worst:.3e} over 10^4 triples")


def test_criterion_4_phase_deviation_equivalence_10k():
    rng = np.random.default_rng(20260810)
    worst = 0.0
    for _ in range(10_000):
        rm = 10.0 ** rng.uniform(-2, 0)
        rp = rm * 10.0 ** rng.uniform(0, 3)
        g = 10.0 ** rng.uniform(0, 3)
        lv = QuadLevels(rm, rp)
        gain = OpaGain(g)
        vx, _ = variance_at_phase(lv, effective_phase_deviation(gain))
        meas = measured_from_true(lv, gain).r_minus_meas
        worst = max(worst, abs(meas - vx) / vx)
    assert worst < 1e-12
    _passed(4, f"equivalence worst relative difference {worst:.3e} over 10^4 triples")


def test_criterion_5_loss_chain_arithmetic():
    eta = chain_efficiency(LossChain((("beamsplitter", 0.86), ("circuit", 0.98),
                                      ("detector", 0.93))))
    assert eta == pytest.approx(0.7836, abs=2.5e-4)
    assert round(100 * eta) == 78
    stage = infer_stage_efficiency(1.0 - 0.487, 1.0 - 0.27)
    assert stage == pytest.approx(0.703, abs=5e-4)
    assert f"{stage:.2f}" == "0.70"
    source_loss = 100.0 * (1.0 - infer_stage_efficiency(1.0 - 0.425, eta))
    assert source_loss == pytest.approx(26.6, abs=0.05)
    assert abs(source_loss - 27.0) <= 1.0
    _passed(5, f"chain {100 * eta:.2f}%, stage {stage:.3f}, "
               f"source loss {source_loss:.1f}%")


def test_criterion_6_fit_recovery():
    pumps = (0.05, 0.1, 0.2)
    synthetic = []
    for p in pumps:
        lv = true_levels(SqueezerParams(19.1, 0.425, p))
        synthetic.append(SweepPoint(p, lv.r_minus_db, lv.r_plus_db))
    exact = fit(synthetic)
    assert exact.a_per_w == pytest.approx(19.1, rel=1e-5)
    assert exact.loss == pytest.approx(0.425, rel=1e-5)

    measured = fit([SweepPoint(0.05, -2.7, 5.6), SweepPoint(0.1, -3.2, 9.9),
                    SweepPoint(0.2, -2.2, 14.9)])
    assert abs(measured.a_per_w - 20.1) / 20.1 <= 0.10
    assert abs(measured.loss - 0.487) <= 0.03
    _passed(6, f"noiseless exact; measured sweep a={measured.a_per_w:.2f} /W, "
               f"L={measured.loss:.3f}")


def test_criterion_7_dispersion_round_trip():
    grid = make_grid(1500.0, 1590.0, 0.1)
    levels = QuadLevels.from_db(-3.2, 9.9)
    estimates = {}
    for d in (0.0045, 0.033):
        trace = spectrum(DispersionModel(d, 194.0, phi0_rad=0.7), levels, grid)
        est = estimate_dispersion(trace, 194.0)
        assert abs(est - d) / d <= 0.03
        estimates[d] = est
    _passed(7, "synthesized spectra re-estimated: "
               + ", ".join(f"{d} -> {e:.5f}" for d, e in estimates.items()))


def test_criterion_8_phase_maintained_band():
    levels = QuadLevels.from_db(-1.2, 7.1)
    budget = degradation_phase_dev(levels, degrade_db=1.0)
    f_lock = float(frequency_thz(1545.0))
    _, hi_compensated = phase_maintained_band(
        DispersionModel(0.0045, 194.0), f_lock, budget)
    _, hi_uncompensated = phase_maintained_band(
        DispersionModel(0.033, 194.0), f_lock, budget)
    assert hi_compensated - f_lock >= 1.0
    assert hi_uncompensated - f_lock < 1.0
    _passed(8, f"extent toward shorter wavelengths {hi_compensated - f_lock:.3f} THz "
               f"(compensated) vs {hi_uncompensated - f_lock:.3f} THz (uncompensated)")


def test_criterion_9_lock_loop():
    levels = QuadLevels.from_db(-3.2, 9.9)
    model = DispersionModel(0.033, 194.0)
    mid = 0.5 * (levels.r_minus + levels.r_plus)

    res = run_lock(LockLoopConfig(ki=1e3, dt_s=1e-5, target=mid, lock_nm=1545.0),
                   model, levels, seed=1)
    errors = np.abs([mid - s.pd3 for s in res.trace])
    assert res.locked
    assert np.all(np.diff(errors) <= 1e-12)
    assert res.steady_state_rms_error < 1e-6

    peak = run_lock(LockLoopConfig(ki=1e3, dt_s=1e-5, target=levels.r_plus,
                                   lock_nm=1545.0),
                    model, levels, seed=1, initial_phase=0.6)
    assert not peak.locked

    steady = {}
    for nm in (1545.0, 1543.0):
        r = run_lock(LockLoopConfig(ki=1e3, dt_s=1e-5, target=mid, lock_nm=nm),
                     model, levels, seed=1)
        assert r.locked
        steady[nm] = r.trace[-1].phi_actuated
    actual = steady[1543.0] - steady[1545.0]
    predicted = -(phase_at(model, float(frequency_thz(1543.0)))
                  - phase_at(model, float(frequency_thz(1545.0))))
    assert actual == pytest.approx(predicted, rel=0.01)
    _passed(9, f"mid-slope rms {res.steady_state_rms_error:.2e}, peak rejected, "
               f"wavelength shift {actual:.5f} rad vs {predicted:.5f} rad predicted")


def test_criterion_10_model_level_substitution():
    # Raw instrument traces are experimental data and not desk-reproducible;
    # criteria 6-8 stand in for them at the model level.  Assert the stand-ins
    # exist and that the composite reference table agrees.
    results = replicate.run_all()
    assert [r.check_id for r in results] == list(range(1, 11))
    assert all(r.passed for r in results)
    _passed(10, "model-level checks 6-8 substitute for raw traces; "
                "composite table all green")
