import math
from dataclasses import replace

import numpy as np
import pytest

from opachain import (
    DispersionModel,
    DomainError,
    LockLoopConfig,
    QuadLevels,
    pd3_model,
    response_slope,
    run_lock,
    spectrum,
    step,
)
from opachain.lockloop import LockLoopState

LEVELS = QuadLevels.from_db(-3.2, 9.9)
MODEL = DispersionModel(0.033, 194.0)
MID = 0.5 * (LEVELS.r_minus + LEVELS.r_plus)


def make_config(**overrides):
    base = dict(ki=1e3, dt_s=1e-5, target=MID, lock_nm=1545.0)
    base.update(overrides)
    return LockLoopConfig(**base)


def test_pd3_vacuum_reads_one():
    vac = QuadLevels(1.0, 1.0)
    for phi in np.linspace(-3.0, 3.0, 7):
        assert pd3_model(MODEL, vac, 1545.0, phi) == pytest.approx(1.0, rel=1e-15)


def test_pd3_mid_slope_value():
    flat = DispersionModel(0.0, 194.0)
    assert pd3_model(flat, QuadLevels(0.5, 2.0), 1545.0, math.pi / 4) == \
        pytest.approx(1.25, rel=1e-12)


def test_pd3_matches_spectrum_at_lock_wavelength():
    for phi in np.linspace(0.0, math.pi, 9):
        model = DispersionModel(0.033, 194.0, phi0_rad=phi)
        trace = spectrum(model, LEVELS, [1545.0])
        assert pd3_model(MODEL, LEVELS, 1545.0, phi) == pytest.approx(
            float(trace.values[0]), rel=1e-12)


def test_step_fixed_point_at_target():
    cfg = make_config()
    phi = 0.4
    reading = pd3_model(MODEL, LEVELS, cfg.lock_nm, phi)
    cfg = make_config(target=reading)
    state = LockLoopState(0, phi, phi, 0.0, reading)
    after = step(cfg, MODEL, LEVELS, state)
    assert after.integrator == state.integrator
    assert after.phi_actuated == state.phi_actuated
    assert after.pd3 == state.pd3


def test_mid_slope_lock_monotone_and_tight():
    result = run_lock(make_config(), MODEL, LEVELS, seed=1)
    assert result.locked
    assert not result.diverged
    errors = np.abs([MID - s.pd3 for s in result.trace])
    assert np.all(np.diff(errors) <= 1e-12)
    assert result.steady_state_rms_error < 1e-6
    assert result.settle_step is not None
    assert result.settle_step <= make_config().max_steps


def test_settle_time_scales_with_loop_gain():
    slow = run_lock(make_config(ki=0.5e3), MODEL, LEVELS, seed=1)
    fast = run_lock(make_config(ki=2e3), MODEL, LEVELS, seed=1)
    assert slow.locked and fast.locked
    assert fast.settle_step < slow.settle_step


def test_determinism_bitwise():
    cfg = make_config(noise_rms=0.01, drift_rate=0.05)
    a = run_lock(cfg, MODEL, LEVELS, seed=1234)
    b = run_lock(cfg, MODEL, LEVELS, seed=1234)
    assert a.trace == b.trace
    assert a.steady_state_rms_error == b.steady_state_rms_error
    c = run_lock(cfg, MODEL, LEVELS, seed=1235)
    assert c.trace != a.trace


def test_peak_target_never_locks():
    cfg = make_config(target=LEVELS.r_plus)
    result = run_lock(cfg, MODEL, LEVELS, seed=1, initial_phase=0.6)
    assert not result.locked
    assert result.stability_factor == 0.0


def test_target_outside_range_never_locks():
    cfg = make_config(target=LEVELS.r_plus * 1.5)
    result = run_lock(cfg, MODEL, LEVELS, seed=1)
    assert not result.locked
    assert result.stability_factor is None


def test_instability_bound_flags_divergence():
    # ki dt |slope| at the mid-slope point is about 0.093 per unit ki/1e3;
    # 3e4 pushes it to ~2.8, past the discrete-integrator stability limit of 2
    cfg = make_config(ki=3e4)
    result = run_lock(cfg, MODEL, LEVELS, seed=1)
    assert result.stability_factor is not None and result.stability_factor > 2.0
    assert result.diverged
    assert not result.locked
    errors = np.abs([MID - s.pd3 for s in result.trace])
    assert errors[-1] > result.tolerance


def test_stable_gain_just_below_bound():
    cfg = make_config(ki=1.8e4)  # stability factor ~1.7
    result = run_lock(cfg, MODEL, LEVELS, seed=1)
    assert result.stability_factor is not None and result.stability_factor < 2.0
    assert result.locked


def test_noise_and_drift_still_lock():
    cfg = make_config(noise_rms=0.005, drift_rate=0.05, max_steps=4000)
    result = run_lock(cfg, MODEL, LEVELS, seed=77)
    assert result.locked
    assert result.steady_state_rms_error > 0.0


def test_integrator_rejects_step_disturbance():
    cfg = make_config()
    result = run_lock(cfg, MODEL, LEVELS, seed=1)
    assert result.locked
    # inject a sudden 0.2 rad phase jump into the locked plant, then resume
    signed = replace(cfg, ki=abs(cfg.ki) * math.copysign(
        1.0, response_slope(MODEL, LEVELS, cfg.lock_nm, 0.0)))
    state = result.trace[-1]
    state = replace(state, phi_drift=state.phi_drift + 0.2,
                    pd3=pd3_model(MODEL, LEVELS, cfg.lock_nm,
                                  state.phi_actuated + state.phi_drift + 0.2))
    assert abs(cfg.target - state.pd3) > result.tolerance
    for _ in range(2000):
        state = step(signed, MODEL, LEVELS, state)
    assert abs(cfg.target - state.pd3) < result.tolerance
    assert abs(cfg.target - state.pd3) < 1e-6


def test_lock_wavelength_sets_phase():
    results = {}
    for nm in (1545.0, 1543.0, 1541.0):
        cfg = make_config(lock_nm=nm)
        res = run_lock(cfg, MODEL, LEVELS, seed=1)
        assert res.locked
        results[nm] = res.trace[-1].phi_actuated

    def disp_phase(nm):
        from opachain import frequency_thz, phase_at
        return phase_at(MODEL, float(frequency_thz(nm)))

    for nm in (1543.0, 1541.0):
        actual = results[nm] - results[1545.0]
        predicted = -(disp_phase(nm) - disp_phase(1545.0))
        assert actual == pytest.approx(predicted, rel=0.01)


def test_config_validation():
    with pytest.raises(DomainError):
        make_config(dt_s=0.0)
    with pytest.raises(DomainError):
        make_config(max_steps=0)
    with pytest.raises(DomainError):
        make_config(noise_rms=-1.0)
    with pytest.raises(DomainError):
        make_config(tolerance=0.0)
    with pytest.raises(DomainError):
        step(make_config(noise_rms=0.1), MODEL, LEVELS,
             LockLoopState(0, 0.0, 0.0, 0.0, MID), rng=None)
