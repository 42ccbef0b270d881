import math

import numpy as np
import pytest

from opachain import (
    DomainError,
    MeasuredLevels,
    OpaGain,
    QuadLevels,
    SingularCorrectionError,
    UnphysicalInputError,
    effective_phase_deviation,
    measured_from_true,
    required_gain,
    true_from_measured,
    variance_at_phase,
)


def test_vacuum_is_gain_invariant():
    vac = QuadLevels(1.0, 1.0)
    for g in (0.5, 1.0, 5.0, 200.0):
        meas = measured_from_true(vac, OpaGain(g))
        assert meas.r_minus_meas == pytest.approx(1.0, rel=1e-15)
        assert meas.r_plus_meas == pytest.approx(1.0, rel=1e-15)


def test_worked_case_13db_gain():
    # -3 dB squeezing with +3 dB anti-squeezing read at G = 20
    meas = measured_from_true(QuadLevels.from_db(-3.0, 3.0), OpaGain(20.0))
    assert meas.r_minus_meas == pytest.approx(0.5049131066480742, rel=1e-12)
    assert meas.r_plus_meas == pytest.approx(1.9915364419480777, rel=1e-12)
    assert f"{meas.r_minus_db:.1f}" == "-3.0"


def test_worked_case_19db_gain():
    # -3 dB squeezing with +15 dB anti-squeezing read at G = 80
    meas = measured_from_true(QuadLevels.from_db(-3.0, 15.0), OpaGain(80.0))
    assert meas.r_minus_meas == pytest.approx(0.506049222280304, rel=1e-12)
    assert f"{meas.r_minus_db:.1f}" == "-3.0"


def test_sandwich_and_monotone_in_gain():
    lv = QuadLevels(0.4, 8.0)
    previous = None
    for g in (1.0, 10.0, 100.0, 1e4):
        meas = measured_from_true(lv, OpaGain(g))
        assert lv.r_minus <= meas.r_minus_meas <= meas.r_plus_meas <= lv.r_plus
        if previous is not None:
            assert meas.r_minus_meas <= previous
        previous = meas.r_minus_meas
    assert previous == pytest.approx(lv.r_minus, rel=1e-6)


def test_round_trip_inversion():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        rm = 10.0 ** rng.uniform(-2, 0)
        rp = rm * 10.0 ** rng.uniform(0, 3)
        g = 10.0 ** rng.uniform(math.log10(1.01), 3)
        lv = QuadLevels(rm, rp)
        gain = OpaGain(g)
        back = true_from_measured(measured_from_true(lv, gain), gain)
        assert back.r_minus == pytest.approx(rm, rel=1e-9)
        assert back.r_plus == pytest.approx(rp, rel=1e-9)


def test_correction_fixed_point_and_example():
    vac = true_from_measured(MeasuredLevels(1.0, 1.0), OpaGain(5.0))
    assert vac.r_minus == pytest.approx(1.0, rel=1e-12)
    assert vac.r_plus == pytest.approx(1.0, rel=1e-12)
    # correcting a 4-digit reading at G = 20 lands on the 4-digit true levels
    lv = true_from_measured(MeasuredLevels(0.5049, 1.9916), OpaGain(20.0))
    assert round(lv.r_minus, 4) == 0.5012
    assert round(lv.r_plus, 4) == 1.9953


def test_correction_errors():
    with pytest.raises(SingularCorrectionError):
        true_from_measured(MeasuredLevels(0.5, 2.0), OpaGain(1.0))
    with pytest.raises(UnphysicalInputError):
        true_from_measured(MeasuredLevels(0.001, 10.0), OpaGain(2.0))


def test_effective_phase_deviation_values():
    assert effective_phase_deviation(OpaGain(200.0)) == pytest.approx(
        0.0049999583339583225, rel=1e-12)
    assert math.degrees(effective_phase_deviation(OpaGain(200.0))) == pytest.approx(
        0.2864765102770745, rel=1e-12)
    assert effective_phase_deviation(OpaGain(1.0)) == pytest.approx(
        math.pi / 4, rel=1e-12)
    # G = 20 sits inside the 0.8-4.3 deg range of conventional detection
    deg20 = math.degrees(effective_phase_deviation(OpaGain(20.0)))
    assert deg20 == pytest.approx(2.8624052261117474, rel=1e-12)
    assert 0.8 < deg20 < 4.3


def test_effective_phase_deviation_range():
    for g in 10.0 ** np.linspace(-2, 4, 50):
        theta = effective_phase_deviation(OpaGain(g))
        assert 0.0 < theta <= math.pi / 2


def test_bias_equals_phase_deviation_mixing():
    rng = np.random.default_rng(13)
    for _ in range(500):
        rm = 10.0 ** rng.uniform(-2, 0)
        rp = rm * 10.0 ** rng.uniform(0, 3)
        g = 10.0 ** rng.uniform(0, 3)
        lv = QuadLevels(rm, rp)
        gain = OpaGain(g)
        vx, _ = variance_at_phase(lv, effective_phase_deviation(gain))
        assert measured_from_true(lv, gain).r_minus_meas == pytest.approx(
            vx, rel=1e-13)


def test_required_gain_worked_cases():
    g1 = required_gain(QuadLevels.from_db(-3.0, 3.0))
    assert g1.db == pytest.approx(13.0, abs=1e-9)
    assert abs(g1.g - 20.0) <= 1.0
    g2 = required_gain(QuadLevels.from_db(-3.0, 15.0))
    assert g2.db == pytest.approx(19.0, abs=1e-9)
    assert abs(g2.g - 80.0) <= 3.0


def test_required_gain_meets_tolerance_and_is_minimal():
    lv = QuadLevels.from_db(-3.0, 3.0)

    def bias(g):
        meas = measured_from_true(lv, OpaGain(g))
        return meas.r_minus_db - lv.r_minus_db

    quantized = required_gain(lv, 0.05, db_step=1.0)
    assert bias(quantized.g) <= 0.05
    assert bias(10.0 ** ((quantized.db - 1.0) / 10.0)) > 0.05

    continuous = required_gain(lv, 0.05, db_step=None)
    assert bias(continuous.g) <= 0.05
    assert bias(0.999 * continuous.g) > 0.05
    # frozen continuous bound for this case
    assert continuous.g == pytest.approx(16.0139, abs=1e-3)


def test_required_gain_vacuum_needs_none():
    assert required_gain(QuadLevels(1.0, 1.0), 0.05).g == 1.0


def test_required_gain_unreachable_tolerance():
    with pytest.raises(DomainError):
        required_gain(QuadLevels.from_db(-3.0, 30.0), 1e-13)


def test_gain_validation():
    with pytest.raises(DomainError):
        OpaGain(0.0)
    with pytest.raises(DomainError):
        OpaGain(-2.0)
    assert OpaGain.from_db(13.0).g == pytest.approx(19.952623149688797, rel=1e-12)
    with pytest.raises(DomainError):
        MeasuredLevels(2.0, 1.0)
