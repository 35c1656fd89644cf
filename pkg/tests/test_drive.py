"""Flux-phase schedule behavior."""

import numpy as np
import pytest
from hypothesis import given, assume, strategies as st

from dlesim.drive import (DriveKind, DriveWaveform, discontinuities,
                          is_piecewise_constant, phase_at)


def square(f_s=2.0, k=9):
    return DriveWaveform(DriveKind.SQUARE, f_s=f_s, k=k)


def sinusoid(f_s=2.0, k=9):
    return DriveWaveform(DriveKind.SINUSOIDAL, f_s=f_s, k=k)


def test_square_quarter_period_is_high():
    d = square()
    assert phase_at(d, 0.25 * d.period) == d.amplitude


def test_square_starts_at_zero_instant():
    # theta(0) = 0 exactly at t = 0; the first half-period then sits at the
    # amplitude (longitudinal set-point)
    d = square()
    assert phase_at(d, 0.0) == 0.0
    assert phase_at(d, 1e-9) == d.amplitude


def test_sinusoid_extremes():
    d = sinusoid(f_s=2.0)
    assert phase_at(d, 0.0) == d.amplitude
    assert phase_at(d, 0.5 * d.period) == pytest.approx(0.0, abs=1e-12)
    assert phase_at(d, d.period) == pytest.approx(d.amplitude, rel=1e-12)


def test_sinusoid_rise_fall_half_period():
    # extremes alternate every T_s/2: fall (amp -> 0) then rise (0 -> amp)
    d = sinusoid(f_s=4.0)
    t_fall = 0.5 * d.period - 0.0
    t_rise = d.period - 0.5 * d.period
    assert t_rise == t_fall == 0.5 * d.period


def test_constant_phase():
    d = DriveWaveform(DriveKind.CONSTANT, fixed_phase=3.0)
    assert phase_at(d, 0.0) == 3.0
    assert phase_at(d, 17.3) == 3.0
    assert discontinuities(d, 0.0, 100.0).size == 0


def test_discontinuities_one_ghz():
    d = square(f_s=1.0)
    np.testing.assert_allclose(discontinuities(d, 0.0, 1.0), [0.5])


def test_discontinuities_two_ghz():
    d = square(f_s=2.0)
    np.testing.assert_allclose(discontinuities(d, 0.0, 1.0), [0.25, 0.5, 0.75])


def test_discontinuities_strictly_inside():
    d = square(f_s=2.0)
    times = discontinuities(d, 0.25, 0.75)
    np.testing.assert_allclose(times, [0.5])


def test_discontinuities_smooth_empty():
    assert discontinuities(sinusoid(), 0.0, 10.0).size == 0


def test_discontinuities_rejects_bad_window():
    with pytest.raises(ValueError):
        discontinuities(square(), 1.0, 1.0)


def test_piecewise_constant_flags():
    assert is_piecewise_constant(square())
    assert not is_piecewise_constant(sinusoid())
    assert is_piecewise_constant(DriveWaveform(DriveKind.CONSTANT))


def test_square_duty_cycle_half():
    # one period splits at exactly T_s/2; the first half sits at amplitude,
    # the second at zero, so the high measure is exactly half a period
    d = square(f_s=2.0)
    inner = discontinuities(d, 0.0, d.period)
    np.testing.assert_allclose(inner, [0.5 * d.period])
    assert phase_at(d, 0.25 * d.period) == d.amplitude
    assert phase_at(d, 0.75 * d.period) == 0.0
    t = np.linspace(0.0, d.period, 20001)[:-1]
    frac = np.mean(phase_at(d, t) == d.amplitude)
    assert frac == pytest.approx(0.5, abs=1e-3)


@given(st.floats(min_value=0.0, max_value=50.0, allow_nan=False),
       st.floats(min_value=0.1, max_value=20.0, allow_nan=False))
def test_square_periodic_and_bounded(t, f_s):
    d = square(f_s=f_s)
    p = phase_at(d, t)
    assert p in (0.0, d.amplitude)
    # stay away from the switching knife edge where one period of float
    # rounding can flip the sign of sin
    assume(abs(np.sin(2.0 * np.pi * f_s * t)) > 1e-6)
    assert phase_at(d, t + d.period) == p


@given(st.floats(min_value=0.0, max_value=50.0, allow_nan=False))
def test_sinusoid_periodic_and_bounded(t):
    d = sinusoid(f_s=3.0)
    p = phase_at(d, t)
    assert 0.0 <= p <= d.amplitude
    assert phase_at(d, t + d.period) == pytest.approx(p, abs=1e-9)


def test_periodic_drive_needs_positive_frequency():
    with pytest.raises(ValueError):
        DriveWaveform(DriveKind.SQUARE, f_s=0.0)
    with pytest.raises(ValueError):
        DriveWaveform(DriveKind.SINUSOIDAL, f_s=-1.0)
