"""Observables, time averages, and sweep machinery."""

import numpy as np
import pytest

from dlesim.analysis import (SweepResult, default_frequency_grid,
                             find_resonance, p_excited, photon_distribution,
                             sweep, time_avg_frequencies)
from dlesim.circuit import (Regime, default_constants, instant_params,
                            limit_params)
from dlesim.drive import DriveKind, DriveWaveform, phase_at
from dlesim.hamiltonian import build_space
from dlesim.propagate import EvolutionConfig, PropagationError

S_SQUARE = 13.746674465744924
S_SINUSOID = 13.897510574157954


def basis_state(n_max, q, n):
    psi = np.zeros(2 * (n_max + 1), dtype=complex)
    psi[q * (n_max + 1) + n] = 1.0
    return psi


def test_p_excited_examples():
    assert p_excited(basis_state(4, 0, 0)) == 0.0
    both = (basis_state(4, 0, 0) + basis_state(4, 1, 1)) / np.sqrt(2.0)
    assert p_excited(both) == pytest.approx(0.5, rel=1e-12)


def test_p_excited_completeness():
    rng = np.random.default_rng(5)
    psi = rng.normal(size=18) + 1j * rng.normal(size=18)
    psi /= np.linalg.norm(psi)
    p_ground = np.sum(np.abs(psi[:9]) ** 2)
    assert p_excited(psi) + p_ground == pytest.approx(1.0, abs=1e-12)


def test_photon_distribution_examples():
    stats = photon_distribution(basis_state(4, 0, 0))
    assert stats.p_n[0] == 1.0 and stats.p_any == 0.0 and stats.p_e1 == 0.0
    stats = photon_distribution(basis_state(4, 1, 1))
    assert stats.p_n[1] == 1.0 and stats.p_e1 == 1.0
    both = (basis_state(4, 0, 0) + basis_state(4, 1, 1)) / np.sqrt(2.0)
    stats = photon_distribution(both)
    assert stats.p_e1 == pytest.approx(0.5, rel=1e-12)


def test_photon_distribution_closure():
    rng = np.random.default_rng(9)
    for _ in range(10):
        psi = rng.normal(size=14) + 1j * rng.normal(size=14)
        psi /= np.linalg.norm(psi)
        stats = photon_distribution(psi)
        assert stats.p_n.sum() == pytest.approx(1.0, abs=1e-9)
        assert stats.p_any == pytest.approx(1.0 - stats.p_n[0], abs=1e-12)


def test_time_avg_constant_drive():
    c = default_constants()
    drive = DriveWaveform(DriveKind.CONSTANT, k=c.k, fixed_phase=1.3)
    f0, fr = time_avg_frequencies(c, drive)
    p = instant_params(c, 1.3)
    assert f0 == p.f_0 and fr == p.f_r


def test_time_avg_square_exact_mean():
    c = default_constants()
    f0, fr = time_avg_frequencies(c, DriveWaveform(DriveKind.SQUARE, f_s=3.0, k=c.k))
    pt = limit_params(c, Regime.TRANSVERSE)
    pl = limit_params(c, Regime.LONGITUDINAL)
    assert f0 == pytest.approx(0.5 * (pt.f_0 + pl.f_0), rel=1e-15)
    assert fr == pytest.approx(0.5 * (pt.f_r + pl.f_r), rel=1e-15)
    assert f0 + fr == pytest.approx(S_SQUARE, rel=1e-12)


def test_time_avg_sinusoid_against_dense_quadrature():
    # periodic trapezoid oracle on a dense grid; spectrally accurate here
    c = default_constants()
    drive = DriveWaveform(DriveKind.SINUSOIDAL, f_s=2.0, k=c.k)
    f0, fr = time_avg_frequencies(c, drive)
    ts = np.linspace(0.0, drive.period, 8193)
    f0s, frs = np.empty(ts.size), np.empty(ts.size)
    for i, phi in enumerate(phase_at(drive, ts)):
        p = instant_params(c, float(phi))
        f0s[i], frs[i] = p.f_0, p.f_r
    assert f0 == pytest.approx(np.trapezoid(f0s, ts) / drive.period, rel=1e-9)
    assert fr == pytest.approx(np.trapezoid(frs, ts) / drive.period, rel=1e-9)
    assert f0 + fr == pytest.approx(S_SINUSOID, abs=1e-6)


def test_time_avg_independent_of_f_s():
    c = default_constants()
    a = time_avg_frequencies(c, DriveWaveform(DriveKind.SINUSOIDAL, f_s=2.0, k=c.k))
    b = time_avg_frequencies(c, DriveWaveform(DriveKind.SINUSOIDAL, f_s=17.0, k=c.k))
    assert a == pytest.approx(b, rel=1e-12)


def test_default_grid_layout():
    c = default_constants()
    grid = default_frequency_grid(c, DriveKind.SQUARE)
    assert grid.size == 101
    assert grid[50] == pytest.approx(S_SQUARE, rel=1e-12)
    assert grid[0] == pytest.approx(0.75 * S_SQUARE, rel=1e-12)
    assert grid[-1] == pytest.approx(1.25 * S_SQUARE, rel=1e-12)
    spacing = np.diff(grid)
    assert spacing == pytest.approx(0.005 * S_SQUARE, rel=1e-9)


def synthetic_result(peaks):
    f = np.linspace(10.0, 17.0, len(peaks))
    p_e = np.array(peaks)[None, :].repeat(3, axis=0)
    zeros = np.zeros_like(p_e)
    return SweepResult(f_s=f, times=np.arange(3.0), p_e=p_e, p_ph=zeros,
                       p_e1=zeros, drive_kind=DriveKind.SQUARE, n_max=8,
                       t_total=1.0, fbar_0=6.0, fbar_r=7.0)


def test_find_resonance_synthetic_peak():
    res = synthetic_result([0.0, 0.1, 0.9, 0.2, 0.0])
    assert find_resonance(res) == res.f_s[2]


def test_find_resonance_tie_prefers_lower():
    res = synthetic_result([0.1, 0.9, 0.3, 0.9, 0.1])
    assert find_resonance(res) == res.f_s[1]


@pytest.fixture(scope="module")
def short_square_sweep():
    c = default_constants()
    grid = default_frequency_grid(c, DriveKind.SQUARE)[[44, 47, 50, 53, 56]]
    config = EvolutionConfig(t_total=400.0, dt=1e-4, sample_stride=20_000)
    return sweep(c, DriveKind.SQUARE, grid, config=config, n_max=6), grid


def test_short_sweep_shapes_and_bounds(short_square_sweep):
    result, grid = short_square_sweep
    assert result.f_s.shape == (5,)
    assert result.p_e.shape == (result.times.size, 5)
    for surf in (result.p_e, result.p_ph, result.p_e1):
        assert surf.min() >= 0.0
        assert surf.max() <= 1.0 + 1e-9
    assert np.all(np.diff(result.f_s) > 0)
    assert result.fbar_0 + result.fbar_r == pytest.approx(S_SQUARE, rel=1e-12)


def test_short_sweep_peaks_at_center(short_square_sweep):
    result, grid = short_square_sweep
    assert find_resonance(result) == grid[2]
    peak = result.p_e.max(axis=0)
    assert peak[2] > 10.0 * peak.max(where=np.arange(5) != 2, initial=0.0)


def test_sweep_thread_count_invariance(short_square_sweep):
    result, grid = short_square_sweep
    c = default_constants()
    config = EvolutionConfig(t_total=400.0, dt=1e-4, sample_stride=20_000)
    again = sweep(c, DriveKind.SQUARE, grid, config=config, n_max=6, threads=1)
    np.testing.assert_allclose(again.p_e, result.p_e, atol=1e-12)
    repeat = sweep(c, DriveKind.SQUARE, grid, config=config, n_max=6)
    assert np.array_equal(repeat.p_e, result.p_e)


def test_sweep_error_tagged_with_frequency():
    c = default_constants()
    config = EvolutionConfig(t_total=50.0, dt=1e-4, sample_stride=20_000,
                             renorm_tol=1e-16)
    with pytest.raises(PropagationError, match="f_s"):
        sweep(c, DriveKind.SQUARE, np.array([13.0, 13.7]), config=config,
              n_max=4)


def test_sweep_input_validation():
    c = default_constants()
    with pytest.raises(ValueError):
        sweep(c, DriveKind.SQUARE, np.array([]))
    with pytest.raises(ValueError):
        sweep(c, DriveKind.SQUARE, np.array([13.0, 12.0]))
    with pytest.raises(ValueError):
        sweep(c, DriveKind.CONSTANT, np.array([13.0, 14.0]))
