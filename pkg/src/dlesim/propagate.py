"""Time evolution of the driven circuit.

Two integrators:

* PIECEWISE_EXACT: for piecewise-constant drives (square wave, constant
  phase).  The time axis is split at the drive discontinuities and at the
  sample instants; each constant segment is advanced with the exact unitary
  exp(-2*pi*i*(H/h)*dt) built from a spectral decomposition.  Only a handful
  of distinct Hamiltonians occur (two for the square wave), so propagators
  are cached keyed by (phase value, segment length).

* RK4: classic fixed-step fourth order on d(psi)/dt = -2*pi*i*(H(t)/h)*psi
  for smooth drives, with H reassembled from the instantaneous parameters at
  every stage time.  Runs in a compiled kernel (see _kernels).

Both record samples on the uniform clock dt*sample_stride and log the norm
drift |norm - 1| at every sample; drift beyond renorm_tol is an error, never
silently renormalized.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .circuit import CircuitConstants, instant_params, reduced_pack
from .drive import (DRIVE_CODE, DriveKind, DriveWaveform, discontinuities,
                    is_piecewise_constant, phase_at)
from .hamiltonian import HilbertSpace, assemble

# tolerance for merging a drive switching time with a sample instant, and for
# accepting t_total as an integer number of RK4 steps (ns)
_TIME_SNAP = 1e-9


class PropagationError(RuntimeError):
    """Numerical failure inside evolve (eigendecomposition, bad config)."""


class NormDriftError(PropagationError):
    """State norm drifted beyond the configured tolerance."""


class Method(enum.Enum):
    PIECEWISE_EXACT = "piecewise"
    RK4 = "rk4"


@dataclass(frozen=True)
class EvolutionConfig:
    """Integration settings.

    ``dt`` is the RK4 step; for PIECEWISE_EXACT it has no integrator role
    and only sets the sampling clock dt*sample_stride together with
    ``sample_stride``.
    """

    t_total: float
    dt: float = 1e-4
    sample_stride: int = 20_000
    method: Method | None = None     # None: piecewise if drive allows, else RK4
    renorm_tol: float = 1e-8
    cache_propagators: bool = True

    def __post_init__(self):
        if not self.t_total > 0.0:
            raise ValueError(f"t_total must be positive, got {self.t_total}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.sample_stride < 1:
            raise ValueError(f"sample_stride must be >= 1, got {self.sample_stride}")
        if not self.renorm_tol > 0.0:
            raise ValueError(f"renorm_tol must be positive, got {self.renorm_tol}")

    @property
    def sample_dt(self) -> float:
        return self.dt * self.sample_stride


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled evolution: times (ns), states (n_samples, dim), |norm - 1|."""

    times: np.ndarray
    states: np.ndarray
    norm_drift: np.ndarray


def resolve_method(config: EvolutionConfig, drive: DriveWaveform) -> Method:
    if config.method is None:
        return Method.PIECEWISE_EXACT if is_piecewise_constant(drive) else Method.RK4
    if config.method is Method.PIECEWISE_EXACT and not is_piecewise_constant(drive):
        raise PropagationError(
            f"PIECEWISE_EXACT requires a piecewise-constant drive, got {drive.kind.value}")
    return config.method


def _propagator_from_eig(lam: np.ndarray, vec: np.ndarray, delta_t: float,
                         polish: bool = False) -> np.ndarray:
    u = (vec * np.exp(-2j * np.pi * lam * delta_t)) @ vec.conj().T
    if polish:
        # one extended-precision Newton polar step removes the ~1e-16 norm
        # bias of the spectral construction; worthwhile for propagators that
        # are applied tens of thousands of times
        ul = u.astype(np.clongdouble)
        gram = ul.conj().T @ ul
        eye = np.eye(u.shape[0], dtype=np.clongdouble)
        u = (ul @ (1.5 * eye - 0.5 * gram)).astype(np.complex128)
    return u


def expm_step(h: np.ndarray, delta_t: float) -> np.ndarray:
    """Exact unitary propagator exp(-2*pi*i*H*delta_t) of a Hermitian H."""
    try:
        lam, vec = np.linalg.eigh(h)
    except np.linalg.LinAlgError as err:
        raise PropagationError(f"eigendecomposition failed: {err}") from err
    return _propagator_from_eig(lam, vec, delta_t, polish=True)


def _sample_times(config: EvolutionConfig) -> np.ndarray:
    n = int(math.floor(config.t_total / config.sample_dt + _TIME_SNAP))
    times = np.arange(n + 1) * config.sample_dt
    if times[-1] < config.t_total - _TIME_SNAP:
        times = np.append(times, config.t_total)
    else:
        times[-1] = min(times[-1], config.t_total)
    return times


def _check_psi0(psi0: np.ndarray, dim: int) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if psi0.shape != (dim,):
        raise ValueError(f"psi0 must have shape ({dim},), got {psi0.shape}")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-8:
        raise ValueError("psi0 must be normalized")
    return psi0


def evolve(space: HilbertSpace, constants: CircuitConstants,
           drive: DriveWaveform, config: EvolutionConfig,
           psi0: np.ndarray) -> Trajectory:
    """Propagate psi0 over [0, t_total] under the drive; sampled Trajectory."""
    psi0 = _check_psi0(psi0, space.dim)
    method = resolve_method(config, drive)
    if method is Method.PIECEWISE_EXACT:
        return _evolve_piecewise(space, constants, drive, config, psi0)
    if drive.kind is DriveKind.SQUARE:
        # discontinuities are never stepped across: integrate each constant
        # segment separately (RK4 degrades to first order over a jump)
        return _evolve_rk4_segmented(space, constants, drive, config, psi0)
    times, states, drift = rk4_trajectories(
        space, constants, drive.kind, np.array([drive.f_s]),
        drive.fixed_phase, config, psi0)
    return Trajectory(times=times, states=states[:, 0, :], norm_drift=drift[:, 0])


def _event_schedule(drive: DriveWaveform, config: EvolutionConfig):
    """Merged timeline of drive switchings and sample instants.

    Returns (sample_times, event_times, is_sample, segs, phases): segment i
    runs over (event_times[i] - segs[i], event_times[i]) at constant flux
    phase phases[i].  Switching instants that coincide with a sample (within
    the snap tolerance) collapse into the sample; the two nominal segment
    lengths (half period, sampling interval) are made bitwise canonical so
    propagator caching stays compact.
    """
    sample_times = _sample_times(config)
    switches = discontinuities(drive, 0.0, config.t_total)
    if switches.size:
        # the sample grid is uniform except possibly for the final entry
        nearest = np.round(switches / config.sample_dt) * config.sample_dt
        keep = (np.abs(switches - nearest) > _TIME_SNAP) \
            & (np.abs(switches - sample_times[-1]) > _TIME_SNAP)
        switches = switches[keep]
    event_times = np.concatenate([sample_times[1:], switches])
    is_sample = np.zeros(event_times.size, dtype=bool)
    is_sample[:sample_times.size - 1] = True
    order = np.argsort(event_times, kind="stable")
    event_times = event_times[order]
    is_sample = is_sample[order]

    edges = np.concatenate([[0.0], event_times])
    segs = np.diff(edges)
    canonical = [config.sample_dt]
    if drive.kind is DriveKind.SQUARE:
        canonical.append(0.5 / drive.f_s)
    for c in canonical:
        segs[np.abs(segs - c) < _TIME_SNAP * 1e-3] = c
    phases = np.atleast_1d(phase_at(drive, edges[:-1] + 0.5 * segs))
    return sample_times, event_times, is_sample, segs, phases, set(canonical)


def _evolve_piecewise(space, constants, drive, config, psi0) -> Trajectory:
    sample_times, event_times, is_sample, segs, phases, canonical = \
        _event_schedule(drive, config)

    ham_cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    u_cache: dict[tuple[float, float], np.ndarray] = {}

    def eig_of(phi: float):
        eig = ham_cache.get(phi)
        if eig is None:
            h = assemble(space, instant_params(constants, phi))
            try:
                eig = np.linalg.eigh(h)
            except np.linalg.LinAlgError as err:
                raise PropagationError(
                    f"eigendecomposition failed at phi_x={phi}: {err}") from err
            ham_cache[phi] = eig
        return eig

    def segment_propagator(phi: float, seg: float) -> np.ndarray:
        # the nominal segment lengths recur tens of thousands of times and
        # get the polished (bias-free) propagator; one-shot sample-split
        # partials do not need it
        polish = seg in canonical
        if not config.cache_propagators:
            ham_cache.clear()
            lam, vec = eig_of(phi)
            return _propagator_from_eig(lam, vec, seg, polish=polish)
        key = (phi, seg)
        u = u_cache.get(key)
        if u is None:
            lam, vec = eig_of(phi)
            u = _propagator_from_eig(lam, vec, seg, polish=polish)
            u_cache[key] = u
        return u

    psi = psi0.copy()
    n_s = sample_times.size
    states = np.empty((n_s, space.dim), dtype=np.complex128)
    drift = np.empty(n_s)
    states[0] = psi
    drift[0] = abs(np.linalg.norm(psi) - 1.0)
    idx = 1
    for i in range(event_times.size):
        if segs[i] > 0.0:
            psi = segment_propagator(float(phases[i]), float(segs[i])) @ psi
        if is_sample[i]:
            states[idx] = psi
            drift[idx] = abs(np.linalg.norm(psi) - 1.0)
            if drift[idx] > config.renorm_tol:
                raise NormDriftError(
                    f"norm drift {drift[idx]:.3e} > {config.renorm_tol:.1e} "
                    f"at t = {event_times[i]} ns")
            idx += 1
    return Trajectory(times=sample_times, states=states, norm_drift=drift)


def _evolve_rk4_segmented(space, constants, drive, config, psi0) -> Trajectory:
    """RK4 for a piecewise-constant drive, split at every discontinuity.

    Each segment is integrated as a constant-Hamiltonian span (full dt steps
    plus one partial tail step to land exactly on the boundary), so no RK4
    stage ever straddles a switching instant.
    """
    sample_times, event_times, is_sample, segs, phases, _ = \
        _event_schedule(drive, config)
    row_ptr, cols, vals, oid = _kernels.coo_rows(space.h_basis)
    pack = reduced_pack(constants)
    one_lane = np.zeros(1)
    psi_re = psi0.real[:, None].copy()
    psi_im = psi0.imag[:, None].copy()
    n_s = sample_times.size
    states = np.empty((n_s, space.dim), dtype=np.complex128)
    drift = np.empty(n_s)
    states[0] = psi0
    drift[0] = abs(np.linalg.norm(psi0) - 1.0)
    idx = 1
    t0 = 0.0
    for i in range(event_times.size):
        seg = segs[i]
        if seg > 0.0:
            n_full = int(math.floor(seg / config.dt + 1e-12))
            rem = seg - n_full * config.dt
            if rem < 1e-12:
                rem = 0.0
            _kernels.rk4_span(t0, n_full, config.dt, rem, one_lane,
                              2, float(phases[i]), pack,
                              row_ptr, cols, vals, oid, psi_re, psi_im)
        t0 = event_times[i]
        if is_sample[i]:
            psi = psi_re[:, 0] + 1j * psi_im[:, 0]
            states[idx] = psi
            drift[idx] = abs(np.linalg.norm(psi) - 1.0)
            if drift[idx] > config.renorm_tol:
                raise NormDriftError(
                    f"norm drift {drift[idx]:.3e} > {config.renorm_tol:.1e} "
                    f"at t = {event_times[i]} ns")
            idx += 1
    return Trajectory(times=sample_times, states=states, norm_drift=drift)


def _rk4_step_count(config: EvolutionConfig) -> int:
    n_steps = int(round(config.t_total / config.dt))
    if n_steps < 1 or abs(n_steps * config.dt - config.t_total) > _TIME_SNAP:
        raise PropagationError(
            f"t_total = {config.t_total} is not an integer number of RK4 steps "
            f"of dt = {config.dt}")
    return n_steps


def rk4_trajectories(space: HilbertSpace, constants: CircuitConstants,
                     kind, fgrid: np.ndarray, fixed_phase: float,
                     config: EvolutionConfig, psi0: np.ndarray):
    """RK4-propagate one initial state for a batch of switching frequencies.

    Returns (times, states, drift) with states shaped (n_samples, n_lanes,
    dim).  Lanes are independent; batching only widens the SIMD loops.
    Only smooth or constant drives step on the uniform grid; square drives
    go through the segmented integrator (see _evolve_rk4_segmented).
    """
    if kind is DriveKind.SQUARE:
        raise PropagationError(
            "uniform-grid RK4 cannot step across square-wave discontinuities")
    n_steps = _rk4_step_count(config)
    idx = np.arange(0, n_steps + 1, config.sample_stride)
    if idx[-1] != n_steps:
        idx = np.append(idx, n_steps)
    times = idx * config.dt
    n_f = fgrid.size
    row_ptr, cols, vals, oid = _kernels.coo_rows(space.h_basis)
    psi_re = np.repeat(psi0.real[:, None], n_f, axis=1)
    psi_im = np.repeat(psi0.imag[:, None], n_f, axis=1)
    out = np.empty((idx.size, n_f, space.dim), dtype=np.complex128)
    nrm = np.empty((idx.size, n_f))
    status = np.array([-1, -1], dtype=np.int64)
    _kernels.rk4_batch(np.asarray(fgrid, dtype=float), DRIVE_CODE[kind],
                       float(fixed_phase), reduced_pack(constants),
                       n_steps, config.dt, config.sample_stride,
                       row_ptr, cols, vals, oid, psi_re, psi_im,
                       out, nrm, config.renorm_tol, status)
    if status[0] >= 0:
        lane, sample = int(status[0]), int(status[1])
        raise NormDriftError(
            f"norm drift {abs(nrm[sample, lane] - 1.0):.3e} > "
            f"{config.renorm_tol:.1e} at t = {times[sample]} ns "
            f"(f_s = {fgrid[lane]} GHz)")
    return times, out, np.abs(nrm - 1.0)
