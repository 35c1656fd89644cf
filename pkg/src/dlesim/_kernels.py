"""JIT-compiled inner loops for time stepping.

The classic RK4 integrator is the throughput bottleneck of frequency sweeps
(2e7 steps per grid point at the default dt), so it runs as a numba kernel
that advances a whole batch of switching frequencies at once: the frequency
axis is the contiguous innermost axis, which turns every inner loop into a
SIMD loop.  Lanes never mix, so each lane reproduces exactly what a
single-frequency run computes.

State is stored split (re, im) with shape (dim, n_lanes).  The Hamiltonian
is applied from a row-compressed sparse layout of the six coefficient basis
matrices (see hamiltonian.HilbertSpace.h_basis); entry weights are
coefficient[oid[e]] * val[e], with 2*pi prefolded into val so that the
derivative is k = -i * (2*pi*H/h) * psi directly.

Two entry points: rk4_batch integrates a uniform step grid and samples on a
stride clock (smooth drives); rk4_span advances the state in place over one
piecewise-constant segment and leaves sampling to the caller.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .circuit import _params_at

_FM = {"contract", "nsz"}


def coo_rows(h_basis: np.ndarray):
    """Row-compressed joint sparsity structure of the Hamiltonian basis.

    Returns (row_ptr, cols, vals_2pi, op_id) with entries sorted by row; the
    basis-matrix values carry the 2*pi derivative prefactor.
    """
    n_ops, dim, _ = h_basis.shape
    rows, cols, vals, oid = [], [], [], []
    for i in range(n_ops):
        r, c = np.nonzero(h_basis[i])
        rows.append(r)
        cols.append(c)
        vals.append(h_basis[i][r, c])
        oid.append(np.full(r.size, i))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    oid = np.concatenate(oid)
    order = np.lexsort((cols, rows))
    rows, cols, vals, oid = rows[order], cols[order], vals[order], oid[order]
    row_ptr = np.searchsorted(rows, np.arange(dim + 1)).astype(np.int64)
    return row_ptr, cols.astype(np.int64), 2.0 * np.pi * vals, oid.astype(np.int64)


@njit(cache=True, inline="always")
def _phase_of(drive_code, amp, f_s, fixed_phi, t):
    # mirrors drive.phase_at for scalar t
    if drive_code == 0:      # square wave, theta(0) = 0
        return amp if np.sin(2.0 * np.pi * f_s * t) > 0.0 else 0.0
    elif drive_code == 1:    # sinusoidal
        return amp * (0.5 + 0.5 * np.cos(2.0 * np.pi * f_s * t))
    return fixed_phi


@njit(cache=True, inline="always")
def _fill_coefs(t, fgrid, drive_code, fixed_phi, pack, cf):
    amp = pack[10]
    for f in range(fgrid.size):
        phi = _phase_of(drive_code, amp, fgrid[f], fixed_phi, t)
        eta, estar, f_r, f_0, g_xx, g_zz, g_zx, g_xz = _params_at(pack, phi)
        cf[0, f] = f_r
        cf[1, f] = f_0
        cf[2, f] = g_xx
        cf[3, f] = g_zz
        cf[4, f] = g_zx
        cf[5, f] = g_xz


@njit(cache=True, nogil=True, fastmath=_FM)
def _derivative(row_ptr, cols, vals, oid, cf, xr, xi, kr, ki):
    # k = -i * (2*pi*H) x, split into re/im; vals carry the 2*pi factor
    dim, n_f = xr.shape
    for j in range(dim):
        ar = kr[j]
        ai = ki[j]
        for f in range(n_f):
            ar[f] = 0.0
            ai[f] = 0.0
        for e in range(row_ptr[j], row_ptr[j + 1]):
            v = vals[e]
            cc = cf[oid[e]]
            pr = xr[cols[e]]
            pi = xi[cols[e]]
            for f in range(n_f):
                ar[f] += v * cc[f] * pi[f]
                ai[f] -= v * cc[f] * pr[f]


@njit(cache=True, nogil=True, fastmath=_FM, inline="always")
def _rk4_step(t, dt, fgrid, drive_code, fixed_phi, pack,
              row_ptr, cols, vals, oid, psi_re, psi_im,
              cf, k1r, k1i, k2r, k2i, k3r, k3i, k4r, k4i, tr, ti):
    dim, n_f = psi_re.shape
    _fill_coefs(t, fgrid, drive_code, fixed_phi, pack, cf)
    _derivative(row_ptr, cols, vals, oid, cf, psi_re, psi_im, k1r, k1i)
    _fill_coefs(t + 0.5 * dt, fgrid, drive_code, fixed_phi, pack, cf)
    for j in range(dim):
        for f in range(n_f):
            tr[j, f] = psi_re[j, f] + 0.5 * dt * k1r[j, f]
            ti[j, f] = psi_im[j, f] + 0.5 * dt * k1i[j, f]
    _derivative(row_ptr, cols, vals, oid, cf, tr, ti, k2r, k2i)
    for j in range(dim):
        for f in range(n_f):
            tr[j, f] = psi_re[j, f] + 0.5 * dt * k2r[j, f]
            ti[j, f] = psi_im[j, f] + 0.5 * dt * k2i[j, f]
    _derivative(row_ptr, cols, vals, oid, cf, tr, ti, k3r, k3i)
    _fill_coefs(t + dt, fgrid, drive_code, fixed_phi, pack, cf)
    for j in range(dim):
        for f in range(n_f):
            tr[j, f] = psi_re[j, f] + dt * k3r[j, f]
            ti[j, f] = psi_im[j, f] + dt * k3i[j, f]
    _derivative(row_ptr, cols, vals, oid, cf, tr, ti, k4r, k4i)
    sixth = dt / 6.0
    for j in range(dim):
        for f in range(n_f):
            psi_re[j, f] += sixth * (k1r[j, f] + 2.0 * k2r[j, f]
                                     + 2.0 * k3r[j, f] + k4r[j, f])
            psi_im[j, f] += sixth * (k1i[j, f] + 2.0 * k2i[j, f]
                                     + 2.0 * k3i[j, f] + k4i[j, f])


@njit(cache=True, nogil=True, fastmath=_FM)
def rk4_batch(fgrid, drive_code, fixed_phi, pack, n_steps, dt, stride,
              row_ptr, cols, vals, oid, psi_re, psi_im,
              out, nrm, renorm_tol, status):
    """Integrate n_steps uniform RK4 steps from t = 0, sampling at every
    stride-th step and at the final step.

    If the norm of any lane drifts from 1 by more than renorm_tol at a
    sample, fills status = (lane, sample index) and returns early; status
    stays (-1, -1) on success.  Returns the number of samples written.
    """
    n_f = fgrid.size
    dim = psi_re.shape[0]
    cf = np.empty((6, n_f))
    k1r = np.empty((dim, n_f)); k1i = np.empty((dim, n_f))
    k2r = np.empty((dim, n_f)); k2i = np.empty((dim, n_f))
    k3r = np.empty((dim, n_f)); k3i = np.empty((dim, n_f))
    k4r = np.empty((dim, n_f)); k4i = np.empty((dim, n_f))
    tr = np.empty((dim, n_f)); ti = np.empty((dim, n_f))
    n_s = 0
    for i in range(n_steps + 1):
        if i % stride == 0 or i == n_steps:
            for j in range(dim):
                for f in range(n_f):
                    out[n_s, f, j] = psi_re[j, f] + 1j * psi_im[j, f]
            for f in range(n_f):
                acc = 0.0
                for j in range(dim):
                    acc += psi_re[j, f] ** 2 + psi_im[j, f] ** 2
                nrm[n_s, f] = np.sqrt(acc)
            for f in range(n_f):
                if np.abs(nrm[n_s, f] - 1.0) > renorm_tol:
                    status[0] = f
                    status[1] = n_s
                    return n_s + 1
            n_s += 1
        if i == n_steps:
            break
        _rk4_step(i * dt, dt, fgrid, drive_code, fixed_phi, pack,
                  row_ptr, cols, vals, oid, psi_re, psi_im,
                  cf, k1r, k1i, k2r, k2i, k3r, k3i, k4r, k4i, tr, ti)
    return n_s


@njit(cache=True, nogil=True, fastmath=_FM)
def rk4_span(t0, n_steps, dt, dt_last, fgrid, drive_code, fixed_phi, pack,
             row_ptr, cols, vals, oid, psi_re, psi_im):
    """Advance the state in place over n_steps steps of dt from t0,
    followed by one step of dt_last if dt_last > 0 (partial tail of a
    piecewise-constant segment).  No sampling, no norm checks."""
    n_f = fgrid.size
    dim = psi_re.shape[0]
    cf = np.empty((6, n_f))
    k1r = np.empty((dim, n_f)); k1i = np.empty((dim, n_f))
    k2r = np.empty((dim, n_f)); k2i = np.empty((dim, n_f))
    k3r = np.empty((dim, n_f)); k3i = np.empty((dim, n_f))
    k4r = np.empty((dim, n_f)); k4i = np.empty((dim, n_f))
    tr = np.empty((dim, n_f)); ti = np.empty((dim, n_f))
    for i in range(n_steps):
        _rk4_step(t0 + i * dt, dt, fgrid, drive_code, fixed_phi, pack,
                  row_ptr, cols, vals, oid, psi_re, psi_im,
                  cf, k1r, k1i, k2r, k2i, k3r, k3i, k4r, k4i, tr, ti)
    if dt_last > 0.0:
        _rk4_step(t0 + n_steps * dt, dt_last, fgrid, drive_code, fixed_phi,
                  pack, row_ptr, cols, vals, oid, psi_re, psi_im,
                  cf, k1r, k1i, k2r, k2i, k3r, k3i, k4r, k4i, tr, ti)
