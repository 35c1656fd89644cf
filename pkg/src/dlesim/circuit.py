"""Flux-dependent circuit parameters of the tunable qubit-resonator device.

The device is a qubit junction (Josephson energy E_Jq, capacitance C_q)
coupled to an LC resonator (C, L) through two branches of k junctions each
(E_J1, E_J2), threaded by an external magnetic flux.  The external flux is
handled everywhere as the dimensionless phase ``phi_x = 2*pi*Phi_x/Phi_0``;
it enters all expressions through cos(phi_x/k) and sin(phi_x/k).  At
phi_x = 0 the qubit-resonator coupling is transverse (sigma_x type), at
phi_x = k*pi/2 it is longitudinal (sigma_z type).

Unit conventions, used consistently across the package:

* energies are stored as E/h in GHz,
* frequencies are ordinary (cycles) in GHz,
* time is in ns,
* capacitances in fF and inductances in nH at the API surface.

Physical constants are CODATA exact values and are not configurable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

H_PLANCK = 6.62607015e-34    # J s (exact)
E_CHARGE = 1.602176634e-19   # C (exact)
HBAR = H_PLANCK / (2.0 * math.pi)
PHI_0 = H_PLANCK / (2.0 * E_CHARGE)   # flux quantum h/2e, Wb

_HALF_PI = 0.5 * math.pi


class UnphysicalParamsError(ValueError):
    """Raised when a parameter set leaves the physical operating regime."""


def flux_amplitude(k: int) -> float:
    """Flux-phase amplitude k*pi/2 of the switching drive.

    All modules derive the set-point value from this helper so that the
    float is bit-identical everywhere (drive, parameter evaluation, tests).
    """
    return k * _HALF_PI


@dataclass(frozen=True)
class CircuitConstants:
    """Fixed lumped-element parameters of the circuit.

    Josephson energies are E/h in GHz, capacitances in fF, inductance in nH.
    The physical constants ride along as read-only fields.
    """

    k: int = 9
    E_Jq: float = 10.0
    E_J1: float = 81.6
    E_J2: float = 78.4
    C: float = 102.0
    C_q: float = 60.0
    L: float = 5.0
    h_planck: float = field(default=H_PLANCK, init=False)
    hbar: float = field(default=HBAR, init=False)
    e_charge: float = field(default=E_CHARGE, init=False)
    Phi0: float = field(default=PHI_0, init=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"junction count k must be >= 1, got {self.k}")
        for name in ("E_Jq", "E_J1", "E_J2", "C", "C_q", "L"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be strictly positive, got {v}")


@dataclass(frozen=True)
class InstantParams:
    """The eight flux-dependent Hamiltonian parameters at one instant.

    ``eta`` is dimensionless; ``E_c`` and ``E_Jq_star`` are E/h in GHz;
    ``f_r``, ``f_0`` and the four couplings are ordinary frequencies in GHz.
    """

    eta: float
    E_c: float
    E_Jq_star: float
    f_r: float
    f_0: float
    g_xx: float
    g_zz: float
    g_zx: float
    g_xz: float

    def __post_init__(self):
        # eta <= -1 would make the resonator frequency imaginary
        if not self.eta > -1.0:
            raise UnphysicalParamsError(f"eta = {self.eta} <= -1")
        if not self.E_Jq_star > 0.0:
            raise UnphysicalParamsError(f"E_Jq_star = {self.E_Jq_star} <= 0")


class Regime(enum.Enum):
    TRANSVERSE = "transverse"      # phi_x = 0
    LONGITUDINAL = "longitudinal"  # phi_x = k*pi/2


def default_constants() -> CircuitConstants:
    """Circuit constants of the reference device (k=9, L=5 nH, ...)."""
    return CircuitConstants()


# Reduced-constant pack consumed by the jitted evaluator and the propagation
# kernels.  Layout (all floats):
#   0: k   1: eta0   2: E_c   3: E_L   4: E_Jq   5: f_r0
#   6..9: coupling prefactors (xx, zz, zx, xz)   10: flux amplitude k*pi/2
PACK_SIZE = 11


def reduced_pack(c: CircuitConstants) -> np.ndarray:
    """Precompute the GHz-unit constant combinations entering the parameter
    table: the charging energy E_c = e^2/(2C_q+C), the inductive energy scale
    E_L = (Phi0/2pi)^2/(2L), the bare resonator frequency 1/(2pi*sqrt(LC)),
    and the coupling prefactors proportional to (E_J1 - E_J2)."""
    C_f = c.C * 1e-15
    Cq_f = c.C_q * 1e-15
    L_h = c.L * 1e-9
    E_c = E_CHARGE**2 / (2.0 * Cq_f + C_f) / H_PLANCK / 1e9
    E_L = (PHI_0 / (2.0 * math.pi)) ** 2 / (2.0 * L_h) / H_PLANCK / 1e9
    f_r0 = 1.0 / (2.0 * math.pi * math.sqrt(L_h * C_f)) / 1e9
    eta0 = (c.E_J1 + c.E_J2) / (4.0 * c.k * E_L)
    d = c.E_J1 - c.E_J2
    k = float(c.k)
    return np.array([
        k, eta0, E_c, E_L, c.E_Jq, f_r0,
        d / (2.0 * k**2), -d / (16.0 * k**3),
        -d / (8.0 * k**2), -d / (4.0 * k**2),
        flux_amplitude(c.k),
    ])


@njit(cache=True, inline="always")
def _set_point_trig(phi_x, k, amp):
    """cos/sin of phi_x/k with the two drive set-points snapped exactly.

    float cos(pi/2) is 6.1e-17, not 0; the switching drive emits exactly the
    floats 0.0 and flux_amplitude(k), so equality against those two values
    pins the forced zeros of the coupling table without thresholds.
    """
    if phi_x == amp:
        return 0.0, 1.0
    if phi_x == 0.0:
        return 1.0, 0.0
    u = phi_x / k
    return np.sin(_HALF_PI - u), np.sin(u)


@njit(cache=True, inline="always")
def _params_at(pack, phi_x):
    """Evaluate (eta, E_Jq_star, f_r, f_0, g_xx, g_zz, g_zx, g_xz) in GHz
    units from the reduced pack.  Shared verbatim by instant_params and the
    propagation kernels so the two stay numerically identical."""
    k = pack[0]
    cphi, sphi = _set_point_trig(phi_x, k, pack[10])
    eta = pack[1] * cphi
    estar = pack[4] + pack[3] * (1.0 + eta)
    f_r = pack[5] * np.sqrt(1.0 + eta)
    f_0 = np.sqrt(8.0 * pack[2] * estar) \
        - pack[2] * (pack[4] + pack[3] * eta / (k * k)) / estar
    ratio = 2.0 * pack[2] / estar
    r2 = np.sqrt(ratio)
    r4 = np.sqrt(r2)
    # squared resonator zero-point factor (pi/Phi0)^2 * hbar^2 L / (C (1+eta)),
    # reduced to the dimensionless ratio f_r / (8 E_L (1+eta))
    zp2 = f_r / (8.0 * pack[3] * (1.0 + eta))
    zp = np.sqrt(zp2)
    # + 0.0 turns the -0.0 of negative-prefactor forced zeros into +0.0
    g_xx = pack[6] * r4 * zp * cphi + 0.0
    g_zz = pack[7] * r2 * zp2 * cphi + 0.0
    g_zx = pack[8] * r2 * zp * sphi + 0.0
    g_xz = pack[9] * r4 * zp2 * sphi + 0.0
    return eta, estar, f_r, f_0, g_xx, g_zz, g_zx, g_xz


def instant_params(constants: CircuitConstants, phi_x: float) -> InstantParams:
    """All eight Hamiltonian parameters at flux phase ``phi_x``.

    Raises UnphysicalParamsError if the constants put eta <= -1 at this phase
    (imaginary resonator frequency) or drive E_Jq_star nonpositive.
    """
    if not math.isfinite(phi_x):
        raise ValueError(f"phi_x must be finite, got {phi_x}")
    pack = reduced_pack(constants)
    eta, estar, f_r, f_0, g_xx, g_zz, g_zx, g_xz = _params_at(pack, float(phi_x))
    return InstantParams(eta=eta, E_c=pack[2], E_Jq_star=estar, f_r=f_r,
                         f_0=f_0, g_xx=g_xx, g_zz=g_zz, g_zx=g_zx, g_xz=g_xz)


def limit_params(constants: CircuitConstants, regime: Regime) -> InstantParams:
    """Closed-form parameter limits at the two flux set-points.

    Transverse (phi_x = 0): g_zx = g_xz = 0 exactly.
    Longitudinal (phi_x = k*pi/2): eta = 0 and g_xx = g_zz = 0 exactly.
    """
    pack = reduced_pack(constants)
    k, eta0, E_c, E_L, E_Jq, f_r0 = pack[:6]
    pxx, pzz, pzx, pxz = pack[6:10]
    if regime is Regime.TRANSVERSE:
        eta = eta0
        estar = E_Jq + E_L * (1.0 + eta)
        f_r = f_r0 * math.sqrt(1.0 + eta)
        f_0 = math.sqrt(8.0 * E_c * estar) \
            - E_c * (E_Jq + E_L * eta / (k * k)) / estar
        zp2 = f_r / (8.0 * E_L * (1.0 + eta))
        zp = math.sqrt(zp2)
        ratio = 2.0 * E_c / estar
        r2 = math.sqrt(ratio)
        r4 = math.sqrt(r2)
        return InstantParams(eta=eta, E_c=E_c, E_Jq_star=estar, f_r=f_r,
                             f_0=f_0, g_xx=pxx * r4 * zp,
                             g_zz=pzz * r2 * zp2, g_zx=0.0, g_xz=0.0)
    if regime is Regime.LONGITUDINAL:
        estar = E_Jq + E_L
        f_r = f_r0
        f_0 = math.sqrt(8.0 * E_c * estar) - E_c * E_Jq / estar
        zp2 = f_r / (8.0 * E_L)
        zp = math.sqrt(zp2)
        ratio = 2.0 * E_c / estar
        r2 = math.sqrt(ratio)
        r4 = math.sqrt(r2)
        return InstantParams(eta=0.0, E_c=E_c, E_Jq_star=estar, f_r=f_r,
                             f_0=f_0, g_xx=0.0, g_zz=0.0,
                             g_zx=pzx * r2 * zp, g_xz=pxz * r4 * zp2)
    raise ValueError(f"unknown regime {regime!r}")


def limit_phase(constants: CircuitConstants, regime: Regime) -> float:
    """Flux phase of a coupling regime: 0 (transverse) or k*pi/2."""
    if regime is Regime.TRANSVERSE:
        return 0.0
    return flux_amplitude(constants.k)
