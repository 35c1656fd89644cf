"""External flux-phase schedules: square-wave, sinusoidal, constant.

Both periodic drives swing the flux phase over [0, k*pi/2] with period
T_s = 1/f_s and start each period in the longitudinal (decoupled)
configuration: the square wave holds k*pi/2 on (0, T_s/2) and 0 on
(T_s/2, T_s); the sinusoid is (k*pi/2)(1 + cos(2*pi*f_s*t))/2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .circuit import flux_amplitude


class DriveKind(enum.Enum):
    SQUARE = "square"
    SINUSOIDAL = "sinusoidal"
    CONSTANT = "constant"


# integer codes consumed by the jitted propagation kernels
DRIVE_CODE = {DriveKind.SQUARE: 0, DriveKind.SINUSOIDAL: 1, DriveKind.CONSTANT: 2}


@dataclass(frozen=True)
class DriveWaveform:
    kind: DriveKind
    f_s: float = 0.0          # switching frequency, GHz (periodic kinds)
    k: int = 9                # junction count, sets the amplitude k*pi/2
    fixed_phase: float = 0.0  # CONSTANT kind only

    def __post_init__(self):
        if self.kind is not DriveKind.CONSTANT and not self.f_s > 0.0:
            raise ValueError(f"periodic drive needs f_s > 0, got {self.f_s}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not math.isfinite(self.fixed_phase):
            raise ValueError("fixed_phase must be finite")

    @property
    def amplitude(self) -> float:
        return flux_amplitude(self.k)

    @property
    def period(self) -> float:
        """Drive period T_s = 1/f_s in ns."""
        return 1.0 / self.f_s


def phase_at(drive: DriveWaveform, t):
    """Flux phase at time t (ns, scalar or array).

    Square wave: amplitude * theta(sin(2*pi*f_s*t)) with theta(0) = 0.
    Sinusoid:    amplitude * (1/2 + cos(2*pi*f_s*t)/2).
    """
    amp = drive.amplitude
    if drive.kind is DriveKind.SQUARE:
        out = np.where(np.sin(2.0 * np.pi * drive.f_s * np.asarray(t)) > 0.0,
                       amp, 0.0)
    elif drive.kind is DriveKind.SINUSOIDAL:
        out = amp * (0.5 + 0.5 * np.cos(2.0 * np.pi * drive.f_s * np.asarray(t)))
    else:
        out = np.full_like(np.asarray(t, dtype=float), drive.fixed_phase)
    return out[()]


def is_piecewise_constant(drive: DriveWaveform) -> bool:
    return drive.kind in (DriveKind.SQUARE, DriveKind.CONSTANT)


def discontinuities(drive: DriveWaveform, t0: float, t1: float) -> np.ndarray:
    """Switching times of the drive strictly inside (t0, t1), ascending.

    Square wave switches at every half period m*T_s/2; smooth and constant
    drives have none.
    """
    if not t0 < t1:
        raise ValueError(f"need t0 < t1, got ({t0}, {t1})")
    if drive.kind is not DriveKind.SQUARE:
        return np.empty(0)
    half = 0.5 / drive.f_s
    m_lo = int(math.floor(t0 / half))
    m_hi = int(math.ceil(t1 / half)) + 1
    times = half * np.arange(max(m_lo, 0), m_hi + 1)
    return times[(times > t0) & (times < t1)]
