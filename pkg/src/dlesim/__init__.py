"""Simulator for a flux-tunable superconducting qubit-resonator circuit.

Periodically switching the external flux between the transverse and
longitudinal coupling set-points excites the qubit and creates photons out
of the vacuum; the effect peaks when the switching frequency equals the sum
of the time-averaged qubit and resonator transition frequencies.
"""

__version__ = "0.1.0"

from .circuit import (CircuitConstants, InstantParams, Regime,
                      UnphysicalParamsError, default_constants,
                      flux_amplitude, instant_params, limit_params)
from .drive import (DriveKind, DriveWaveform, discontinuities,
                    is_piecewise_constant, phase_at)
from .hamiltonian import (HilbertSpace, assemble, build_space,
                          hermiticity_defect, longitudinal_reference_spectrum)
from .propagate import (EvolutionConfig, Method, NormDriftError,
                        PropagationError, Trajectory, evolve, expm_step)
from .analysis import (PhotonStats, SweepResult, default_frequency_grid,
                       default_sweep_config, find_resonance, p_excited,
                       photon_distribution, sweep, time_avg_frequencies)

__all__ = [
    "CircuitConstants", "InstantParams", "Regime", "UnphysicalParamsError",
    "default_constants", "flux_amplitude", "instant_params", "limit_params",
    "DriveKind", "DriveWaveform", "discontinuities", "is_piecewise_constant",
    "phase_at",
    "HilbertSpace", "assemble", "build_space", "hermiticity_defect",
    "longitudinal_reference_spectrum",
    "EvolutionConfig", "Method", "NormDriftError", "PropagationError",
    "Trajectory", "evolve", "expm_step",
    "PhotonStats", "SweepResult", "default_frequency_grid",
    "default_sweep_config", "find_resonance", "p_excited",
    "photon_distribution", "sweep", "time_avg_frequencies",
    "__version__",
]
