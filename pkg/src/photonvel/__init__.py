"""Group and phase velocities of spatially confined free-space light.

Spectral averages (:mod:`velocimetry`) are cross-checked against centroid
tracking of synthesised packets (:mod:`wavepacket`) and against vector-field
integrals in both Maxwell and Riemann-Silberstein form (:mod:`emfield`,
:mod:`rsquantum`).
"""
from .beams import BeamParams, eval_beam, phase_map, realspace_phase_velocity
from .emfield import PlaneWaveSet, conservation_audit, energy_velocity, momentum_velocity, synthesize_em
from .errors import (AccuracyLossError, DegenerateError, InvalidArgumentError, InvariantViolation, NumericError,
                     OutOfDomainError, PhotonVelError, ResolutionError, TruncationError)
from .rsquantum import (RSSpectralField, momentum_velocity_proper, momentum_velocity_v1, spin_expectation,
                        two_frequency_fixture)
from .spectra import FrequencySpectrum, SpectralModel, poisson_nodes
from .velocimetry import group_velocity, phase_velocity, velocity_report
from .wavepacket import WavepacketSpec, retardation_curve

__version__ = "0.1.0"

__all__ = [
    "AccuracyLossError", "BeamParams", "DegenerateError", "FrequencySpectrum", "InvalidArgumentError",
    "InvariantViolation", "NumericError", "OutOfDomainError", "PhotonVelError", "PlaneWaveSet", "RSSpectralField",
    "ResolutionError", "SpectralModel", "TruncationError", "WavepacketSpec", "conservation_audit",
    "energy_velocity", "eval_beam", "group_velocity", "momentum_velocity", "momentum_velocity_proper",
    "momentum_velocity_v1", "phase_map", "phase_velocity", "poisson_nodes", "realspace_phase_velocity",
    "retardation_curve", "spin_expectation", "synthesize_em", "two_frequency_fixture", "velocity_report",
]
