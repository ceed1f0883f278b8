"""Link-level simulator for a hybrid null-steering ambient backscatter receiver.

The library covers the full chain: deterministic two-path channel synthesis,
Hadamard symbol spreading, Bartlett angle-of-arrival estimation, a two-stage
eigenspace beamformer that nulls the strong direct path, a phase-cancelling
two-phase correlator detector, and a seeded Monte Carlo harness that sweeps
SNR, tag distance, or codeword length and reports BER with confidence
intervals.
"""

from .arrays import ArrayConfig, directional_cosine, steering_vector
from .channel import (
    Geometry,
    PathGains,
    SPEED_OF_LIGHT,
    derive_geometry,
    path_gains,
    relative_loss_db,
    wavelength_m,
)
from .codes import CodewordPair, hadamard_matrix, select_pair, spread
from .linalg import HermitianEigenResult, eigh, principal_eigenvector, sample_covariance
from .synthesis import (
    ChipFrame,
    Scenario,
    amplitude_calibration,
    amplitudes_from_loss,
    synthesize_codeword,
)
from .aoa import AngularSpectrum, AoaEstimate, bartlett_spectrum, estimate_aoa
from .beamformer import (
    BeamformerState,
    EigenSplit,
    adapt_state,
    beamform_outputs,
    constraint_matrix,
    eigensplit,
    stage1_project,
    stage2_weights,
)
from .detector import DetectionResult, codeword_energies, cross_correlate, decide, detect
from .harness import (
    BerRecord,
    ConfigError,
    SweepConfig,
    run_sweep,
    run_trial,
    wilson_interval,
    write_results,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayConfig",
    "directional_cosine",
    "steering_vector",
    "Geometry",
    "PathGains",
    "SPEED_OF_LIGHT",
    "derive_geometry",
    "path_gains",
    "relative_loss_db",
    "wavelength_m",
    "CodewordPair",
    "hadamard_matrix",
    "select_pair",
    "spread",
    "HermitianEigenResult",
    "eigh",
    "principal_eigenvector",
    "sample_covariance",
    "ChipFrame",
    "Scenario",
    "amplitude_calibration",
    "amplitudes_from_loss",
    "synthesize_codeword",
    "AngularSpectrum",
    "AoaEstimate",
    "bartlett_spectrum",
    "estimate_aoa",
    "BeamformerState",
    "EigenSplit",
    "adapt_state",
    "beamform_outputs",
    "constraint_matrix",
    "eigensplit",
    "stage1_project",
    "stage2_weights",
    "DetectionResult",
    "codeword_energies",
    "cross_correlate",
    "decide",
    "detect",
    "BerRecord",
    "ConfigError",
    "SweepConfig",
    "run_sweep",
    "run_trial",
    "wilson_interval",
    "write_results",
    "__version__",
]
