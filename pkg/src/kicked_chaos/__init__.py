"""Spectral, eigenvector, entanglement and effective-interaction statistics
of kicked Ising chains compared with circular random-matrix ensembles."""

__version__ = "0.1.0"

from .chain import PRESETS, ChainParams, floquet_operator, preset
from .ensembles import EnsembleKind, sample_coe, sample_cue
from .entanglement import mean_entropy_curve, page_value, von_neumann_entropy
from .heff import build_effective, coefficient, coefficient_samples, variance_prediction
from .pauli import PauliString, apply_string, count_strings, sample_strings
from .spectral import diagonalize_symmetric_unitary, eigenvector_eta, ratio_statistics, spacings

__all__ = [
    "PRESETS", "ChainParams", "floquet_operator", "preset",
    "EnsembleKind", "sample_coe", "sample_cue",
    "mean_entropy_curve", "page_value", "von_neumann_entropy",
    "build_effective", "coefficient", "coefficient_samples", "variance_prediction",
    "PauliString", "apply_string", "count_strings", "sample_strings",
    "diagonalize_symmetric_unitary", "eigenvector_eta", "ratio_statistics", "spacings",
]
