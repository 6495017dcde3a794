"""Exact quantum predictions for the hybrid-entanglement quantum eraser."""

from core.quantum.complementarity import (
    ComplementarityFactors,
    PredictedPoint,
    calibrate_contrast,
    complementarity_bound,
    derive_correction_factors,
    predicted_point,
    visibility_from_extrema,
    welcher_weg_parameter,
)
from core.quantum.interferometer import (
    Blocked,
    InterferometerConfig,
    ProbabilityTable,
    conditional_fringes,
    joint_probabilities,
)
from core.quantum.optics import (
    ChainSpec,
    MeasurementChain,
    PolarizationBasis,
    Retarder,
    canaries_chain,
    chain_basis,
    vienna_chain,
)
from core.quantum.state import HybridState, ideal_state, make_hybrid_state

__all__ = [
    "Blocked",
    "ChainSpec",
    "ComplementarityFactors",
    "HybridState",
    "InterferometerConfig",
    "MeasurementChain",
    "PolarizationBasis",
    "PredictedPoint",
    "ProbabilityTable",
    "Retarder",
    "calibrate_contrast",
    "canaries_chain",
    "chain_basis",
    "complementarity_bound",
    "conditional_fringes",
    "derive_correction_factors",
    "ideal_state",
    "joint_probabilities",
    "make_hybrid_state",
    "predicted_point",
    "vienna_chain",
    "visibility_from_extrema",
    "welcher_weg_parameter",
]
