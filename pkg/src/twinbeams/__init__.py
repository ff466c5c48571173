"""Statistical characterization of twin-beam photocount data.

Turns measured (or simulated) per-shot photoelectron pairs into fitted
multimode model parameters, joint/conditional/difference photon-number
distributions, nonclassicality certificates, and s-ordered joint intensity
quasi-distributions with their negative/oscillatory quantum signatures.
"""

from .estimator import TwinBeamEstimator
from .model import (
    NonclassicalityReport,
    TwinBeamModel,
    determinant_k,
    fit,
    forward_moments,
    k_s,
    nonclassicality_report,
    threshold_ordering,
)
from .moments import (
    INTENSITY,
    PHOTOELECTRON,
    PHOTON,
    MomentSet,
    RawCountData,
    burgess_map,
    intensity_to_photon,
    photoelectron_to_photon,
    photon_to_intensity,
    photon_to_photoelectron,
    reduce_shots,
    subtract_noise,
)
from .photodist import (
    ConditionalDistribution,
    DifferenceDistribution,
    JointPhotonDistribution,
    auto_bounds,
    conditional,
    conditional_fano,
    difference_pn,
    joint_pn,
    joint_pn_border,
)
from .quasidist import (
    DifferenceQuasi,
    QuasiGrid,
    difference_quasi,
    integrate_quasi,
    mandel_forward,
    quasi_auto,
    quasi_oscillatory,
    quasi_regular,
)
from .sampling import SimConfig, brute_moments, sample_shots

__version__ = "0.1.0"

__all__ = [
    "TwinBeamEstimator",
    "TwinBeamModel",
    "NonclassicalityReport",
    "MomentSet",
    "RawCountData",
    "SimConfig",
    "JointPhotonDistribution",
    "ConditionalDistribution",
    "DifferenceDistribution",
    "QuasiGrid",
    "DifferenceQuasi",
    "PHOTOELECTRON",
    "PHOTON",
    "INTENSITY",
    "reduce_shots",
    "subtract_noise",
    "photoelectron_to_photon",
    "photon_to_photoelectron",
    "photon_to_intensity",
    "intensity_to_photon",
    "burgess_map",
    "fit",
    "forward_moments",
    "determinant_k",
    "k_s",
    "threshold_ordering",
    "nonclassicality_report",
    "joint_pn",
    "joint_pn_border",
    "auto_bounds",
    "conditional",
    "conditional_fano",
    "difference_pn",
    "quasi_regular",
    "quasi_oscillatory",
    "quasi_auto",
    "mandel_forward",
    "difference_quasi",
    "integrate_quasi",
    "sample_shots",
    "brute_moments",
]
