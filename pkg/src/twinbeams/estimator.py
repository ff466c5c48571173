"""Scikit-learn style estimator facade over the fitting pipeline.

``TwinBeamEstimator`` consumes raw per-shot count pairs, runs the full
reduction chain (sample moments -> optional noise subtraction -> efficiency
correction -> shot-noise removal -> model inversion) and exposes the fitted
parameters as trailing-underscore attributes. ``get_params``/``set_params``
follow the sklearn contract, so ``sklearn.base.clone`` and parameter searches
work without a scikit-learn dependency here.
"""

import numpy as np

from . import moments as mom
from .model import NonclassicalityReport, TwinBeamModel, fit, nonclassicality_report
from .moments import MomentSet, RawCountData
from .sampling import SimConfig, sample_shots
from .validation import check_shots_array


class TwinBeamEstimator:
    """Fit the multimode twin-beam model to photocount data.

    Parameters
    ----------
    eta : float
        Overall detection efficiency in (0, 1], common to both arms.
    mode_policy : {"mean", "arm1", "arm2", "explicit"}
        How the common mode number is chosen from the two per-arm estimates.
    modes : float, optional
        Mode number to use when ``mode_policy="explicit"``.
    noise : MomentSet, optional
        Separately measured additive-noise moments (photoelectron level),
        subtracted before the efficiency correction.

    Attributes (after ``fit``)
    --------------------------
    model_ : TwinBeamModel
    b1_, b2_, modes_, d12_, k_ : float
    m1_modes_, m2_modes_ : float
    photoelectron_moments_, photon_moments_, intensity_moments_ : MomentSet
    report_ : NonclassicalityReport
    n_shots_ : int
    """

    def __init__(self, eta=1.0, mode_policy="mean", modes=None, noise=None):
        self.eta = eta
        self.mode_policy = mode_policy
        self.modes = modes
        self.noise = noise

    # -- sklearn plumbing -------------------------------------------------
    def get_params(self, deep=True):
        return {
            "eta": self.eta,
            "mode_policy": self.mode_policy,
            "modes": self.modes,
            "noise": self.noise,
        }

    def set_params(self, **params):
        for key, value in params.items():
            if key not in self.get_params():
                raise ValueError(f"unknown parameter {key!r} for TwinBeamEstimator")
            setattr(self, key, value)
        return self

    def __repr__(self):
        return (f"TwinBeamEstimator(eta={self.eta!r}, "
                f"mode_policy={self.mode_policy!r}, modes={self.modes!r})")

    # -- fitting -----------------------------------------------------------
    def fit(self, X, y=None):
        """Fit from an (n_shots, 2) array of detected count pairs."""
        X = check_shots_array(X)
        raw = RawCountData(shots=X, eta=self.eta, noise=self.noise)
        pe = mom.reduce_shots(raw)
        self.n_shots_ = raw.n_shots
        return self._fit_from_photoelectron(pe)

    def fit_moments(self, m: MomentSet):
        """Fit from a pre-reduced moment set at any level."""
        if m.level == mom.PHOTOELECTRON:
            self.n_shots_ = None
            return self._fit_from_photoelectron(m)
        if m.level == mom.PHOTON:
            photon = m
        else:
            photon = mom.intensity_to_photon(m)
        self.n_shots_ = None
        return self._finish(photon)

    def _fit_from_photoelectron(self, pe: MomentSet):
        self.photoelectron_moments_ = pe
        if self.noise is not None:
            pe = mom.subtract_noise(pe, self.noise)
        photon = mom.photoelectron_to_photon(pe, self.eta)
        return self._finish(photon)

    def _finish(self, photon: MomentSet):
        self.photon_moments_ = photon
        self.intensity_moments_ = mom.photon_to_intensity(photon)
        self.model_ = fit(self.intensity_moments_, self.mode_policy, self.modes)
        self.b1_ = self.model_.b1
        self.b2_ = self.model_.b2
        self.modes_ = self.model_.modes
        self.m1_modes_ = self.model_.m1_modes
        self.m2_modes_ = self.model_.m2_modes
        self.d12_ = self.model_.d12
        self.k_ = self.model_.k
        self.report_ = nonclassicality_report(self.model_, photon)
        return self

    # -- generation --------------------------------------------------------
    def sample(self, n_shots, random_state=0):
        """Draw detected count pairs from the fitted model, thinned by eta."""
        self._check_fitted()
        cfg = SimConfig(model=self.model_, shots=int(n_shots), eta=self.eta,
                        seed=int(random_state))
        return sample_shots(cfg).shots

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise RuntimeError("estimator is not fitted; call fit() first")
