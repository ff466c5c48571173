"""Moment-level data model and conversions.

Measured data enters as per-shot photoelectron pairs (m1, m2). Reductions and
conversions move a five-number moment summary (two means, two raw second
moments, one cross moment) between three levels:

  photoelectron --[efficiency correction]--> photon --[shot-noise removal]--> intensity

Every moment set carries an explicit level tag and cross-level operations
reject mismatched inputs rather than silently reinterpreting them.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .exceptions import (
    EmptyDataError,
    InvalidEtaError,
    LevelMismatchError,
    NegativeMeanError,
    NegativeVarianceError,
)
from .validation import check_eta, check_shots_array

PHOTOELECTRON = "photoelectron"
PHOTON = "photon"
INTENSITY = "intensity"
LEVELS = (PHOTOELECTRON, PHOTON, INTENSITY)


@dataclass(frozen=True)
class MomentSet:
    """First/second moments and cross moment at a declared level.

    ``second1``/``second2`` are raw second moments (not variances); ``cross``
    is the raw product moment. Sub-Poissonian data (variance below the mean)
    is legal at the counting levels; a negative variance is not.
    """

    level: str
    mean1: float
    mean2: float
    second1: float
    second2: float
    cross: float

    def __post_init__(self):
        if self.level not in LEVELS:
            raise LevelMismatchError(f"unknown moment level {self.level!r}")
        for name in ("mean1", "mean2", "second1", "second2", "cross"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        tol1 = 1e-9 * (self.second1 + self.mean1**2 + 1.0)
        tol2 = 1e-9 * (self.second2 + self.mean2**2 + 1.0)
        if self.var1 < -tol1 or self.var2 < -tol2:
            raise NegativeVarianceError(
                f"negative variance at {self.level} level: "
                f"var1={self.var1:.6g}, var2={self.var2:.6g}"
            )

    @property
    def var1(self):
        return self.second1 - self.mean1**2

    @property
    def var2(self):
        return self.second2 - self.mean2**2

    @property
    def cov(self):
        return self.cross - self.mean1 * self.mean2

    def to_dict(self):
        return {
            "level": self.level,
            "mean1": self.mean1,
            "mean2": self.mean2,
            "second1": self.second1,
            "second2": self.second2,
            "cross": self.cross,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            level=d["level"],
            mean1=float(d["mean1"]),
            mean2=float(d["mean2"]),
            second1=float(d["second1"]),
            second2=float(d["second2"]),
            cross=float(d["cross"]),
        )


@dataclass(frozen=True)
class RawCountData:
    """Per-shot photoelectron pair records plus detection metadata.

    ``noise`` optionally holds separately measured additive-noise moments at
    the photoelectron level.
    """

    shots: np.ndarray
    eta: float = 1.0
    noise: Optional[MomentSet] = None

    def __post_init__(self):
        object.__setattr__(self, "shots", check_shots_array(self.shots))
        object.__setattr__(self, "eta", check_eta(self.eta))
        if self.noise is not None and self.noise.level != PHOTOELECTRON:
            raise LevelMismatchError("noise moments must be at photoelectron level")

    @property
    def n_shots(self):
        return self.shots.shape[0]


def _require_level(m: MomentSet, level: str, op: str):
    if m.level != level:
        raise LevelMismatchError(f"{op} expects {level}-level moments, got {m.level}")


def reduce_shots(data: RawCountData) -> MomentSet:
    """Sample moments of the per-shot counts.

    Counts are integers, so the accumulation runs in int64 and is exact up to
    ~9e18; no rounding enters before the final division.
    """
    shots = data.shots
    if shots.shape[0] == 0:
        raise EmptyDataError("cannot reduce an empty shot record")
    n = shots.shape[0]
    m1 = shots[:, 0]
    m2 = shots[:, 1]
    s1 = int(m1.sum())
    s2 = int(m2.sum())
    q1 = int((m1.astype(np.int64) ** 2).sum())
    q2 = int((m2.astype(np.int64) ** 2).sum())
    x = int((m1.astype(np.int64) * m2).sum())
    return MomentSet(
        level=PHOTOELECTRON,
        mean1=s1 / n,
        mean2=s2 / n,
        second1=q1 / n,
        second2=q2 / n,
        cross=x / n,
    )


def subtract_noise(signal: MomentSet, noise: MomentSet) -> MomentSet:
    """Remove statistically independent additive noise from measured moments.

    For counts X = S + N with S independent of N the moment algebra gives
        <S>   = <X> - <N>
        <S^2> = <X^2> - 2 <S><N> - <N^2>
        <S1 S2> = <X1 X2> - <S1><N2> - <S2><N1> - <N1 N2>
    The noise cross moment is taken from the noise record itself, so
    correlated noise arms are handled; for independent arms it reduces to the
    product of the noise means.
    """
    _require_level(signal, PHOTOELECTRON, "subtract_noise")
    _require_level(noise, PHOTOELECTRON, "subtract_noise")
    mean1 = signal.mean1 - noise.mean1
    mean2 = signal.mean2 - noise.mean2
    if mean1 < 0 or mean2 < 0:
        raise NegativeMeanError(
            f"noise means exceed signal means: ({mean1:.6g}, {mean2:.6g})"
        )
    second1 = signal.second1 - 2.0 * mean1 * noise.mean1 - noise.second1
    second2 = signal.second2 - 2.0 * mean2 * noise.mean2 - noise.second2
    cross = signal.cross - mean1 * noise.mean2 - mean2 * noise.mean1 - noise.cross
    return MomentSet(
        level=PHOTOELECTRON,
        mean1=mean1,
        mean2=mean2,
        second1=second1,
        second2=second2,
        cross=max(cross, 0.0),
    )


def photoelectron_to_photon(m: MomentSet, eta: float) -> MomentSet:
    """Correct photoelectron moments for the detection efficiency.

    Bernoulli detection with efficiency eta maps photon moments to
    photoelectron moments; inverting,
        <n>   = <m> / eta
        <n^2> = <m^2>/eta^2 - (1 - eta) <m>/eta^2
        <n1 n2> = <m1 m2> / eta^2
    """
    _require_level(m, PHOTOELECTRON, "photoelectron_to_photon")
    if not 0.0 < eta <= 1.0:
        raise InvalidEtaError(f"detection efficiency must be in (0, 1], got {eta}")
    return MomentSet(
        level=PHOTON,
        mean1=m.mean1 / eta,
        mean2=m.mean2 / eta,
        second1=m.second1 / eta**2 - (1.0 - eta) * m.mean1 / eta**2,
        second2=m.second2 / eta**2 - (1.0 - eta) * m.mean2 / eta**2,
        cross=m.cross / eta**2,
    )


def photon_to_photoelectron(n: MomentSet, eta: float) -> MomentSet:
    """Exact algebraic inverse of :func:`photoelectron_to_photon`."""
    _require_level(n, PHOTON, "photon_to_photoelectron")
    if not 0.0 < eta <= 1.0:
        raise InvalidEtaError(f"detection efficiency must be in (0, 1], got {eta}")
    return MomentSet(
        level=PHOTOELECTRON,
        mean1=eta * n.mean1,
        mean2=eta * n.mean2,
        second1=eta**2 * n.second1 + (1.0 - eta) * eta * n.mean1,
        second2=eta**2 * n.second2 + (1.0 - eta) * eta * n.mean2,
        cross=eta**2 * n.cross,
    )


def photon_to_intensity(n: MomentSet) -> MomentSet:
    """Strip the shot-noise contribution, leaving integrated-intensity moments.

        <W> = <n>,  <W^2> = <n^2> - <n>,  <W1 W2> = <n1 n2>

    Raises NegativeVarianceError when the data is more sub-Poissonian than a
    coherent-state marginal, which the intensity-mixture model cannot
    represent.
    """
    _require_level(n, PHOTON, "photon_to_intensity")
    return MomentSet(
        level=INTENSITY,
        mean1=n.mean1,
        mean2=n.mean2,
        second1=n.second1 - n.mean1,
        second2=n.second2 - n.mean2,
        cross=n.cross,
    )


def intensity_to_photon(w: MomentSet) -> MomentSet:
    """Exact inverse of :func:`photon_to_intensity`."""
    _require_level(w, INTENSITY, "intensity_to_photon")
    return MomentSet(
        level=PHOTON,
        mean1=w.mean1,
        mean2=w.mean2,
        second1=w.second1 + w.mean1,
        second2=w.second2 + w.mean2,
        cross=w.cross,
    )


def burgess_map(fano_photon: float, eta: float) -> float:
    """Fano factor of the detected counts given the photon-number Fano factor.

    Bernoulli detection acts affinely, F_m - 1 = eta (F_n - 1); the Poisson
    point F = 1 is fixed for every efficiency.
    """
    if fano_photon < 0:
        raise ValueError(f"Fano factor must be >= 0, got {fano_photon}")
    if not 0.0 < eta <= 1.0:
        raise InvalidEtaError(f"detection efficiency must be in (0, 1], got {eta}")
    return 1.0 + eta * (fano_photon - 1.0)


def with_level(m: MomentSet, level: str) -> MomentSet:
    """Relabel a moment set (used by I/O when the level is implied by context)."""
    if level not in LEVELS:
        raise LevelMismatchError(f"unknown moment level {level!r}")
    return replace(m, level=level)
