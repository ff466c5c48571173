"""Monte Carlo reference sampler and brute-force grid reductions.

The sampler draws per-shot photon pairs from the exact mixture underlying the
joint distribution: conditionally on a common mode intensity
W ~ Gamma(M, 1), the pair count j ~ Poisson(-K W) feeds both arms while the
fictitious-noise counts u_i ~ Poisson((b_i + K) W) are independent,

    n1 = j + u1,   n2 = j + u2.

Integrating over W reproduces the generating function
[1 + b1 u + b2 v + K u v]^(-M) exactly (see README for the two-line proof),
so the construction is an independent, exact-in-distribution oracle for every
analytic pipeline stage, not just a moment matcher. It exists only for
physical pair-correlated models: K <= 0 and b_i + K >= 0.

Detection is Bernoulli thinning with efficiency eta applied per arm.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import InsufficientMassError, UnsupportedModelError
from .model import TwinBeamModel
from .moments import MomentSet, RawCountData
from .photodist import JointPhotonDistribution
from .validation import check_eta

# fixed partition size so seeded runs are bit-reproducible regardless of size
_CHUNK = 1 << 20


@dataclass(frozen=True)
class SimConfig:
    """Reproducible sampling configuration."""

    model: TwinBeamModel
    shots: int
    eta: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        check_eta(self.eta)


def _rates(model: TwinBeamModel):
    k = model.k
    tol = 1e-12 * max(1.0, model.b1 * model.b2)
    if k > tol:
        raise UnsupportedModelError(
            f"K = {k:.6g} > 0: classical super-correlated models have no "
            "shared-pair decomposition; sampling is not supported"
        )
    a = max(-k, 0.0)
    c1 = model.b1 + k
    c2 = model.b2 + k
    if c1 < -tol or c2 < -tol:
        raise UnsupportedModelError(
            f"negative fictitious noise mean (b1+K={c1:.6g}, b2+K={c2:.6g}): "
            "model is unphysical"
        )
    return a, max(c1, 0.0), max(c2, 0.0)


def sample_shots(config: SimConfig) -> RawCountData:
    """Draw seeded per-shot detected counts (m1, m2) from the model.

    Shots are generated in fixed-size partitions with seeds derived from the
    configured seed, so results are bit-reproducible and the partitions could
    be farmed out to workers and merged associatively.
    """
    a, c1, c2 = _rates(config.model)
    m = config.model.modes
    eta = config.eta
    root = np.random.SeedSequence(config.seed)
    n_chunks = (config.shots + _CHUNK - 1) // _CHUNK
    children = root.spawn(n_chunks)
    out = np.empty((config.shots, 2), dtype=np.int64)
    done = 0
    for child in children:
        n = min(_CHUNK, config.shots - done)
        rng = np.random.default_rng(child)
        w = rng.gamma(m, 1.0, n)
        pairs = rng.poisson(a * w)
        n1 = pairs + rng.poisson(c1 * w)
        n2 = pairs + rng.poisson(c2 * w)
        if eta < 1.0:
            n1 = rng.binomial(n1, eta)
            n2 = rng.binomial(n2, eta)
        out[done:done + n, 0] = n1
        out[done:done + n, 1] = n2
        done += n
    return RawCountData(shots=out, eta=eta)


def brute_moments(joint: JointPhotonDistribution,
                  min_mass: float = 1.0 - 1e-6) -> MomentSet:
    """Photon moments by direct double summation over a grid.

    Refuses grids that truncate away too much mass, since the sums would then
    be biased rather than merely imprecise.
    """
    if joint.captured_mass < min_mass:
        raise InsufficientMassError(
            f"grid holds {joint.captured_mass:.9f} of the probability mass, "
            f"need >= {min_mass:.9f}"
        )
    return joint.grid_moments()


def histogram2d(data: RawCountData, n1_max: int, n2_max: int) -> np.ndarray:
    """Normalized 2-D histogram of shot counts on [0, n1_max] x [0, n2_max]."""
    m1 = np.clip(data.shots[:, 0], 0, n1_max)
    m2 = np.clip(data.shots[:, 1], 0, n2_max)
    h = np.zeros((n1_max + 1, n2_max + 1))
    np.add.at(h, (m1, m2), 1.0)
    return h / data.n_shots
