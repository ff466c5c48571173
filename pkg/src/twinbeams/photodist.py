"""Joint signal-idler photon-number distribution and derived distributions.

All probabilities are computed and stored as log magnitudes; mesoscopic
parameters push p(0,0) to ~1e-35 and grid corners far below the float range,
so no linear-space probability ever forms an intermediate.

The joint distribution of the M-mode pair-correlated model has probability
generating function

    G(z1, z2) = [1 + b1 u + b2 v + K u v]^(-M),   u = 1 - z1, v = 1 - z2

which expands into the single sum (j counts detected pairs, a = -K,
c1 = b1 + K and c2 = b2 + K the fictitious noise means, D = 1 + b1 + b2 + K)

    p(n1, n2) = sum_j  Gamma(n1+n2+M-j) / (Gamma(M) j! (n1-j)! (n2-j)!)
                * a^j c1^(n1-j) c2^(n2-j) / D^(n1+n2+M-j).

For K < 0 every term is positive and the generating function yields an exact
two-dimensional recurrence with positive coefficients,

    D (n2+1) p(n1, n2+1) = c1 (n2+1) p(n1-1, n2+1)
                           + c2 (M+n2) p(n1, n2) + a (M+n2) p(n1-1, n2),

evaluated column by column in log space (the in-column part is a first-order
linear recurrence with constant ratio c1/D, solved by a log-domain scan).
For K > 0 the terms alternate in sign and the sum is accumulated per grid
point with extended precision and cancellation diagnostics.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import (
    CancellationOverflowError,
    EmptyRowError,
    InsufficientMassError,
    PhysicalityError,
)
from .model import TwinBeamModel
from .moments import PHOTON, MomentSet
from .special import log_gamma, signed_logsumexp

_LOG_ZERO = -np.inf


def auto_bounds(model: TwinBeamModel, n_sigma: float = 12.0, tail: float = 1e-10):
    """Default grid truncation per axis.

    mean + n_sigma standard deviations, with a marginal-tail quantile as a
    floor: for few-mode or sub-photon beams the thermal-like marginal decays
    slowly on the standard-deviation scale and a pure sigma rule truncates
    too early.
    """
    from scipy.stats import nbinom

    m = model.modes
    bounds = []
    for b in (model.b1, model.b2):
        mean = m * b
        sd = np.sqrt(m * b * (1.0 + b))
        # marginal is a negative binomial with shape M and success 1/(1+b)
        q = float(nbinom.isf(tail, m, 1.0 / (1.0 + b)))
        bounds.append(int(np.ceil(max(mean + n_sigma * sd, q + 1.0))))
    return bounds[0], bounds[1]


@dataclass(frozen=True)
class JointPhotonDistribution:
    """Dense joint distribution on [0, n1_max] x [0, n2_max] in signed log space.

    ``sign`` entries are +1 for genuine probabilities and 0 where an
    alternating sum cancelled to zero within tolerance; validated grids never
    carry negative entries.
    """

    model: TwinBeamModel
    n1_max: int
    n2_max: int
    log_p: np.ndarray
    sign: np.ndarray
    captured_mass: float
    max_cancel_digits_seen: float = 0.0

    def probabilities(self):
        """Linear-space probability matrix (tiny cells underflow to zero)."""
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.log_p)

    def row(self, n1: int):
        if not 0 <= n1 <= self.n1_max:
            raise IndexError(f"n1={n1} outside grid [0, {self.n1_max}]")
        with np.errstate(over="ignore"):
            return self.sign[n1] * np.exp(self.log_p[n1])

    def grid_moments(self) -> MomentSet:
        """Photon moments by direct summation over the grid (no normalization)."""
        p = self.probabilities()
        i = np.arange(self.n1_max + 1, dtype=float)
        k = np.arange(self.n2_max + 1, dtype=float)
        p1 = p.sum(axis=1)
        p2 = p.sum(axis=0)
        return MomentSet(
            level=PHOTON,
            mean1=float(p1 @ i),
            mean2=float(p2 @ k),
            second1=float(p1 @ (i * i)),
            second2=float(p2 @ (k * k)),
            cross=float(i @ p @ k),
        )

    def band_mass(self, halfwidth: float, center: float = 0.0) -> float:
        """Probability mass with |n1 - n2 - center| <= halfwidth."""
        p = self.probabilities()
        i = np.arange(self.n1_max + 1)[:, None]
        k = np.arange(self.n2_max + 1)[None, :]
        return float(p[np.abs(i - k - center) <= halfwidth].sum())


def _model_coeffs(model: TwinBeamModel):
    k = model.k
    a = -k
    c1 = model.b1 + k
    c2 = model.b2 + k
    d = 1.0 + model.b1 + model.b2 + k
    if c1 < 0 or c2 < 0:
        raise PhysicalityError(
            f"fictitious noise means are negative (b1+K={c1:.6g}, b2+K={c2:.6g}); "
            "the joint distribution is undefined for unphysical models"
        )
    return a, c1, c2, d


def _log_axis_marginal_ratios(c, d, m, nmax):
    # log p(n,0)/p(n-1,0) = log(c (M+n-1) / (D n)) accumulated from p(0,0)=D^-M
    n = np.arange(1, nmax + 1, dtype=float)
    if c == 0.0:
        steps = np.full(nmax, _LOG_ZERO)
    else:
        steps = np.log(c) + np.log(m + n - 1.0) - np.log(d) - np.log(n)
    return -m * np.log(d) + np.concatenate(([0.0], np.cumsum(steps)))


def _joint_recurrence(model: TwinBeamModel, n1_max: int, n2_max: int):
    """Exact log-space recurrence; valid for K <= 0 (all-positive terms)."""
    a, c1, c2, d = _model_coeffs(model)
    m = model.modes
    log_d = np.log(d)
    la = np.log(a) if a > 0 else _LOG_ZERO
    lc1 = np.log(c1) if c1 > 0 else _LOG_ZERO
    lc2 = np.log(c2) if c2 > 0 else _LOG_ZERO

    lp = np.full((n1_max + 1, n2_max + 1), _LOG_ZERO)
    lp[:, 0] = _log_axis_marginal_ratios(c1, d, m, n1_max)
    lp[0, :] = _log_axis_marginal_ratios(c2, d, m, n2_max)

    lalpha = lc1 - log_d
    idx = np.arange(n1_max + 1, dtype=float)
    decay = idx * lalpha if np.isfinite(lalpha) else None
    for c in range(1, n2_max + 1):
        n2 = c - 1
        coef = np.log(m + n2) - log_d - np.log(c)
        h = np.logaddexp(lc2 + coef + lp[1:, n2], la + coef + lp[:-1, n2])
        if decay is None:
            lp[1:, c] = h
        else:
            # solve p(n) = alpha p(n-1) + h(n) as a log-domain prefix scan
            t = np.concatenate(([lp[0, c]], h)) - decay
            lp[:, c] = np.logaddexp.accumulate(t) + decay
    return lp, np.ones_like(lp, dtype=np.int8), 0.0


def _joint_alternating(model: TwinBeamModel, n1_max: int, n2_max: int,
                       max_cancel_digits: float):
    """Per-point alternating series for K > 0, row-vectorized over (n2, j)."""
    a, c1, c2, d = _model_coeffs(model)
    m = model.modes
    log_d = np.log(d)
    log_abs_a = np.log(abs(a))
    lc1 = np.log(c1) if c1 > 0 else _LOG_ZERO
    lc2 = np.log(c2) if c2 > 0 else _LOG_ZERO
    lgm = log_gamma(m)

    n2s = np.arange(n2_max + 1, dtype=float)[:, None]
    lp = np.full((n1_max + 1, n2_max + 1), _LOG_ZERO)
    sg = np.ones((n1_max + 1, n2_max + 1), dtype=np.int8)
    worst = 0.0
    for n1 in range(n1_max + 1):
        jmax = min(n1, n2_max)
        js = np.arange(jmax + 1, dtype=float)[None, :]
        valid = js <= np.minimum(n1, n2s)
        with np.errstate(invalid="ignore"):
            logt = (
                log_gamma(n1 + n2s + m - js) - lgm
                - log_gamma(js + 1.0) - log_gamma(n1 - js + 1.0)
                - log_gamma(n2s - js + 1.0)
                + np.where(js > 0, js * log_abs_a, 0.0)
                + np.where(n1 - js > 0, (n1 - js) * lc1, 0.0)
                + np.where(n2s - js > 0, (n2s - js) * lc2, 0.0)
                - (n1 + n2s + m - js) * log_d
            )
        logt = np.where(valid, logt, _LOG_ZERO)
        signs = np.where(js.astype(int) % 2 == 0, 1.0, -1.0) if a < 0 else 1.0
        log_abs, sign, digits = signed_logsumexp(logt, signs, axis=1)
        bad = (digits > max_cancel_digits) & (sign > 0)
        if np.any(bad):
            w = int(np.argmax(np.where(bad, digits, -1.0)))
            raise CancellationOverflowError(
                f"alternating series lost {digits[w]:.1f} digits at (n1={n1}, n2={w})",
                digits_lost=float(digits[w]),
                where=(n1, w),
            )
        # The achievable cancellation depth is set by the float64 error of
        # the log magnitudes (~|log| * eps relative per term), not by the
        # extended-precision accumulator. A negative net beyond that floor is
        # residue of an exact zero and clamps; one inside the trustworthy
        # range would be a genuinely negative value, which a probability
        # series cannot produce, and raises.
        neg = sign < 0
        if np.any(neg):
            lscale = np.max(np.where(np.isfinite(logt), np.abs(logt), 0.0), axis=1)
            floor_digits = 15.65 - np.log10(lscale + 10.0)
            noise = neg & (digits >= floor_digits)
            if np.any(neg & ~noise):
                w = int(np.argmax(np.where(neg & ~noise, log_abs, _LOG_ZERO)))
                raise CancellationOverflowError(
                    f"alternating series produced a non-noise negative value at "
                    f"(n1={n1}, n2={w})",
                    digits_lost=float(digits[w]),
                    where=(n1, w),
                )
            log_abs = np.where(neg, _LOG_ZERO, log_abs)
            sign = np.where(neg, 0.0, sign)
        lp[n1] = log_abs
        sg[n1] = sign.astype(np.int8)
        finite = np.isfinite(digits)
        if np.any(finite):
            worst = max(worst, float(np.max(digits[finite])))
    return lp, sg, worst


def joint_pn(model: TwinBeamModel, n1_max: Optional[int] = None,
             n2_max: Optional[int] = None, max_cancel_digits: float = 12.0,
             n_sigma: float = 12.0) -> JointPhotonDistribution:
    """Joint photon-number distribution on a truncated grid.

    Without explicit bounds the grid is truncated at mean + ``n_sigma``
    standard deviations per axis. K <= 0 models evaluate through the stable
    positive recurrence; K > 0 models go through the alternating series and
    raise CancellationOverflowError if any grid point loses more than
    ``max_cancel_digits`` significant digits.
    """
    auto1, auto2 = auto_bounds(model, n_sigma)
    n1_max = auto1 if n1_max is None else int(n1_max)
    n2_max = auto2 if n2_max is None else int(n2_max)
    if n1_max < 0 or n2_max < 0:
        raise ValueError("grid bounds must be >= 0")
    if model.k <= 0:
        lp, sg, worst = _joint_recurrence(model, n1_max, n2_max)
    else:
        lp, sg, worst = _joint_alternating(model, n1_max, n2_max, max_cancel_digits)
    with np.errstate(over="ignore"):
        mass = float(np.exp(lp[np.isfinite(lp)]).sum())
    return JointPhotonDistribution(
        model=model, n1_max=n1_max, n2_max=n2_max, log_p=lp, sign=sg,
        captured_mass=mass, max_cancel_digits_seen=worst,
    )


def joint_pn_border(b1: float, b2: float, modes: float, n1_max: int,
                    n2_max: int) -> JointPhotonDistribution:
    """Joint distribution at the classicality border K = 0 (compound form).

        p(n1, n2) = Gamma(n1+n2+M) b1^n1 b2^n2
                    / (Gamma(M) n1! n2! (1 + b1 + b2)^(n1+n2+M))

    For M large against the mean photon numbers this approaches a product of
    two Poisson distributions with means M b1, M b2.
    """
    if b1 <= 0 or b2 <= 0 or modes <= 0:
        raise ValueError("border distribution needs positive b1, b2, modes")
    model = TwinBeamModel(b1=b1, b2=b2, modes=modes, d12=np.sqrt(b1 * b2))
    d = 1.0 + b1 + b2
    i = np.arange(n1_max + 1, dtype=float)[:, None]
    k = np.arange(n2_max + 1, dtype=float)[None, :]
    lp = (
        log_gamma(i + k + modes) - log_gamma(modes)
        - log_gamma(i + 1.0) - log_gamma(k + 1.0)
        + i * np.log(b1) + k * np.log(b2) - (i + k + modes) * np.log(d)
    )
    mass = float(np.exp(lp).sum())
    return JointPhotonDistribution(
        model=model, n1_max=n1_max, n2_max=n2_max, log_p=lp,
        sign=np.ones_like(lp, dtype=np.int8), captured_mass=mass,
    )


def _joint_series_reference(model: TwinBeamModel, n1_max: int, n2_max: int):
    """Direct per-point series; slow reference used to cross-check the
    recurrence path in the tests."""
    lp, sg, _ = _joint_alternating(model, n1_max, n2_max, max_cancel_digits=np.inf)
    return sg * np.exp(lp)


@dataclass(frozen=True)
class ConditionalDistribution:
    """Idler distribution conditioned on a detected signal photon number."""

    n1: int
    probs: np.ndarray
    fano: float
    fano_closed_form: float

    @property
    def mean(self):
        k = np.arange(self.probs.size, dtype=float)
        return float(self.probs @ k)


def conditional_fano(model: TwinBeamModel, n1: float) -> float:
    """Closed-form Fano factor of the conditional idler distribution.

    With x = (b2 + K)/(1 + b1) and p = -K/b1,

        F(n1) = 1 + ((n1 + M) x^2 - n1 p^2) / (n1 p + (n1 + M) x);

    the n1 -> inf limit is 1 + x - (-K/b1) = 1 + (b2+K)/(1+b1) + K/b1, which
    collapses to 1 + K/b1 only when the idler noise mean b2 + K vanishes.
    Written multiplied through by n1 so that n1 = 0 is regular.
    """
    k = model.k
    x = (model.b2 + k) / (1.0 + model.b1)
    p = -k / model.b1
    m = model.modes
    denom = n1 * p + (n1 + m) * x
    if denom == 0:
        return 0.0
    return 1.0 + ((n1 + m) * x**2 - n1 * p**2) / denom


def conditional(joint: JointPhotonDistribution, n1: int) -> ConditionalDistribution:
    """Normalize one grid row; reports the empirical Fano factor alongside the
    closed form so truncation problems are visible."""
    if not 0 <= n1 <= joint.n1_max:
        raise IndexError(f"n1={n1} outside grid [0, {joint.n1_max}]")
    lrow = joint.log_p[n1]
    finite = np.isfinite(lrow)
    if not np.any(finite):
        raise EmptyRowError(f"row n1={n1} carries no probability mass")
    mx = float(lrow[finite].max())
    if mx < -690.0:  # row mass below ~1e-300
        raise EmptyRowError(f"row n1={n1} mass underflows (max log p = {mx:.1f})")
    w = np.where(finite, np.exp(lrow - mx), 0.0) * joint.sign[n1]
    total = w.sum()
    probs = w / total
    k = np.arange(probs.size, dtype=float)
    mean = probs @ k
    var = probs @ (k * k) - mean**2
    fano = var / mean if mean > 0 else 0.0
    return ConditionalDistribution(
        n1=n1, probs=probs, fano=float(fano),
        fano_closed_form=conditional_fano(joint.model, n1),
    )


@dataclass(frozen=True)
class DifferenceDistribution:
    """Distribution of the photon-number difference n1 - n2."""

    offset: int
    probs: np.ndarray

    @property
    def values(self):
        return np.arange(self.offset, self.offset + self.probs.size)

    @property
    def total(self):
        return float(self.probs.sum())

    @property
    def mean(self):
        return float(self.probs @ self.values) / self.total

    @property
    def variance(self):
        v = self.values.astype(float)
        mu = (self.probs @ v) / self.total
        return float((self.probs @ (v * v)) / self.total - mu * mu)


def difference_pn(joint: JointPhotonDistribution) -> DifferenceDistribution:
    """Anti-diagonal sums of the joint grid: p_-(n) = sum over n1 - n2 = n."""
    p = joint.probabilities()
    n1 = np.arange(joint.n1_max + 1)[:, None]
    n2 = np.arange(joint.n2_max + 1)[None, :]
    idx = (n1 - n2 + joint.n2_max).ravel()
    probs = np.bincount(idx, weights=p.ravel(),
                        minlength=joint.n1_max + joint.n2_max + 1)
    return DifferenceDistribution(offset=-joint.n2_max, probs=probs)
