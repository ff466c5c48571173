"""s-ordered joint intensity quasi-distributions and the detection transform.

For ordering parameter s the per-mode means shift to b_is = b_i + (1-s)/2 and
the ordered determinant K_s = b1s b2s - d12^2 decides the character of the
quasi-distribution P_s(W1, W2):

* K_s > 0 (s below the threshold ordering): an ordinary nonnegative density,

      P_s = (K_s^2 W1 W2 / d12^2)^((M-1)/2) / (Gamma(M) K_s^M)
            * exp(-(b2s W1 + b1s W2)/K_s) * I_{M-1}(2 d12 sqrt(W1 W2)/K_s).

  The exponent and the Bessel growth cancel to leading order; evaluation
  rearranges them as -(sqrt(b2s W1) - sqrt(b1s W2))^2/K_s
  - 2 (sqrt(b1s b2s) - d12) sqrt(W1 W2)/K_s + log(scaled Bessel), all of
  moderate size.

* K_s < 0: a generalized function, represented by the band-limited
  approximation

      P_s ~ A (W1 W2)^((M-1)/2) / (pi Gamma(M) (b1s b2s)^(M/2))
            * exp(-W1/(2 b1s) - W2/(2 b2s)) * sinc[A (b2s W1 / b1s - W2)]

  whose negative lobes and sign oscillations are the quantum signature. The
  rate constant A is not fixed by the moment data; it is an explicit
  parameter defaulting to 1/sqrt(b1s b2s) (inverse of the geometric-mean
  per-mode intensity), which puts the oscillation period on the scale of the
  distribution itself.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import WrongOrderingError, WrongRegimeError
from .model import TwinBeamModel, _threshold_root, k_s
from .photodist import JointPhotonDistribution
from .special import log_bessel_ive, log_gamma
from .validation import check_ordering

REGULAR = "regular"
OSCILLATORY = "oscillatory"

# K_s == 0 exactly is admitted as the limiting regular case; the evaluator
# substitutes this relative epsilon to avoid the coalescing singularity.
_BOUNDARY_EPS = 1e-9


@dataclass(frozen=True)
class QuasiGrid:
    """Sampled P_s on a rectangular intensity grid.

    ``values`` are linear (they span a modest dynamic range) and may be
    negative only in the oscillatory regime. The generating model rides along
    so downstream transforms can re-evaluate the density off-grid.
    """

    model: TwinBeamModel
    s: float
    regime: str
    w1_axis: np.ndarray
    w2_axis: np.ndarray
    values: np.ndarray
    k_s: float
    a_param: Optional[float] = None
    # at the threshold ordering the density is evaluated an epsilon inside
    # the regular regime; downstream transforms must use the same evaluator
    eval_model: Optional[TwinBeamModel] = None

    def __post_init__(self):
        if self.eval_model is None:
            object.__setattr__(self, "eval_model", self.model)

    def meta(self):
        return {
            "s": self.s,
            "regime": self.regime,
            "k_s": self.k_s,
            "a_param": self.a_param,
            "w1_min": float(self.w1_axis[0]),
            "w1_max": float(self.w1_axis[-1]),
            "w2_min": float(self.w2_axis[0]),
            "w2_max": float(self.w2_axis[-1]),
            "shape": list(self.values.shape),
        }


def _shifted(model: TwinBeamModel, s: float):
    h = 0.5 * (1.0 - s)
    return model.b1 + h, model.b2 + h


def default_axes(model: TwinBeamModel, s: float, points: int = 401,
                 n_sigma: float = 8.0):
    """Default sampling: [0, <W> + n_sigma std(W)] per axis."""
    b1s, b2s = _shifted(model, s)
    m = model.modes
    w1 = m * b1s + n_sigma * np.sqrt(m) * b1s
    w2 = m * b2s + n_sigma * np.sqrt(m) * b2s
    return np.linspace(0.0, w1, points), np.linspace(0.0, w2, points)


def log_quasi_regular(model: TwinBeamModel, s: float, w1, w2):
    """log P_s at (broadcast) intensity coordinates; requires K_s > 0."""
    b1s, b2s = _shifted(model, s)
    ks = b1s * b2s - model.d12**2
    if ks <= 0:
        raise WrongRegimeError(f"K_s = {ks:.6g} <= 0: not in the regular regime")
    d = model.d12
    m = model.modes
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    sq = np.sqrt(w1 * w2)
    ridge = np.sqrt(b2s * w1) - np.sqrt(b1s * w2)
    gap = ks / (np.sqrt(b1s * b2s) + d)  # = sqrt(b1s b2s) - d12, cancellation-free
    z = 2.0 * d * sq / ks
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = (
            -log_gamma(m) - m * np.log(ks)
            + 0.5 * (m - 1.0) * (2.0 * np.log(ks) + np.log(w1) + np.log(w2) - 2.0 * np.log(d))
            - ridge * ridge / ks - 2.0 * gap * sq / ks
            + log_bessel_ive(m - 1.0, z)
        )
    return np.where(sq > 0, lp, -np.inf if m > 1 else lp)


def quasi_regular(model: TwinBeamModel, s: float, w1_axis=None, w2_axis=None,
                  points: int = 401) -> QuasiGrid:
    """Ordinary nonnegative quasi-distribution for orderings with K_s >= 0.

    K_s = 0 exactly (the threshold ordering itself) is accepted and evaluated
    an epsilon inside the regular regime, where the density is a narrow ridge
    along b2s W1 = b1s W2.
    """
    s = check_ordering(s)
    ks = k_s(model, s)
    b1s_, b2s_ = _shifted(model, s)
    boundary_tol = 1e-12 * b1s_ * b2s_
    if ks < -boundary_tol:
        raise WrongRegimeError(
            f"K_s = {ks:.6g} < 0 at s = {s}: use quasi_oscillatory "
            f"(threshold ordering is {_threshold_root(model):.6g})"
        )
    eval_model = model
    if ks <= boundary_tol:
        # shrink d12 so K_s = eps * b1s b2s and evaluate just inside the regime
        b1s, b2s = _shifted(model, s)
        d_eps = np.sqrt(b1s * b2s * (1.0 - _BOUNDARY_EPS))
        eval_model = TwinBeamModel(
            b1=model.b1, b2=model.b2, modes=model.modes, d12=d_eps,
            m1_modes=model.m1_modes, m2_modes=model.m2_modes,
        )
    if w1_axis is None or w2_axis is None:
        ax1, ax2 = default_axes(model, s, points)
        w1_axis = ax1 if w1_axis is None else np.asarray(w1_axis, dtype=float)
        w2_axis = ax2 if w2_axis is None else np.asarray(w2_axis, dtype=float)
    else:
        w1_axis = np.asarray(w1_axis, dtype=float)
        w2_axis = np.asarray(w2_axis, dtype=float)
    lp = log_quasi_regular(eval_model, s, w1_axis[:, None], w2_axis[None, :])
    with np.errstate(over="ignore"):
        values = np.exp(lp)
    return QuasiGrid(model=model, s=s, regime=REGULAR, w1_axis=w1_axis,
                     w2_axis=w2_axis, values=values, k_s=k_s(model, s),
                     eval_model=eval_model)


def default_a_param(model: TwinBeamModel, s: float) -> float:
    b1s, b2s = _shifted(model, s)
    return 1.0 / np.sqrt(b1s * b2s)


def eval_quasi_oscillatory(model: TwinBeamModel, s: float, w1, w2, a_param: float):
    """Band-limited oscillatory approximation at (broadcast) coordinates."""
    b1s, b2s = _shifted(model, s)
    m = model.modes
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lenv = (
            np.log(a_param) - np.log(np.pi) - log_gamma(m)
            - 0.5 * m * np.log(b1s * b2s)
            + 0.5 * (m - 1.0) * (np.log(w1) + np.log(w2))
            - w1 / (2.0 * b1s) - w2 / (2.0 * b2s)
        )
    arg = a_param * ((b2s / b1s) * w1 - w2)
    env = np.where(w1 * w2 > 0, np.exp(lenv), 0.0 if m > 1 else np.exp(lenv))
    return env * np.sinc(arg / np.pi)


def sinc_zero_spacings(model: TwinBeamModel, s: float, a_param: float):
    """Distance between consecutive sinc zeros along W1 (at fixed W2) and W2."""
    b1s, b2s = _shifted(model, s)
    return np.pi * b1s / (a_param * b2s), np.pi / a_param


def quasi_oscillatory(model: TwinBeamModel, s: float, w1_axis=None,
                      w2_axis=None, a_param: Optional[float] = None,
                      min_points_per_zero: int = 8) -> QuasiGrid:
    """Oscillatory quasi-distribution for orderings with K_s < 0.

    Default axes are refined so at least ``min_points_per_zero`` samples fall
    between consecutive sinc zeros; explicitly passed axes are used as given.
    """
    s = check_ordering(s)
    ks = k_s(model, s)
    b1s_, b2s_ = _shifted(model, s)
    if ks >= -1e-12 * b1s_ * b2s_:
        raise WrongRegimeError(
            f"K_s = {ks:.6g} >= 0 at s = {s}: use quasi_regular "
            f"(threshold ordering is {_threshold_root(model):.6g})"
        )
    if a_param is None:
        a_param = default_a_param(model, s)
    a_param = float(a_param)
    if a_param <= 0:
        raise ValueError("a_param must be positive")
    sp1, sp2 = sinc_zero_spacings(model, s, a_param)
    if w1_axis is None or w2_axis is None:
        ax1, ax2 = default_axes(model, s)
        if w1_axis is None:
            n1 = max(401, int(np.ceil(ax1[-1] / sp1 * min_points_per_zero)) + 1)
            w1_axis = np.linspace(0.0, ax1[-1], n1)
        else:
            w1_axis = np.asarray(w1_axis, dtype=float)
        if w2_axis is None:
            n2 = max(401, int(np.ceil(ax2[-1] / sp2 * min_points_per_zero)) + 1)
            w2_axis = np.linspace(0.0, ax2[-1], n2)
        else:
            w2_axis = np.asarray(w2_axis, dtype=float)
    else:
        w1_axis = np.asarray(w1_axis, dtype=float)
        w2_axis = np.asarray(w2_axis, dtype=float)
    values = eval_quasi_oscillatory(model, s, w1_axis[:, None], w2_axis[None, :], a_param)
    return QuasiGrid(model=model, s=s, regime=OSCILLATORY, w1_axis=w1_axis,
                     w2_axis=w2_axis, values=values, k_s=ks, a_param=a_param)


def quasi_auto(model: TwinBeamModel, s: float, **kwargs) -> QuasiGrid:
    """Pick the regime from the sign of K_s."""
    if k_s(model, s) >= 0:
        kwargs.pop("a_param", None)
        return quasi_regular(model, s, **kwargs)
    return quasi_oscillatory(model, s, **kwargs)


def integrate_quasi(model: TwinBeamModel, s: float, nodes: int = None,
                    n_sigma: float = 40.0, moments: bool = False):
    """2-D quadrature of the regular quasi-distribution.

    Gauss-Legendre in sqrt-intensity coordinates, where the ridge is a
    straight line with Gaussian cross-section sqrt(K_s) wide and the
    quadrature converges spectrally; the default node count scales with the
    domain-to-ridge-width ratio. Returns the total mass, or
    (mass, <W1>, <W2>, cov) when ``moments`` is set.
    """
    from numpy.polynomial.legendre import leggauss

    b1s, b2s = _shifted(model, s)
    m = model.modes
    lims = []
    for bs in (b1s, b2s):
        hi = np.sqrt(m * bs + n_sigma * np.sqrt(m) * bs)
        lims.append(hi)
    if nodes is None:
        ks = k_s(model, s)
        if ks <= 0:
            raise WrongRegimeError("integrate_quasi needs the regular regime")
        nodes = int(max(400, np.ceil(25.0 * max(lims) / np.sqrt(ks))))
    x, w = leggauss(nodes)
    r1 = 0.5 * lims[0] * (x + 1.0)
    r2 = 0.5 * lims[1] * (x + 1.0)
    w1 = 0.5 * lims[0] * w
    w2 = 0.5 * lims[1] * w
    G1, G2 = np.meshgrid(r1, r2, indexing="ij")
    # dW = 2 r dr per axis
    lp = log_quasi_regular(model, s, G1 * G1, G2 * G2)
    with np.errstate(over="ignore"):
        f = np.exp(lp) * 4.0 * G1 * G2
    mass = float((w1 @ f) @ w2)
    if not moments:
        return mass
    m1 = float((w1 * r1**2) @ f @ w2)
    m2 = float(w1 @ f @ (w2 * r2**2))
    cross = float((w1 * r1**2) @ f @ (w2 * r2**2))
    return mass, m1, m2, cross - m1 * m2


def mandel_forward(quasi: QuasiGrid, n1_max: int, n2_max: int,
                   nodes: int = 64) -> JointPhotonDistribution:
    """Photodetection transform of a normally ordered (s = 1) density:

        p(n1, n2) = iint W1^n1 W2^n2 exp(-W1 - W2) / (n1! n2!) P_1(W1, W2)

    evaluated with generalized Gauss-Laguerre quadrature (weight W^n e^-W per
    axis, so the polynomial part is exact and only the smooth density is
    interpolated). Serves as the independent cross-check of the direct
    photon-number evaluation for classical models.
    """
    from scipy.special import roots_genlaguerre

    if quasi.s != 1.0:
        raise WrongOrderingError(
            f"the photodetection transform requires s = 1, got s = {quasi.s}"
        )
    if quasi.regime != REGULAR:
        raise WrongRegimeError("the photodetection transform needs a regular density")
    model = quasi.eval_model
    lp_out = np.full((n1_max + 1, n2_max + 1), -np.inf)
    rules = [roots_genlaguerre(nodes, n) for n in range(max(n1_max, n2_max) + 1)]
    for n1 in range(n1_max + 1):
        x1, wq1 = rules[n1]
        for n2 in range(n2_max + 1):
            x2, wq2 = rules[n2]
            lp = log_quasi_regular(model, 1.0, x1[:, None], x2[None, :])
            val = float(wq1 @ np.exp(lp) @ wq2)
            if val > 0:
                lp_out[n1, n2] = (np.log(val)
                                  - log_gamma(n1 + 1.0) - log_gamma(n2 + 1.0))
    mass = float(np.exp(lp_out[np.isfinite(lp_out)]).sum())
    return JointPhotonDistribution(
        model=model, n1_max=n1_max, n2_max=n2_max, log_p=lp_out,
        sign=np.ones_like(lp_out, dtype=np.int8), captured_mass=mass,
    )


@dataclass(frozen=True)
class DifferenceQuasi:
    """Quasi-distribution of the intensity difference W = W1 - W2."""

    s: float
    w_axis: np.ndarray
    values: np.ndarray

    @property
    def total(self):
        return float(np.trapezoid(self.values, self.w_axis))

    def moment(self, order: int) -> float:
        return float(np.trapezoid(self.values * self.w_axis**order, self.w_axis))


def difference_quasi(quasi: QuasiGrid, w_axis=None,
                     line_points: int = 8192) -> DifferenceQuasi:
    """Line integrals P_{s,-}(W) = integral of P_s along W1 - W2 = W.

    Each line re-samples the analytic density carried by the grid (regular or
    oscillatory), so oscillations are resolved independently of the stored
    grid resolution. Negative values are expected in the oscillatory regime.
    """
    model = quasi.eval_model
    w1_hi = float(quasi.w1_axis[-1])
    w2_hi = float(quasi.w2_axis[-1])
    if w_axis is None:
        b1s, b2s = _shifted(model, quasi.s)
        m = model.modes
        mu = m * (b1s - b2s)
        sd = np.sqrt(m * (b1s**2 + b2s**2))
        lo, hi = mu - 6.0 * sd, mu + 6.0 * sd
        w_axis = np.linspace(lo, hi, 241)
    else:
        w_axis = np.asarray(w_axis, dtype=float)

    values = np.empty_like(w_axis)
    for i, wd in enumerate(w_axis):
        lo = max(0.0, wd)
        hi = min(w1_hi, w2_hi + wd)
        if hi <= lo:
            values[i] = 0.0
            continue
        w1 = np.linspace(lo, hi, line_points)
        w2 = w1 - wd
        if quasi.regime == REGULAR:
            with np.errstate(over="ignore"):
                f = np.exp(log_quasi_regular(model, quasi.s, w1, w2))
        else:
            f = eval_quasi_oscillatory(model, quasi.s, w1, w2, quasi.a_param)
        values[i] = np.trapezoid(f, w1)
    return DifferenceQuasi(s=quasi.s, w_axis=w_axis, values=values)
