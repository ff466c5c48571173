"""Multimode twin-beam model: inversion of intensity moments and certificates.

The model describes M independent mode pairs, each carrying mean photon
numbers b1, b2 and a pair correlation d12. Intensity moments relate to the
parameters through

    <W_i> = M b_i,   var(W_i) = M b_i^2,   cov(W_1, W_2) = M d12^2

and the determinant K = b1 b2 - d12^2 decides classicality: K < 0 certifies
pair correlations no classical intensity distribution can produce.
"""

import math
from dataclasses import dataclass

from .exceptions import (
    LevelMismatchError,
    NegativeCrossCovarianceError,
    OutOfRangeError,
    ZeroVarianceError,
)
from .moments import INTENSITY, PHOTON, MomentSet

MODE_POLICIES = ("mean", "arm1", "arm2", "explicit")

# Relative slack on physicality and ordering-range checks, to admit models
# sitting exactly on a boundary after floating-point round trips.
_REL_TOL = 1e-9


@dataclass(frozen=True)
class TwinBeamModel:
    """Fitted twin-beam parameters.

    ``m1_modes``/``m2_modes`` are the per-arm mode-number estimates retained
    as diagnostics; all derived formulas use the common ``modes`` (real
    valued, noninteger allowed — everything downstream runs on log-gamma,
    never factorials).
    """

    b1: float
    b2: float
    modes: float
    d12: float
    m1_modes: float = None
    m2_modes: float = None

    def __post_init__(self):
        if not self.b1 > 0 or not self.b2 > 0:
            raise ValueError("per-mode means b1, b2 must be positive")
        if not self.modes > 0:
            raise ValueError("mode number must be positive")
        if self.d12 < 0:
            raise ValueError("pair correlation magnitude d12 must be >= 0")
        if self.m1_modes is None:
            object.__setattr__(self, "m1_modes", self.modes)
        if self.m2_modes is None:
            object.__setattr__(self, "m2_modes", self.modes)

    @property
    def k(self):
        """Classicality determinant K = b1 b2 - d12^2."""
        return self.b1 * self.b2 - self.d12**2

    @property
    def noise1(self):
        """Fictitious noise mean of arm 1, b1 + K; negative means unphysical."""
        return self.b1 + self.k

    @property
    def noise2(self):
        return self.b2 + self.k

    @property
    def is_physical(self):
        """K + min(b1, b2) must not be negative (both noise means >= 0)."""
        tol = _REL_TOL * max(self.b1, self.b2)
        return self.k + min(self.b1, self.b2) >= -tol

    def to_dict(self):
        return {
            "b1": self.b1,
            "b2": self.b2,
            "modes": self.modes,
            "d12": self.d12,
            "m1_modes": self.m1_modes,
            "m2_modes": self.m2_modes,
            "k": self.k,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            b1=float(d["b1"]),
            b2=float(d["b2"]),
            modes=float(d["modes"]),
            d12=float(d["d12"]),
            m1_modes=float(d.get("m1_modes", d["modes"])),
            m2_modes=float(d.get("m2_modes", d["modes"])),
        )


def fit(intensity: MomentSet, mode_policy: str = "mean", modes: float = None) -> TwinBeamModel:
    """Invert intensity moments into twin-beam parameters.

        b_i = var(W_i) / <W_i>,   M_i = <W_i>^2 / var(W_i),
        d12 = sqrt(cov(W_1, W_2) / M)

    The two per-arm mode estimates M_1, M_2 differ on real data; ``mode_policy``
    selects the common M: their arithmetic mean (default), one arm, or an
    explicit value (pass ``modes``).
    """
    if intensity.level != INTENSITY:
        raise LevelMismatchError(f"fit expects intensity-level moments, got {intensity.level}")
    if mode_policy not in MODE_POLICIES:
        raise ValueError(f"mode_policy must be one of {MODE_POLICIES}, got {mode_policy!r}")
    v1, v2 = intensity.var1, intensity.var2
    if v1 <= 0 or v2 <= 0:
        raise ZeroVarianceError("intensity variances must be strictly positive to fit")
    cov = intensity.cov
    if cov < 0:
        raise NegativeCrossCovarianceError(
            f"negative intensity cross-covariance {cov:.6g}: the pair-correlation "
            "model assumes positively correlated beams"
        )
    b1 = v1 / intensity.mean1
    b2 = v2 / intensity.mean2
    m1 = intensity.mean1**2 / v1
    m2 = intensity.mean2**2 / v2
    if mode_policy == "mean":
        m = 0.5 * (m1 + m2)
    elif mode_policy == "arm1":
        m = m1
    elif mode_policy == "arm2":
        m = m2
    else:
        if modes is None:
            raise ValueError("mode_policy='explicit' requires the modes argument")
        m = float(modes)
        if not m > 0:
            raise ValueError(f"explicit mode number must be positive, got {m}")
    d12 = math.sqrt(cov / m)
    return TwinBeamModel(b1=b1, b2=b2, modes=m, d12=d12, m1_modes=m1, m2_modes=m2)


def forward_moments(model: TwinBeamModel) -> MomentSet:
    """Intensity moments regenerated from the model.

    Both variances use the common mode number, so on data with unequal
    per-arm mode estimates the regenerated moments deliberately differ from
    the measured ones; model-based certificates are defined through this
    regeneration.
    """
    mean1 = model.modes * model.b1
    mean2 = model.modes * model.b2
    return MomentSet(
        level=INTENSITY,
        mean1=mean1,
        mean2=mean2,
        second1=model.modes * model.b1**2 + mean1**2,
        second2=model.modes * model.b2**2 + mean2**2,
        cross=model.modes * model.d12**2 + mean1 * mean2,
    )


def determinant_k(model: TwinBeamModel) -> float:
    """K = b1 b2 - d12^2; negative values certify a nonclassical field."""
    return model.k


def k_s(model: TwinBeamModel, s: float) -> float:
    """Ordered determinant K_s = (b1 + h)(b2 + h) - d12^2 with h = (1 - s)/2.

    Decreasing s adds symmetric-ordering vacuum noise h to each arm, so K_s
    increases monotonically as s decreases; K_1 = K.
    """
    if not -1.0 <= s <= 1.0:
        raise OutOfRangeError(f"ordering parameter must be in [-1, 1], got {s}")
    h = 0.5 * (1.0 - s)
    return (model.b1 + h) * (model.b2 + h) - model.d12**2


def _threshold_root(model: TwinBeamModel) -> float:
    # formal root of K_s = 0 in s; the discriminant (b1-b2)^2 + 4 d12^2 is
    # never negative
    ssum = model.b1 + model.b2
    return 1.0 + ssum - math.sqrt(ssum**2 - 4.0 * model.k)


def threshold_ordering(model: TwinBeamModel) -> float:
    """The ordering s_th at which K_s changes sign.

    Root of K_s = 0 in s:  s_th = 1 + b1 + b2 - sqrt((b1 + b2)^2 - 4K).
    Quasi-distributions are ordinary nonnegative functions for s <= s_th and
    oscillatory generalized functions above it. Nonclassical physical models
    always land in [0, 1]; classical models (K > 0) have a formal root above
    1, meaning every admissible ordering is regular, and raise here (the
    report clamps instead).
    """
    s_th = _threshold_root(model)
    tol = _REL_TOL * (1.0 + model.b1 + model.b2)
    if s_th < -1.0 - tol or s_th > 1.0 + tol:
        raise OutOfRangeError(f"threshold ordering {s_th:.6g} outside [-1, 1]")
    return min(1.0, max(-1.0, s_th))


@dataclass(frozen=True)
class NonclassicalityReport:
    """Scalar certificates plus verdict booleans for a fitted model.

    Model-based quantities come from the regenerated (common mode number)
    moments; the ``*_raw`` companions use the measured photon moments
    directly. ``r`` and ``var_w_diff`` satisfy r - 1 = var_w_diff / shot_noise
    identically, so r < 1 exactly when the intensity-difference variance is
    negative.
    """

    k: float
    r: float
    r_raw: float
    lam: float
    s_th: float
    c: float
    c_raw: float
    var_w_diff: float
    var_w_diff_raw: float
    shot_noise: float
    classical_bound_low: bool
    classical_bound_high: bool
    mode_bound_ok: bool
    is_nonclassical: bool
    is_physical: bool

    def to_dict(self):
        return {
            "k": self.k,
            "r": self.r,
            "r_raw": self.r_raw,
            "lambda": self.lam,
            "s_th": self.s_th,
            "c": self.c,
            "c_raw": self.c_raw,
            "var_w_diff": self.var_w_diff,
            "var_w_diff_raw": self.var_w_diff_raw,
            "shot_noise": self.shot_noise,
            "classical_bound_low": self.classical_bound_low,
            "classical_bound_high": self.classical_bound_high,
            "mode_bound_ok": self.mode_bound_ok,
            "is_nonclassical": self.is_nonclassical,
            "is_physical": self.is_physical,
        }

    def render_text(self):
        rows = [
            ("determinant K", f"{self.k:.6g}"),
            ("threshold ordering s_th", f"{self.s_th:.6g}"),
            ("sub-shot-noise R (model)", f"{self.r:.6g}"),
            ("sub-shot-noise R (raw)", f"{self.r_raw:.6g}"),
            ("principal squeeze variance", f"{self.lam:.6g}"),
            ("photon-number covariance C (model)", f"{self.c:.6g}"),
            ("photon-number covariance C (raw)", f"{self.c_raw:.6g}"),
            ("var[W1 - W2] (model)", f"{self.var_w_diff:.6g}"),
            ("var[W1 - W2] (raw)", f"{self.var_w_diff_raw:.6g}"),
            ("shot-noise level <n1> + <n2>", f"{self.shot_noise:.6g}"),
            ("classical lower bound b1 b2 >= d12^2", "holds" if self.classical_bound_low else "violated"),
            ("physical upper bound d12^2 <= b1 b2 + min(b1, b2)", "holds" if self.classical_bound_high else "violated"),
            ("mode-number bound max(b) <= min(b) + sqrt(2 min(b))", "holds" if self.mode_bound_ok else "violated"),
            ("verdict", "nonclassical" if self.is_nonclassical else "classical"),
            ("physicality", "ok" if self.is_physical else "VIOLATED"),
        ]
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def nonclassicality_report(model: TwinBeamModel, photon: MomentSet) -> NonclassicalityReport:
    """Evaluate every certificate; never raises, the flags carry the verdicts.

    R compares the photon-number-difference variance against the shot-noise
    level <n1> + <n2>. The model-based variant regenerates the intensity
    difference variance as M (b1^2 + b2^2 - 2 d12^2) and adds the measured
    shot noise; the raw variant uses the measured photon moments unchanged.
    The covariance C is reported the same two ways.
    """
    if photon.level != PHOTON:
        raise LevelMismatchError(f"report expects photon-level moments, got {photon.level}")
    m, b1, b2, d12 = model.modes, model.b1, model.b2, model.d12
    k = model.k
    shot = photon.mean1 + photon.mean2

    var_w_diff = m * (b1**2 + b2**2 - 2.0 * d12**2)
    var_w_diff_raw = photon.var1 - photon.mean1 + photon.var2 - photon.mean2 - 2.0 * photon.cov
    r = 1.0 + var_w_diff / shot
    r_raw = (photon.var1 + photon.var2 - 2.0 * photon.cov) / shot

    lam = 1.0 + b1 + b2 - 2.0 * d12
    s_th = min(1.0, max(-1.0, _threshold_root(model)))

    # photon-number covariance; model variances are M b_i (1 + b_i)
    c = d12**2 / math.sqrt(b1 * b2 * (1.0 + b1) * (1.0 + b2))
    denom_raw = photon.var1 * photon.var2
    c_raw = photon.cov / math.sqrt(denom_raw) if denom_raw > 0 else float("nan")

    lo, hi = min(b1, b2), max(b1, b2)
    return NonclassicalityReport(
        k=k,
        r=r,
        r_raw=r_raw,
        lam=lam,
        s_th=s_th,
        c=c,
        c_raw=c_raw,
        var_w_diff=var_w_diff,
        var_w_diff_raw=var_w_diff_raw,
        shot_noise=shot,
        classical_bound_low=b1 * b2 >= d12**2,
        classical_bound_high=d12**2 <= b1 * b2 + lo,
        mode_bound_ok=hi <= lo + math.sqrt(2.0 * lo),
        is_nonclassical=k < 0,
        is_physical=model.is_physical,
    )
