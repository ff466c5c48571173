"""Special-function primitives used throughout the package.

Everything here works in log space: probabilities on mesoscopic grids span
hundreds of orders of magnitude, and the quasi-distribution exponents cancel
against the large-argument growth of the modified Bessel function. Gamma and
Bessel evaluations are backed by scipy (Lanczos-class log-gamma, exponentially
scaled Bessel) with a power-series fallback where the scaled form underflows;
the test suite pins both against an arbitrary-precision oracle.
"""

import numpy as np
from scipy.special import gammaln, ive

__all__ = [
    "log_gamma",
    "log_bessel_ive",
    "log_bessel_i",
    "signed_logsumexp",
]


def log_gamma(x):
    """log Gamma(x) for real positive x (noninteger mode numbers included)."""
    return gammaln(x)


def _log_ive_series(v, z):
    # log(I_v(z) e^{-z}) from the ascending series, accumulated entirely in
    # log space (terms are all positive). Used where the scaled evaluation
    # under- or overflows: small arguments, and large orders with z <~ v.
    # The series peaks near k* = (sqrt(v^2 + z^2) - v)/2, so the term count
    # stays modest in exactly those regimes.
    out = np.empty_like(z)
    lh = np.log(z / 2.0)
    for i, (zi, lhi) in enumerate(zip(z, lh)):
        k_peak = 0.5 * (np.hypot(v, zi) - v)
        kmax = int(np.ceil(k_peak + 12.0 * np.sqrt(k_peak + 10.0) + 30.0))
        k = np.arange(kmax + 1, dtype=float)
        logt = (v + 2.0 * k) * lhi - gammaln(k + 1.0) - gammaln(v + k + 1.0)
        m = logt.max()
        out[i] = m + np.log(np.exp(logt - m).sum()) - zi
    return out


def _log_ive_asymptotic(v, z, terms=10):
    # large-argument expansion of the scaled function,
    # I_v(z) e^{-z} ~ (2 pi z)^{-1/2} sum_k (-1)^k prod_{j<k}(mu-(2j+1)^2)/(k! (8z)^k)
    mu = 4.0 * v * v
    s = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(1, terms):
        term = term * -(mu - (2.0 * k - 1.0) ** 2) / (k * 8.0 * z)
        s = s + term
    return -0.5 * np.log(2.0 * np.pi * z) + np.log(s)


def log_bessel_ive(v, z):
    """log of the exponentially scaled modified Bessel function, log(I_v(z) e^{-z}).

    Parameters
    ----------
    v : float
        Order, real and >= 0 (noninteger allowed).
    z : array_like
        Argument, >= 0.

    The scipy scaled evaluation covers the bulk; where it under- or overflows
    the ascending series (small z, large order) or the large-argument
    asymptotic expansion (scipy yields NaN above z ~ 1e10) takes over.
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z).copy()
    if np.any(z < 0):
        raise ValueError("argument of the modified Bessel function must be >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(ive(v, z))
    bad = ~np.isfinite(out) & (z > 0)
    if np.any(bad):
        # the series cost grows with z, the asymptotic error shrinks with it;
        # past this point the expansion is at machine precision
        large = bad & (z >= max(1e8, 50.0 * (v * v + 1.0)))
        rest = bad & ~large
        if np.any(rest):
            out[rest] = _log_ive_series(v, z[rest])
        if np.any(large):
            out[large] = _log_ive_asymptotic(v, z[large])
    if np.any(~np.isfinite(out) & (z > 0)):
        raise RuntimeError("scaled Bessel evaluation failed")
    out[z == 0] = 0.0 if v == 0 else -np.inf
    return out[0] if scalar else out


def log_bessel_i(v, z):
    """log I_v(z); unscaled, so it grows ~z for large arguments."""
    return log_bessel_ive(v, z) + np.asarray(z, dtype=float)


def signed_logsumexp(log_mags, signs, axis=-1):
    """Sum of signed terms given in (sign, log magnitude) form.

    Positive and negative streams are accumulated separately in extended
    precision after shifting by the largest magnitude, and the number of
    decimal digits lost to cancellation is reported.

    Parameters
    ----------
    log_mags : ndarray
        Log magnitudes; -inf marks absent terms.
    signs : ndarray
        Elementwise signs (+1 / -1); broadcast against log_mags.
    axis : int
        Axis to reduce over.

    Returns
    -------
    log_abs : ndarray
        log |sum|; -inf when the sum is exactly zero.
    sign : ndarray
        Sign of the sum (0 for an exact zero).
    digits_lost : ndarray
        log10(sum |terms| / |sum|); 0 when no cancellation occurred,
        +inf for complete cancellation.
    """
    log_mags = np.asarray(log_mags, dtype=float)
    signs = np.broadcast_to(np.asarray(signs, dtype=float), log_mags.shape)
    m = np.max(log_mags, axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    scaled = np.exp((log_mags - m_safe).astype(np.longdouble))
    scaled = np.where(np.isfinite(log_mags), scaled, 0.0)
    net = np.sum(signs * scaled, axis=axis)
    gross = np.sum(scaled, axis=axis)
    m_red = np.squeeze(m_safe, axis=axis)
    empty = ~np.isfinite(np.squeeze(m, axis=axis))

    sign = np.sign(net).astype(float)
    absnet = np.abs(net)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_abs = np.where(absnet > 0, np.log(absnet.astype(float)), -np.inf) + m_red
        digits = np.where(
            absnet > 0,
            np.log10(np.maximum(gross / np.maximum(absnet, 1e-4900), 1.0)).astype(float),
            np.where(gross > 0, np.inf, 0.0),
        )
    log_abs = np.where(empty, -np.inf, log_abs)
    sign = np.where(empty, 0.0, sign)
    digits = np.where(empty, 0.0, digits)
    if log_abs.ndim == 0:
        return float(log_abs), float(sign), float(digits)
    return log_abs, sign, digits
