"""Special functions against an arbitrary-precision oracle."""

import mpmath as mp
import numpy as np
import pytest

from twinbeams.special import (
    log_bessel_i,
    log_bessel_ive,
    log_gamma,
    signed_logsumexp,
)

mp.mp.dps = 50


class TestLogGamma:
    def test_against_mpmath(self):
        xs = [0.3, 0.5, 1.0, 2.5, 18.66, 19.66, 120.7, 999.5, 5000.25]
        for x in xs:
            want = float(mp.log(mp.gamma(x)))
            got = float(log_gamma(x))
            assert got == pytest.approx(want, rel=1e-13, abs=1e-13)

    def test_integer_factorials(self):
        assert log_gamma(5.0) == pytest.approx(np.log(24.0), rel=1e-14)


class TestLogBesselI:
    # spans the scipy path, the small-argument series and the large-argument
    # asymptotic branch
    ORDERS = [0.0, 0.5, 3.0, 18.66, 120.0]
    ARGS = [1e-18, 1e-8, 0.1, 3.0, 50.0, 1e4, 1e8, 5e10, 1e13]

    def test_scaled_against_mpmath(self):
        for v in self.ORDERS:
            for z in self.ARGS:
                want = float(mp.log(mp.besseli(v, z)) - z)
                got = float(log_bessel_ive(v, z))
                assert got == pytest.approx(want, rel=1e-11), (v, z)

    def test_unscaled_consistency(self):
        z = np.array([0.5, 7.0, 300.0])
        np.testing.assert_allclose(log_bessel_i(2.5, z), log_bessel_ive(2.5, z) + z,
                                   rtol=1e-14)

    def test_zero_argument(self):
        assert log_bessel_ive(0.0, 0.0) == 0.0
        assert log_bessel_ive(3.3, 0.0) == -np.inf

    def test_negative_argument_rejected(self):
        with pytest.raises(ValueError):
            log_bessel_ive(1.0, -1.0)

    def test_vectorized(self):
        z = np.logspace(-12, 12, 60)
        out = log_bessel_ive(18.66, z)
        assert out.shape == z.shape
        assert np.all(np.isfinite(out))


class TestSignedLogSumExp:
    def test_all_positive(self):
        logs = np.log([1.0, 2.0, 3.0])
        log_abs, sign, digits = signed_logsumexp(logs, np.ones(3))
        assert log_abs == pytest.approx(np.log(6.0), rel=1e-14)
        assert sign == 1.0
        assert digits == pytest.approx(0.0, abs=1e-12)

    def test_alternating(self):
        # 10 - 9 = 1, one digit of cancellation
        logs = np.log([10.0, 9.0])
        log_abs, sign, digits = signed_logsumexp(logs, [1.0, -1.0])
        assert log_abs == pytest.approx(0.0, abs=1e-12)
        assert sign == 1.0
        assert digits == pytest.approx(np.log10(19.0), rel=1e-10)

    def test_negative_result(self):
        logs = np.log([1.0, 4.0])
        log_abs, sign, _ = signed_logsumexp(logs, [1.0, -1.0])
        assert sign == -1.0
        assert log_abs == pytest.approx(np.log(3.0), rel=1e-14)

    def test_exact_zero(self):
        logs = np.log([2.0, 2.0])
        log_abs, sign, digits = signed_logsumexp(logs, [1.0, -1.0])
        assert log_abs == -np.inf
        assert sign == 0.0
        assert digits == np.inf

    def test_empty_terms(self):
        logs = np.full(4, -np.inf)
        log_abs, sign, digits = signed_logsumexp(logs, np.ones(4))
        assert log_abs == -np.inf
        assert sign == 0.0

    def test_axis_handling(self):
        logs = np.log([[1.0, 2.0], [3.0, 4.0]])
        log_abs, sign, _ = signed_logsumexp(logs, np.ones((2, 2)), axis=1)
        np.testing.assert_allclose(np.exp(log_abs), [3.0, 7.0], rtol=1e-14)

    def test_extreme_magnitudes(self):
        logs = np.array([-1000.0, -1001.0])
        log_abs, sign, _ = signed_logsumexp(logs, [1.0, 1.0])
        assert log_abs == pytest.approx(-1000.0 + np.log1p(np.exp(-1.0)), rel=1e-13)
