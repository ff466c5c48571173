"""Acceptance gate: one test per published-dataset criterion.

Each test prints a PASS line with the measured values so the suite output
doubles as a verification report. Reference bands come from the published
analysis of the dataset; see tests/conftest.py for why the reference model
pins the quoted mode count.

Known limitation, asserted below as a strict expected failure: the quoted
shorthand 1 + K/b1 for the large-n1 conditional Fano factor drops the idler
noise term (b2 + K)/(1 + b1), which is not small for this dataset. The exact
closed-form limit is 1 + (b2 + K)/(1 + b1) + K/b1 ~ 0.291, and the empirical
row statistics match it to better than 0.2%; they cannot also equal 0.167.
"""

import time

import numpy as np
import pytest
from scipy.special import gammaln

import twinbeams as tb
from twinbeams.sampling import histogram2d
from twinbeams.special import signed_logsumexp

from conftest import (
    REFERENCE_ETA,
    REFERENCE_MODES,
    make_model,
    random_quantum_model,
)

CLASSICAL = make_model(2.0, 3.0, 4.0, 5.5)


def _announce(num, text):
    print(f"\nACCEPTANCE {num}: PASS - {text}")


@pytest.fixture(scope="module")
def reference_joint(reference_model):
    """Auto-truncated joint distribution of the reference model (shared)."""
    return tb.joint_pn(reference_model)


class TestCriterion1:
    def test_fit_reproduces_published_parameters(self, reference_intensity):
        t0 = time.perf_counter()
        m = tb.fit(reference_intensity)
        elapsed = time.perf_counter() - t0
        assert m.b1 == pytest.approx(52.95, abs=0.05)
        assert m.b2 == pytest.approx(50.81, abs=0.05)
        assert m.m1_modes == pytest.approx(18.11, abs=0.02)
        assert m.m2_modes == pytest.approx(21.22, abs=0.02)
        assert m.modes == pytest.approx(19.66, abs=0.02)
        assert m.d12 == pytest.approx(52.29, abs=0.05)
        assert elapsed < 1e-3
        _announce(1, f"fit b1={m.b1:.4f} b2={m.b2:.4f} M1={m.m1_modes:.4f} "
                     f"M2={m.m2_modes:.4f} M={m.modes:.4f} d12={m.d12:.4f} "
                     f"in {elapsed * 1e6:.0f} us")


class TestCriterion2:
    def test_derived_certificates(self, reference_model, reference_photon):
        t0 = time.perf_counter()
        rep = tb.nonclassicality_report(reference_model, reference_photon)
        elapsed = time.perf_counter() - t0
        assert rep.k == pytest.approx(-44.23, abs=1.5)
        assert rep.s_th == pytest.approx(0.15, abs=0.02)
        assert rep.lam == pytest.approx(0.18, abs=0.02)
        assert rep.c == pytest.approx(0.997, abs=0.001)
        assert rep.var_w_diff == pytest.approx(-1654.0, abs=10.0)
        assert rep.r == pytest.approx(0.19, abs=0.01)
        assert elapsed < 1e-3
        _announce(2, f"K={rep.k:.3f} s_th={rep.s_th:.4f} lambda={rep.lam:.4f} "
                     f"C={rep.c:.5f} var_diff={rep.var_w_diff:.1f} R={rep.r:.4f} "
                     f"in {elapsed * 1e6:.0f} us")


class TestCriterion3:
    def test_ordered_determinant_regime_split(self, reference_model):
        k01 = tb.k_s(reference_model, 0.1)
        k02 = tb.k_s(reference_model, 0.2)
        assert k01 == pytest.approx(2.66, abs=0.5)
        assert k01 > 0
        assert k02 == pytest.approx(-2.53, abs=0.5)
        assert k02 < 0
        _announce(3, f"K_s(0.1)={k01:.4f} > 0, K_s(0.2)={k02:.4f} < 0")


class TestCriterion4:
    def test_mass_moments_and_concentration(self, reference_model, reference_joint):
        joint = reference_joint
        assert joint.captured_mass >= 1 - 1e-6
        gm = joint.grid_moments()
        model_photon = tb.intensity_to_photon(tb.forward_moments(reference_model))
        # the common-mode-number model cannot reproduce both measured means
        # (the per-arm mode estimates differ), so grid sums are checked
        # against the model-implied photon moments
        for field in ("mean1", "mean2", "second1", "second2", "cross"):
            got = getattr(gm, field)
            want = getattr(model_photon, field)
            assert got == pytest.approx(want, rel=1e-3), field
        diff = tb.difference_pn(joint)
        halfwidth = 3.0 * np.sqrt(diff.variance)
        band = joint.band_mass(halfwidth, center=diff.mean)
        assert band >= 0.99
        _announce(4, f"mass={joint.captured_mass:.9f}, moments within 0.1%, "
                     f"{band:.4f} of mass within 3 sigma of the diagonal")

    def test_runtime_on_2000_grid(self, reference_model):
        t0 = time.perf_counter()
        joint = tb.joint_pn(reference_model, 2000, 2000)
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0
        assert np.isfinite(joint.log_p[2000, 2000])
        _announce(4, f"2000x2000 grid evaluated in {elapsed:.2f} s")


def _conditional_row_series(model, n1, n2_lo, n2_hi):
    """Independent per-point series evaluation of one grid row."""
    k = model.k
    a, c1, c2 = -k, model.b1 + k, model.b2 + k
    d = 1.0 + model.b1 + model.b2 + k
    out = np.empty(n2_hi - n2_lo + 1)
    for i, n2 in enumerate(range(n2_lo, n2_hi + 1)):
        js = np.arange(min(n1, n2) + 1, dtype=float)
        logt = (gammaln(n1 + n2 + model.modes - js) - gammaln(model.modes)
                - gammaln(js + 1) - gammaln(n1 - js + 1) - gammaln(n2 - js + 1)
                + js * np.log(a) + (n1 - js) * np.log(c1) + (n2 - js) * np.log(c2)
                - (n1 + n2 + model.modes - js) * np.log(d))
        log_abs, sign, _ = signed_logsumexp(logt, np.ones_like(logt))
        out[i] = sign * np.exp(log_abs)
    return out


class TestCriterion5:
    def test_fano_decreasing_and_exact_limit(self, reference_model, reference_joint):
        n1s = np.arange(1, 5001)
        closed = np.array([tb.conditional_fano(reference_model, n) for n in n1s])
        assert np.all(np.diff(closed) < 0)
        # empirical rows agree with the closed form
        for n1 in (500, 959, 1500):
            c = tb.conditional(reference_joint, n1)
            assert c.fano == pytest.approx(c.fano_closed_form, rel=0.01)
        # empirical Fano at n1 = 5000 against the closed-form asymptote,
        # via an independent single-row series evaluation
        model = reference_model
        limit = tb.conditional_fano(model, 1e15)
        mu = 5000 * (-model.k / model.b1) + (5000 + model.modes) * (
            (model.b2 + model.k) / (1 + model.b1))
        sd = np.sqrt(limit * mu)
        lo, hi = int(mu - 12 * sd), int(mu + 12 * sd)
        row = _conditional_row_series(model, 5000, lo, hi)
        row = row / row.sum()
        ks = np.arange(lo, hi + 1, dtype=float)
        mean = row @ ks
        fano_emp = (row @ ks**2 - mean**2) / mean
        assert fano_emp == pytest.approx(limit, rel=0.01)
        # lossless toy model: conditioning pins the idler count exactly
        lossless = make_model(3.0, 3.0, 2.0, 12.0)
        jl = tb.joint_pn(lossless, 20, 20)
        cl = tb.conditional(jl, 8)
        assert cl.fano == pytest.approx(0.0, abs=1e-12)
        _announce(5, f"Fano decreasing, empirical({fano_emp:.4f}) matches the "
                     f"closed-form limit ({limit:.4f}) to "
                     f"{abs(fano_emp / limit - 1) * 100:.2f}%; lossless Fano = 0")

    @pytest.mark.xfail(
        strict=True,
        reason="the 1 + K/b1 shorthand for the conditional Fano limit is only "
               "valid when the idler noise mean b2 + K vanishes; for this "
               "dataset b2 + K = 6.7 and the exact limit is "
               "1 + (b2 + K)/(1 + b1) + K/b1 = 0.291, not 0.167",
    )
    def test_fano_limit_shorthand_unattainable(self, reference_model):
        model = reference_model
        limit_shorthand = 1.0 + model.k / model.b1
        mu = 5000 * (-model.k / model.b1) + (5000 + model.modes) * (
            (model.b2 + model.k) / (1 + model.b1))
        sd = np.sqrt(0.3 * mu)
        lo, hi = int(mu - 12 * sd), int(mu + 12 * sd)
        row = _conditional_row_series(model, 5000, lo, hi)
        row = row / row.sum()
        ks = np.arange(lo, hi + 1, dtype=float)
        mean = row @ ks
        fano_emp = (row @ ks**2 - mean**2) / mean
        assert fano_emp == pytest.approx(limit_shorthand, rel=0.01)


class TestCriterion6:
    def test_difference_narrower_than_poisson_baseline(
            self, reference_model, reference_photon, reference_joint):
        diff = tb.difference_pn(reference_joint)
        shot = reference_photon.mean1 + reference_photon.mean2
        assert diff.variance < shot
        rep = tb.nonclassicality_report(reference_model, reference_photon)
        ratio = diff.variance / shot
        assert ratio == pytest.approx(rep.r, rel=0.05)
        _announce(6, f"var(p-)={diff.variance:.1f} < shot noise {shot:.1f}; "
                     f"ratio {ratio:.4f} matches R={rep.r:.4f} to "
                     f"{abs(ratio / rep.r - 1) * 100:.2f}%")


class TestCriterion7:
    def test_detection_transform_cross_validation(self):
        t0 = time.perf_counter()
        grid = tb.quasi_regular(CLASSICAL, 1.0, points=3)
        transformed = tb.mandel_forward(grid, 60, 60, nodes=64)
        direct = tb.joint_pn(CLASSICAL, 60, 60)
        elapsed = time.perf_counter() - t0
        dev = np.abs(transformed.probabilities() - direct.probabilities()).max()
        assert dev <= 1e-6
        assert elapsed < 30.0
        _announce(7, f"detection transform matches the direct evaluation to "
                     f"{dev:.2e} absolute on [0,60]^2 in {elapsed:.1f} s")


class TestCriterion8:
    def test_oscillatory_signatures(self, reference_model):
        regular = tb.quasi_regular(reference_model, 0.1, points=201)
        assert np.all(regular.values >= 0.0)
        osc = tb.quasi_oscillatory(reference_model, 0.2)
        assert osc.values.min() < 0.0
        # sign changes along the anti-ridge direction through the bulk
        b1s, b2s = reference_model.b1 + 0.4, reference_model.b2 + 0.4
        w2 = osc.w2_axis[np.searchsorted(osc.w2_axis, reference_model.modes * b2s)]
        row = osc.values[:, np.searchsorted(osc.w2_axis, w2)]
        sgn = np.sign(row[np.abs(row) > 1e-300])
        changes = int(np.sum(sgn[:-1] * sgn[1:] < 0))
        assert changes >= 2
        dq = tb.difference_quasi(osc)
        assert dq.values.min() < 0.0
        _announce(8, f"s=0.1 grid nonnegative; s=0.2 grid min "
                     f"{osc.values.min():.3e} with {changes} sign changes; "
                     f"difference quasi-distribution min {dq.values.min():.3e}")


class TestCriterion9:
    def test_monte_carlo_end_to_end(self, reference_model, reference_joint):
        t0 = time.perf_counter()
        shots = 1_000_000
        data = tb.sample_shots(tb.SimConfig(
            model=reference_model, shots=shots, eta=REFERENCE_ETA, seed=2026))
        est = tb.TwinBeamEstimator(eta=REFERENCE_ETA).fit(data.shots)
        fitted = np.array([est.b1_, est.b2_, est.modes_, est.d12_])
        true = np.array([reference_model.b1, reference_model.b2,
                         reference_model.modes, reference_model.d12])
        # standard errors by batching
        batches = np.array_split(data.shots, 50)
        per_batch = np.array([
            (lambda e: [e.b1_, e.b2_, e.modes_, e.d12_])(
                tb.TwinBeamEstimator(eta=REFERENCE_ETA).fit(b))
            for b in batches])
        se = per_batch.std(axis=0, ddof=1) / np.sqrt(len(batches))
        z = np.abs(fitted - true) / se
        assert np.all(z <= 5.0), z

        # unit-efficiency histogram against the analytic grid, compared on
        # 25-count blocks: per-count cells have an irreducible Monte Carlo
        # noise floor of ~0.065 at 1e6 shots regardless of sampler quality
        full = tb.sample_shots(tb.SimConfig(
            model=reference_model, shots=shots, eta=1.0, seed=2027))
        joint = reference_joint
        h = histogram2d(full, joint.n1_max, joint.n2_max)
        p = joint.probabilities()
        block = 25
        n1b = (joint.n1_max + 1) // block * block
        n2b = (joint.n2_max + 1) // block * block
        hb = h[:n1b, :n2b].reshape(n1b // block, block, n2b // block, block).sum(axis=(1, 3))
        pb = p[:n1b, :n2b].reshape(n1b // block, block, n2b // block, block).sum(axis=(1, 3))
        tv = 0.5 * np.abs(hb - pb).sum()
        elapsed = time.perf_counter() - t0
        assert tv < 0.01
        assert elapsed < 300.0
        _announce(9, f"1e6-shot fit recovery max |z| = {z.max():.2f} (<= 5); "
                     f"block histogram TV = {tv:.4f} (< 0.01); {elapsed:.0f} s")


class TestCriterion10:
    def test_fit_forward_round_trip(self):
        rng = np.random.default_rng(100)
        worst = 0.0
        for _ in range(1000):
            model = random_quantum_model(rng)
            back = tb.fit(tb.forward_moments(model), "explicit", model.modes)
            worst = max(worst,
                        abs(back.b1 / model.b1 - 1),
                        abs(back.b2 / model.b2 - 1),
                        abs(back.d12 / model.d12 - 1))
        assert worst < 1e-12
        _announce(10, f"fit/forward round trip over 1000 models, worst rel err {worst:.2e}")

    def test_regime_dichotomy(self):
        rng = np.random.default_rng(101)
        checked = 0
        while checked < 100:
            model = random_quantum_model(rng)
            s_th = tb.threshold_ordering(model)
            if not -0.98 <= s_th <= 0.98:
                continue
            checked += 1
            assert tb.quasi_regular(model, s_th - 0.02, points=3).regime == "regular"
            with pytest.raises(tb.quasidist.WrongRegimeError):
                tb.quasi_regular(model, s_th + 0.02, points=3)
            ax = np.linspace(0.0, 5.0, 3)
            assert tb.quasi_oscillatory(model, s_th + 0.02, w1_axis=ax,
                                        w2_axis=ax).regime == "oscillatory"
            with pytest.raises(tb.quasidist.WrongRegimeError):
                tb.quasi_oscillatory(model, s_th - 0.02, w1_axis=ax, w2_axis=ax)
        _announce(10, "regime dichotomy switches at the threshold ordering "
                      "(100 models)")

    def test_variance_identity_through_grids(self, reference_model, reference_joint):
        models_and_grids = [(reference_model, reference_joint)]
        rng = np.random.default_rng(102)
        for _ in range(3):
            m = random_quantum_model(rng, b_max=5.0, m_max=10.0)
            models_and_grids.append((m, tb.joint_pn(m)))
        for model, joint in models_and_grids:
            gm = joint.grid_moments()
            diff = tb.difference_pn(joint)
            lhs = diff.variance - (gm.mean1 + gm.mean2)
            rhs = model.modes * (model.b1**2 + model.b2**2 - 2 * model.d12**2)
            assert lhs == pytest.approx(rhs, rel=2e-3, abs=1e-9)
        _announce(10, "difference variance identity holds through grid statistics")

    def test_balanced_quantum_sub_shot_noise(self):
        rng = np.random.default_rng(103)
        for _ in range(1000):
            b = rng.uniform(0.05, 100.0)
            m = rng.uniform(1.0, 100.0)
            d2 = rng.uniform(b * b, b * b + b)
            model = make_model(b, b, m, d2)
            photon = tb.intensity_to_photon(tb.forward_moments(model))
            rep = tb.nonclassicality_report(model, photon)
            assert rep.k < 0 and rep.r < 1
        _announce(10, "K < 0 with balanced arms implies R < 1 (1000 draws)")

    def test_burgess_fixed_point(self):
        for eta in np.linspace(0.05, 1.0, 20):
            assert tb.burgess_map(1.0, eta) == 1.0
        rng = np.random.default_rng(104)
        for _ in range(200):
            f, eta = rng.uniform(0.0, 4.0), rng.uniform(0.01, 1.0)
            assert tb.burgess_map(f, eta) - 1.0 == pytest.approx(
                eta * (f - 1.0), rel=1e-14, abs=1e-14)
        _announce(10, "detected-count Fano map is affine with fixed point 1")
