import math

import numpy as np
import pytest

from hyperdiff.covariance import (MemoryClass, angular_mse, covariance_legendre,
                                  covariance_spectral, covariance_time_lags,
                                  integrated_abs_covariance, memory_classify)
from hyperdiff.kernel import transfer
from hyperdiff.measure import DiffusionParams, PowerLawSegment, SpectralMeasure
from hyperdiff.spectrum import angular_spectrum

P11 = DiffusionParams(c=1.0, D=1.0)
ATOM1 = SpectralMeasure(atoms=((1.0, 1.0),))
MIXED = SpectralMeasure(atoms=((0.8, 0.6), (2.5, 0.4)),
                        segments=(PowerLawSegment(3.0, 5.0, 0.5, -1.0),))


class TestSpectralRoute:
    def test_gamma_zero_is_total_mass(self):
        for m in [ATOM1, MIXED]:
            assert covariance_spectral(0.0, 0.0, 0.0, m, P11) == pytest.approx(
                m.total_mass(), rel=1e-9)

    def test_antipodal_single_atom(self):
        # sinc(2 mu sin(pi/2)) = sin(2)/2 for mu = 1
        value = covariance_spectral(math.pi, 0.0, 0.0, ATOM1, P11)
        assert value == pytest.approx(math.sin(2.0) / 2.0, rel=1e-13)
        assert value == pytest.approx(0.45465, abs=5e-6)

    def test_antipodal_with_time(self):
        expected = math.sin(2.0) / 2.0 * transfer(1.0, 1.0, P11) ** 2
        assert covariance_spectral(math.pi, 1.0, 1.0, ATOM1, P11) == pytest.approx(
            expected, rel=1e-13)
        assert expected == pytest.approx(0.19787, abs=5e-6)

    def test_quarter_angle(self):
        expected = math.sin(math.sqrt(2.0)) / math.sqrt(2.0)
        assert covariance_spectral(math.pi / 2, 0.0, 0.0, ATOM1, P11) == pytest.approx(
            expected, rel=1e-13)

    def test_symmetry_in_times(self):
        for g in [0.0, 0.4, 2.0]:
            a = covariance_spectral(g, 0.7, 0.2, MIXED, P11)
            b = covariance_spectral(g, 0.2, 0.7, MIXED, P11)
            assert a == pytest.approx(b, rel=1e-12)

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(31)
        for _ in range(40):
            g = float(rng.uniform(0, math.pi))
            t = float(rng.uniform(0, 2))
            tp = float(rng.uniform(0, 2))
            lhs = abs(covariance_spectral(g, t, tp, MIXED, P11))
            rhs = math.sqrt(covariance_spectral(0.0, t, t, MIXED, P11)
                            * covariance_spectral(0.0, tp, tp, MIXED, P11))
            assert lhs <= rhs * (1 + 1e-10)

    def test_positive_semidefinite_gram(self):
        rng = np.random.default_rng(37)
        thetas = rng.uniform(0, math.pi, 20)
        phis = rng.uniform(0, 2 * math.pi, 20)
        xyz = np.stack([np.sin(thetas) * np.cos(phis),
                        np.sin(thetas) * np.sin(phis),
                        np.cos(thetas)])
        cosg = np.clip(xyz.T @ xyz, -1.0, 1.0)
        gammas = np.arccos(cosg)
        t = 0.3
        gram = covariance_spectral(gammas.ravel(), t, t, ATOM1, P11).reshape(20, 20)
        eigmin = float(np.linalg.eigvalsh(gram).min())
        assert eigmin >= -1e-8 * np.trace(gram)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            covariance_spectral(-0.1, 0.0, 0.0, ATOM1, P11)
        with pytest.raises(ValueError):
            covariance_spectral(3.5, 0.0, 0.0, ATOM1, P11)
        with pytest.raises(ValueError):
            covariance_spectral(0.5, -1.0, 0.0, ATOM1, P11)


class TestLegendreRoute:
    def test_matches_spectral_at_zero(self):
        lc = covariance_legendre(0.0, 0.0, 0.0, ATOM1, P11, 40)
        assert abs(lc.value - covariance_spectral(0.0, 0.0, 0.0, ATOM1, P11)) <= (
            lc.remainder + 1e-9)

    def test_spec_example_quarter_angle(self):
        lc = covariance_legendre(math.pi / 2, 0.0, 0.0, ATOM1, P11, 40)
        assert lc.value == pytest.approx(math.sin(math.sqrt(2)) / math.sqrt(2),
                                         abs=1e-8)

    def test_zero_measure(self):
        lc = covariance_legendre(1.0, 0.0, 0.0, SpectralMeasure(), P11, 10)
        assert lc.value == 0.0
        assert lc.remainder == 0.0

    def test_route_agreement_random_queries(self):
        rng = np.random.default_rng(41)
        for _ in range(25):
            g = float(rng.uniform(0, math.pi))
            t = float(rng.uniform(0, 1.5))
            tp = float(rng.uniform(0, 1.5))
            spectral = covariance_spectral(g, t, tp, MIXED, P11)
            lc = covariance_legendre(g, t, tp, MIXED, P11, 48)
            assert abs(spectral - lc.value) <= lc.remainder + 1e-9

    def test_needs_terms(self):
        with pytest.raises(ValueError):
            covariance_legendre(0.0, 0.0, 0.0, ATOM1, P11, 0)


class TestAngularMse:
    def test_zero_at_coincident_points(self):
        assert angular_mse(0.0, 0.5, ATOM1, P11, 30) == 0.0

    def test_equals_twice_covariance_deficit(self):
        for g in [0.1, 0.8, 2.5]:
            series = angular_mse(g, 0.4, ATOM1, P11, 60)
            direct = 2 * (covariance_spectral(0.0, 0.4, 0.4, ATOM1, P11)
                          - covariance_spectral(g, 0.4, 0.4, ATOM1, P11))
            assert series == pytest.approx(direct, rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_hoelder_bound(self, alpha):
        # MSE <= (1/pi) sum (2l+1)^(1+2a) C_l (1 - cos g)^a
        l_count = 60
        for t in [0.0, 0.1]:
            values = angular_spectrum(l_count, t, t, ATOM1, P11).values
            ls = np.arange(l_count)
            constant = float(np.sum((2 * ls + 1) ** (1 + 2 * alpha) * values)) / math.pi
            for g in np.geomspace(1e-3, math.pi, 25):
                mse = angular_mse(float(g), t, ATOM1, P11, l_count)
                assert mse <= constant * (1 - math.cos(g)) ** alpha * (1 + 1e-10)

    def test_wave_regime_extra_decay_factor(self):
        # no mass at or below the cut-off: the Hoelder bound gains the factor
        # exp(-c^2 t / D) (1 + c^2 t / 2D)^2
        m = SpectralMeasure(atoms=((0.6, 0.5), (1.5, 0.5)))
        l_count = 60
        alpha = 1.0
        base = angular_spectrum(l_count, 0.0, 0.0, m, P11).values
        ls = np.arange(l_count)
        constant = float(np.sum((2 * ls + 1) ** (1 + 2 * alpha) * base)) / math.pi
        for t in [0.3, 1.0, 3.0]:
            a = P11.c ** 2 * t / (2 * P11.D)
            factor = math.exp(-2 * a) * (1 + a) ** 2
            for g in [0.05, 0.5, 2.0]:
                mse = angular_mse(g, t, m, P11, l_count)
                bound = constant * factor * (1 - math.cos(g)) ** alpha
                assert mse <= bound * (1 + 1e-10)

    def test_bounded_support_ratio_bounded(self):
        # MSE/(1-cos g) stays bounded as g -> 0 for bounded-support measures
        l_count = 40
        values = angular_spectrum(l_count, 0.0, 0.0, ATOM1, P11).values
        ls = np.arange(l_count)
        limit = float(np.sum((2 * ls + 1) * ls * (ls + 1) * values)) / (2 * math.pi)
        ratios = []
        for g in [1e-1, 1e-2, 1e-3]:
            ratios.append(angular_mse(g, 0.0, ATOM1, P11, l_count) / (1 - math.cos(g)))
        assert all(r <= limit * (1 + 1e-6) for r in ratios)
        assert ratios[0] <= ratios[1] <= ratios[2]  # increases toward the limit


class TestMemory:
    def test_atoms_short_range(self):
        report = memory_classify(ATOM1)
        assert report.classification is MemoryClass.SHORT_RANGE
        assert report.origin_exponent is None

    def test_origin_segment_low_exponent_long_range(self):
        m = SpectralMeasure(segments=(PowerLawSegment(0.0, 1.0, 1.0, 0.5),))
        report = memory_classify(m)
        assert report.classification is MemoryClass.LONG_RANGE
        assert report.origin_exponent == 0.5

    def test_origin_segment_high_exponent_short_range(self):
        m = SpectralMeasure(segments=(PowerLawSegment(0.0, 1.0, 1.0, 1.5),))
        assert memory_classify(m).classification is MemoryClass.SHORT_RANGE

    def test_boundary_exponent_is_long_range(self):
        m = SpectralMeasure(segments=(PowerLawSegment(0.0, 1.0, 1.0, 1.0),))
        assert memory_classify(m).classification is MemoryClass.LONG_RANGE

    def test_detached_segment_short_range(self):
        m = SpectralMeasure(segments=(PowerLawSegment(0.5, 1.0, 1.0, 0.5),))
        assert memory_classify(m).classification is MemoryClass.SHORT_RANGE

    def test_empty_measure_errors(self):
        with pytest.raises(ValueError):
            memory_classify(SpectralMeasure())


class TestIntegratedAbsCovariance:
    def test_zero_measure(self):
        h, cum = integrated_abs_covariance(0.0, 10.0, SpectralMeasure(), P11)
        assert np.all(cum == 0.0)

    def test_short_range_plateau(self):
        # slow diffusive atom: decay rate ~ D mu^2-ish, plateau by h ~ 2000
        m = SpectralMeasure(atoms=((0.1, 1.0),))
        h, cum = integrated_abs_covariance(0.0, 2000.0, m, P11)
        slope_end = (cum[-1] - cum[-2]) / (h[-1] - h[-2])
        assert slope_end < 1e-8
        assert np.all(np.diff(cum) >= 0.0)

    def test_long_range_keeps_growing(self):
        m = SpectralMeasure(segments=(PowerLawSegment(0.0, 1.0, 1.0, 0.5),))
        h, cum = integrated_abs_covariance(0.0, 200.0, m, P11, h_step=0.2)
        n = len(h)
        late = (cum[-1] - cum[3 * n // 4]) / (h[-1] - h[3 * n // 4])
        # a short-range plateau would have decayed by orders of magnitude here
        assert late > 1e-4

    def test_lags_match_spectral_route(self):
        lags = np.array([0.0, 0.5, 2.0])
        values = covariance_time_lags(0.7, 0.3, lags, MIXED, P11)
        for lag, value in zip(lags, values):
            direct = covariance_spectral(0.7, 0.3 + lag, 0.3, MIXED, P11)
            assert value == pytest.approx(direct, rel=1e-9, abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            integrated_abs_covariance(0.0, -1.0, ATOM1, P11)
