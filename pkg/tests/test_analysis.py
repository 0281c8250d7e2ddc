import datetime as dt
import math

import numpy as np
import pytest

from newsimpact.analysis import (
    ExposurePanel,
    build_exposures,
    durbin_watson,
    format_regression_table,
    normality_tests,
    ols_fit,
    topic_importance,
    write_regression_csv,
)
from newsimpact.corpus import ReturnSeries
from newsimpact.errors import InputError
from tests.conftest import make_headlines


def panel_from_arrays(dummies, target, mode="per_day", lag=1):
    dummies = np.asarray(dummies, dtype=float)
    dates = [dt.date(2024, 1, 1) + dt.timedelta(days=i) for i in range(len(target))]
    return ExposurePanel(dates, dummies, np.asarray(target, dtype=float), mode, lag)


class TestBuildExposures:
    @pytest.fixture
    def series(self):
        dates = tuple(dt.date(2024, 1, 1) + dt.timedelta(days=i) for i in range(10))
        return ReturnSeries(dates, tuple(0.01 * (i + 1) for i in range(10)))

    def test_per_day_presence(self, series):
        d = dt.date(2024, 1, 3)
        headlines = make_headlines(["a b", "c d", "e f"], [d, d, d])
        panel = build_exposures(headlines, [0, 0, 4], series, mode="per_day",
                                lag=0, n_topics=5)
        assert panel.dummies.shape == (1, 5)
        assert panel.dummies[0].tolist() == [1, 0, 0, 0, 1]
        assert panel.target[0] == pytest.approx(0.03)

    def test_per_headline_one_hot(self, series):
        d = dt.date(2024, 1, 3)
        headlines = make_headlines(["a b", "c d", "e f"], [d, d, d])
        panel = build_exposures(headlines, [0, 0, 4], series, mode="per_headline",
                                lag=0, n_topics=5)
        assert panel.dummies.shape == (3, 5)
        assert panel.dummies.sum(axis=1).tolist() == [1, 1, 1]
        assert panel.dummies[:, 0].tolist() == [1, 1, 0]
        assert panel.dummies[:, 4].tolist() == [0, 0, 1]

    def test_zero_fill_beyond_last_return(self, series):
        headlines = make_headlines(["x y"], [dt.date(2024, 2, 1)])
        panel = build_exposures(headlines, [1], series, n_topics=3, zero_fill=True)
        assert panel.target.tolist() == [0.0]

    def test_drop_without_zero_fill(self, series):
        headlines = make_headlines(["x y"], [dt.date(2024, 2, 1)])
        panel = build_exposures(headlines, [1], series, n_topics=3, zero_fill=False)
        assert panel.dummies.shape[0] == 0

    def test_label_count_mismatch(self, series):
        with pytest.raises(InputError):
            build_exposures(make_headlines(["x y"]), [0, 1], series)

    def test_empty_corpus(self, series):
        with pytest.raises(InputError):
            build_exposures([], [], series)


class TestOlsFit:
    def test_intercept_only_mean(self):
        panel = panel_from_arrays(np.zeros((3, 0)), [1.0, 2.0, 3.0])
        result = ols_fit(panel)
        assert result.names == ["const"]
        assert result.coef[0] == pytest.approx(2.0, abs=1e-12)
        assert result.r2 == pytest.approx(0.0, abs=1e-12)

    def test_simple_regression_closed_form(self):
        # y on x=[0,1,2]: beta=0.5, alpha=1/6, R^2=0.75, se(beta)=sqrt(1/12)
        panel = panel_from_arrays([[0.0], [1.0], [2.0]], [0.0, 1.0, 1.0])
        result = ols_fit(panel)
        assert result.coef[1] == pytest.approx(0.5, abs=1e-12)
        assert result.coef[0] == pytest.approx(1.0 / 6.0, abs=1e-12)
        assert result.r2 == pytest.approx(0.75, abs=1e-12)
        assert result.std_err[1] == pytest.approx(math.sqrt(1.0 / 12.0), abs=1e-12)

    def test_collinear_dummies_named(self):
        dummies = np.zeros((8, 2))
        dummies[::2, 0] = 1
        dummies[::2, 1] = 1  # Topic_1 always equals Topic_0
        panel = panel_from_arrays(dummies, np.arange(8, dtype=float))
        with pytest.raises(InputError, match="rank deficient.*Topic_1"):
            ols_fit(panel)

    def test_noiseless_recovery(self):
        rng = np.random.default_rng(12)
        dummies = rng.integers(0, 2, size=(40, 3)).astype(float)
        beta = np.array([0.01, -0.02, 0.005, 0.0125])
        x = np.column_stack([np.ones(40), dummies])
        y = x @ beta
        result = ols_fit(panel_from_arrays(dummies, y))
        assert np.abs(result.coef - beta).max() <= 1e-8
        assert result.r2 == pytest.approx(1.0, abs=1e-10)

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(13)
        dummies = rng.integers(0, 2, size=(60, 4)).astype(float)
        y = rng.normal(size=60)
        result = ols_fit(panel_from_arrays(dummies, y))
        x = np.column_stack([np.ones(60), dummies])
        scaled = x.T @ result.residuals / np.linalg.norm(x, axis=0)
        assert np.abs(scaled).max() <= 1e-8

    def test_f_identity(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            k = int(rng.integers(1, 5))
            n = int(rng.integers(k + 5, 40))
            dummies = rng.integers(0, 2, size=(n, k)).astype(float)
            y = rng.normal(size=n)
            try:
                result = ols_fit(panel_from_arrays(dummies, y))
            except InputError:
                continue  # rank-deficient draw
            df = n - k - 1
            expect = (result.r2 / k) / ((1.0 - result.r2) / df)
            assert result.f_stat == pytest.approx(expect, abs=1e-10)

    def test_insufficient_observations(self):
        with pytest.raises(InputError):
            ols_fit(panel_from_arrays([[1], [0]], [0.1, 0.2]))

    def test_p_value_matches_table_magnitude(self):
        # two-sided p for t=2.112 at df=240 is about 0.0358
        from newsimpact.statfn import DistParams, cdf

        p = 2.0 * (1.0 - cdf(DistParams("student_t", 240.0), 2.112))
        assert p == pytest.approx(0.0358, abs=0.002)

    def test_condition_number_warning(self):
        dummies = np.ones((30, 1))
        dummies[0, 0] = 1.0 - 1e-9  # nearly collinear with the constant
        panel = panel_from_arrays(dummies, np.random.default_rng(1).normal(size=30))
        with pytest.warns(RuntimeWarning, match="condition number"):
            ols_fit(panel)


class TestDurbinWatson:
    def test_alternating(self):
        assert durbin_watson([1.0, -1.0, 1.0, -1.0]) == pytest.approx(3.0, abs=1e-15)

    def test_constant_residuals(self):
        assert durbin_watson([2.5] * 10) == 0.0

    def test_iid_normal_near_two(self):
        e = np.random.default_rng(99).normal(size=100_000)
        assert 1.97 <= durbin_watson(e) <= 2.03

    def test_zero_residuals(self):
        with pytest.raises(InputError):
            durbin_watson([0.0, 0.0, 0.0])


class TestNormalityTests:
    def test_jb_zero_for_matched_moments(self):
        # symmetric 10-point sample {+-1 x4, +-c} with c chosen so the Pearson
        # kurtosis is exactly 3: (k+1)(k + c^4) = 3 (k + c^2)^2 with k=4
        c = math.sqrt(6.0 + math.sqrt(50.0))
        e = np.array([-1.0, 1.0] * 4 + [-c, c])
        stats = normality_tests(e)
        assert stats.skew == pytest.approx(0.0, abs=1e-12)
        assert stats.kurtosis == pytest.approx(3.0, abs=1e-12)
        assert stats.jarque_bera == pytest.approx(0.0, abs=1e-12)
        assert stats.jb_pvalue == pytest.approx(1.0, abs=1e-10)

    def test_alternating_jb_exact(self):
        # +-1 alternating, n=6: m2=1, m3=0, m4=1 -> JB = 6/6 * (2^2/4) = 1
        e = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
        centered = e - e.mean()
        m2 = float(np.mean(centered**2))
        m4 = float(np.mean(centered**4))
        assert (m2, m4) == (1.0, 1.0)
        jb = len(e) / 6.0 * ((m4 / m2**2 - 3.0) ** 2 / 4.0)
        assert jb == 1.0

    def test_exponential_sample_rejects(self):
        e = np.random.default_rng(7).exponential(size=10_000)
        stats = normality_tests(e)
        assert stats.jb_pvalue < 0.01
        assert stats.omnibus_pvalue < 0.01

    def test_gaussian_sample_accepts(self):
        e = np.random.default_rng(8).normal(size=10_000)
        stats = normality_tests(e)
        assert stats.jb_pvalue > 0.05
        assert stats.omnibus_pvalue > 0.05

    def test_minimum_n(self):
        with pytest.raises(InputError):
            normality_tests(np.ones(7))

    def test_zero_variance(self):
        with pytest.raises(InputError):
            normality_tests(np.ones(20))


TABLE3_COEFS = np.array([-0.0010, -0.0058, 0.0004, -0.0003, 0.0001, 0.0045])
TABLE4_SCORES = {0: 0.519, 4: 0.406, 1: 0.040, 2: 0.024, 3: 0.011}


class TestTopicImportance:
    def test_published_coefficients_reproduce_ranking(self):
        ranking = topic_importance(TABLE3_COEFS)
        assert [t for t, _ in ranking.entries] == [0, 4, 1, 2, 3]
        for topic, score in ranking.entries:
            assert score == pytest.approx(TABLE4_SCORES[topic], abs=0.02)
        assert sum(s for _, s in ranking.entries) == pytest.approx(1.0, abs=1e-12)

    def test_single_nonzero(self):
        ranking = topic_importance([0.1, 0.0, -0.7, 0.0])
        assert ranking.entries[0] == (1, 1.0)

    def test_equal_magnitudes(self):
        ranking = topic_importance([0.5, 0.2, -0.2, 0.2, -0.2])
        assert [t for t, _ in ranking.entries] == [0, 1, 2, 3]
        for _, s in ranking.entries:
            assert s == pytest.approx(0.25, abs=1e-15)

    def test_scale_invariant_ranking(self):
        rng = np.random.default_rng(3)
        coef = rng.normal(size=7)
        base = topic_importance(coef)
        scaled = topic_importance(coef * 17.5)
        assert [t for t, _ in base.entries] == [t for t, _ in scaled.entries]

    def test_all_zero_errors(self):
        with pytest.raises(InputError):
            topic_importance([0.3, 0.0, 0.0])


class TestExports:
    def test_table_columns(self):
        panel = panel_from_arrays(
            np.random.default_rng(0).integers(0, 2, size=(30, 2)).astype(float),
            np.random.default_rng(1).normal(size=30),
        )
        text = format_regression_table(ols_fit(panel))
        for col in ("Variable", "Coefficient", "Std. Error", "t-value", "P-value",
                    "95% CI Lower", "95% CI Upper"):
            assert col in text
        for footer in ("R-squared", "F-statistic", "Durbin-Watson", "Jarque-Bera",
                       "Omnibus", "Skew", "Kurtosis"):
            assert footer in text

    def test_csv_export(self, tmp_path):
        panel = panel_from_arrays(
            np.random.default_rng(0).integers(0, 2, size=(30, 2)).astype(float),
            np.random.default_rng(1).normal(size=30),
        )
        path = tmp_path / "reg.csv"
        write_regression_csv(ols_fit(panel), path)
        header = path.read_text().splitlines()[0]
        assert header == "Variable,Coefficient,Std. Error,t-value,P-value,95% CI Lower,95% CI Upper"
