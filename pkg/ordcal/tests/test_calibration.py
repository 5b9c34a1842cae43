import json
import os

import mock
import numpy as np
import pytest


def _fit(data, flag):
    from ordcal.families import ModelSpec
    from ordcal.fitting import fit
    return fit(data, ModelSpec.from_flag(flag))


class TestTargets(object):

    def test_labels(self):
        from ordcal.calibration import LINEAR_PREDICTOR, CalibrationTarget, category, dichotomy
        assert category(2).label == 'Y=2'
        assert dichotomy(3).label == 'Y>=3'
        assert CalibrationTarget(LINEAR_PREDICTOR, 1).label == 'LP1'
        assert dichotomy(3).slug == 'dichotomy_3'


class TestWeakCalibration(object):

    def test_halved_linear_predictor_gives_slope_two(self, simulated):
        from ordcal.calibration import dichotomy, weak_calibration
        from ordcal.data import ProbMatrix
        from ordcal.families import MultinomialLink
        data, _ = simulated(20000, [0.4], [[1.2]], seed=17)
        eta = 0.5 * (0.4 + data.predictors @ np.array([[1.2]]))
        probs = ProbMatrix(MultinomialLink(2).probabilities(eta))
        result = weak_calibration(probs, data.outcomes, dichotomy(2))
        assert result.converged
        assert result.slope == pytest.approx(2.0, abs=0.1)

    def test_true_risks_are_calibrated(self, simulated):
        from ordcal.calibration import CATEGORY, weak_calibrations
        from ordcal.data import ProbMatrix
        data, truth = simulated(20000, [-0.2, -0.8], [[0.8, 1.5], [0.4, 0.9]], seed=19)
        for result in weak_calibrations(ProbMatrix(truth), data.outcomes, CATEGORY):
            assert result.intercept == pytest.approx(0.0, abs=0.1)
            assert result.slope == pytest.approx(1.0, abs=0.1)

    def test_multinomial_category_intercepts_vanish_on_development_data(
            self, three_category_data):
        from ordcal.calibration import CATEGORY, weak_calibrations
        model = _fit(three_category_data, 'mlr')
        probs = model.predict(three_category_data.predictors)
        results = weak_calibrations(probs, three_category_data.outcomes, CATEGORY)
        assert [r.target.label for r in results] == ['Y=1', 'Y=2', 'Y=3']
        for result in results:
            assert result.intercept == pytest.approx(0.0, abs=1e-4)

    def test_highest_dichotomy_equals_highest_category(self, four_category_data):
        from ordcal.calibration import category, dichotomy, weak_calibration
        model = _fit(four_category_data, 'ac-po')
        probs = model.predict(four_category_data.predictors)
        top = weak_calibration(probs, four_category_data.outcomes, category(4))
        at_least = weak_calibration(probs, four_category_data.outcomes, dichotomy(4))
        assert at_least.intercept == pytest.approx(top.intercept, abs=1e-10)
        assert at_least.slope == pytest.approx(top.slope, abs=1e-10)

    def test_degenerate_target(self):
        from ordcal.calibration import category, weak_calibration
        from ordcal.data import ProbMatrix
        from ordcal.errors import DegenerateTargetError
        probs = ProbMatrix([[0.2, 0.3, 0.5], [0.5, 0.3, 0.2], [0.1, 0.1, 0.8]])
        with pytest.raises(DegenerateTargetError):
            weak_calibration(probs, [1, 3, 3], category(2))

    def test_degenerate_target_flagged_in_batch(self):
        from ordcal.calibration import CATEGORY, weak_calibrations
        from ordcal.data import ProbMatrix
        rng = np.random.default_rng(4)
        probs = ProbMatrix(rng.dirichlet([2, 2, 2], size=60))
        y = np.where(rng.random(60) < 0.5, 1, 3)
        results = weak_calibrations(probs, y, CATEGORY)
        assert not results[1].converged
        assert np.isnan(results[1].slope)
        assert 'only events or only non-events' in results[1].message

    def test_length_mismatch(self):
        from ordcal.calibration import category, weak_calibration
        from ordcal.data import ProbMatrix
        from ordcal.errors import DatasetError
        with pytest.raises(DatasetError):
            weak_calibration(ProbMatrix([[0.5, 0.5]]), [1, 2], category(1))


class TestModelSpecificCalibration(object):

    @pytest.mark.parametrize('flag', ['mlr', 'cl-po', 'cl-np', 'ac-po', 'ac-np', 'cr-po',
                                      'cr-np', 'slm'])
    def test_identity_on_development_data(self, flag, four_category_data):
        from ordcal.calibration import model_specific_calibration
        model = _fit(four_category_data, flag)
        results = model_specific_calibration(model, four_category_data)
        assert [r.target.label for r in results] == ['LP1', 'LP2', 'LP3']
        for result in results:
            assert result.converged
            assert result.intercept == pytest.approx(0.0, abs=1e-3)
            assert result.slope == pytest.approx(1.0, abs=1e-3)

    def test_shrunken_coefficients_give_steeper_slopes(self, simulated):
        from ordcal.calibration import model_specific_calibration
        from ordcal.families import CumulativeLink, ModelSpec
        from ordcal.models import FittedModel
        data, _ = simulated(20000, [0.5, -0.5], [[1.0], [0.6]], seed=41,
                            link=CumulativeLink(3))
        shrunk = FittedModel(spec=ModelSpec.from_flag('cl-po'), Q=2, K=3,
                             columns=data.columns, alpha=[0.5, -0.5], B=[[0.5], [0.3]])
        for result in model_specific_calibration(shrunk, data):
            assert result.slope == pytest.approx(2.0, abs=0.15)


class TestFlexibleRecalibration(object):

    def test_observed_proportions_are_probabilities(self, three_category_data):
        from ordcal.calibration import flexible_recalibration
        model = _fit(three_category_data, 'mlr')
        probs = model.predict(three_category_data.predictors)
        recal = flexible_recalibration(probs, three_category_data.outcomes, df=3)
        assert recal.observed.shape == probs.values.shape
        np.testing.assert_allclose(recal.observed.sum(axis=1), 1.0)
        assert recal.df == (3, 3)

    @pytest.mark.parametrize('setup', ['mlr-reference', 'cr-reference', 'mlr-dichotomy',
                                       'cr-dichotomy', 'mlr-category', 'cr-category'])
    def test_every_setup(self, setup, four_category_data):
        from ordcal.calibration import flexible_recalibration
        model = _fit(four_category_data, 'cl-po')
        probs = model.predict(four_category_data.predictors)
        recal = flexible_recalibration(probs, four_category_data.outcomes, setup, df=2)
        assert recal.setup == setup
        np.testing.assert_allclose(recal.observed.sum(axis=1), 1.0)

    def test_mean_observed_matches_frequencies(self, three_category_data):
        from ordcal.calibration import flexible_recalibration
        data = three_category_data
        model = _fit(data, 'mlr')
        recal = flexible_recalibration(model.predict(data.predictors), data.outcomes, df=4)
        np.testing.assert_allclose(recal.observed.mean(axis=0),
                                   data.counts() / float(data.n), atol=1e-5)

    def test_agrees_with_binned_frequencies(self, simulated):
        from ordcal.calibration import flexible_recalibration
        data, _ = simulated(20000, [-0.2, -0.8], [[0.8, 1.5]], seed=43)
        model = _fit(data, 'mlr')
        recal = flexible_recalibration(model.predict(data.predictors), data.outcomes)
        # one predictor, so every linear predictor orders cases the same way
        order = np.argsort(data.predictors[:, 0])
        gaps = []
        for rows in np.array_split(order, 10):
            empirical = np.bincount(data.outcomes[rows] - 1, minlength=3) / float(rows.size)
            gaps.append(np.abs(recal.observed[rows].mean(axis=0) - empirical))
        assert np.mean(gaps) <= 0.02

    def test_small_sample_warning(self, three_category_data):
        from ordcal.calibration import flexible_recalibration
        from ordcal.models import Solution
        model = _fit(three_category_data, 'mlr')
        probs = model.predict(three_category_data.predictors)
        recal = flexible_recalibration(probs, three_category_data.outcomes, df=4)
        assert recal.warnings == ()
        small = three_category_data.take(np.arange(100))
        with mock.patch('ordcal.calibration.fit_design') as fit_design:
            fit_design.return_value = Solution(theta=np.zeros(18), loglik=-100.0,
                                               iterations=1, converged=True, trace=(),
                                               gradient_norm=0.0, eta_max=0.0)
            recal = flexible_recalibration(model.predict(small.predictors), small.outcomes,
                                           df=4)
        assert fit_design.call_count == 1
        np.testing.assert_allclose(recal.observed, 1.0 / 3)
        assert any('10 x K x df' in w for w in recal.warnings)

    def test_unknown_setup(self, three_category_data):
        from ordcal.calibration import flexible_recalibration
        model = _fit(three_category_data, 'mlr')
        with pytest.raises(ValueError):
            flexible_recalibration(model.predict(three_category_data.predictors),
                                   three_category_data.outcomes, 'spline-everything')

    def test_transformed_predictors(self):
        from ordcal.calibration import transformed_predictors
        from ordcal.data import ProbMatrix
        probs = ProbMatrix([[0.2, 0.3, 0.5]])
        np.testing.assert_allclose(transformed_predictors(probs, 'reference'),
                                   [[np.log(1.5), np.log(2.5)]])
        np.testing.assert_allclose(transformed_predictors(probs, 'dichotomy'),
                                   [[np.log(0.8 / 0.2), 0.0]], atol=1e-12)
        np.testing.assert_allclose(transformed_predictors(probs, 'category'),
                                   [[np.log(0.2 / 0.8), np.log(0.3 / 0.7)]])


class TestECI(object):

    def _recal(self, observed):
        from ordcal.calibration import FlexibleRecalibration
        return FlexibleRecalibration(setup='mlr-reference', df=(4, 4),
                                     coefficients=np.zeros(1),
                                     observed=np.asarray(observed, dtype=float))

    def test_zero_when_observed_equals_estimated(self):
        from ordcal.calibration import ORIGINAL, RESCALED, eci
        from ordcal.data import ProbMatrix
        P = [[0.2, 0.3, 0.5], [0.6, 0.3, 0.1]]
        assert eci(ProbMatrix(P), self._recal(P), [1, 3], ORIGINAL) == 0.0
        assert eci(ProbMatrix(P), self._recal(P), [1, 3], RESCALED) == 0.0

    def test_hand_computed(self):
        from ordcal.calibration import ORIGINAL, RESCALED, eci
        from ordcal.data import ProbMatrix
        P = np.array([[0.2, 0.3, 0.5], [0.6, 0.3, 0.1]])
        O = np.array([[0.3, 0.3, 0.4], [0.5, 0.3, 0.2]])
        y = [1, 3]
        squared = 0.04
        assert eci(ProbMatrix(P), self._recal(O), y, ORIGINAL) == \
            pytest.approx(squared / 6 * 100 * 3 / 2)
        rates = np.array([0.5, 0.0, 0.5])
        expected = squared / np.sum((P - rates) ** 2)
        assert eci(ProbMatrix(P), self._recal(O), y, RESCALED) == pytest.approx(expected)

    def test_no_predictive_variation(self):
        from ordcal.calibration import eci
        from ordcal.data import ProbMatrix
        from ordcal.errors import NoPredictiveVariationError
        P = [[0.5, 0.5], [0.5, 0.5]]
        with pytest.raises(NoPredictiveVariationError):
            eci(ProbMatrix(P), self._recal([[0.4, 0.6], [0.6, 0.4]]), [1, 2])

    def test_near_zero_for_correct_model(self, simulated):
        from ordcal.calibration import eci, flexible_recalibration
        from ordcal.families import ModelSpec
        from ordcal.fitting import fit
        data, _ = simulated(5000, [-0.2, -0.8], [[0.8, 1.5], [0.4, 0.9]], seed=29)
        model = fit(data, ModelSpec.from_flag('mlr'))
        probs = model.predict(data.predictors)
        recal = flexible_recalibration(probs, data.outcomes)
        assert eci(probs, recal, data.outcomes) < 0.05

    def test_setups_agree_for_a_correct_model(self, simulated):
        from ordcal.calibration import SETUPS, eci, flexible_recalibration
        data, _ = simulated(10000, [-0.2, -0.8], [[0.8, 1.5], [0.4, 0.9]], seed=47)
        model = _fit(data, 'mlr')
        probs = model.predict(data.predictors)
        values = [eci(probs, flexible_recalibration(probs, data.outcomes, setup), data.outcomes)
                  for setup in SETUPS]
        assert len(values) == 6
        assert max(values) - min(values) < 0.01

    @pytest.mark.parametrize('flag', ['ac-po', 'slm'])
    def test_rank_one_families(self, flag, simulated):
        from ordcal.calibration import eci, flexible_recalibration
        from ordcal.families import ModelSpec
        from ordcal.fitting import fit
        data, _ = simulated(5000, [-0.2, -0.8], [[0.8, 1.5], [0.4, 0.9]], seed=29)
        model = fit(data, ModelSpec.from_flag(flag))
        probs = model.predict(data.predictors)
        recal = flexible_recalibration(probs, data.outcomes, df=4)
        # both log-ratio covariates are affine in the single linear predictor
        assert len(recal.aliased) == 4
        assert any('aliased' in warning for warning in recal.warnings)
        assert recal.iterations < 30
        value = eci(probs, recal, data.outcomes)
        assert np.isfinite(value)
        assert 0.0 <= value < 0.2

    def test_full_rank_model_drops_nothing(self, simulated):
        from ordcal.calibration import flexible_recalibration
        from ordcal.families import ModelSpec
        from ordcal.fitting import fit
        data, _ = simulated(3000, [-0.2, -0.8], [[0.8, 1.5], [0.4, 0.9]], seed=31)
        model = fit(data, ModelSpec.from_flag('mlr'))
        recal = flexible_recalibration(model.predict(data.predictors), data.outcomes, df=4)
        assert recal.aliased == ()


class TestCurvesAndReport(object):

    def test_curve_targets(self, four_category_data):
        from ordcal.calibration import (CATEGORY, DICHOTOMY, calibration_curve_data,
                                        flexible_recalibration)
        model = _fit(four_category_data, 'cl-po')
        probs = model.predict(four_category_data.predictors)
        recal = flexible_recalibration(probs, four_category_data.outcomes, df=3)
        categories = calibration_curve_data(probs, recal, CATEGORY)
        dichotomies = calibration_curve_data(probs, recal, DICHOTOMY)
        assert [c.target.label for c in categories] == ['Y=1', 'Y=2', 'Y=3', 'Y=4']
        assert [c.target.label for c in dichotomies] == ['Y>=2', 'Y>=3', 'Y>=4']
        for curve in categories + dichotomies:
            assert curve.estimated.size == four_category_data.n
            assert curve.grid.size == 101
            assert np.all((curve.smoothed >= 0) & (curve.smoothed <= 1))

    def test_write_plot_data(self, three_category_data, tmp_path):
        from ordcal.calibration import (CATEGORY, calibration_curve_data,
                                        flexible_recalibration, write_plot_data)
        model = _fit(three_category_data, 'mlr')
        probs = model.predict(three_category_data.predictors)
        recal = flexible_recalibration(probs, three_category_data.outcomes, df=3)
        path = write_plot_data(calibration_curve_data(probs, recal, CATEGORY),
                               str(tmp_path), CATEGORY)
        with open(path) as handle:
            manifest = json.load(handle)
        assert manifest['mode'] == 'category'
        assert len(manifest['targets']) == 3
        for entry in manifest['targets']:
            assert os.path.isfile(str(tmp_path / entry['scatter']))
            assert os.path.isfile(str(tmp_path / entry['curve']))

    def test_report(self, csv_dataset):
        from ordcal.calibration import calibration_report
        from ordcal.data import load_dataset
        path, _, _ = csv_dataset
        data, truth = load_dataset(path)
        model = _fit(data, 'mlr')
        report = calibration_report(model, data, truth, df=3)
        assert report.family == 'mlr'
        assert len(report.categories) == 3
        assert len(report.dichotomies) == 2
        assert len(report.model_specific) == 2
        assert 0.5 < report.orc <= 1.0
        assert report.rmspe is not None and report.rmspe < 0.2
        assert report.eci_rescaled >= 0
        assert report.recalibration is not None
