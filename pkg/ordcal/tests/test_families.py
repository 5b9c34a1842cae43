import numpy as np
import pytest


class TestModelSpec(object):

    def test_flags(self):
        from ordcal.families import CUMULATIVE, STEREOTYPE, ModelSpec
        assert ModelSpec.from_flag('CL-PO') == ModelSpec(CUMULATIVE, True)
        assert ModelSpec.from_flag('slm') == ModelSpec(STEREOTYPE)
        assert ModelSpec(CUMULATIVE, False).flag == 'cl-np'

    def test_unknown_flag(self):
        from ordcal.errors import SpecificationError
        from ordcal.families import ModelSpec
        with pytest.raises(SpecificationError) as excinfo:
            ModelSpec.from_flag('probit')
        assert 'probit' in str(excinfo.value)

    def test_multinomial_cannot_be_proportional(self):
        from ordcal.errors import SpecificationError
        from ordcal.families import MULTINOMIAL, ModelSpec
        with pytest.raises(SpecificationError):
            ModelSpec(MULTINOMIAL, True)

    def test_ordinal_family_needs_flag(self):
        from ordcal.errors import SpecificationError
        from ordcal.families import ADJACENT, ModelSpec
        with pytest.raises(SpecificationError):
            ModelSpec(ADJACENT)

    def test_relaxation_only_for_proportional(self):
        from ordcal.errors import SpecificationError
        from ordcal.families import CUMULATIVE, ModelSpec
        with pytest.raises(SpecificationError):
            ModelSpec(CUMULATIVE, False, relaxed=(0,))
        assert ModelSpec(CUMULATIVE, True, relaxed=(1, 0, 1)).relaxed == (0, 1)

    def test_parse_families(self):
        from ordcal.families import parse_families
        specs = parse_families(' mlr, CR-NP ,')
        assert [spec.flag for spec in specs] == ['mlr', 'cr-np']

    def test_parse_families_empty(self):
        from ordcal.errors import SpecificationError
        from ordcal.families import parse_families
        with pytest.raises(SpecificationError):
            parse_families(' , ')


class TestParamCount(object):

    @pytest.mark.parametrize('flag,expected', [
        ('mlr', 10), ('cl-np', 10), ('ac-np', 10), ('cr-np', 10),
        ('cl-po', 6), ('ac-po', 6), ('cr-po', 6), ('slm', 7),
    ])
    def test_four_predictors_three_categories(self, flag, expected):
        from ordcal.families import ModelSpec, param_count
        assert param_count(ModelSpec.from_flag(flag), 4, 3) == expected

    @pytest.mark.parametrize('flag,expected', [
        ('mlr', 12), ('cl-po', 6), ('slm', 8),
    ])
    def test_three_predictors_four_categories(self, flag, expected):
        from ordcal.families import ModelSpec, param_count
        assert param_count(ModelSpec.from_flag(flag), 3, 4) == expected

    @pytest.mark.parametrize('K,Q,proportional,stereotype,free', [
        (3, 2, 4, 5, 6), (3, 4, 6, 7, 10), (3, 8, 10, 11, 18),
        (4, 2, 5, 7, 9), (4, 4, 7, 9, 15), (4, 8, 11, 13, 27),
        (5, 2, 6, 9, 12), (5, 4, 8, 11, 20), (5, 8, 12, 15, 36),
    ])
    def test_grid(self, K, Q, proportional, stereotype, free):
        from ordcal.families import ModelSpec, param_count
        for flag in ('cl-po', 'ac-po', 'cr-po'):
            assert param_count(ModelSpec.from_flag(flag), Q, K) == proportional
        assert param_count(ModelSpec.from_flag('slm'), Q, K) == stereotype
        for flag in ('mlr', 'cl-np', 'ac-np', 'cr-np'):
            assert param_count(ModelSpec.from_flag(flag), Q, K) == free

    def test_invalid_dimensions(self):
        from ordcal.errors import SpecificationError
        from ordcal.families import ModelSpec, param_count
        with pytest.raises(SpecificationError):
            param_count(ModelSpec.from_flag('mlr'), 0, 3)
        with pytest.raises(SpecificationError):
            param_count(ModelSpec.from_flag('mlr'), 2, 1)


class TestLinks(object):

    @pytest.mark.parametrize('name', ['multinomial', 'adjacent', 'cumulative',
                                      'continuation'])
    def test_probabilities_sum_to_one(self, name):
        from ordcal.families import LINKS
        eta = np.random.default_rng(1).normal(size=(50, 3))
        if name == 'cumulative':
            eta = -np.sort(eta, axis=1) * 0.5
        probs = LINKS[name](4).probabilities(eta)
        np.testing.assert_allclose(probs.sum(axis=1), 1.0)
        assert np.all(probs >= 0)

    def test_cumulative_exceedance(self):
        from ordcal.families import CumulativeLink
        eta = np.array([[0.0, -1.0]])
        probs = CumulativeLink(3).probabilities(eta)
        expit = 1.0 / (1.0 + np.exp(1.0))
        np.testing.assert_allclose(probs, [[0.5, 0.5 - expit, expit]])

    def test_continuation_stopping_form(self):
        from ordcal.families import ContinuationLink
        eta = np.array([[0.4, -0.3]])
        go = 1.0 / (1.0 + np.exp(-eta[0]))
        expected = [1 - go[0], go[0] * (1 - go[1]), go[0] * go[1]]
        np.testing.assert_allclose(ContinuationLink(3).probabilities(eta), [expected])

    def test_adjacent_log_odds(self):
        from ordcal.families import AdjacentLink
        eta = np.array([[0.7, -0.2]])
        probs = AdjacentLink(3).probabilities(eta)[0]
        np.testing.assert_allclose(np.log(probs[1:] / probs[:-1]), eta[0])

    @pytest.mark.parametrize('name', ['multinomial', 'adjacent', 'cumulative',
                                      'continuation'])
    def test_score_matches_finite_differences(self, name):
        from ordcal.families import LINKS
        link = LINKS[name](3)
        eta = np.array([[0.6, -0.4], [0.1, -1.2], [1.0, 0.2]])
        y = np.array([0, 1, 2])
        _, score, _ = link.evaluate(eta, y)
        h = 1e-6
        for j in range(2):
            shift = np.zeros_like(eta)
            shift[:, j] = h
            up = link.evaluate(eta + shift, y)[0]
            down = link.evaluate(eta - shift, y)[0]
            np.testing.assert_allclose(score[:, j], (up - down) / (2 * h), atol=1e-6)

    def test_stereotype_coefficients(self):
        from ordcal.families import StereotypeStructure
        structure = StereotypeStructure(2, 4)
        theta = np.array([0.1, 0.2, 0.3, 1.0, -2.0, 1.5, 3.0])
        C = structure.coefficients(theta)
        np.testing.assert_allclose(C[0], [0.1, 0.2, 0.3])
        np.testing.assert_allclose(C[1:], np.outer([1.0, -2.0], [1.0, 1.5, 3.0]))

    def test_free_structure_pack_unpack(self):
        from ordcal.families import FreeStructure
        structure = FreeStructure(2, 3)
        alpha = np.array([0.5, -0.5])
        B = np.array([[1.0, 2.0], [3.0, 4.0]])
        theta = structure.pack(alpha, B)
        unpacked_alpha, unpacked_B, phi = structure.unpack(theta)
        np.testing.assert_array_equal(unpacked_alpha, alpha)
        np.testing.assert_array_equal(unpacked_B, B)
        assert phi is None
        np.testing.assert_array_equal(structure.coefficients(theta),
                                      np.vstack([alpha, B]))
