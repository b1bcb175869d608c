import unittest

import numpy as np
from hypothesis import given, settings

from tests.create_test_model import always_up_model, example_model, hazard_model, models, random_model
from utils.errors import A3ViolationError, ZeroDenominatorError
from utils.model import InitialCondition, model_from_dict, model_to_dict
from utils.phi_solver import PhiSolver, phi_marginal
from utils.reliability import (
    dependence_ratio,
    marginal_reliability,
    system_reliability,
    univariate_reliability,
)
from utils.univariate import freeze_component


class TestReliability(unittest.TestCase):
    def setUp(self):
        self.model = example_model()
        self.init = InitialCondition(0, 0)

    def test_starts_at_one_in_up(self):
        curve = marginal_reliability(self.model, 1, self.init, 5)
        self.assertEqual(curve.values[0], 1.0)
        self.assertEqual(curve.horizon, 5)
        self.assertEqual(curve.kind, "marginal-1")

    def test_starts_at_zero_in_down(self):
        curve = marginal_reliability(self.model, 2, InitialCondition(0, 1), 3)
        np.testing.assert_array_equal(curve.values, 0.0)

    @settings(max_examples=25, deadline=None)
    @given(models(max_d=4, max_kmax=8))
    def test_curves_are_non_increasing(self, model):
        solver = PhiSolver(model)
        init = InitialCondition(0, 0)
        for component in (1, 2):
            values = marginal_reliability(model, component, init, 10, solver).values
            self.assertTrue(np.all(np.diff(values) <= 1e-12))
            self.assertTrue(np.all((values >= -1e-12) & (values <= 1.0 + 1e-12)))

    def test_system_reliability_is_the_product(self):
        solver = PhiSolver(self.model)
        r1 = marginal_reliability(self.model, 1, self.init, 6, solver).values
        r2 = marginal_reliability(self.model, 2, self.init, 6, solver).values
        system = system_reliability(self.model, self.init, 6, solver)
        np.testing.assert_array_equal(system.values, r1 * r2)
        self.assertEqual(system.kind, "system")

    def test_curve_matches_entrywise_phi(self):
        model = random_model(41, d=4, kmax=5)
        init = InitialCondition(0, 1, 1, 0)
        for component in (1, 2):
            curve = marginal_reliability(model, component, init, 7, PhiSolver(model)).values
            for k in range(1, 8):
                # a fresh solver per horizon, so nothing is shared with the curve
                solver = PhiSolver(model)
                entrywise = sum(phi_marginal(model, component, init, j, k, solver)
                                for j in model.states.up(component))
                self.assertAlmostEqual(curve[k], entrywise, delta=1e-12)

    def test_geometric_default_curve(self):
        model = hazard_model(0.1, 0.05)
        values = marginal_reliability(model, 1, self.init, 8).values
        np.testing.assert_allclose(values, 0.9 ** np.arange(9), atol=1e-12)

    def test_never_failing_component(self):
        values = system_reliability(always_up_model(), self.init, 7).values
        np.testing.assert_array_equal(values, 1.0)

    def test_requires_absorbing_down(self):
        data = model_to_dict(self.model)
        data["p2"][1][0] = [0.3, 0.7]
        leaky = model_from_dict(data)
        with self.assertRaises(A3ViolationError) as ctx:
            marginal_reliability(leaky, 1, self.init, 3)
        self.assertEqual(ctx.exception.exit_code, 4)


class TestDependenceRatio(unittest.TestCase):
    def test_decoupled_models_have_unit_ratio(self):
        for seed in range(5):
            model = random_model(300 + seed, d=3, kmax=5, coupled=False)
            result = dependence_ratio(model, None, None, InitialCondition(0, 1), 10)
            np.testing.assert_allclose(result.values, 1.0, atol=1e-9)

    def test_contagion_lowers_joint_survival(self):
        model = hazard_model(0.2, 0.05, contagion=0.5)
        result = dependence_ratio(model, None, None, InitialCondition(0, 0), 6)
        self.assertAlmostEqual(result.values[1], 1.0, places=12)
        self.assertTrue(np.all(result.values[2:] < 1.0))

    def test_explicit_baselines(self):
        model = example_model()
        init = InitialCondition(0, 0)
        uni1 = freeze_component(model, 1, 0)
        uni2 = freeze_component(model, 2, 0)
        result = dependence_ratio(model, uni1, uni2, init, 4)
        base = (univariate_reliability(uni1, 1, 0, 0, 4).values
                * univariate_reliability(uni2, 2, 0, 0, 4).values)
        np.testing.assert_allclose(result.independent, base, atol=1e-15)
        np.testing.assert_allclose(result.values, result.joint / base, atol=1e-15)

    def test_zero_baseline(self):
        model = hazard_model(1.0, 0.1)
        with self.assertRaises(ZeroDenominatorError):
            dependence_ratio(model, None, None, InitialCondition(0, 0), 3)


if __name__ == "__main__":
    unittest.main()
