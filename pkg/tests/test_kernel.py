import unittest

import numpy as np

from tests.create_test_model import example_model, geometric_model, random_model
from utils.errors import DegenerateBackwardError
from utils.kernel import backward_density, backward_q, build_kernel, sojourn_cdf
from utils.model import model_from_dict, model_to_dict


class TestKernel(unittest.TestCase):
    def setUp(self):
        self.model = example_model()

    def test_no_zero_length_sojourns(self):
        for component in (1, 2):
            tables = build_kernel(self.model, component)
            np.testing.assert_array_equal(tables.q[..., 0], 0.0)

    def test_kernel_tends_to_transition_law(self):
        for component in (1, 2):
            tables = build_kernel(self.model, component)
            np.testing.assert_allclose(tables.bigQ[..., -1],
                                       self.model.own_other_matrix(component), atol=1e-15)

    def test_point_masses_add_up(self):
        model = random_model(3, d=4, kmax=7)
        tables = build_kernel(model, 2)
        np.testing.assert_allclose(tables.q.sum(axis=-1), model.own_other_matrix(2), atol=1e-12)

    def test_component_two_uses_its_own_state(self):
        tables = build_kernel(self.model, 2)
        # (i1, i2) = (D, A): component 2 sits in A
        expected = self.model.p2.p[0, 1, 0] * (0.25 - 0.0)
        self.assertAlmostEqual(tables.q[1, 0, 0, 1], expected, places=15)

    def test_backward_q_at_zero_matches_kernel(self):
        tables = build_kernel(self.model, 1)
        for k in range(1, self.model.kmax + 1):
            self.assertAlmostEqual(backward_q(self.model, 1, 0, 1, 1, 0, k), tables.q[0, 1, 1, k], places=15)

    def test_backward_q_conditions_on_age(self):
        # F_A = (0, .3, .6, .85, 1): after surviving 2 periods, P(X = 3 | X > 2) = .25 / .4
        value = backward_q(self.model, 1, 0, 0, 0, 2, 1)
        self.assertAlmostEqual(value, 0.8 * 0.25 / 0.4, places=14)

    def test_backward_q_beyond_support(self):
        with self.assertRaises(DegenerateBackwardError):
            backward_q(self.model, 1, 0, 0, 0, 4, 1)

    def test_other_sojourn_law_is_irrelevant(self):
        data = model_to_dict(self.model)
        data["f2"] = [[0.0, 0.9, 0.95, 0.99, 1.0], [0.0, 0.1, 0.2, 0.3, 1.0]]
        other = model_from_dict(data)
        for i1, i2, j in np.ndindex(2, 2, 2):
            for v in range(self.model.kmax):
                for k in range(1, self.model.kmax + 2):
                    self.assertEqual(backward_q(other, 1, i1, i2, j, v, k),
                                     backward_q(self.model, 1, i1, i2, j, v, k))

    def test_backward_density_sums_to_one(self):
        law = self.model.sojourn(2)
        for v in range(law.kmax):
            self.assertAlmostEqual(backward_density(law, 0, v, law.kmax).sum(), 1.0, places=14)

    def test_sojourn_cdf_extends_with_ones(self):
        F = sojourn_cdf(self.model.sojourn(1), 9)
        self.assertEqual(F.shape, (2, 10))
        np.testing.assert_array_equal(F[:, 4:], 1.0)


class TestMemorylessness(unittest.TestCase):
    def test_geometric_sojourns_forget_their_age(self):
        model = geometric_model(kmax=10)
        for component in (1, 2):
            for k in range(1, model.kmax):
                for v in range(0, model.kmax - k):
                    for j in range(model.d):
                        self.assertAlmostEqual(
                            backward_q(model, component, 0, 0, j, v, k),
                            backward_q(model, component, 0, 0, j, 0, k),
                            delta=1e-12,
                        )


if __name__ == "__main__":
    unittest.main()
