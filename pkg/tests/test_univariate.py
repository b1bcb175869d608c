import unittest

import numpy as np

from tests.create_test_model import example_model, hazard_model
from utils.errors import DegenerateBackwardError, HorizonOverflowError
from utils.univariate import UnivariateSolver, freeze_component


class TestUnivariateChain(unittest.TestCase):
    def setUp(self):
        self.model = example_model()
        self.uni = freeze_component(self.model, 1, 1)

    def test_frozen_law_reads_other_state(self):
        np.testing.assert_array_equal(self.uni.p, self.model.p1.p[:, 1, :])
        self.assertEqual(self.uni.up, self.model.states.up1)
        self.assertFalse(self.uni.p.flags.writeable)

    def test_rows_sum_to_one(self):
        phi = UnivariateSolver(self.uni, 9).transition(0, 1, 9)
        np.testing.assert_allclose(phi.sum(axis=0), 1.0, atol=1e-12)

    def test_first_period(self):
        # F_A = (0, .3, .6, .85, 1), p1[(A, D)] = (.6, .4)
        phi = UnivariateSolver(self.uni, 1).transition(0, 2, 1)
        jump = 0.25 / 0.4
        self.assertAlmostEqual(phi[0, 1], 0.6 * jump + (1 - jump), places=15)
        self.assertAlmostEqual(phi[1, 1], 0.4 * jump, places=15)

    def test_geometric_reliability(self):
        uni = freeze_component(hazard_model(0.1, 0.3), 1, 0)
        values = UnivariateSolver(uni, 6).reliability(0, 0, 6)
        np.testing.assert_allclose(values, 0.9 ** np.arange(7), atol=1e-14)

    def test_degenerate_backward(self):
        with self.assertRaises(DegenerateBackwardError):
            UnivariateSolver(self.uni, 3).transition(0, 4, 3)

    def test_horizon_beyond_solved(self):
        with self.assertRaises(HorizonOverflowError):
            UnivariateSolver(self.uni, 3).transition(0, 0, 4)


if __name__ == "__main__":
    unittest.main()
