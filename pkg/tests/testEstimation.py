#!/usr/bin/python
# Unit-tests for pilot reception and MMSE channel estimation

import unittest
import numpy as np
import tests.test_utils as test_utils
from riscfmimo.estimation import (PilotBook, dft_pilot_book, estimate_channels, gamma_of, mmse_estimate,
                                  project_pilots, receive_pilots)


class PilotBookTest(unittest.TestCase):

    def testOrthonormal(self):
        for tau_c, k in ((4, 4), (40, 40), (45, 12), (7, 1)):
            book = dft_pilot_book(tau_c, k)
            self.assertEqual((book.tau_c, book.user_count), (tau_c, k))
            self.assertTrue(book.is_orthonormal())

    def testTooManyUsers(self):
        self.assertRaises(ValueError, dft_pilot_book, 3, 4)

    def testNotOrthonormal(self):
        self.assertFalse(PilotBook(np.ones((4, 2)) / 2.0).is_orthonormal())


class PilotReceptionTest(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(8)
        self.g = test_utils.complex_normal_samples(self.rng, 1.0, (6, 3))
        self.pilots = dft_pilot_book(5, 3)

    def testNoiselessProjection(self):
        y = receive_pilots(self.g, self.pilots, 2.0, noise=np.zeros((6, 5)))
        self.assertEqual(y.shape, (6, 5))
        projected = project_pilots(y, self.pilots)
        self.assertTrue(np.allclose(projected, np.sqrt(5 * 2.0) * self.g, rtol=1e-12, atol=1e-12))

    def testExplicitNoiseIsAdded(self):
        noise = test_utils.complex_normal_samples(self.rng, 1.0, (6, 5))
        clean = receive_pilots(self.g, self.pilots, 2.0, noise=np.zeros((6, 5)))
        noisy = receive_pilots(self.g, self.pilots, 2.0, noise=noise)
        self.assertTrue(np.allclose(noisy - clean, noise, rtol=0, atol=1e-12))

    def testSeededNoiseIsDeterministic(self):
        a = receive_pilots(self.g, self.pilots, 2.0, seed=test_utils.seed(channel_index=1))
        b = receive_pilots(self.g, self.pilots, 2.0, seed=test_utils.seed(channel_index=1))
        c = receive_pilots(self.g, self.pilots, 2.0, seed=test_utils.seed(channel_index=2))
        self.assertTrue(np.array_equal(a, b))
        self.assertFalse(np.array_equal(a, c))

    def testBadInputs(self):
        self.assertRaises(ValueError, receive_pilots, self.g, self.pilots, 0.0, seed=test_utils.seed())
        self.assertRaises(ValueError, receive_pilots, self.g, self.pilots, 1.0)


class GammaTest(unittest.TestCase):

    def testClosedForm(self):
        self.assertAlmostEqual(float(gamma_of(2.0, 4, 0.5)), 4 * 0.5 * 4.0 / (4 * 0.5 * 2.0 + 1.0), places=14)

    def testLimits(self):
        self.assertEqual(float(gamma_of(0.0, 10, 1.0)), 0.0)
        rho = np.array([0.1, 1.0, 301.0])
        gamma = gamma_of(rho, 40, 3.142e11)
        self.assertTrue(np.allclose(gamma, rho, rtol=1e-9, atol=0))
        self.assertTrue(np.all(gamma <= rho))
        self.assertTrue(np.all(gamma_of(rho, 2, 0.01) < rho))

    def testNegativeRho(self):
        self.assertRaises(ValueError, gamma_of, np.array([1.0, -0.1]), 4, 1.0)

    def testEstimateOfExactProjection(self):
        # With no noise the estimate shrinks g by gamma / rho
        g = np.array([[1.0 + 1.0j]])
        rho = np.array([[2.0]])
        projected = np.sqrt(4 * 0.5) * g
        g_hat = mmse_estimate(projected, rho, 4, 0.5)
        self.assertAlmostEqual(abs(g_hat[0, 0] - g[0, 0] * float(gamma_of(2.0, 4, 0.5)) / 2.0), 0.0, places=14)


class MmseStatisticsTest(unittest.TestCase):
    """ Empirical moments of the estimate and of its error over many pilot-noise and channel draws. """

    @classmethod
    def setUpClass(cls):
        rng = np.random.default_rng(21)
        cls.trials = 100000
        cls.rho = rng.uniform(0.5, 2.0, size=(3, 4))
        cls.p_c = 0.5
        pilots = dft_pilot_book(4, 4)
        g = test_utils.complex_normal_samples(rng, cls.rho, (cls.trials, 3, 4))
        estimate = estimate_channels(g, cls.rho, pilots, cls.p_c, test_utils.seed(channel_index=1))
        cls.gamma = estimate.gamma
        cls.g_hat = estimate.g_hat
        cls.error = g - estimate.g_hat

    def testEstimateVariance(self):
        ratio = np.mean(np.abs(self.g_hat) ** 2, axis=0) / self.gamma
        self.assertLess(np.max(np.abs(ratio - 1.0)), 0.02)

    def testErrorVariance(self):
        ratio = np.mean(np.abs(self.error) ** 2, axis=0) / (self.rho - self.gamma)
        self.assertLess(np.max(np.abs(ratio - 1.0)), 0.02)

    def testEstimateAndErrorUncorrelated(self):
        cross = np.mean(np.conj(self.g_hat) * self.error, axis=0)
        corr = np.abs(cross) / np.sqrt(self.gamma * (self.rho - self.gamma))
        self.assertLess(np.max(corr), 3.0 / np.sqrt(self.trials))

    def testEstimateIsUnbiased(self):
        mean = np.abs(np.mean(self.g_hat, axis=0)) / np.sqrt(self.gamma)
        self.assertLess(np.max(mean), 4.0 / np.sqrt(self.trials))


if __name__ == '__main__':
    unittest.main()
