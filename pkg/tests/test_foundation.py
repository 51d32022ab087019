import math
import unittest

import numpy as np

import chdarcy.support.foundation as foundation


class ModuleTests(unittest.TestCase):
	def test_parse_span(self):
		self.assertEqual([0.5, 1.0, 1.5, 2.0], list(foundation.parse_span("0.5:2:4")))
		self.assertEqual([0.25], list(foundation.parse_span("0.25")))
		for bad in ["1:2", "1:2:0", "a:b:3"]:
			with self.subTest(text=bad):
				with self.assertRaises(ValueError): foundation.parse_span(bad)

	def test_observed_order(self):
		h = [0.1, 0.05, 0.025]
		self.assertAlmostEqual(2.0, foundation.observed_order(h, [7 * x * x for x in h]))
		self.assertEqual([None, 1.0, 1.0], [None if o is None else round(o, 12) for o in foundation.pairwise_orders(h, [3 * x for x in h])])

	def test_exponential_rate(self):
		t = np.linspace(0, 2, 9)
		rate, amplitude = foundation.exponential_rate(t, 0.5 * np.exp(-1.5 * t))
		self.assertAlmostEqual(-1.5, rate)
		self.assertAlmostEqual(0.5, amplitude)
		rate, amplitude = foundation.exponential_rate([0.0, 1.0], [0.0, 1.0])
		self.assertTrue(math.isnan(rate) and math.isnan(amplitude))


if __name__ == '__main__':
	unittest.main()
