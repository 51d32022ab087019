import os
import tempfile
import unittest

import numpy as np

from chdarcy.discrete.grid import Grid
from chdarcy.discrete.snapshot import write_snapshot
from chdarcy.evolution import initdata
from chdarcy.evolution.initdata import InitSpec


class WidthTests(unittest.TestCase):
	def test_00_parse(self):
		for text, expected in [("4h", (4.0, True)), (" 2.5h ", (2.5, True)), ("h", (1.0, True)), ("0.02", (0.02, False))]:
			with self.subTest(text=text): self.assertEqual(expected, initdata.parse_width(text))
		with self.assertRaises(ValueError): initdata.parse_width("wide")


class GenerateTests(unittest.TestCase):
	def setUp(self):
		self.grid = Grid(16, 16)

	def test_00_uniform(self):
		phi = initdata.generate(InitSpec(kind='uniform', value=0.3), self.grid)
		self.assertTrue(np.array_equal(np.full(self.grid.shape, 0.3), phi))

	def test_01_clipping(self):
		with self.assertLogs('chdarcy.evolution.initdata', 'WARNING'):
			phi = initdata.generate(InitSpec(kind='uniform', value=0.99, clip_margin=0.05), self.grid)
		self.assertTrue(np.allclose(phi, 0.95))

	def test_02_disc(self):
		spec = InitSpec(kind='tanh_disc', radius=0.25, width=0.02, width_in_cells=False)
		phi = initdata.generate(spec, self.grid)
		self.assertAlmostEqual(0.9, float(phi[8, 8]), places=6)
		self.assertAlmostEqual(-0.9, float(phi[0, 0]), places=6)
		self.assertTrue(np.allclose(phi, phi[::-1, :]))
		self.assertTrue(np.allclose(phi, phi.T))
		self.assertLessEqual(float(np.max(np.abs(phi))), 0.95)

	def test_03_disc_width_in_cells(self):
		relative = initdata.generate(InitSpec(kind='tanh_disc', width=2.0), self.grid)
		absolute = initdata.generate(InitSpec(kind='tanh_disc', width=2.0 / 16, width_in_cells=False), self.grid)
		self.assertTrue(np.allclose(relative, absolute))

	def test_04_random_is_reproducible(self):
		spec = InitSpec(kind='random', mean=0.2, amplitude=0.05, seed=11)
		a, b = initdata.generate(spec, self.grid), initdata.generate(spec, self.grid)
		self.assertTrue(np.array_equal(a, b))
		self.assertLessEqual(float(np.max(np.abs(a - 0.2))), 0.05)
		self.assertFalse(np.array_equal(a, initdata.generate(spec._replace(seed=12), self.grid)))

	def test_05_snapshot(self):
		values = np.linspace(-0.5, 0.5, self.grid.size).reshape(self.grid.shape)
		with tempfile.TemporaryDirectory() as folder:
			path = os.path.join(folder, "phi.chd")
			write_snapshot(path, 'phi', values, self.grid, 0.25)
			phi = initdata.generate(InitSpec(kind='snapshot', path=path), self.grid)
			self.assertTrue(np.array_equal(values, phi))
			with self.assertRaises(ValueError): initdata.generate(InitSpec(kind='snapshot', path=path), Grid(8, 8))

	def test_06_validation(self):
		for spec in [
			InitSpec(kind='stripes'),
			InitSpec(clip_margin=0.0),
			InitSpec(kind='tanh_disc', radius=-0.1),
			InitSpec(kind='tanh_disc', width=0.0),
			InitSpec(kind='random', amplitude=-1.0),
			InitSpec(kind='snapshot'),
		]:
			with self.subTest(spec=spec):
				with self.assertRaises(ValueError): spec.validate()

	def test_07_perturbed(self):
		phi = initdata.generate(InitSpec(kind='uniform', value=0.1), self.grid)
		self.assertTrue(np.array_equal(phi, initdata.perturbed(phi, self.grid, 0.0, 0.05)))
		nudged = initdata.perturbed(phi, self.grid, 1e-3, 0.05)
		x, _ = self.grid.centers()
		self.assertTrue(np.allclose(nudged - phi, 1e-3 * np.cos(np.pi * x)))
		self.assertAlmostEqual(0.0, self.grid.mean(nudged - phi), places=15)

	def test_08_disc_level_set_radius(self):
		""" The zero level set, read off the centre row by linear interpolation, sits on the requested circle. """
		grid = Grid(64, 64)
		phi = initdata.generate(InitSpec(kind='tanh_disc', radius=0.25), grid)
		x, y = grid.centers()
		row = grid.ny // 2
		line = phi[row]
		crossings = [i for i in range(grid.nx - 1) if line[i] * line[i + 1] < 0]
		self.assertEqual(2, len(crossings))
		for i in crossings:
			level_x = x[row, i] + grid.hx * line[i] / (line[i] - line[i + 1])
			radius = float(np.hypot(level_x - 0.5, y[row, 0] - 0.5))
			self.assertLessEqual(abs(radius - 0.25), 2 * grid.hx)


if __name__ == '__main__':
	unittest.main()
