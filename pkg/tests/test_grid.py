import os
import tempfile
import unittest

import numpy as np

from chdarcy.discrete.grid import Grid, VectorField, EdgeValues, NEUMANN_ZERO, DIRICHLET_ZERO
from chdarcy.discrete import snapshot
from chdarcy.support import foundation


def random_vector(grid, rng):
	return VectorField(rng.standard_normal((grid.ny, grid.nx + 1)), rng.standard_normal((grid.ny + 1, grid.nx)))

def random_edges(grid, rng):
	return EdgeValues(rng.standard_normal(grid.ny), rng.standard_normal(grid.ny), rng.standard_normal(grid.nx), rng.standard_normal(grid.nx))


class CalculusTests(unittest.TestCase):
	def setUp(self):
		self.grid = Grid(12, 8, 1.5, 1.0)
		self.rng = np.random.default_rng(2)

	def test_00_shapes(self):
		g = self.grid
		self.assertEqual((8, 12), g.shape)
		v = g.grad(g.zeros())
		self.assertEqual((8, 13), v.x.shape)
		self.assertEqual((9, 12), v.y.shape)
		self.assertEqual(g.shape, g.div(v).shape)
		x, y = g.centers()
		self.assertAlmostEqual(0.5 * g.hx, x[0, 0])
		self.assertAlmostEqual(g.ly - 0.5 * g.hy, y[-1, 0])

	def test_01_divergence_theorem(self):
		v = random_vector(self.grid, self.rng)
		self.assertAlmostEqual(self.grid.net_flux(v), self.grid.integral(self.grid.div(v)), places=12)

	def test_02_assembled_laplacian_matches_the_stencil(self):
		f = self.rng.standard_normal(self.grid.shape)
		for bc in (NEUMANN_ZERO, DIRICHLET_ZERO):
			with self.subTest(bc=bc):
				L = self.grid.laplacian_matrix(bc)
				self.assertTrue(np.allclose((L @ f.ravel()).reshape(self.grid.shape), self.grid.laplacian(f, bc), rtol=1e-13, atol=1e-10))
				self.assertEqual(0, (L - L.T).count_nonzero())

	def test_03_neumann_laplacian_conserves(self):
		f = self.rng.standard_normal(self.grid.shape)
		self.assertLess(abs(self.grid.integral(self.grid.laplacian(f, NEUMANN_ZERO))), 1e-10)

	def test_04_prescribed_flux(self):
		f = self.rng.standard_normal(self.grid.shape)
		g = random_edges(self.grid, self.rng)
		expected = self.grid.laplacian(f, NEUMANN_ZERO) + self.grid.flux_source(g)
		self.assertTrue(np.allclose(self.grid.laplacian(f, g), expected, rtol=1e-13, atol=1e-10))
		self.assertAlmostEqual(self.grid.edge_integral(g), self.grid.integral(self.grid.laplacian(f, g)), places=9)

	def test_05_summation_by_parts(self):
		""" <grad f, v> = -<f, div v> when v has no normal component on the boundary. """
		f = self.rng.standard_normal(self.grid.shape)
		v = random_vector(self.grid, self.rng)
		v.x[:, 0] = v.x[:, -1] = 0.0
		v.y[0, :] = v.y[-1, :] = 0.0
		self.assertAlmostEqual(self.grid.inner_faces(self.grid.grad(f), v), -self.grid.inner(f, self.grid.div(v)), places=10)

	def test_06_face_weights_cover_the_domain(self):
		w = self.grid.face_weights
		self.assertAlmostEqual(self.grid.area, float(np.sum(w.x)))
		self.assertAlmostEqual(self.grid.area, float(np.sum(w.y)))

	def test_07_trace_and_outward(self):
		f = self.rng.standard_normal(self.grid.shape)
		faces = self.grid.face_interp(f)
		trace = self.grid.trace(f)
		self.assertTrue(np.array_equal(faces.x[:, 0], trace.west))
		self.assertTrue(np.array_equal(faces.y[-1, :], trace.north))
		v = random_vector(self.grid, self.rng)
		self.assertTrue(np.array_equal(-v.x[:, 0], self.grid.outward(v).west))
		self.assertTrue(np.array_equal(v.y[-1, :], self.grid.outward(v).north))

	def test_08_rejects_tiny_grids(self):
		with self.assertRaises(ValueError): Grid(3, 8)
		with self.assertRaises(ValueError): Grid(8, 8, 0.0)
		with self.assertRaises(ValueError): self.grid.check(np.zeros((12, 8)))

	def test_09_equality(self):
		self.assertEqual(Grid(12, 8, 1.5, 1.0), self.grid)
		self.assertNotEqual(Grid(12, 8), self.grid)
		self.assertEqual(hash(Grid(12, 8, 1.5, 1.0)), hash(self.grid))


class ConsistencyTests(unittest.TestCase):
	""" The stencils are second-order accurate up to the boundary for data with the matching reflection symmetry. """

	def error(self, n, bc, exact, lap):
		grid = Grid(n, n)
		x, y = grid.centers()
		return float(np.max(np.abs(grid.laplacian(exact(x, y), bc) - lap(x, y))))

	def test_00_neumann(self):
		exact = lambda x, y: np.cos(np.pi * x) * np.cos(np.pi * y)
		lap = lambda x, y: -2 * np.pi ** 2 * exact(x, y)
		ratio = self.error(16, NEUMANN_ZERO, exact, lap) / self.error(32, NEUMANN_ZERO, exact, lap)
		self.assertGreater(ratio, 3.5)

	def test_01_dirichlet(self):
		exact = lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y)
		lap = lambda x, y: -2 * np.pi ** 2 * exact(x, y)
		ratio = self.error(16, DIRICHLET_ZERO, exact, lap) / self.error(32, DIRICHLET_ZERO, exact, lap)
		self.assertGreater(ratio, 3.5)

	def test_02_gradient_order(self):
		""" On faces, cos(pi x) cos(pi y) differences to its exact gradient at second order. """
		sizes = [16, 32, 64]
		errors = []
		for n in sizes:
			grid = Grid(n, n)
			x, y = grid.centers()
			xf, yf = grid.x_faces()
			g = grid.grad(np.cos(np.pi * x) * np.cos(np.pi * y))
			errors.append(float(np.max(np.abs(g.x + np.pi * np.sin(np.pi * xf) * np.cos(np.pi * yf)))))
		self.assertAlmostEqual(2.0, foundation.observed_order([1.0 / n for n in sizes], errors), delta=0.1)

	def test_03_fourier_symbol(self):
		""" div(grad) of a cosine mode is the mode times the exact discrete symbol, boundary cells included. """
		grid = Grid(16, 8, 2.0, 1.0)
		x, y = grid.centers()
		kx, ky = np.pi / grid.lx, 2 * np.pi / grid.ly
		mode = np.cos(kx * x) * np.cos(ky * y)
		symbol = -(4 / grid.hx ** 2) * np.sin(0.5 * kx * grid.hx) ** 2 - (4 / grid.hy ** 2) * np.sin(0.5 * ky * grid.hy) ** 2
		self.assertLess(float(np.max(np.abs(grid.div(grid.grad(mode)) - symbol * mode))), 1e-10)


class SnapshotTests(unittest.TestCase):
	def setUp(self):
		self.grid = Grid(6, 5, 1.25, 0.75)
		self.values = np.random.default_rng(0).standard_normal(self.grid.shape)

	def test_00_file_round_trip_is_exact(self):
		with tempfile.TemporaryDirectory() as folder:
			path = os.path.join(folder, "phi.chd")
			snapshot.write_snapshot(path, 'phi', self.values, self.grid, 0.1 + 0.2)
			snap = snapshot.read_snapshot(path)
		self.assertEqual('phi', snap.name)
		self.assertEqual(self.grid, snap.grid)
		self.assertEqual(0.1 + 0.2, snap.t)
		self.assertTrue(np.array_equal(self.values, snap.values))

	def test_01_header(self):
		blob = snapshot.encode('mu', self.values, self.grid, 2.0)
		self.assertTrue(blob.startswith(b"CHDFIELD v1 mu 6 5 1.25 0.75 2.0\n"))
		self.assertEqual(len(blob.split(b'\n', 1)[0]) + 1 + 8 * 30, len(blob))

	def test_02_corrupt_blobs(self):
		blob = snapshot.encode('q', self.values, self.grid, 0.0)
		for bad in [blob[:-8], blob.replace(b'v1', b'v2', 1), b'no header at all', b'CHDFIELD v1 q 6 5\n']:
			with self.subTest(bad=bad[:20]):
				with self.assertRaises(ValueError): snapshot.decode(bad)

	def test_03_names_are_single_words(self):
		with self.assertRaises(ValueError): snapshot.encode('two words', self.values, self.grid, 0.0)
		with self.assertRaises(ValueError): snapshot.encode('phi', self.values.T, self.grid, 0.0)


if __name__ == '__main__':
	unittest.main()
