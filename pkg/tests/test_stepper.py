import unittest

import numpy as np

from chdarcy.interface import DomainError, ConvergenceError
from chdarcy.discrete.grid import Grid
from chdarcy.physics.model import ModelParams, ConstantShape, LinearHalfShape
from chdarcy.physics.potential import regularized_mode
from chdarcy.evolution import stepper
from chdarcy.evolution.stepper import Scheme, StepOptions
from chdarcy.analysis.diagnostics import Diagnostics, energy
from chdarcy.support import foundation


def random_phi(grid, mean=0.0, amplitude=0.05, seed=3):
	return mean + amplitude * np.random.default_rng(seed).uniform(-1, 1, size=grid.shape)

def march(scheme, phi0, steps):
	states = [scheme.initialize(phi0)]
	for _ in range(steps): states.append(scheme.step(states[-1]))
	return states


class OptionsTests(unittest.TestCase):
	def test_00_validation(self):
		for options in [StepOptions(0.0), StepOptions(1e-3, newton_tol=0.0), StepOptions(1e-3, newton_max=0), StepOptions(1e-3, picard_iters=0), StepOptions(1e-3, damping=1.0)]:
			with self.subTest(options=options):
				with self.assertRaises(ValueError): options.validate()


class SchemeTests(unittest.TestCase):
	def setUp(self):
		self.grid = Grid(8, 8)
		self.params = ModelParams(m=1.0, h=ConstantShape(0.2))
		self.options = StepOptions(1e-3)

	def test_00_constant_state_without_source_stays_put(self):
		scheme = Scheme(self.grid, self.params._replace(source_off=True), self.options)
		before = scheme.initialize(np.full(self.grid.shape, -0.4))
		after = scheme.step(before)
		self.assertTrue(np.allclose(before.phi, after.phi, rtol=0, atol=1e-12))
		self.assertAlmostEqual(1e-3, after.t)
		self.assertLess(self.grid.norm_l2_faces(after.u), 1e-8)

	def test_01_mass_law_is_exact(self):
		scheme = Scheme(self.grid, self.params, self.options)
		diagnostics = Diagnostics(self.grid, scheme.params)
		states = march(scheme, random_phi(self.grid), 5)
		for previous, state in zip(states, states[1:]):
			self.assertLess(abs(diagnostics.mass_residual(previous, state, self.options.dt)), 1e-8)

	def test_02_darcy_constraint(self):
		scheme = Scheme(self.grid, self.params._replace(h=LinearHalfShape()), self.options)
		state = march(scheme, random_phi(self.grid), 2)[-1]
		self.assertLess(self.grid.norm_l2(self.grid.div(state.u) - scheme.source(state.phi)), 1e-8)

	def test_03_energy_decays_without_source(self):
		scheme = Scheme(self.grid, self.params._replace(source_off=True), self.options)
		states = march(scheme, random_phi(self.grid), 6)
		energies = [energy(s.phi, scheme.potential, self.grid) for s in states]
		for before, after in zip(energies, energies[1:]):
			self.assertLessEqual(after, before + 1e-12)
		self.assertLess(energies[-1], energies[0])

	def test_04_logarithmic_mode_keeps_phi_inside(self):
		scheme = Scheme(self.grid, self.params, self.options)
		for state in march(scheme, random_phi(self.grid, amplitude=0.6), 3):
			self.assertLess(float(np.max(np.abs(state.phi))), 1.0)

	def test_05_initial_data_must_be_inside(self):
		scheme = Scheme(self.grid, self.params, self.options)
		with self.assertRaises(DomainError): scheme.initialize(np.full(self.grid.shape, 1.0))
		relaxed = Scheme(self.grid, self.params._replace(potential_mode=regularized_mode(16, 1.0)), self.options)
		self.assertEqual(0.0, relaxed.initialize(np.full(self.grid.shape, 1.0)).t)

	def test_06_newton_cap(self):
		scheme = Scheme(self.grid, self.params, StepOptions(1e-3, newton_tol=1e-300, newton_max=1))
		with self.assertRaises(ConvergenceError) as context:
			scheme.step(scheme.initialize(random_phi(self.grid)))
		self.assertEqual(1, context.exception.iterations)
		self.assertIn("smaller dt", str(context.exception))

	def test_07_step_bookkeeping(self):
		scheme = Scheme(self.grid, self.params, StepOptions(1e-3, picard_iters=2))
		initial = scheme.initialize(random_phi(self.grid))
		self.assertIsNone(initial.u_lag)
		self.assertEqual(0.0, initial.flux.max_abs())
		state = scheme.step(initial)
		self.assertEqual(2, state.stats.sweeps)
		self.assertGreaterEqual(state.stats.newton_iters, 2)
		self.assertIsNotNone(state.u_lag)
		expected_flux = self.grid.outward(state.u_lag) * self.grid.trace(initial.phi)
		self.assertEqual(0.0, (expected_flux + -state.flux).max_abs())

	def test_08_chemical_potential(self):
		scheme = Scheme(self.grid, self.params, self.options)
		phi0 = random_phi(self.grid)
		state = march(scheme, phi0, 1)[-1]
		expected = -self.grid.laplacian(state.phi) + scheme.potential.convex_prime(state.phi) - 2.0 * phi0
		self.assertTrue(np.allclose(state.mu, expected))

	def test_09_module_functions_match_the_scheme(self):
		phi0 = random_phi(self.grid)
		initial = stepper.initialize(phi0, self.params, self.options, self.grid)
		self.assertTrue(np.array_equal(initial.mu, Scheme(self.grid, self.params, self.options).initialize(phi0).mu))
		after = stepper.step(initial, self.params, self.options, self.grid)
		self.assertTrue(np.array_equal(after.phi, Scheme(self.grid, self.params, self.options).step(initial).phi))

	def test_10_energy_stable_for_large_steps(self):
		for dt in (1e-2, 1e-1):
			scheme = Scheme(self.grid, self.params._replace(source_off=True), StepOptions(dt))
			states = march(scheme, random_phi(self.grid), 3)
			energies = [energy(s.phi, scheme.potential, self.grid) for s in states]
			for before, after in zip(energies, energies[1:]):
				with self.subTest(dt=dt):
					self.assertLessEqual(after, before + 1e-12 * max(1.0, abs(before)))

	def test_11_first_order_in_time(self):
		""" Differences between runs at dt, dt/2, dt/4, dt/8 to a fixed time halve with dt. """
		x, y = self.grid.centers()
		phi0 = 0.1 * np.cos(np.pi * x) * np.cos(np.pi * y)
		params = self.params._replace(h=LinearHalfShape())
		t_end, dts = 1.6e-3, [4e-4, 2e-4, 1e-4, 5e-5]
		finals = [march(Scheme(self.grid, params, StepOptions(dt)), phi0, round(t_end / dt))[-1] for dt in dts]
		for state in finals: self.assertAlmostEqual(t_end, state.t, places=12)
		gaps = [self.grid.norm_l2(a.phi - b.phi) for a, b in zip(finals, finals[1:])]
		order = foundation.observed_order(dts[:-1], gaps)
		self.assertTrue(0.8 <= order <= 1.2, (order, gaps))

	def test_12_constant_shape_gives_forward_euler_on_the_mean(self):
		params, dt = ModelParams(m=1.5, h=ConstantShape(0.3)), 5e-3
		scheme = Scheme(self.grid, params, StepOptions(dt))
		states = march(scheme, random_phi(self.grid, mean=0.1), 5)
		expected = self.grid.mean(states[0].phi)
		for state in states[1:]:
			expected += dt * (-1.5 * expected + 0.3)
			self.assertAlmostEqual(expected, self.grid.mean(state.phi), delta=10 * scheme.options.newton_tol)


class UniquenessTests(unittest.TestCase):
	def setUp(self):
		self.grid = Grid(8, 8)
		self.params = ModelParams()
		self.scheme = Scheme(self.grid, self.params, StepOptions(1e-3))

	def test_00_segment_curvature_of_a_point(self):
		phi = random_phi(self.grid, amplitude=0.5)
		self.assertTrue(np.allclose(stepper.segment_curvature(phi, phi, self.scheme.potential), self.scheme.potential.convex_second(phi)))

	def test_01_gap(self):
		a = self.scheme.initialize(random_phi(self.grid))
		b = self.scheme.initialize(random_phi(self.grid, seed=4))
		self.assertEqual(0.0, stepper.uniqueness_gap(a, a, self.params, self.grid))
		gap = stepper.uniqueness_gap(a, b, self.params, self.grid)
		self.assertGreater(gap, 0.0)
		self.assertAlmostEqual(gap, stepper.uniqueness_gap(b, a, self.params, self.grid), places=12)

	def test_02_gap_of_a_uniform_shift(self):
		""" With no gradient in the difference, Y is half the integral of L(a, b) times the squared shift. """
		a = self.scheme.initialize(np.full(self.grid.shape, 0.1))
		b = self.scheme.initialize(np.full(self.grid.shape, 0.3))
		# theta (atanh(0.3) - atanh(0.1)) / 0.2 is the mean of F'' over the segment.
		curvature = (np.arctanh(0.3) - np.arctanh(0.1)) / 0.2
		self.assertAlmostEqual(0.5 * curvature * 0.04, stepper.uniqueness_gap(a, b, self.params, self.grid), places=10)

	def test_03_gap_dominates_the_convexity_bound(self):
		""" F'' >= theta, so Y is at least theta/2 times the squared L2 distance. """
		for seed in range(5, 10):
			with self.subTest(seed=seed):
				a = self.scheme.initialize(random_phi(self.grid, amplitude=0.8, seed=seed))
				b = self.scheme.initialize(random_phi(self.grid, mean=0.1, amplitude=0.8, seed=seed + 10))
				difference = a.phi - b.phi
				bound = 0.5 * self.params.theta * self.grid.inner(difference, difference)
				self.assertGreaterEqual(stepper.uniqueness_gap(a, b, self.params, self.grid) - bound, 0.0)


if __name__ == '__main__':
	unittest.main()
