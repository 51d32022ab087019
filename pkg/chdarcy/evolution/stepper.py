"""
Time integration by first-order convex splitting.

One step from phi^n solves, for phi+ and mu+,

	(phi+ - phi^n)/dt + div(face(phi^n) u_lag) = Lap_h mu+ + S(phi^n)
	mu+ = -Lap_h phi+ + F'(phi+) - theta0 phi^n

with zero flux for phi and the lagged flux condition d_n mu+ = (u_lag . n) phi^n on the
boundary. The convex part F is implicit, the concave part explicit, which is what makes
the scheme energy stable for any dt. The source is explicit too, so summing the phase
equation over the cells gives exactly forward Euler on the mass ODE: the Laplacian sums
to zero and the transport term cancels against the flux condition by the discrete
divergence theorem.

Eliminating mu+ leaves one nonlinear equation R(phi) = 0 in phi alone, with the Jacobian

	J = I/dt + L^2 - L diag(F''(phi))

where L is the zero-flux Laplacian matrix. Newton starts from phi^n and stops after an
undamped update no larger than newton_tol, which leaves R quadratically small. Every undamped
update zeroes the cell sum of R (the L terms have zero column sums), so the mass law
survives to roundoff once the iteration has converged. In logarithmic mode, an update
that would carry a cell more than `damping` of its distance toward +/-1 is shortened.

Then the pressure and velocity follow from phi+ and mu+:

	-Lap_h q+ = S(phi+) + div(face(phi+) grad mu+),  q+ = 0 on the boundary
	u+ = -grad q+ - face(phi+) grad mu+

With picard_iters > 1 the whole thing repeats with the new velocity as the lag.
"""
import logging
from typing import Callable, NamedTuple, Optional

import numpy as np
import scipy.sparse as sp
from numpy.polynomial.legendre import leggauss
from scipy.sparse.linalg import spsolve

from ..interface import DomainError, ConvergenceError, BoundViolation
from ..discrete.grid import Grid, VectorField, EdgeValues, NEUMANN_ZERO
from ..discrete.elliptic import EllipticSolver, EllipticOptions, pressure_rhs, darcy_update
from ..physics.model import ModelParams, Source
from ..physics.potential import PotentialEvaluator

log = logging.getLogger(__name__)

INITIAL_MARGIN = 1e-6
SMALLEST_DAMPING = 1e-12

class StepStats(NamedTuple):
	newton_iters: int = 0
	cg_iters: int = 0
	damped: int = 0  # Newton updates that had to be shortened.
	sweeps: int = 0

class State(NamedTuple):
	"""
	A solution snapshot. `flux` is the normal derivative of mu used in grad mu, and
	`u_lag` the velocity the phase equation was transported by; both are what a
	diagnostic needs to reproduce the step's own equations. Initial states have
	no lag, and zero flux unless a manufactured forcing prescribes one.
	"""
	t: float
	phi: np.ndarray
	mu: np.ndarray
	q: np.ndarray
	u: VectorField
	flux: EdgeValues
	u_lag: Optional[VectorField] = None
	stats: StepStats = StepStats()

class Forcing(NamedTuple):
	""" Manufactured right-hand sides at one instant: added to the phase equation, the pressure equation and the mu flux. """
	phi: np.ndarray
	q: np.ndarray
	flux: EdgeValues

class StepOptions(NamedTuple):
	dt: float
	newton_tol: float = 1e-10
	newton_max: int = 50
	picard_iters: int = 1
	damping: float = 0.9

	def validate(self):
		if not self.dt > 0: raise ValueError("time step must be positive, got %r" % self.dt)
		if not self.newton_tol > 0: raise ValueError("Newton tolerance must be positive, got %r" % self.newton_tol)
		if self.newton_max < 1: raise ValueError("newton_max must be at least 1, got %r" % self.newton_max)
		if self.picard_iters < 1: raise ValueError("picard_iters must be at least 1, got %r" % self.picard_iters)
		if not 0 < self.damping < 1: raise ValueError("damping must lie in (0, 1), got %r" % self.damping)
		return self


def make_potential(params:ModelParams) -> PotentialEvaluator:
	return PotentialEvaluator(params.theta, params.theta0, params.potential_mode)


class Scheme:
	"""
	Everything a run holds fixed: the grid, the parameters, the assembled operators and
	the elliptic factorizations. `initialize` and `step` are pure functions of their
	arguments given the scheme; states are never modified in place.
	"""
	def __init__(self, grid:Grid, params:ModelParams, options:StepOptions, elliptic:EllipticOptions=EllipticOptions(), forcing:Callable[[float], Forcing]=None):
		self.grid, self.params, self.options = grid, params.validate(), options.validate()
		self.forcing = forcing
		self.potential = make_potential(params)
		self.source = Source(params)
		self.elliptic = EllipticSolver(grid, elliptic)
		self.L = grid.laplacian_matrix(NEUMANN_ZERO)
		self.L2 = (self.L @ self.L).tocsr()
		self.identity_over_dt = sp.identity(grid.size, format='csr') / options.dt

	def initialize(self, phi0) -> State:
		grid, potential = self.grid, self.potential
		phi0 = grid.check(phi0, "initial phase field").copy()
		if potential.is_logarithmic:
			worst = float(np.max(np.abs(phi0)))
			if worst > 1 - INITIAL_MARGIN:
				raise DomainError("initial phase field reaches |phi| = %r; logarithmic mode needs at most %r" % (worst, 1 - INITIAL_MARGIN), worst=worst)
		mu0 = -grid.laplacian(phi0, NEUMANN_ZERO) + potential.psi_prime(phi0)
		forced = self.forcing(0.0) if self.forcing else None
		flux = grid.zero_edges()
		if forced:
			# One recoupling pass so the manufactured flux sees the transport part as well.
			_, u0, _ = self._pressure_velocity(phi0, mu0, forced.flux, forced)
			flux = grid.outward(u0) * grid.trace(phi0) + forced.flux
		q0, u0, cg_iters = self._pressure_velocity(phi0, mu0, flux, forced)
		log.debug("initialized: mean(phi)=%.6g, %d CG iterations", grid.mean(phi0), cg_iters)
		return State(0.0, phi0, mu0, q0, u0, flux, None, StepStats(cg_iters=cg_iters))

	def _pressure_velocity(self, phi, mu, mu_bc, forced:Optional[Forcing]):
		rhs = pressure_rhs(self.grid, self.source(phi), phi, mu, mu_bc)
		if forced: rhs = rhs + forced.q
		solved = self.elliptic.solve_dirichlet(rhs)
		return solved.field, darcy_update(self.grid, solved.field, phi, mu, mu_bc), solved.iterations

	def step(self, state:State) -> State:
		grid = self.grid
		newton_iters = cg_iters = damped = 0
		u = state.u
		source_old = self.source(state.phi)
		forced = self.forcing(state.t + self.options.dt) if self.forcing else None
		for _ in range(self.options.picard_iters):
			u_lag = u
			flux = grid.outward(u_lag) * grid.trace(state.phi)
			if forced: flux = flux + forced.flux
			explicit = (
				-state.phi / self.options.dt
				+ self.params.theta0 * (self.L @ state.phi.ravel()).reshape(grid.shape)
				+ grid.div(u_lag.scaled(grid.face_interp(state.phi)))
				- grid.flux_source(flux)
				- source_old
			)
			if forced: explicit = explicit - forced.phi
			phi, iters, shortened = self._newton(state.phi, explicit.ravel())
			newton_iters, damped = newton_iters + iters, damped + shortened
			mu = self.chemical_potential(phi, state.phi)
			q, u, iters = self._pressure_velocity(phi, mu, flux, forced)
			cg_iters += iters
		stats = StepStats(newton_iters, cg_iters, damped, self.options.picard_iters)
		return State(state.t + self.options.dt, phi, mu, q, u, flux, u_lag, stats)

	def chemical_potential(self, phi, phi_old):
		""" mu = -Lap_h phi + F'(phi) - theta0 phi_old, with zero flux for phi. """
		return -self.grid.laplacian(phi, NEUMANN_ZERO) + self.potential.convex_prime(phi) - self.params.theta0 * phi_old

	def residual(self, phi_flat, explicit):
		""" R(phi) of the eliminated phase equation; `explicit` holds every term fixed during the solve. """
		return phi_flat / self.options.dt + self.L2 @ phi_flat - self.L @ self.potential.convex_prime(phi_flat) + explicit

	def _newton(self, phi_old, explicit):
		opts, potential = self.options, self.potential
		phi = phi_old.ravel().copy()
		shortened = 0
		R = self.residual(phi, explicit)
		for iteration in range(1, opts.newton_max + 1):
			J = self.identity_over_dt + self.L2 - self.L @ sp.diags(potential.convex_second(phi))
			delta = spsolve(J.tocsc(), -R)
			alpha = self._damping(phi, delta) if potential.is_logarithmic else 1.0
			if alpha < 1.0:
				shortened += 1
				log.debug("Newton update %d shortened to %.3g of its length", iteration, alpha)
			phi = phi + alpha * delta
			R = self.residual(phi, explicit)
			if alpha == 1.0 and float(np.max(np.abs(delta))) <= opts.newton_tol:
				return phi.reshape(phi_old.shape), iteration, shortened
		raise ConvergenceError("Newton", opts.newton_max, opts.dt * float(np.max(np.abs(R))), advice="try a smaller dt")

	def _damping(self, phi, delta) -> float:
		""" Largest step fraction (capped at 1) that moves no cell more than `damping` of its way to the pole it heads for. """
		room = np.where(delta > 0, 1.0 - phi, 1.0 + phi)
		speed = np.abs(delta)
		moving = speed > 0
		if not np.any(moving): return 1.0
		alpha = min(1.0, self.options.damping * float(np.min(room[moving] / speed[moving])))
		if alpha < SMALLEST_DAMPING:
			raise BoundViolation("Newton damping collapsed to %.3g; phi is pinned against +/-1" % alpha)
		return alpha


def initialize(phi0, params:ModelParams, options:StepOptions, grid:Grid, elliptic:EllipticOptions=EllipticOptions()) -> State:
	return Scheme(grid, params, options, elliptic).initialize(phi0)

def step(state:State, params:ModelParams, options:StepOptions, grid:Grid, elliptic:EllipticOptions=EllipticOptions()) -> State:
	""" One step with a throwaway scheme. Loops should hold a Scheme instead. """
	return Scheme(grid, params, options, elliptic).step(state)


_NODES, _WEIGHTS = leggauss(8)
_TAU, _TAU_WEIGHTS = 0.5 * (_NODES + 1.0), 0.5 * _WEIGHTS

def segment_curvature(phi_a, phi_b, potential:PotentialEvaluator):
	""" L(a, b) = integral over tau in [0, 1] of F''(tau a + (1 - tau) b), by 8-point Gauss-Legendre. """
	total = np.zeros_like(np.asarray(phi_a, dtype=float))
	for tau, weight in zip(_TAU, _TAU_WEIGHTS):
		total += weight * potential.convex_second(tau * phi_a + (1 - tau) * phi_b)
	return total

def uniqueness_gap(state_a:State, state_b:State, params:ModelParams, grid:Grid) -> float:
	""" Y = 1/2 |grad(phi_a - phi_b)|^2 + 1/2 integral of L(phi_a, phi_b) (phi_a - phi_b)^2. """
	difference = state_a.phi - state_b.phi
	weight = segment_curvature(state_a.phi, state_b.phi, make_potential(params))
	gradient = grid.grad(difference, NEUMANN_ZERO)
	return 0.5 * grid.inner_faces(gradient, gradient) + 0.5 * grid.integral(weight * difference * difference)
