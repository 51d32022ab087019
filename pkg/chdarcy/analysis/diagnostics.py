"""
Diagnostics: the quantities the continuous model says something about, evaluated on
discrete states.

Three kinds of number come out of here:

* Balance quantities: energy, dissipation, the source forcing, and the defects of the
  energy identity and of the mass law.
* Residuals of three elliptic identities the model implies: the pressure identity
  (the Darcy constraint with the phase equation substituted), the chemical-potential
  identity with its boundary relation, and the identity for Lap(phi q / (1 + phi^2)).
  Each holds exactly for smooth solutions, so on a discrete trajectory the residual
  measures discretization and lagging error, and must shrink under refinement.
* Extra exact monitors (the mean of mu, the variable-coefficient pressure form, the
  Darcy constraint itself) reported by the invariant suite.

Products of gradients are formed at cell centers by averaging the face gradients. One-sided
normal derivatives use quadratic fits through the first three cells; corner cells are
left out of the edge quadrature.

Nothing here mutates a state.
"""
from typing import NamedTuple, Optional

import numpy as np

from ..discrete.grid import Grid, NEUMANN_ZERO, DIRICHLET_ZERO
from ..physics.model import ModelParams, Source
from ..physics.potential import PotentialEvaluator
from ..evolution.stepper import State, make_potential

class DiagnosticsRecord(NamedTuple):
	t: float
	E: float
	phi_bar: float
	grad_mu_sq: float
	u_sq: float
	forcing: float
	ei_residual: float
	mass_residual: float
	pp2_res: float
	mup_res_int: float
	mup_res_bc: float
	phiqp_res: float
	phi_min: float
	phi_max: float
	newton_iters: int
	cg_iters: int

COLUMNS = DiagnosticsRecord._fields


def energy(phi, potential:PotentialEvaluator, grid:Grid) -> float:
	""" 1/2 |grad phi|^2 on the faces plus Psi(phi) on the cells. """
	gradient = grid.grad(phi, NEUMANN_ZERO)
	return 0.5 * grid.inner_faces(gradient, gradient) + grid.integral(potential.psi(phi))

def g(x): return x / (1 + x * x)
def g_prime(x): return (1 - x * x) / (1 + x * x) ** 2
def g_second(x): return (2 * x ** 3 - 6 * x) / (1 + x * x) ** 3


class _Edges(NamedTuple):
	""" The first three cell rows inward from each edge, corners dropped, with the spacing normal to the edge. """
	rows: tuple
	h: float
	length: float

def _inward(grid:Grid, f):
	return (
		_Edges((f[1:-1, 0], f[1:-1, 1], f[1:-1, 2]), grid.hx, grid.hy),
		_Edges((f[1:-1, -1], f[1:-1, -2], f[1:-1, -3]), grid.hx, grid.hy),
		_Edges((f[0, 1:-1], f[1, 1:-1], f[2, 1:-1]), grid.hy, grid.hx),
		_Edges((f[-1, 1:-1], f[-2, 1:-1], f[-3, 1:-1]), grid.hy, grid.hx),
	)


class Diagnostics:
	""" Holds the grid, the parameters and the evaluators shared by every measurement of a run. """
	def __init__(self, grid:Grid, params:ModelParams):
		self.grid, self.params = grid, params
		self.potential = make_potential(params)
		self.source = Source(params)

	def energy(self, phi) -> float: return energy(phi, self.potential, self.grid)

	def _centered(self, f, bc):
		return self.grid.to_centers(self.grid.grad(f, bc))

	def _dot(self, a, b):
		return a[0] * b[0] + a[1] * b[1]

	# Balance quantities.

	def dissipation(self, state:State) -> tuple[float, float]:
		""" (|grad mu|^2, |u|^2), both by face quadrature. """
		grad_mu = self.grid.grad(state.mu, state.flux)
		return self.grid.inner_faces(grad_mu, grad_mu), self.grid.inner_faces(state.u, state.u)

	def forcing(self, previous:State, state:State) -> float:
		""" Integral of S q + S mu with S where the step evaluated it: new phi for q, old phi for mu. """
		grid = self.grid
		return grid.inner(self.source(state.phi), state.q) + grid.inner(self.source(previous.phi), state.mu)

	def transport_work(self, previous:State, state:State) -> float:
		"""
		<face(phi^n) u_lag - face(phi+) u+, grad mu+> over all faces: what the phase equation's
		transport puts into the energy, less what the Darcy law takes out. Zero when the
		velocity and phase field of the transport are the new ones.
		"""
		if state.u_lag is None: return 0.0
		grid = self.grid
		moved = state.u_lag.scaled(grid.face_interp(previous.phi)) - state.u.scaled(grid.face_interp(state.phi))
		return grid.inner_faces(moved, grid.grad(state.mu, state.flux))

	def energy_identity_residual(self, previous:State, state:State, dt:float) -> float:
		"""
		(E+ - E^n)/dt + |grad mu+|^2 + |u+|^2 - forcing - transport work. For an unforced step
		this is minus the splitting's numerical dissipation over dt, so never positive
		beyond roundoff.
		"""
		grad_mu_sq, u_sq = self.dissipation(state)
		change = (self.energy(state.phi) - self.energy(previous.phi)) / dt
		return change + grad_mu_sq + u_sq - self.forcing(previous, state) - self.transport_work(previous, state)

	def mass_residual(self, previous:State, state:State, dt:float) -> float:
		""" The discrete mass law defect: (mean phi+ - mean phi^n)/dt - mean S(phi^n). """
		grid = self.grid
		return (grid.mean(state.phi) - grid.mean(previous.phi)) / dt - grid.mean(self.source(previous.phi))

	# Elliptic identities.

	def pp2_residual(self, state:State, dphi_dt) -> float:
		"""
		-Lap q = -phi grad phi . grad q + (1 - phi^2) grad mu . grad phi + phi dphi/dt + S (1 + phi^2 - phi).
		The first coefficient is (-phi - phi^3)/(1 + phi^2) before cancellation.
		"""
		grid, phi = self.grid, state.phi
		grad_phi = self._centered(phi, NEUMANN_ZERO)
		grad_q = self._centered(state.q, DIRICHLET_ZERO)
		grad_mu = self._centered(state.mu, state.flux)
		S = self.source(phi)
		lhs = -grid.laplacian(state.q, DIRICHLET_ZERO)
		rhs = (
			-phi * self._dot(grad_phi, grad_q)
			+ (1 - phi * phi) * self._dot(grad_mu, grad_phi)
			+ phi * dphi_dt
			+ S * (1 + phi * phi - phi)
		)
		return grid.norm_l2(lhs - rhs)

	def mup_residual(self, state:State, dphi_dt, lagged:Optional[State]=None) -> tuple[float, float]:
		"""
		Interior: -Lap mu - S + dphi/dt + div(u phi). Boundary: (1 + phi^2) d_n mu + phi d_n q.

		With `lagged` (the state the step started from) the interior term is evaluated exactly
		where the step evaluates it: transport by the lagged velocity and old phi, S at old phi.
		Then it vanishes to Newton tolerance. Without it, everything is taken from `state`.
		"""
		grid = self.grid
		if lagged is not None and state.u_lag is not None:
			phi_t, u, S = lagged.phi, state.u_lag, self.source(lagged.phi)
		else:
			phi_t, u, S = state.phi, state.u, self.source(state.phi)
		interior = -grid.laplacian(state.mu, state.flux) - S + dphi_dt + grid.div(u.scaled(grid.face_interp(phi_t)))
		return grid.norm_l2(interior), self.boundary_relation(state)

	def boundary_relation(self, state:State) -> float:
		total = 0.0
		for mu, q, phi in zip(_inward(self.grid, state.mu), _inward(self.grid, state.q), _inward(self.grid, state.phi)):
			h = mu.h
			dn_mu = (2 * mu.rows[0] - 3 * mu.rows[1] + mu.rows[2]) / h
			# q vanishes on the boundary, so the quadratic runs through that value and two cells.
			dn_q = (-3 * q.rows[0] + q.rows[1] / 3) / h
			phi_b = (15 * phi.rows[0] - 10 * phi.rows[1] + 3 * phi.rows[2]) / 8
			defect = (1 + phi_b * phi_b) * dn_mu + phi_b * dn_q
			total += float(np.sum(defect * defect)) * mu.length
		return float(np.sqrt(total))

	def phiqp_residual(self, state:State, dphi_dt) -> float:
		"""
		Lap(g(phi) q) with g(x) = x/(1+x^2), against
			-phi (1-phi^2)/(1+phi^2) grad phi . grad mu
			+ [phi^2/(1+phi^2) + 2 (1-phi^2)/(1+phi^2)^2] grad phi . grad q
			- phi^2/(1+phi^2) dphi/dt
			- phi S (1 + phi^2 - phi)/(1+phi^2)
			+ q (g'(phi) Lap phi + g''(phi) |grad phi|^2)
		"""
		grid, phi, q = self.grid, state.phi, state.q
		grad_phi = self._centered(phi, NEUMANN_ZERO)
		grad_q = self._centered(q, DIRICHLET_ZERO)
		grad_mu = self._centered(state.mu, state.flux)
		S = self.source(phi)
		w = 1 + phi * phi
		lhs = grid.laplacian(g(phi) * q, DIRICHLET_ZERO)
		lap_g = g_prime(phi) * grid.laplacian(phi, NEUMANN_ZERO) + g_second(phi) * self._dot(grad_phi, grad_phi)
		rhs = (
			-phi * (1 - phi * phi) / w * self._dot(grad_phi, grad_mu)
			+ (phi * phi / w + 2 * (1 - phi * phi) / (w * w)) * self._dot(grad_phi, grad_q)
			- phi * phi / w * dphi_dt
			- phi * S * (w - phi) / w
			+ q * lap_g
		)
		return grid.norm_l2(lhs - rhs)

	def comp_residual(self, state:State, dphi_dt) -> float:
		""" The variable-coefficient pressure form: -div(grad q / (1 + phi^2)) against the same right-hand side divided through. """
		grid, phi = self.grid, state.phi
		grad_phi = self._centered(phi, NEUMANN_ZERO)
		grad_q = self._centered(state.q, DIRICHLET_ZERO)
		grad_mu = self._centered(state.mu, state.flux)
		S = self.source(phi)
		a = 1 / (1 + phi * phi)
		lhs = -grid.div(grid.grad(state.q, DIRICHLET_ZERO).scaled(grid.face_interp(a)))
		rhs = a * (
			-phi * self._dot(grad_phi, grad_q)
			+ (1 - phi * phi) * self._dot(grad_mu, grad_phi)
			+ phi * dphi_dt
			+ S * (1 + phi * phi - phi)
		) + 2 * phi * a * a * self._dot(grad_phi, grad_q)
		return grid.norm_l2(lhs - rhs)

	# Exact monitors.

	def mean_mu_residual(self, previous:State, state:State) -> float:
		""" mean(mu+) against mean(F'(phi+)) - theta0 mean(phi^n): the Laplacian averages out. """
		grid = self.grid
		expected = grid.mean(self.potential.convex_prime(state.phi)) - self.params.theta0 * grid.mean(previous.phi)
		return grid.mean(state.mu) - expected

	def darcy_residual(self, state:State) -> float:
		""" |div u - S(phi)| in the discrete L2 norm. """
		return self.grid.norm_l2(self.grid.div(state.u) - self.source(state.phi))

	def record(self, previous:State, state:State, dt:float) -> DiagnosticsRecord:
		grid = self.grid
		dphi_dt = (state.phi - previous.phi) / dt
		grad_mu_sq, u_sq = self.dissipation(state)
		mup_int, mup_bc = self.mup_residual(state, dphi_dt, lagged=previous)
		return DiagnosticsRecord(
			t=state.t,
			E=self.energy(state.phi),
			phi_bar=grid.mean(state.phi),
			grad_mu_sq=grad_mu_sq,
			u_sq=u_sq,
			forcing=self.forcing(previous, state),
			ei_residual=self.energy_identity_residual(previous, state, dt),
			mass_residual=self.mass_residual(previous, state, dt),
			pp2_res=self.pp2_residual(state, dphi_dt),
			mup_res_int=mup_int,
			mup_res_bc=mup_bc,
			phiqp_res=self.phiqp_residual(state, dphi_dt),
			phi_min=float(np.min(state.phi)),
			phi_max=float(np.max(state.phi)),
			newton_iters=state.stats.newton_iters,
			cg_iters=state.stats.cg_iters,
		)

def record(previous:State, state:State, params:ModelParams, dt:float, grid:Grid) -> DiagnosticsRecord:
	return Diagnostics(grid, params).record(previous, state, dt)
