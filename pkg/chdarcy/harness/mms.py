"""
Verification by manufactured solutions.

The exact phase field is a single cosine mode growing linearly in time,

	phi* = a cos(pi x/lx) cos(pi y/ly) (1 + t/2),   q* = b sin(pi x/lx) sin(pi y/ly) (1 + t/2)

so phi* has zero normal derivative and q* zero boundary value on every edge. With
K^2 = (pi/lx)^2 + (pi/ly)^2 the rest follows in closed form:

	mu* = K^2 phi* + Psi'(phi*)
	grad mu* = (K^2 + Psi''(phi*)) grad phi*
	Lap mu* = (K^2 + Psi''(phi*)) Lap phi* + Psi'''(phi*) |grad phi*|^2
	u* = -grad q* - phi* grad mu*

and the forcings that make (phi*, mu*, q*, u*) solve the system are

	f_phi = d phi*/dt + div(u* phi*) - Lap mu* - S(phi*)
	f_q   = -Lap q* - S(phi*) - div(phi* grad mu*)
	g_mu  = phi* d_n q*      (since d_n mu* = 0 and u*.n = -d_n q* on the boundary)

The studies run in regularized mode, which removes a failure channel that has nothing to
do with what is being verified. Cosine and sine modes reflect evenly and oddly across the
edges, which is exactly what the ghost-cell stencils assume, so the spatial error is
second order right up to the boundary.

Two studies: a spatial one on successively doubled grids with dt shrinking like h^2,
and a temporal one on a fixed grid against a reference computed with a quarter of the
smallest dt. Each fits a slope to log error and raises OrderRegression when the slope
leaves its window.
"""
import logging
from typing import NamedTuple

import numpy as np

from ..interface import OrderRegression
from ..discrete.grid import Grid, EdgeValues
from ..physics.model import ModelParams, Source
from ..physics.potential import regularized_mode
from ..evolution.stepper import Scheme, Forcing, StepOptions, make_potential
from ..support.foundation import observed_order, pairwise_orders
from ..support.pretty import write_csv_grid
from .config import SimConfig
from .driver import step_count, header_comments

log = logging.getLogger(__name__)

SPATIAL_WINDOW = (1.8, 2.2)
TEMPORAL_WINDOW = (0.8, 1.2)
NULL_ERROR = 1e-12
MMS_COLUMNS = ('study', 'nx', 'h', 'dt', 'err_phi', 'err_q', 'order_phi', 'order_q')

class MmsSpec(NamedTuple):
	amplitude: float = 0.3
	pressure_amplitude: float = 0.1

	def validate(self):
		if not 0 <= abs(self.amplitude) <= 0.3: raise ValueError("manufactured amplitude must not exceed 0.3, got %r" % self.amplitude)
		return self


class Manufactured:
	""" The exact fields and forcings on one grid. Calling it at time t gives the Forcing the scheme adds. """
	def __init__(self, spec:MmsSpec, grid:Grid, params:ModelParams):
		self.spec, self.grid, self.params = spec.validate(), grid, params
		self.potential = make_potential(params)
		self.source = Source(params)
		self.kx, self.ky = np.pi / grid.lx, np.pi / grid.ly
		self.K2 = self.kx ** 2 + self.ky ** 2

	def _fields(self, x, y, t):
		""" phi, grad phi, q, grad q at the given points. """
		a, b, tau = self.spec.amplitude, self.spec.pressure_amplitude, 1 + 0.5 * t
		cx, sx, cy, sy = np.cos(self.kx * x), np.sin(self.kx * x), np.cos(self.ky * y), np.sin(self.ky * y)
		phi = a * tau * cx * cy
		grad_phi = (-a * tau * self.kx * sx * cy, -a * tau * self.ky * cx * sy)
		q = b * tau * sx * sy
		grad_q = (b * tau * self.kx * cx * sy, b * tau * self.ky * sx * cy)
		return phi, grad_phi, q, grad_q

	def phi(self, t):
		x, y = self.grid.centers()
		return self._fields(x, y, t)[0]

	def q(self, t):
		x, y = self.grid.centers()
		return self._fields(x, y, t)[2]

	def __call__(self, t:float) -> Forcing:
		x, y = self.grid.centers()
		phi, grad_phi, q, grad_q = self._fields(x, y, t)
		psi2, psi3 = self.potential.psi_second(phi), self.potential.psi_third(phi)
		grad_sq = grad_phi[0] ** 2 + grad_phi[1] ** 2
		lap_phi = -self.K2 * phi
		lap_q = -self.K2 * q
		grad_mu = ((self.K2 + psi2) * grad_phi[0], (self.K2 + psi2) * grad_phi[1])
		lap_mu = (self.K2 + psi2) * lap_phi + psi3 * grad_sq
		phi_dot_mu = grad_phi[0] * grad_mu[0] + grad_phi[1] * grad_mu[1]
		div_phi_grad_mu = phi_dot_mu + phi * lap_mu
		u = (-grad_q[0] - phi * grad_mu[0], -grad_q[1] - phi * grad_mu[1])
		div_u = -lap_q - div_phi_grad_mu
		div_u_phi = phi * div_u + u[0] * grad_phi[0] + u[1] * grad_phi[1]
		S = self.source(phi)
		dphi_dt = 0.5 * self.spec.amplitude * np.cos(self.kx * x) * np.cos(self.ky * y)
		f_phi = dphi_dt + div_u_phi - lap_mu - S
		f_q = -lap_q - S - div_phi_grad_mu
		return Forcing(f_phi, f_q, self.boundary_flux(t))

	def boundary_flux(self, t:float) -> EdgeValues:
		""" phi* times the outward normal derivative of q*, at the boundary face midpoints. """
		grid = self.grid
		ys = (np.arange(grid.ny) + 0.5) * grid.hy
		xs = (np.arange(grid.nx) + 0.5) * grid.hx
		def edge(x, y, normal):
			phi, _, _, grad_q = self._fields(x, y, t)
			return phi * (normal[0] * grad_q[0] + normal[1] * grad_q[1])
		return EdgeValues(
			edge(np.zeros_like(ys), ys, (-1, 0)),
			edge(np.full_like(ys, grid.lx), ys, (1, 0)),
			edge(xs, np.zeros_like(xs), (0, -1)),
			edge(xs, np.full_like(xs, grid.ly), (0, 1)),
		)


def mms_params(config:SimConfig) -> ModelParams:
	return config.params()._replace(potential_mode=regularized_mode(config['potential.n'], config['potential.kappa']))

def mms_spec(config:SimConfig) -> MmsSpec:
	return MmsSpec(config['mms.amplitude'], config['mms.pressure_amplitude'])

def solve_forced(spec:MmsSpec, grid:Grid, params:ModelParams, options:StepOptions, t_end:float, config:SimConfig):
	""" March the forced system from the exact initial phase field; return (exact, final state). """
	exact = Manufactured(spec, grid, params)
	scheme = Scheme(grid, params, options, config.elliptic_options(), forcing=exact)
	state = scheme.initialize(exact.phi(0.0))
	for _ in range(step_count(t_end, options.dt)):
		state = scheme.step(state)
	return exact, state

class MmsRow(NamedTuple):
	study: str
	nx: int
	h: float
	dt: float
	err_phi: float
	err_q: float
	order_phi: object
	order_q: object

def fitted_orders(steps, errors_phi, errors_q) -> tuple[float, float]:
	""" Slopes of log error for both fields; nan when the errors are all at roundoff level. """
	if max(max(errors_phi), max(errors_q)) <= NULL_ERROR: return float('nan'), float('nan')
	return observed_order(steps, errors_phi), observed_order(steps, errors_q)

class Study(NamedTuple):
	name: str
	rows: list
	orders: tuple[float, float]
	window: tuple[float, float]

	def check(self):
		""" Raise OrderRegression when a fitted order misses the window. Null studies pass. """
		for order in self.orders:
			if np.isnan(order): continue
			if not self.window[0] <= order <= self.window[1]: raise OrderRegression(self.name, order, self.window)
		return self

def spatial_study(config:SimConfig, levels:int) -> Study:
	spec, params = mms_spec(config), mms_params(config)
	lx, ly = config['grid.lx'], config['grid.ly']
	t_end = config['mms.spatial_t_end']
	nxs, hs, dts, err_phi, err_q = [], [], [], [], []
	for level in range(levels):
		n = config['mms.coarsest'] * 2 ** level
		grid = Grid(n, n, lx, ly)
		dt = config['mms.spatial_dt'] / 4 ** level
		exact, state = solve_forced(spec, grid, params, config.step_options(dt), t_end, config)
		nxs.append(n)
		hs.append(grid.hx)
		dts.append(dt)
		err_phi.append(grid.norm_l2(state.phi - exact.phi(state.t)))
		err_q.append(grid.norm_l2(state.q - exact.q(state.t)))
		log.info("spatial level %d: %d^2, dt=%.3g, errors %.3e %.3e", level, n, dt, err_phi[-1], err_q[-1])
	orders = fitted_orders(hs, err_phi, err_q)
	return Study('spatial', _rows('spatial', nxs, hs, dts, err_phi, err_q, hs), orders, SPATIAL_WINDOW)

def temporal_study(config:SimConfig, levels:int) -> Study:
	spec, params = mms_spec(config), mms_params(config)
	n = config['mms.temporal_nx']
	grid = Grid(n, n, config['grid.lx'], config['grid.ly'])
	t_end = config['mms.temporal_t_end']
	dts = [config['mms.temporal_dt'] / 2 ** level for level in range(levels)]
	_, reference = solve_forced(spec, grid, params, config.step_options(dts[-1] / 4), t_end, config)
	err_phi, err_q = [], []
	for dt in dts:
		_, state = solve_forced(spec, grid, params, config.step_options(dt), t_end, config)
		err_phi.append(grid.norm_l2(state.phi - reference.phi))
		err_q.append(grid.norm_l2(state.q - reference.q))
		log.info("temporal dt=%.3g: errors %.3e %.3e", dt, err_phi[-1], err_q[-1])
	orders = fitted_orders(dts, err_phi, err_q)
	return Study('temporal', _rows('temporal', [n] * levels, [grid.hx] * levels, dts, err_phi, err_q, dts), orders, TEMPORAL_WINDOW)

def _rows(study, nxs, hs, dts, err_phi, err_q, steps) -> list[MmsRow]:
	if max(max(err_phi), max(err_q)) <= NULL_ERROR:
		order_phi = order_q = [None] * len(steps)
	else:
		order_phi, order_q = pairwise_orders(steps, err_phi), pairwise_orders(steps, err_q)
	return [MmsRow(study, *row) for row in zip(nxs, hs, dts, err_phi, err_q, order_phi, order_q)]

def mms_convergence(config:SimConfig, levels:int=None, path:str=None, deterministic:bool=False) -> list[Study]:
	"""
	Both studies, written to the MMS table, then checked against their windows.
	The table is written before any OrderRegression is raised, so a failing study still leaves its numbers behind.
	"""
	levels = levels or config['mms.levels']
	if levels < 3: raise ValueError("a convergence study needs at least 3 levels, got %d" % levels)
	studies = [spatial_study(config, levels), temporal_study(config, levels)]
	path = path or config['output.mms_path']
	if path:
		rows = [row for study in studies for row in study.rows]
		table = [MMS_COLUMNS] + [['' if c is None else c for c in row] for row in rows]
		write_csv_grid(path, table, comments=header_comments(config, deterministic))
	for study in studies:
		log.info("%s study: fitted orders phi %.3f, q %.3f", study.name, *study.orders)
		study.check()
	return studies
