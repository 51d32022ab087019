"""
The invariant suite behind `verify`.

Each check measures one number and compares it with a threshold. The report lists
every check, whether or not it passed, so a failing run still shows everything that
was measured. The checks:

* the configured run itself, step by step: the pointwise bound (logarithmic mode), the
  exact mass law, the mass envelope widened by m dt, the Darcy constraint, the mean of
  mu, and finiteness of every diagnostic;
* energy decay with the source switched off, from random data on the configured grid,
  and the energy identity residual of that run, which must never be positive;
* the constant-equilibrium fixed point, where every residual must vanish;
* the potential's wells against the bisection oracle.

With `ladder`, a three-level refinement study of the elliptic-structure residuals is
added: (h, dt) halved together on a smooth disc whose interface width is fixed in
absolute terms, each residual required to fall at observed order at least 0.7.
"""
import logging
import math
from typing import NamedTuple

import numpy as np

from ..discrete.grid import Grid
from ..physics.model import ConstantShape
from ..evolution.stepper import Scheme, make_potential
from ..analysis.diagnostics import Diagnostics, energy
from ..support.foundation import observed_order, pairwise_orders
from ..support.pretty import print_grid, write_csv_grid
from .config import SimConfig
from .driver import prepare, trajectory, header_comments

log = logging.getLogger(__name__)

MASS_TOL = 1e-9
DARCY_TOL = 1e-8
MEAN_MU_TOL = 1e-8
EQUILIBRIUM_TOL = 1e-9
EI_TOL = 1e-12
WELL_ORACLE = 0.957504  # theta = 1, theta0 = 2
WELL_TOL = 1e-5
LADDER_ORDER = 0.7

class Check(NamedTuple):
	name: str
	measured: float
	threshold: float
	passed: bool

def at_most(name, measured, threshold) -> Check:
	return Check(name, float(measured), float(threshold), bool(measured <= threshold))

def at_least(name, measured, threshold) -> Check:
	return Check(name, float(measured), float(threshold), bool(measured >= threshold))


def trajectory_checks(config:SimConfig) -> list[Check]:
	sim = prepare(config)
	diagnostics = Diagnostics(sim.grid, sim.params)
	dt = config.dt
	c1, c2 = sim.bounds
	slack = sim.params.m * dt
	worst_bound = float(np.max(np.abs(sim.initial.phi)))
	worst_mass = worst_darcy = worst_mean_mu = worst_envelope = 0.0
	finite, newton_peak = True, 0
	for _, previous, state in trajectory(sim):
		record = diagnostics.record(previous, state, dt)
		finite = finite and all(math.isfinite(v) for v in record)
		worst_bound = max(worst_bound, abs(record.phi_min), abs(record.phi_max))
		worst_mass = max(worst_mass, abs(record.mass_residual))
		worst_darcy = max(worst_darcy, diagnostics.darcy_residual(state))
		worst_mean_mu = max(worst_mean_mu, abs(diagnostics.mean_mu_residual(previous, state)))
		worst_envelope = max(worst_envelope, c1 - slack - record.phi_bar, record.phi_bar - c2 - slack)
		newton_peak = max(newton_peak, record.newton_iters)
	checks = [
		at_most("mass law defect (max over steps)", worst_mass, MASS_TOL),
		at_most("envelope excess beyond m*dt", worst_envelope, 0.0),
		at_most("Darcy constraint |div u - S|", worst_darcy, DARCY_TOL),
		at_most("mean(mu) defect", worst_mean_mu, MEAN_MU_TOL),
		at_most("Newton iterations per step", newton_peak, config["step.newton_max"] * config["step.picard_iters"]),
		Check("all diagnostics finite", float(finite), 1.0, finite),
	]
	if sim.params.potential_mode.kind == 'logarithmic':
		checks.insert(0, Check("max |phi| stays below 1", worst_bound, 1.0, worst_bound < 1.0))
	return checks

def energy_checks(config:SimConfig) -> list[Check]:
	""" Source off, random data: neither E nor the energy identity residual may rise above roundoff at any step. """
	quiet = config.with_settings({'source.off': True, 'init.kind': 'random', 'init.mean': 0.0, 'init.amplitude': 0.05})
	sim = prepare(quiet)
	potential = sim.scheme.potential
	worst, ei_peak = -math.inf, -math.inf
	diagnostics = Diagnostics(sim.grid, sim.params)
	previous_energy = energy(sim.initial.phi, potential, sim.grid)
	for _, previous, state in trajectory(sim):
		current = energy(state.phi, potential, sim.grid)
		worst = max(worst, (current - previous_energy) / max(1.0, abs(previous_energy)))
		ei_peak = max(ei_peak, diagnostics.energy_identity_residual(previous, state, quiet.dt))
		previous_energy = current
	log.info("source-off run: largest energy-identity residual %.3e", ei_peak)
	return [
		at_most("relative energy increase, source off", worst, 1e-12),
		at_most("energy identity residual, source off", ei_peak, EI_TOL),
	]

def equilibrium_checks(config:SimConfig) -> list[Check]:
	""" phi = c with h = constant(m c): one step must leave everything in place and every residual at zero. """
	grid = Grid(16, 16, config['grid.lx'], config['grid.ly'])
	c = 0.3
	params = config.params()._replace(h=ConstantShape(config['source.m'] * c), source_off=False)
	options = config.step_options()
	scheme = Scheme(grid, params, options, config.elliptic_options())
	before = scheme.initialize(np.full(grid.shape, c))
	after = scheme.step(before)
	diagnostics = Diagnostics(grid, params)
	dphi_dt = (after.phi - before.phi) / options.dt
	mup_int, mup_bc = diagnostics.mup_residual(after, dphi_dt)
	residuals = {
		'pp2': diagnostics.pp2_residual(after, dphi_dt),
		'mup interior': mup_int,
		'mup boundary': mup_bc,
		'phiqp': diagnostics.phiqp_residual(after, dphi_dt),
		'energy identity': abs(diagnostics.energy_identity_residual(before, after, options.dt)),
		'phi drift': float(np.max(np.abs(after.phi - c))),
	}
	return [at_most("equilibrium %s" % name, value, EQUILIBRIUM_TOL) for name, value in residuals.items()]

def well_checks(config:SimConfig) -> list[Check]:
	if (config['potential.theta'], config['potential.theta0']) != (1.0, 2.0): return []
	_, star = make_potential(config.params()).wells()
	return [at_most("potential well offset from 0.957504", abs(star - WELL_ORACLE), WELL_TOL)]


class LadderRow(NamedTuple):
	nx: int
	dt: float
	pp2_res: float
	mup_res_int: float
	mup_res_bc: float
	phiqp_res: float

def ladder(config:SimConfig) -> list[LadderRow]:
	""" Residuals at the end of a smooth disc run on three levels, (h, dt) halved together. """
	coarsest = config['verify.ladder_coarsest']
	width = 4 * config['grid.lx'] / coarsest
	rows = []
	for level in range(3):
		n, dt = coarsest * 2 ** level, config['verify.ladder_dt'] / 2 ** level
		level_config = config.with_settings({
			'grid.nx': n, 'grid.ny': n, 'time.dt': dt, 'time.t_end': config['verify.ladder_t_end'],
			'init.kind': 'tanh_disc', 'init.width': repr(width), 'output.snapshot_every': 0,
		})
		sim = prepare(level_config)
		diagnostics = Diagnostics(sim.grid, sim.params)
		previous = state = sim.initial
		for _, previous, state in trajectory(sim): pass
		dphi_dt = (state.phi - previous.phi) / dt
		mup_int, mup_bc = diagnostics.mup_residual(state, dphi_dt)
		rows.append(LadderRow(n, dt, diagnostics.pp2_residual(state, dphi_dt), mup_int, mup_bc, diagnostics.phiqp_residual(state, dphi_dt)))
		log.info("ladder level %d: %r", level, rows[-1])
	return rows

def ladder_checks(rows:list[LadderRow]) -> list[Check]:
	hs = [1.0 / row.nx for row in rows]
	checks = []
	for name in ('pp2_res', 'mup_res_int', 'mup_res_bc', 'phiqp_res'):
		values = [getattr(row, name) for row in rows]
		if max(values) <= EQUILIBRIUM_TOL:
			checks.append(at_most("ladder %s (already at roundoff)" % name, max(values), EQUILIBRIUM_TOL))
		else:
			checks.append(at_least("ladder order of %s" % name, observed_order(hs, values), LADDER_ORDER))
	return checks


class Report(NamedTuple):
	checks: list

	@property
	def ok(self) -> bool: return all(c.passed for c in self.checks)

	def table(self) -> list:
		return [('invariant', 'measured', 'threshold', 'status')] + [
			(c.name, c.measured, c.threshold, 'ok' if c.passed else 'VIOLATED') for c in self.checks
		]

	def show(self, file=None): print_grid(self.table(), file=file)

def verify(config:SimConfig, with_ladder:bool=False, path:str=None, deterministic:bool=False) -> Report:
	checks = well_checks(config) + equilibrium_checks(config) + trajectory_checks(config) + energy_checks(config)
	if with_ladder:
		rows = ladder(config)
		checks += ladder_checks(rows)
		for name in LadderRow._fields[2:]:
			log.info("ladder %s pairwise orders: %r", name, pairwise_orders([1.0 / r.nx for r in rows], [getattr(r, name) for r in rows]))
	report = Report(checks)
	if path: write_csv_grid(path, report.table(), comments=header_comments(config, deterministic))
	return report
