"""
Experiments that run more than one simulation: the parameter sweep and the
perturbation (continuous dependence) experiment.

The sweep crosses a list of source rates m with a list of source-shape parameters c
(h = constant(c) or parabolic(c)). Every cell is checked for admissibility before any
simulation starts, so one bad cell rejects the whole sweep without wasted work. Cells
are independent; with more than one worker they go to a process pool, and results are
collected in submission order so the summary does not depend on scheduling. Each row
reports the mass envelope, whether the trajectory stayed inside it (widened by m dt for
the explicit source), and measured exponential rates: the mean's approach to its ODE
equilibrium and the decay of the dissipation. No expected values are asserted for the
rates.

The perturbation experiment runs a baseline and a copy whose initial data is nudged by
delta cos(pi x/lx), and records the uniqueness functional Y between them at every step.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import NamedTuple

import numpy as np

from ..interface import AdmissibilityError
from ..physics.model import ConstantShape, ParabolicShape, mass_bounds, ode_equilibrium
from ..evolution.initdata import generate, perturbed
from ..evolution.stepper import uniqueness_gap
from ..analysis.diagnostics import Diagnostics
from ..support.foundation import parse_span, exponential_rate
from ..support.pretty import write_csv_grid
from .config import SimConfig
from .driver import prepare, trajectory, header_comments

log = logging.getLogger(__name__)

SHAPES = {'constant': ConstantShape, 'parabolic': ParabolicShape}

class SweepRow(NamedTuple):
	m: float
	c: float
	c1: float
	c2: float
	phi_bar_final: float
	phi_bar_min: float
	phi_bar_max: float
	phi_min: float
	phi_max: float
	inside_envelope: bool
	max_mass_residual: float
	mass_rate: float
	dissipation_rate: float

SWEEP_COLUMNS = SweepRow._fields

def sweep_cells(config:SimConfig) -> list[tuple[float, float]]:
	return [(float(m), float(c)) for m in parse_span(config['sweep.m']) for c in parse_span(config['sweep.c'])]

def cell_params(config:SimConfig, m:float, c:float):
	return config.params()._replace(m=m, h=SHAPES[config['sweep.shape']](c))

def check_cells(config:SimConfig, cells) -> None:
	""" Reject the sweep if any cell's mass envelope touches the pure phases. """
	grid = config.grid()
	phi_bar0 = grid.mean(generate(config.init_spec(), grid))
	for m, c in cells:
		params = cell_params(config, m, c)
		try: mass_bounds(params.validate(), phi_bar0, area=grid.area)
		except AdmissibilityError as e:
			raise AdmissibilityError("sweep cell m=%r, c=%r: %s" % (m, c, e)) from None

def run_cell(settings:dict, m:float, c:float) -> SweepRow:
	""" One sweep cell. Takes plain settings so it can cross a process boundary. """
	config = SimConfig(settings)
	sim = prepare(config, params=cell_params(config, m, c))
	diagnostics = Diagnostics(sim.grid, sim.params)
	dt, c1, c2 = config.dt, *sim.bounds
	slack = sim.params.m * dt
	times, means, dissipation, mass_residuals = [0.0], [sim.grid.mean(sim.initial.phi)], [], []
	phi_min, phi_max = float(np.min(sim.initial.phi)), float(np.max(sim.initial.phi))
	for _, previous, state in trajectory(sim):
		times.append(state.t)
		means.append(sim.grid.mean(state.phi))
		grad_mu_sq, u_sq = diagnostics.dissipation(state)
		dissipation.append(grad_mu_sq + u_sq)
		mass_residuals.append(abs(diagnostics.mass_residual(previous, state, dt)))
		phi_min, phi_max = min(phi_min, float(np.min(state.phi))), max(phi_max, float(np.max(state.phi)))
	means = np.array(means)
	inside = bool(np.all(means >= c1 - slack) and np.all(means <= c2 + slack) and np.all(np.abs(means) < 1))
	equilibrium = ode_equilibrium(sim.params)
	mass_rate = exponential_rate(times, np.abs(means - equilibrium))[0] if equilibrium is not None else float('nan')
	dissipation_rate = exponential_rate(times[1:], dissipation)[0]
	log.info("sweep cell m=%g c=%g: final mean %.6g, inside envelope %s", m, c, means[-1], inside)
	return SweepRow(m, c, c1, c2, float(means[-1]), float(means.min()), float(means.max()), phi_min, phi_max,
		inside, max(mass_residuals), mass_rate, dissipation_rate)

def sweep(config:SimConfig, workers:int=None, path:str=None, deterministic:bool=False) -> list[SweepRow]:
	cells = sweep_cells(config)
	check_cells(config, cells)
	workers = workers or config['sweep.workers']
	settings = dict(config.settings)
	log.info("sweeping %d cells on %d worker(s)", len(cells), workers)
	if workers > 1:
		with ProcessPoolExecutor(max_workers=workers) as pool:
			futures = [pool.submit(run_cell, settings, m, c) for m, c in cells]
			rows = [f.result() for f in futures]
	else:
		rows = [run_cell(settings, m, c) for m, c in cells]
	path = path or config['output.sweep_path']
	if path: write_csv_grid(path, [SWEEP_COLUMNS] + [list(r) for r in rows], header_comments(config, deterministic))
	return rows


class PerturbResult(NamedTuple):
	times: list
	gaps: list
	rate: float  # L in log Y(t) = log Y(0) + L t
	envelope_ratio: float  # max over t of Y(t) / (Y(0) exp(L t))

def fit_growth(times, gaps) -> tuple[float, float]:
	""" Least-squares L through the origin of log(Y/Y0) against t, and the worst envelope ratio. """
	t, y = np.asarray(times, dtype=float), np.asarray(gaps, dtype=float)
	if not (y[0] > 0 and np.all(y > 0)): return float('nan'), float('nan')
	log_ratio = np.log(y / y[0])
	rate = float(np.sum(t * log_ratio) / np.sum(t * t))
	return rate, float(np.max(y / (y[0] * np.exp(rate * t))))

def perturb_experiment(config:SimConfig, delta:float=None, path:str=None, deterministic:bool=False) -> PerturbResult:
	delta = config['perturb.delta'] if delta is None else delta
	margin = config['init.clip_margin']
	if not 0 <= delta <= margin / 10: raise ValueError("perturbation delta must lie in [0, %g], got %r" % (margin / 10, delta))
	grid = config.grid()
	phi0 = generate(config.init_spec(), grid)
	baseline = prepare(config, phi0=phi0)
	nudged = prepare(config, phi0=perturbed(phi0, grid, delta, margin) if delta else phi0)
	times = [0.0]
	gaps = [uniqueness_gap(baseline.initial, nudged.initial, baseline.params, grid)]
	for (_, _, a), (_, _, b) in zip(trajectory(baseline), trajectory(nudged)):
		times.append(a.t)
		gaps.append(uniqueness_gap(a, b, baseline.params, grid))
	rate, ratio = fit_growth(times, gaps)
	log.info("perturbation %g: Y(0)=%.3e, Y(T)=%.3e, fitted rate %.4g", delta, gaps[0], gaps[-1], rate)
	path = path or config['output.perturb_path']
	if path: write_csv_grid(path, [('t', 'Y')] + list(zip(times, gaps)), header_comments(config, deterministic) + ["delta %r, fitted rate %r" % (delta, rate)])
	return PerturbResult(times, gaps, rate, ratio)
