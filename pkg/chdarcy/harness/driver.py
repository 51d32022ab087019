"""
The run loop: build a scheme from a configuration, step to t_end, and record.

A Simulation is the prepared form of a configuration: the grid, the parameters, the
scheme, the initial state and the mass envelope the parameters promise. Admissibility
is settled here, before the first step, so a parameter set that cannot keep the mean
away from the pure phases is rejected up front.

`trajectory` yields one (index, previous, current) triple per step and wraps any
numerical failure in a StepFailure carrying the step index and time. `run` drives it,
writes the diagnostics CSV, and drops snapshots of phi, mu and q on the configured
cadence. Everything written depends only on the configuration, except for the one
timestamp comment, which --deterministic suppresses.
"""
import logging
import os
import time
from typing import NamedTuple, Iterator, Optional

from .. import __version__
from ..interface import ConvergenceError, BoundViolation, DomainError, StepFailure
from ..discrete.grid import Grid
from ..discrete.snapshot import write_snapshot
from ..physics.model import ModelParams, mass_bounds, check_extension_margin
from ..evolution.initdata import generate
from ..evolution.stepper import Scheme, State
from ..analysis.diagnostics import Diagnostics, COLUMNS
from ..support.pretty import write_csv_grid
from .config import SimConfig, config_hash

log = logging.getLogger(__name__)

class Simulation(NamedTuple):
	config: SimConfig
	grid: Grid
	params: ModelParams
	scheme: Scheme
	initial: State
	bounds: tuple[float, float]
	steps: int

def step_count(t_end:float, dt:float) -> int:
	return max(1, int(round(t_end / dt)))

def prepare(config:SimConfig, phi0=None, params:ModelParams=None) -> Simulation:
	""" Everything up to and including the initial state. Raises AdmissibilityError for inadmissible parameters. """
	grid = config.grid()
	params = params or config.params()
	if phi0 is None: phi0 = generate(config.init_spec(), grid)
	phi_bar0 = grid.mean(phi0)
	bounds = mass_bounds(params, phi_bar0, area=grid.area)
	if not params.potential_mode.kind == 'logarithmic': check_extension_margin(params, phi_bar0, grid.area)
	scheme = Scheme(grid, params, config.step_options(), config.elliptic_options())
	initial = scheme.initialize(phi0)
	log.info("prepared %r, %s, mean(phi0)=%.6g, envelope [%.6g, %.6g]", grid, params.potential_mode.spec(), phi_bar0, *bounds)
	return Simulation(config, grid, params, scheme, initial, bounds, step_count(config.t_end, config.dt))

def trajectory(sim:Simulation) -> Iterator[tuple[int, State, State]]:
	state = sim.initial
	for index in range(1, sim.steps + 1):
		try: following = sim.scheme.step(state)
		except (ConvergenceError, BoundViolation, DomainError) as e:
			raise StepFailure(index, state.t, e) from e
		log.debug("step %d: t=%.6g, %d Newton, %d CG", index, following.t, following.stats.newton_iters, following.stats.cg_iters)
		yield index, state, following
		state = following

def header_comments(config:SimConfig, deterministic:bool) -> list:
	comments = ["chdarcy %s" % __version__, "config sha256 %s" % config_hash(config)]
	if not deterministic: comments.append("written %s" % time.strftime('%Y-%m-%dT%H:%M:%S'))
	return comments

def write_snapshots(directory, index:int, state:State, grid:Grid):
	os.makedirs(directory, exist_ok=True)
	for name in ('phi', 'mu', 'q'):
		path = os.path.join(directory, "%s_%08d.chd" % (name, index))
		write_snapshot(path, name, getattr(state, name), grid, state.t)
	log.info("wrote snapshots for step %d (t=%.6g) to %s", index, state.t, directory)

class RunResult(NamedTuple):
	simulation: Simulation
	final: State
	records: list

def run(config:SimConfig, deterministic:bool=False, csv_path:Optional[str]=None, write:bool=True) -> RunResult:
	sim = prepare(config)
	diagnostics = Diagnostics(sim.grid, sim.params)
	every = config['output.snapshot_every']
	records = []
	final = sim.initial
	if write and every: write_snapshots(config['output.snapshot_dir'], 0, sim.initial, sim.grid)
	for index, previous, state in trajectory(sim):
		records.append(diagnostics.record(previous, state, config.dt))
		if write and every and index % every == 0: write_snapshots(config['output.snapshot_dir'], index, state, sim.grid)
		final = state
	if write:
		path = csv_path or config['output.csv_path']
		write_csv_grid(path, [COLUMNS] + [list(r) for r in records], header_comments(config, deterministic))
		log.info("wrote %d diagnostics rows to %s", len(records), path)
	return RunResult(sim, final, records)
