"""
Configuration: flat `section.key = value` lines with `#` comments.

Every recognized key is declared once, in KEYS, with its type and default. Reading is
line-oriented, and a SourceText wraps the document, so any complaint (an unknown key,
a malformed value, a failed validation rule) names the key and points at its line.
Keys a document leaves out take their defaults.

A SimConfig is little more than the resulting mapping from key to typed value. The
structured objects the rest of the package wants (Grid, ModelParams, InitSpec, ...)
are built from it on demand. `serialize` writes every key in declaration order, which
makes it canonical: parse, serialize, parse is the identity, and the SHA-256 of the
serialization is the configuration hash echoed into every output file.
"""
import hashlib
from typing import NamedTuple, Any

from ..interface import ConfigError, AdmissibilityError
from ..support.failureprone import SourceText
from ..discrete.grid import Grid
from ..discrete.elliptic import EllipticOptions, METHODS
from ..physics.model import ModelParams, parse_h_spec
from ..physics.potential import LOGARITHMIC, regularized_mode
from ..evolution.initdata import InitSpec, KINDS, parse_width
from ..evolution.stepper import StepOptions

MODES = ('run', 'mms', 'verify', 'sweep', 'perturb')
POTENTIALS = ('logarithmic', 'regularized')
SWEEP_SHAPES = ('constant', 'parabolic')

class Key(NamedTuple):
	name: str
	kind: type
	default: Any
	choices: tuple = ()

KEYS = [
	Key('grid.nx', int, 64),
	Key('grid.ny', int, 64),
	Key('grid.lx', float, 1.0),
	Key('grid.ly', float, 1.0),
	Key('source.m', float, 1.0),
	Key('source.h', str, 'zero'),
	Key('source.eps', float, 0.05),
	Key('source.off', bool, False),
	Key('source.omega_factor', bool, False),
	Key('potential.mode', str, 'logarithmic', POTENTIALS),
	Key('potential.theta', float, 1.0),
	Key('potential.theta0', float, 2.0),
	Key('potential.n', int, 16),
	Key('potential.kappa', float, 1.0),
	Key('init.kind', str, 'tanh_disc', KINDS),
	Key('init.value', float, 0.0),
	Key('init.center', str, '0.5,0.5'),
	Key('init.radius', float, 0.2),
	Key('init.width', str, '4h'),
	Key('init.inner', float, 0.9),
	Key('init.outer', float, -0.9),
	Key('init.mean', float, 0.0),
	Key('init.amplitude', float, 0.05),
	Key('init.seed', int, 7),
	Key('init.path', str, ''),
	Key('init.clip_margin', float, 0.05),
	Key('time.dt', float, 1e-3),
	Key('time.t_end', float, 1.0),
	Key('step.newton_tol', float, 1e-10),
	Key('step.newton_max', int, 50),
	Key('step.picard_iters', int, 1),
	Key('step.damping', float, 0.9),
	Key('elliptic.tol', float, 1e-10),
	Key('elliptic.max_iter', int, 0),
	Key('elliptic.method', str, 'auto', METHODS),
	Key('output.csv_path', str, 'diagnostics.csv'),
	Key('output.snapshot_every', int, 0),
	Key('output.snapshot_dir', str, 'snapshots'),
	Key('output.sweep_path', str, 'sweep.csv'),
	Key('output.mms_path', str, 'mms.csv'),
	Key('output.perturb_path', str, 'perturb.csv'),
	Key('run.mode', str, 'run', MODES),
	Key('sweep.m', str, '0.5:2:5'),
	Key('sweep.c', str, '-0.4:0.4:5'),
	Key('sweep.shape', str, 'constant', SWEEP_SHAPES),
	Key('sweep.workers', int, 1),
	Key('perturb.delta', float, 1e-6),
	Key('verify.ladder_coarsest', int, 32),
	Key('verify.ladder_dt', float, 4e-3),
	Key('verify.ladder_t_end', float, 0.02),
	Key('mms.amplitude', float, 0.3),
	Key('mms.pressure_amplitude', float, 0.1),
	Key('mms.levels', int, 3),
	Key('mms.coarsest', int, 32),
	Key('mms.spatial_dt', float, 1e-3),
	Key('mms.spatial_t_end', float, 5e-3),
	Key('mms.temporal_nx', int, 32),
	Key('mms.temporal_dt', float, 4e-3),
	Key('mms.temporal_t_end', float, 0.1),
]
KEY_TABLE = {k.name: k for k in KEYS}

TRUTH = {'true': True, 'yes': True, 'on': True, '1': True, 'false': False, 'no': False, 'off': False, '0': False}

def convert(key:Key, text:str):
	""" Typed value of a setting's text. Raises ValueError with a short reason. """
	if key.kind is bool:
		try: return TRUTH[text.lower()]
		except KeyError: raise ValueError("expected true or false, got %r" % text) from None
	if key.kind is int: value = int(text)
	elif key.kind is float: value = float(text)
	else: value = text
	if key.choices and value not in key.choices:
		raise ValueError("expected one of %s, got %r" % (", ".join(key.choices), text))
	return value

def spell(key:Key, value) -> str:
	if key.kind is bool: return 'true' if value else 'false'
	if key.kind is float: return repr(float(value))
	return str(value)


class SimConfig:
	"""
	Typed settings plus, when they came from a document, where each one was written.
	Use `with_settings` to derive a variant; instances are not modified after construction.
	"""
	def __init__(self, settings:dict=None, rows:dict=None, source:SourceText=None):
		self.settings = {k.name: k.default for k in KEYS}
		for name, value in (settings or {}).items():
			if name not in KEY_TABLE: raise ConfigError("unknown configuration key %r" % name, key=name)
			self.settings[name] = value
		self.rows, self.source = rows or {}, source

	def __getitem__(self, name): return self.settings[name]

	def __eq__(self, other): return isinstance(other, SimConfig) and self.settings == other.settings

	def with_settings(self, changes:dict) -> "SimConfig":
		merged = dict(self.settings)
		merged.update(changes)
		return SimConfig(merged, self.rows, self.source)

	def fail(self, name:str, message:str):
		""" Raise a ConfigError about a key, illustrated with its line when the key came from a document. """
		text = "%s: %s" % (name, message)
		if name in self.rows and self.source is not None:
			row = self.rows[name]
			line = self.source.line_of_text(row)
			col = max(0, line.find('=') + 1)
			while col < len(line) and line[col] in ' \t': col += 1
			text = self.source.complaint(row, col, len(line.rstrip()) - col, text)
		raise ConfigError(text, key=name)

	# Structured views.

	@property
	def dt(self) -> float: return self['time.dt']
	@property
	def t_end(self) -> float: return self['time.t_end']
	@property
	def mode(self) -> str: return self['run.mode']

	def grid(self) -> Grid:
		return Grid(self['grid.nx'], self['grid.ny'], self['grid.lx'], self['grid.ly'])

	def potential_mode(self):
		if self['potential.mode'] == 'logarithmic': return LOGARITHMIC
		return regularized_mode(self['potential.n'], self['potential.kappa'])

	def params(self) -> ModelParams:
		try: shape = parse_h_spec(self['source.h'])
		except (ValueError, OSError) as e: self.fail('source.h', str(e))
		return ModelParams(
			m=self['source.m'], h=shape, theta=self['potential.theta'], theta0=self['potential.theta0'],
			potential_mode=self.potential_mode(), eps_ext=self['source.eps'],
			source_off=self['source.off'], omega_factor=self['source.omega_factor'],
		)

	def init_spec(self) -> InitSpec:
		try: center = tuple(float(c) for c in self['init.center'].split(','))
		except ValueError: center = ()
		if len(center) != 2: self.fail('init.center', "expected two numbers separated by a comma")
		try: width, in_cells = parse_width(self['init.width'])
		except ValueError: self.fail('init.width', "expected a length or a multiple of h like 4h")
		return InitSpec(
			kind=self['init.kind'], value=self['init.value'], center=center, radius=self['init.radius'],
			width=width, width_in_cells=in_cells, inner=self['init.inner'], outer=self['init.outer'],
			mean=self['init.mean'], amplitude=self['init.amplitude'], seed=self['init.seed'],
			path=self['init.path'] or None, clip_margin=self['init.clip_margin'],
		)

	def step_options(self, dt:float=None) -> StepOptions:
		return StepOptions(
			dt=self.dt if dt is None else dt, newton_tol=self['step.newton_tol'], newton_max=self['step.newton_max'],
			picard_iters=self['step.picard_iters'], damping=self['step.damping'],
		)

	def elliptic_options(self) -> EllipticOptions:
		return EllipticOptions(self['elliptic.tol'], self['elliptic.max_iter'], self['elliptic.method'])

	def validate(self) -> "SimConfig":
		""" Check every rule that does not need a simulation. Raises ConfigError naming the first offending key. """
		s = self.settings
		for name in ('grid.nx', 'grid.ny'):
			if s[name] < 4: self.fail(name, "need at least 4 cells, got %d" % s[name])
		for name in ('grid.lx', 'grid.ly', 'time.dt', 'time.t_end', 'source.eps', 'step.newton_tol', 'potential.kappa'):
			if not s[name] > 0: self.fail(name, "must be positive, got %r" % s[name])
		if not s['time.dt'] < s['time.t_end']: self.fail('time.dt', "must be smaller than time.t_end")
		if not s['source.m'] > 0: self.fail('source.m', "must be positive, got %r" % s['source.m'])
		if not 0 < s['potential.theta'] < s['potential.theta0']: self.fail('potential.theta', "need 0 < theta < theta0")
		if s['potential.n'] < 2: self.fail('potential.n', "must be at least 2")
		if s['step.newton_max'] < 1: self.fail('step.newton_max', "must be at least 1")
		if s['step.picard_iters'] < 1: self.fail('step.picard_iters', "must be at least 1")
		if not 0 < s['step.damping'] < 1: self.fail('step.damping', "must lie in (0, 1)")
		if not 0 < s['elliptic.tol'] <= 1e-4: self.fail('elliptic.tol', "must lie in (0, 1e-4]")
		if s['elliptic.max_iter'] < 0: self.fail('elliptic.max_iter', "must be non-negative")
		if s['output.snapshot_every'] < 0: self.fail('output.snapshot_every', "must be non-negative")
		if s['sweep.workers'] < 1: self.fail('sweep.workers', "must be at least 1")
		if not 0 < s['init.clip_margin'] < 1: self.fail('init.clip_margin', "must lie in (0, 1)")
		if s['init.kind'] == 'snapshot' and not s['init.path']: self.fail('init.path', "snapshot initial data needs a path")
		if s['mms.levels'] < 3: self.fail('mms.levels', "need at least 3 levels")
		if s['mms.coarsest'] < 4 or s['mms.temporal_nx'] < 4: self.fail('mms.coarsest', "grids need at least 4 cells")
		for name in ('mms.spatial_dt', 'mms.spatial_t_end', 'mms.temporal_dt', 'mms.temporal_t_end'):
			if not s[name] > 0: self.fail(name, "must be positive, got %r" % s[name])
		if s['mms.amplitude'] > 0.3: self.fail('mms.amplitude', "must not exceed 0.3")
		if not 0 <= s['perturb.delta'] <= s['init.clip_margin'] / 10: self.fail('perturb.delta', "must lie in [0, init.clip_margin/10]")
		if s['verify.ladder_coarsest'] < 4: self.fail('verify.ladder_coarsest', "need at least 4 cells")
		for name in ('verify.ladder_dt', 'verify.ladder_t_end'):
			if not s[name] > 0: self.fail(name, "must be positive, got %r" % s[name])
		try:
			self.grid()
			self.params().validate()
			self.init_spec().validate()
			self.elliptic_options().validate(self.grid())
		except AdmissibilityError as e: self.fail('source.m' if 'rate' in str(e) else 'source.h', str(e))
		except ConfigError: raise
		except ValueError as e: self.fail(self._blame(str(e)), str(e))
		return self

	def _blame(self, message:str) -> str:
		for word, name in (('elliptic', 'elliptic.method'), ('snapshot', 'init.path'), ('disc', 'init.radius'), ('width', 'init.width'), ('amplitude', 'init.amplitude')):
			if word in message: return name
		return 'init.kind'


def read_config_string(text:str, filename:str=None) -> SimConfig:
	source = SourceText(text, filename=filename)
	settings, rows = {}, {}
	for row, line in source.numbered_lines():
		body = line.split('#', 1)[0]
		if not body.strip(): continue
		name, equals, value = body.partition('=')
		name, value = name.strip(), value.strip()
		start = len(line) - len(line.lstrip())
		if not equals or not name:
			raise ConfigError(source.complaint(row, start, len(body.strip()), "expected section.key = value"))
		if name not in KEY_TABLE:
			raise ConfigError(source.complaint(row, start, len(name), "unknown configuration key %r" % name), key=name)
		if name in rows:
			raise ConfigError(source.complaint(row, start, len(name), "%s already set at line %d" % (name, rows[name])), key=name)
		col = line.index('=') + 1
		while col < len(line) and line[col] in ' \t': col += 1
		try: settings[name] = convert(KEY_TABLE[name], value)
		except ValueError as e:
			raise ConfigError(source.complaint(row, col, len(value), "%s: %s" % (name, e)), key=name) from None
		rows[name] = row
	return SimConfig(settings, rows, source)

def read_config_file(path) -> SimConfig:
	try:
		with open(path) as fh: text = fh.read()
	except OSError as e:
		raise ConfigError("cannot read configuration %s: %s" % (path, e.strerror)) from None
	return read_config_string(text, filename=str(path))

def serialize(config:SimConfig) -> str:
	return "".join("%s = %s\n" % (k.name, spell(k, config[k.name])) for k in KEYS)

def config_hash(config:SimConfig) -> str:
	return hashlib.sha256(serialize(config).encode('utf-8')).hexdigest()
