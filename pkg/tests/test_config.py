import os
import tempfile
import unittest

from chdarcy.interface import ConfigError
from chdarcy.harness import config
from chdarcy.harness.config import SimConfig, read_config_string, serialize, config_hash

SAMPLE = """\
# A small run.
grid.nx = 16
grid.ny = 12   # rectangular on purpose
grid.lx = 1.5

source.m = 2
source.h = constant:0.3
source.off = no
potential.mode = regularized
init.width = 3h
time.dt = 0.01
time.t_end = 0.05
"""


class ReadingTests(unittest.TestCase):
	def test_00_defaults(self):
		c = SimConfig()
		self.assertEqual(64, c['grid.nx'])
		self.assertEqual('tanh_disc', c['init.kind'])
		self.assertEqual(1e-3, c.dt)
		self.assertEqual('run', c.mode)
		self.assertIs(c, c.validate())

	def test_01_typed_values(self):
		c = read_config_string(SAMPLE, "sample.cfg")
		self.assertEqual(16, c['grid.nx'])
		self.assertEqual(1.5, c['grid.lx'])
		self.assertEqual(2.0, c['source.m'])
		self.assertIs(False, c['source.off'])
		self.assertEqual(3, c.rows['grid.ny'])
		c.validate()
		grid = c.grid()
		self.assertEqual((12, 16), grid.shape)
		params = c.params()
		self.assertEqual('constant:0.3', params.h.spec())
		self.assertEqual('regularized', params.potential_mode.kind)
		spec = c.init_spec()
		self.assertEqual((3.0, True), (spec.width, spec.width_in_cells))
		self.assertEqual((0.5, 0.5), spec.center)
		self.assertEqual(0.005, c.step_options(dt=0.005).dt)
		self.assertEqual(0.01, c.step_options().dt)

	def test_02_complaints_point_at_the_line(self):
		for text, line, key in [
			("grid.nx = 16\ngrid.nz = 4\n", 2, 'grid.nz'),
			("grid.nx = 16\ngrid.nx = 32\n", 2, 'grid.nx'),
			("\n\ngrid.nx = sixteen\n", 3, 'grid.nx'),
			("source.off = maybe\n", 1, 'source.off'),
			("potential.mode = quadratic\n", 1, 'potential.mode'),
		]:
			with self.subTest(text=text):
				with self.assertRaises(ConfigError) as context: read_config_string(text, "bad.cfg")
				self.assertEqual(key, context.exception.key)
				self.assertIn("bad.cfg: line %d" % line, str(context.exception))
				self.assertIn("^", str(context.exception))

	def test_03_lines_without_equals(self):
		with self.assertRaises(ConfigError): read_config_string("grid.nx 16\n")

	def test_04_missing_file(self):
		with tempfile.TemporaryDirectory() as folder:
			with self.assertRaises(ConfigError): config.read_config_file(os.path.join(folder, "absent.cfg"))

	def test_05_unknown_key_in_code(self):
		with self.assertRaises(ConfigError): SimConfig({'grid.nz': 3})
		with self.assertRaises(ConfigError): SimConfig().with_settings({'grid.nz': 3})


class ValidationTests(unittest.TestCase):
	def test_00_rules_name_their_key(self):
		for changes, key in [
			({'time.dt': 0.0}, 'time.dt'),
			({'time.dt': 2.0}, 'time.dt'),
			({'grid.nx': 3}, 'grid.nx'),
			({'source.m': -1.0}, 'source.m'),
			({'potential.theta': 2.5}, 'potential.theta'),
			({'source.h': 'constant:1.5'}, 'source.h'),
			({'source.h': 'cubic'}, 'source.h'),
			({'init.center': '0.5'}, 'init.center'),
			({'init.width': 'wide'}, 'init.width'),
			({'init.kind': 'snapshot'}, 'init.path'),
			({'step.damping': 1.0}, 'step.damping'),
			({'elliptic.method': 'direct', 'grid.nx': 128, 'grid.ny': 128}, 'elliptic.method'),
			({'perturb.delta': 0.1}, 'perturb.delta'),
			({'mms.amplitude': 0.5}, 'mms.amplitude'),
			({'mms.levels': 2}, 'mms.levels'),
		]:
			with self.subTest(changes=changes):
				with self.assertRaises(ConfigError) as context: SimConfig().with_settings(changes).validate()
				self.assertEqual(key, context.exception.key)

	def test_01_illustrated_when_read_from_text(self):
		c = read_config_string("grid.nx = 16\ntime.dt = -1\n", "neg.cfg")
		with self.assertRaises(ConfigError) as context: c.validate()
		self.assertIn("neg.cfg: line 2", str(context.exception))
		self.assertEqual('time.dt', context.exception.key)


class CanonicalTests(unittest.TestCase):
	def test_00_serialize_parse_is_the_identity(self):
		c = read_config_string(SAMPLE)
		text = serialize(c)
		self.assertEqual(c, read_config_string(text))
		self.assertEqual(text, serialize(read_config_string(text)))
		self.assertEqual(len(config.KEYS), text.count('\n'))

	def test_01_hash(self):
		a = read_config_string(SAMPLE)
		b = read_config_string("# comments do not matter\n" + SAMPLE)
		self.assertEqual(config_hash(a), config_hash(b))
		self.assertEqual(64, len(config_hash(a)))
		self.assertNotEqual(config_hash(a), config_hash(a.with_settings({'time.dt': 0.02})))

	def test_02_defaults_are_explicit(self):
		self.assertEqual(SimConfig(), read_config_string(""))
		self.assertEqual(config_hash(SimConfig()), config_hash(read_config_string("grid.nx = 64\n")))


if __name__ == '__main__':
	unittest.main()
