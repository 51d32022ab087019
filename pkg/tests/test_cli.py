import contextlib
import io
import os
import tempfile
import unittest

from chdarcy.__main__ import run_cli

TINY = """\
grid.nx = 8
grid.ny = 8
time.dt = 0.001
time.t_end = 0.003
init.kind = random
init.mean = 0.1
source.h = constant:0.2
"""


class CommandLineTests(unittest.TestCase):
	def setUp(self):
		self.folder = tempfile.TemporaryDirectory()
		self.addCleanup(self.folder.cleanup)

	def write(self, text, name="run.cfg"):
		path = os.path.join(self.folder.name, name)
		outputs = "".join("%s = %s\n" % (key, os.path.join(self.folder.name, leaf)) for key, leaf in [
			('output.csv_path', "diagnostics.csv"), ('output.sweep_path', "sweep.csv"),
			('output.mms_path', "mms.csv"), ('output.perturb_path', "perturb.csv"),
		])
		with open(path, 'w') as fh: fh.write(text + outputs)
		return path

	def invoke(self, *argv):
		out, err = io.StringIO(), io.StringIO()
		with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
			status = run_cli(list(argv) + ['-q'])
		return status, out.getvalue(), err.getvalue()

	def test_00_run(self):
		status, out, _ = self.invoke('run', self.write(TINY), '--deterministic')
		self.assertEqual(0, status)
		self.assertIn("steps=3", out)
		self.assertTrue(os.path.exists(os.path.join(self.folder.name, "diagnostics.csv")))

	def test_01_config_option_and_default_mode(self):
		path = self.write(TINY)
		self.assertEqual(0, self.invoke('run', '--config', path)[0])
		self.assertEqual(0, self.invoke(path)[0])

	def test_02_configuration_errors_exit_2(self):
		good = self.write(TINY)
		for argv in [
			('run', self.write(TINY.replace("time.dt = 0.001", "time.dt = 0"), "zero_dt.cfg")),
			('run', self.write(TINY + "grid.nz = 8\n", "unknown.cfg")),
			('frobnicate', good),
			('run', os.path.join(self.folder.name, "absent.cfg")),
			('run',),
			('run', good, '--workers', '2'),
			('perturb', good, '--delta', '1'),
			('run', good, '--bogus'),
		]:
			with self.subTest(argv=argv):
				status, _, err = self.invoke(*argv)
				self.assertEqual(2, status)
				self.assertTrue(err)

	def test_03_inadmissible_parameters_exit_2(self):
		status, _, err = self.invoke('run', self.write(TINY + "source.m = 0.1\n", "bad.cfg"))
		self.assertEqual(2, status)
		self.assertIn("pure phases", err)

	def test_04_numerical_failure_exits_1(self):
		path = self.write(TINY + "step.newton_tol = 1e-300\nstep.newton_max = 1\n", "stiff.cfg")
		status, _, err = self.invoke('run', path)
		self.assertEqual(1, status)
		self.assertIn("At step 1", err)

	def test_05_verify(self):
		status, out, _ = self.invoke('verify', self.write(TINY))
		self.assertEqual(0, status)
		self.assertIn("mass law defect", out)

	def test_06_perturb(self):
		status, out, _ = self.invoke('perturb', self.write(TINY), '--delta', '1e-4', '--deterministic')
		self.assertEqual(0, status)
		self.assertIn("fitted rate", out)

	def test_07_help(self):
		self.assertEqual(0, self.invoke('--help')[0])


if __name__ == '__main__':
	unittest.main()
