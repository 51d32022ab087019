"""
Simulate a Cahn-Hilliard-Darcy system with a mass source on a rectangle, and check
what the model promises about it.

Subcommands:
  run      step to t_end, writing the diagnostics CSV and snapshots
  mms      manufactured-solution convergence study (writes the MMS table)
  verify   invariant suite; prints a report of every check
  sweep    grid over source rate m and source-shape parameter c
  perturb  continuous-dependence experiment with a perturbed twin

With no subcommand, run.mode from the configuration decides.
Exit status: 0 success, 1 invariant violation or numerical failure, 2 configuration error.
"""
import argparse
import logging
import sys

from chdarcy.interface import ConfigError, AdmissibilityError, StepFailure, OrderRegression, ConvergenceError
from chdarcy.harness.config import read_config_file, SimConfig, MODES
from chdarcy.harness import driver, mms, experiments, verify

log = logging.getLogger('chdarcy')

OK, VIOLATION, CONFIG_ERROR = 0, 1, 2

def make_parser():
	parser = argparse.ArgumentParser(prog='py -m chdarcy', description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
	parser.add_argument('command', nargs='?', help="one of: " + ", ".join(MODES))
	parser.add_argument('config_path', nargs='?', help='path to the configuration file')
	parser.add_argument('-c', '--config', dest='config_option', help='path to the configuration file')
	parser.add_argument('--deterministic', action='store_true', help='leave the timestamp out of CSV headers, so reruns are byte-identical')
	parser.add_argument('--workers', type=int, help='worker processes for sweep (overrides sweep.workers)')
	parser.add_argument('--delta', type=float, help='initial perturbation for perturb (overrides perturb.delta)')
	parser.add_argument('--ladder', action='store_true', help='verify: add the three-level refinement study of the residuals')
	parser.add_argument('--report', help='verify: also write the report table as CSV to this path')
	parser.add_argument('-v', '--verbose', action='store_true', help='log every step')
	parser.add_argument('-q', '--quiet', action='store_true', help='log warnings only')
	return parser

def _err(msg):
	print(msg, file=sys.stderr)

def _resolve(args):
	""" Sort out (mode, path) from the positionals; raises ConfigError on nonsense. """
	command, path = args.command, args.config_path or args.config_option
	if command is not None and command not in MODES:
		if path is None: return None, command
		raise ConfigError("unknown subcommand %r; expected one of %s" % (command, ", ".join(MODES)))
	if path is None: raise ConfigError("no configuration file given")
	return command, path

def dispatch(mode:str, config:SimConfig, args) -> int:
	if args.workers is not None and mode != 'sweep': raise ConfigError("--workers applies to sweep only")
	if args.delta is not None and mode != 'perturb': raise ConfigError("--delta applies to perturb only")
	if args.ladder and mode != 'verify': raise ConfigError("--ladder applies to verify only")
	if mode == 'run':
		result = driver.run(config, deterministic=args.deterministic)
		final = result.final
		print("t=%.6g  mean(phi)=%.9g  steps=%d  wrote %s" % (final.t, result.simulation.grid.mean(final.phi), len(result.records), config['output.csv_path']))
	elif mode == 'mms':
		studies = mms.mms_convergence(config, deterministic=args.deterministic)
		for study in studies: print("%s: observed orders phi %.3f, q %.3f" % (study.name, *study.orders))
	elif mode == 'verify':
		report = verify.verify(config, with_ladder=args.ladder, path=args.report, deterministic=args.deterministic)
		report.show()
		if not report.ok: return VIOLATION
	elif mode == 'sweep':
		if args.workers is not None and args.workers < 1: raise ConfigError("--workers must be at least 1")
		rows = experiments.sweep(config, workers=args.workers, deterministic=args.deterministic)
		print("swept %d cells, wrote %s" % (len(rows), config['output.sweep_path']))
		if not all(row.inside_envelope for row in rows): return VIOLATION
	else:
		result = experiments.perturb_experiment(config, delta=args.delta, deterministic=args.deterministic)
		print("Y(0)=%.6g  Y(T)=%.6g  fitted rate %.6g  envelope ratio %.6g" % (result.gaps[0], result.gaps[-1], result.rate, result.envelope_ratio))
	return OK

def run_cli(argv=None) -> int:
	parser = make_parser()
	try: args = parser.parse_args(argv)
	except SystemExit as e: return CONFIG_ERROR if e.code else OK
	level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
	logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)
	try:
		mode, path = _resolve(args)
		config = read_config_file(path).validate()
		return dispatch(mode or config.mode, config, args)
	except (ConfigError, AdmissibilityError) as e:
		_err(str(e))
		return CONFIG_ERROR
	except ValueError as e:
		_err("configuration problem: %s" % e)
		return CONFIG_ERROR
	except (StepFailure, OrderRegression, ConvergenceError) as e:
		_err(str(e))
		return VIOLATION

if __name__ == '__main__': sys.exit(run_cli())
