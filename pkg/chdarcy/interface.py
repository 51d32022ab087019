"""
Interface Definitions: the exception vocabulary shared by every layer, plus the
abstract notion of a source shape.

Numerical code fails in a handful of recognizable ways. An argument wanders out of
a potential's domain. A parameter set cannot keep the total mass away from the pure
phases. An iterative solver gives up. Each of these gets its own class here, with the
attributes a caller needs to say something useful about it, so that the harness can
translate failures into exit codes without string-matching on messages.
"""
from abc import ABC, abstractmethod
from typing import NamedTuple


class DomainError(ValueError):
	""" An argument lies outside the domain of an evaluator, e.g. |s| >= 1 for the logarithmic potential. """
	def __init__(self, message, worst=None):
		super().__init__(message)
		self.worst = worst

class AdmissibilityError(ValueError):
	""" A parameter set fails a structural condition the model depends on. """

class CompatibilityError(ValueError):
	"""
	Neumann data fails the discrete divergence theorem.
	`defect` is the measured value of the integral of f plus the boundary integral of g.
	"""
	def __init__(self, defect, allowance):
		super().__init__("Incompatible Neumann data: defect %.3e exceeds %.3e" % (defect, allowance))
		self.defect, self.allowance = defect, allowance

class ConvergenceError(ArithmeticError):
	""" An iteration hit its cap. `iterations` and `residual` describe where it stopped. """
	def __init__(self, what, iterations, residual, advice=''):
		message = "%s did not converge after %d iterations (residual %.3e)" % (what, iterations, residual)
		if advice: message += "; " + advice
		super().__init__(message)
		self.what, self.iterations, self.residual = what, iterations, residual

class BoundViolation(ArithmeticError):
	""" Newton damping could not keep the phase field strictly inside (-1, 1). """

class StepFailure(RuntimeError):
	""" Wraps a failure during time stepping with the step index and time at which it happened. """
	def __init__(self, step, t, cause:Exception):
		super().__init__("At step %d (t=%.6g): %s" % (step, t, cause))
		self.step, self.t, self.cause = step, t, cause

class ConfigError(ValueError):
	"""
	A configuration problem. `key` names the offending setting, when there is one.
	The message may already include an illustrated excerpt of the configuration text.
	"""
	def __init__(self, message, key=None):
		super().__init__(message)
		self.key = key

class OrderRegression(ArithmeticError):
	""" A convergence study measured an order outside its expected window. """
	def __init__(self, study, order, window):
		super().__init__("%s study: observed order %.3f outside [%g, %g]" % (study, order, window[0], window[1]))
		self.study, self.order, self.window = study, order, window


class Range(NamedTuple):
	low: float
	high: float


class SourceShape(ABC):
	"""
	The function h of the mass source S = -m*phi + h(phi), known on [-1, 1] only.
	Implementations evaluate vectorized over numpy arrays.
	What happens outside [-1, 1] is the business of the extension, not the shape.
	"""

	@abstractmethod
	def value(self, s): """ h(s) for s in [-1, 1]. """

	@abstractmethod
	def slope(self, s): """ h'(s). """

	@abstractmethod
	def curvature(self, s): """ h''(s). """

	@abstractmethod
	def extrema(self) -> Range: """ (min, max) of h over [-1, 1]. """

	@abstractmethod
	def spec(self) -> str: """ The configuration-file spelling of this shape. """

	def __repr__(self): return "<%s %s>" % (type(self).__name__, self.spec())
