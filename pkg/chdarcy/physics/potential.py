"""
The Flory-Huggins free-energy density and its everywhere-defined approximants.

The double-well here is

	Psi(s) = F(s) - (theta0/2) s^2,   F(s) = (theta/2) [ (1+s) log(1+s) + (1-s) log(1-s) ]

with 0 < theta < theta0. The convex part F carries the singular logarithms, which is
exactly what keeps a solution strictly inside (-1, 1). The concave quadratic drives
phase separation. Everything downstream (the time stepper's convex splitting, the
uniqueness functional, the energy) wants F and its derivatives separately from Psi,
so the evaluator exposes both families.

In regularized mode, F is replaced by F_n, built from three pieces:

* F itself on [-delta_n, delta_n] where delta_n = 1 - 1/n,
* the second-order Taylor extension of F beyond +/- delta_n, and
* a sextic tail (kappa/2)(|s|-1)^6 switched on for |s| > 1.

The Taylor piece keeps F_n twice continuously differentiable and convex; the tail gives
F_n'(r) sign(r) / |r|^5 -> 3 kappa, so the super-quadratic growth constant comes out as
3 kappa on the nose. In this mode the stepper may let phi leave [-1, 1] a little, which is
the whole point of having an approximant.

All methods are vectorized over numpy arrays and return arrays (or numpy scalars).
Evaluators are immutable after construction.
"""
import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from ..interface import DomainError

class PotentialMode(NamedTuple):
	kind: str  # 'logarithmic' or 'regularized'
	n: int = 0
	kappa: float = 0.0

	def spec(self) -> str:
		return self.kind if self.kind == 'logarithmic' else "regularized(%d, %r)" % (self.n, self.kappa)

LOGARITHMIC = PotentialMode('logarithmic')

def regularized_mode(n:int, kappa:float) -> PotentialMode:
	if n < 2: raise ValueError("regularization cutoff index must be at least 2, got %r" % n)
	if not kappa > 0: raise ValueError("tail growth constant kappa must be positive, got %r" % kappa)
	return PotentialMode('regularized', int(n), float(kappa))


def _log_F(theta, s):
	return 0.5 * theta * ((1 + s) * np.log1p(s) + (1 - s) * np.log1p(-s))

def _log_F1(theta, s): return theta * np.arctanh(s)
def _log_F2(theta, s): return theta / (1 - s * s)
def _log_F3(theta, s): return 2 * theta * s / (1 - s * s) ** 2


class PotentialEvaluator:
	"""
	Evaluates Psi, F and their first three derivatives in either mode.
	`domain_radius` is 1 in logarithmic mode and infinity in regularized mode;
	the stepper uses it to decide whether Newton updates need clipping.
	"""
	def __init__(self, theta:float, theta0:float, mode:PotentialMode=LOGARITHMIC):
		if not theta > 0: raise ValueError("theta must be positive, got %r" % theta)
		if not theta0 >= 0: raise ValueError("theta0 must be non-negative, got %r" % theta0)
		if mode.kind not in ('logarithmic', 'regularized'): raise ValueError("unknown potential mode %r" % (mode.kind,))
		self.theta, self.theta0, self.mode = float(theta), float(theta0), mode
		if mode.kind == 'logarithmic':
			self.delta = None
			self.domain_radius = 1.0
		else:
			self.delta = 1.0 - 1.0 / mode.n
			self.domain_radius = math.inf
			d = self.delta
			# Taylor data at the cutoff. F is even, so one side suffices.
			self._at_cut = (float(_log_F(theta, d)), float(_log_F1(theta, d)), float(_log_F2(theta, d)))

	@property
	def is_logarithmic(self) -> bool: return self.delta is None

	def _checked(self, s):
		s = np.asarray(s, dtype=float)
		if self.delta is None:
			worst = np.max(np.abs(s)) if s.size else 0.0
			if not worst < 1:
				raise DomainError("logarithmic potential evaluated at |s| = %r >= 1" % float(worst), worst=float(worst))
		return s

	# The convex part F and its derivatives.

	def convex(self, s):
		s = self._checked(s)
		if self.delta is None: return _log_F(self.theta, s)
		f0, f1, f2 = self._at_cut
		a = np.abs(s)
		r = np.maximum(a - self.delta, 0.0)
		core = _log_F(self.theta, np.clip(s, -self.delta, self.delta))
		taylor = f0 + f1 * r + 0.5 * f2 * r * r
		tail = 0.5 * self.mode.kappa * np.maximum(a - 1.0, 0.0) ** 6
		return np.where(a <= self.delta, core, taylor) + tail

	def convex_prime(self, s):
		s = self._checked(s)
		if self.delta is None: return _log_F1(self.theta, s)
		f0, f1, f2 = self._at_cut
		a, sign = np.abs(s), np.sign(s)
		r = np.maximum(a - self.delta, 0.0)
		core = _log_F1(self.theta, np.clip(s, -self.delta, self.delta))
		taylor = sign * (f1 + f2 * r)
		tail = sign * 3 * self.mode.kappa * np.maximum(a - 1.0, 0.0) ** 5
		return np.where(a <= self.delta, core, taylor) + tail

	def convex_second(self, s):
		s = self._checked(s)
		if self.delta is None: return _log_F2(self.theta, s)
		f0, f1, f2 = self._at_cut
		a = np.abs(s)
		core = _log_F2(self.theta, np.clip(s, -self.delta, self.delta))
		tail = 15 * self.mode.kappa * np.maximum(a - 1.0, 0.0) ** 4
		return np.where(a <= self.delta, core, f2) + tail

	def convex_third(self, s):
		s = self._checked(s)
		if self.delta is None: return _log_F3(self.theta, s)
		a, sign = np.abs(s), np.sign(s)
		core = _log_F3(self.theta, np.clip(s, -self.delta, self.delta))
		tail = sign * 60 * self.mode.kappa * np.maximum(a - 1.0, 0.0) ** 3
		return np.where(a <= self.delta, core, 0.0) + tail

	# The full double-well Psi = F - (theta0/2) s^2.

	def psi(self, s):
		s = self._checked(s)
		return self.convex(s) - 0.5 * self.theta0 * s * s

	def psi_prime(self, s):
		s = self._checked(s)
		return self.convex_prime(s) - self.theta0 * s

	def psi_second(self, s):
		return self.convex_second(s) - self.theta0

	def psi_third(self, s):
		return self.convex_third(s)

	def wells(self) -> tuple[float, float]:
		"""
		The two minimizers of Psi, symmetric about zero. Requires theta < theta0;
		otherwise Psi is convex and the only minimizer is the origin.
		"""
		if not self.theta < self.theta0: return (0.0, 0.0)
		# Psi' < 0 just right of the origin (Psi''(0) = theta - theta0 < 0) and > 0 near the pole.
		upper = 1 - 1e-15 if self.delta is None else 1e3
		star = brentq(lambda s: float(self.psi_prime(s)), 1e-12, upper, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
		return (-star, star)

	def __repr__(self):
		return "PotentialEvaluator(theta=%r, theta0=%r, mode=%s)" % (self.theta, self.theta0, self.mode.spec())


def regularize(theta:float, n:int, kappa:float, theta0:float=0.0) -> PotentialEvaluator:
	""" The approximant F_n with cutoff 1 - 1/n and sextic tail constant kappa. """
	return PotentialEvaluator(theta, theta0, regularized_mode(n, kappa))
