"""
Model parameters, the mass source S = -m*phi + h(phi), and the total-mass law.

Integrating the phase equation over the domain kills the Laplacian and the transport
term (the boundary conditions see to that), leaving the linear ODE

	d/dt mean(phi) + m * mean(phi) = mean(h(phi)).

With mean(h) trapped in [min h, max h], the mean is squeezed between exponential
relaxations toward min(h)/m and max(h)/m. That is the whole story of the mass bounds.
Note that the asymptotes here are h/m, not h/(|Omega| m): the latter is what you get
if the 1/|Omega| in the ODE is dropped, and agrees only on domains of unit area. The
variant is available behind `omega_factor` for comparison.

The shape h is only given on [-1, 1]. A regularized potential lets phi stray outside,
so h gets extended to the whole line by a quintic Hermite blend into a constant
plateau on either side. The blend matches value, slope and curvature at +/-1, so the
extension is C^2, and its width is chosen so the blend never leaves the band
[min h - eps, max h + eps].
"""
import math
from typing import NamedTuple, Optional

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import CubicSpline

from ..interface import SourceShape, Range, AdmissibilityError
from .potential import PotentialMode, LOGARITHMIC

### The menu of source shapes.

class ZeroShape(SourceShape):
	def value(self, s): return np.zeros_like(np.asarray(s, dtype=float))
	def slope(self, s): return np.zeros_like(np.asarray(s, dtype=float))
	def curvature(self, s): return np.zeros_like(np.asarray(s, dtype=float))
	def extrema(self): return Range(0.0, 0.0)
	def spec(self): return "zero"

class ConstantShape(SourceShape):
	def __init__(self, c:float): self.c = float(c)
	def value(self, s): return np.full_like(np.asarray(s, dtype=float), self.c)
	def slope(self, s): return np.zeros_like(np.asarray(s, dtype=float))
	def curvature(self, s): return np.zeros_like(np.asarray(s, dtype=float))
	def extrema(self): return Range(self.c, self.c)
	def spec(self): return "constant:%r" % self.c

class LinearHalfShape(SourceShape):
	""" s -> (1+s)/2: no production in the pure minus phase, full production in the plus phase. """
	def value(self, s): return 0.5 * (1 + np.asarray(s, dtype=float))
	def slope(self, s): return np.full_like(np.asarray(s, dtype=float), 0.5)
	def curvature(self, s): return np.zeros_like(np.asarray(s, dtype=float))
	def extrema(self): return Range(0.0, 1.0)
	def spec(self): return "linear_half"

class ParabolicShape(SourceShape):
	""" s -> lambda (1 - s^2): production concentrated on the diffuse interface. """
	def __init__(self, lam:float): self.lam = float(lam)
	def value(self, s):
		s = np.asarray(s, dtype=float)
		return self.lam * (1 - s * s)
	def slope(self, s): return -2 * self.lam * np.asarray(s, dtype=float)
	def curvature(self, s): return np.full_like(np.asarray(s, dtype=float), -2 * self.lam)
	def extrema(self): return Range(min(0.0, self.lam), max(0.0, self.lam))
	def spec(self): return "parabolic:%r" % self.lam

class SplineShape(SourceShape):
	"""
	A natural cubic spline through tabulated (s, h(s)) pairs. The table must have a strictly
	increasing s-column covering [-1, 1]. Natural end conditions keep the interpolant C^2.
	"""
	def __init__(self, s, h, path:str=None):
		s, h = np.asarray(s, dtype=float), np.asarray(h, dtype=float)
		if s.ndim != 1 or s.shape != h.shape or len(s) < 3:
			raise ValueError("spline table needs at least three (s, h) rows")
		if not np.all(np.diff(s) > 0): raise ValueError("spline s-grid must be strictly increasing")
		if s[0] > -1 or s[-1] < 1: raise ValueError("spline s-grid must cover [-1, 1]")
		self.path = path
		self.__spline = CubicSpline(s, h, bc_type='natural')
		self.__d1 = self.__spline.derivative(1)
		self.__d2 = self.__spline.derivative(2)
		candidates = [-1.0, 1.0] + [r for r in self.__d1.roots(extrapolate=False) if -1 <= r <= 1]
		values = self.__spline(np.array(candidates))
		self.__extrema = Range(float(values.min()), float(values.max()))

	@staticmethod
	def load(path:str) -> "SplineShape":
		table = np.loadtxt(path, dtype=float, comments='#', ndmin=2)
		if table.shape[1] != 2: raise ValueError("spline file %r must have exactly two columns" % path)
		return SplineShape(table[:, 0], table[:, 1], path=path)

	def value(self, s): return self.__spline(np.asarray(s, dtype=float))
	def slope(self, s): return self.__d1(np.asarray(s, dtype=float))
	def curvature(self, s): return self.__d2(np.asarray(s, dtype=float))
	def extrema(self): return self.__extrema
	def spec(self): return "spline:%s" % self.path

def parse_h_spec(text:str) -> SourceShape:
	""" Read the configuration spelling of a source shape. Raises ValueError on nonsense. """
	text = text.strip()
	head, _, arg = text.partition(':')
	head = head.strip().lower()
	if head == 'zero' and not arg: return ZeroShape()
	if head == 'linear_half' and not arg: return LinearHalfShape()
	if head == 'constant' and arg: return ConstantShape(float(arg))
	if head == 'parabolic' and arg: return ParabolicShape(float(arg))
	if head == 'spline' and arg: return SplineShape.load(arg.strip())
	raise ValueError("unrecognized source shape %r" % text)


class ModelParams(NamedTuple):
	m: float = 1.0
	h: SourceShape = ZeroShape()
	theta: float = 1.0
	theta0: float = 2.0
	potential_mode: PotentialMode = LOGARITHMIC
	eps_ext: float = 0.05
	source_off: bool = False  # Debug switch: S vanishes identically, whatever m and h say.
	omega_factor: bool = False  # Compare against the 1/|Omega| variant of the mass bound.

	def validate(self):
		""" Raise on parameter sets the model does not admit. """
		if not self.m > 0: raise AdmissibilityError("source rate m must be positive, got %r" % self.m)
		if not 0 < self.theta < self.theta0:
			raise AdmissibilityError("need 0 < theta < theta0, got theta=%r, theta0=%r" % (self.theta, self.theta0))
		if not self.eps_ext > 0: raise AdmissibilityError("extension margin eps must be positive, got %r" % self.eps_ext)
		low, high = self.h.extrema()
		if low < -1 or high > 1:
			raise AdmissibilityError("source shape %s leaves [-1, 1]: range [%r, %r]" % (self.h.spec(), low, high))
		return self


### The extension to the whole line.

class ExtensionBounds(NamedTuple):
	band: Range  # [min h - eps, max h + eps]
	slope_max: float
	curvature_max: float

class _Blend(NamedTuple):
	""" The quintic on one side: x = anchor + direction * t * width for t in [0, 1]. """
	anchor: float
	direction: float
	width: float
	plateau: float
	poly: Polynomial

	def locate(self, s): return (s - self.anchor) * self.direction / self.width

# Quintic Hermite basis on [0, 1]: value, slope and curvature at 0; value at 1. Slope and curvature at 1 vanish.
_H0 = Polynomial([1, 0, 0, -10, 15, -6])
_H1 = Polynomial([0, 1, 0, -6, 8, -3])
_H2 = Polynomial([0, 0, 0.5, -1.5, 1.5, -0.5])
_H3 = Polynomial([0, 0, 0, 10, -15, 6])

def _extremes_on_unit(poly:Polynomial):
	""" Min and max of a real polynomial over [0, 1]: endpoints plus interior critical points. """
	points = [0.0, 1.0]
	for r in poly.deriv().roots():
		if abs(r.imag) < 1e-12 and 0 < r.real < 1: points.append(r.real)
	values = poly(np.array(points))
	return float(values.min()), float(values.max())

def _make_blend(shape:SourceShape, anchor:float, band:Range, width:float) -> _Blend:
	direction = 1.0 if anchor > 0 else -1.0
	y0 = float(shape.value(anchor))
	y1 = float(shape.slope(anchor)) * direction * width
	y2 = float(shape.curvature(anchor)) * width * width
	plateau = min(max(y0 + 0.5 * y1, band.low), band.high)
	poly = y0 * _H0 + y1 * _H1 + y2 * _H2 + plateau * _H3
	return _Blend(anchor, direction, width, plateau, poly)

def _fits(blend:_Blend, band:Range) -> bool:
	low, high = _extremes_on_unit(blend.poly)
	return band.low <= low and high <= band.high

def _widest_blend(shape:SourceShape, anchor:float, band:Range) -> _Blend:
	width = 1.0
	if _fits(_make_blend(shape, anchor, band, width), band): return _make_blend(shape, anchor, band, width)
	for _ in range(60):
		width /= 2
		if _fits(_make_blend(shape, anchor, band, width), band): break
	else:
		raise AdmissibilityError("cannot blend %s into [%r, %r] near s=%r; its derivatives are pathological" % (shape.spec(), band.low, band.high, anchor))
	# Bisect between the feasible width and its infeasible double to get close to the largest.
	good, bad = width, 2 * width
	for _ in range(40):
		middle = 0.5 * (good + bad)
		if _fits(_make_blend(shape, anchor, band, middle), band): good = middle
		else: bad = middle
	return _make_blend(shape, anchor, band, good)


class ExtendedSource:
	"""
	The C^2 extension h~ of a source shape to the real line. Equal to h on [-1, 1];
	a quintic blend over [1, 1+w] (mirror on the left) into a constant plateau beyond.
	`bounds` reports the value band and sup-norms of the first two derivatives.
	"""
	def __init__(self, shape:SourceShape, eps:float):
		if not eps > 0: raise AdmissibilityError("extension margin eps must be positive, got %r" % eps)
		self.shape, self.eps = shape, float(eps)
		low, high = shape.extrema()
		band = Range(low - eps, high + eps)
		self.right = _widest_blend(shape, 1.0, band)
		self.left = _widest_blend(shape, -1.0, band)
		self.bounds = ExtensionBounds(band, *self.__derivative_bounds())

	def __derivative_bounds(self):
		sample = np.linspace(-1, 1, 4001)
		slope = float(np.max(np.abs(self.shape.slope(sample))))
		curvature = float(np.max(np.abs(self.shape.curvature(sample))))
		for blend in (self.right, self.left):
			d1, d2 = blend.poly.deriv(1), blend.poly.deriv(2)
			slope = max(slope, max(map(abs, _extremes_on_unit(d1))) / blend.width)
			curvature = max(curvature, max(map(abs, _extremes_on_unit(d2))) / blend.width ** 2)
		return slope, curvature

	def __pieces(self, s, order:int):
		s = np.asarray(s, dtype=float)
		inside = self.shape.value, self.shape.slope, self.shape.curvature
		result = inside[order](np.clip(s, -1.0, 1.0))
		for blend in (self.right, self.left):
			t = blend.locate(s)
			outside = t > 0
			if not np.any(outside): continue
			tt = np.clip(t, 0.0, 1.0)
			piece = blend.poly.deriv(order)(tt) * (blend.direction / blend.width) ** order if order else blend.poly(tt)
			beyond = blend.plateau if order == 0 else 0.0
			result = np.where(outside, np.where(t < 1, piece, beyond), result)
		return result

	def value(self, s): return self.__pieces(s, 0)
	def slope(self, s): return self.__pieces(s, 1)
	def curvature(self, s): return self.__pieces(s, 2)
	def __call__(self, s): return self.value(s)

def extend_h(shape:SourceShape, eps_ext:float) -> ExtendedSource:
	return ExtendedSource(shape, eps_ext)


class Source:
	""" S(s) = -m s + h~(s), or identically zero when the source is switched off. """
	def __init__(self, params:ModelParams):
		self.params = params
		self.extension = extend_h(params.h, params.eps_ext)

	def __call__(self, phi):
		phi = np.asarray(phi, dtype=float)
		if self.params.source_off: return np.zeros_like(phi)
		return -self.params.m * phi + self.extension.value(phi)

	def derivative(self, phi):
		phi = np.asarray(phi, dtype=float)
		if self.params.source_off: return np.zeros_like(phi)
		return -self.params.m + self.extension.slope(phi)

def source_eval(phi, params:ModelParams, extension:Optional[ExtendedSource]=None):
	""" Pointwise S(phi). Builds the extension on the fly unless one is supplied. """
	phi = np.asarray(phi, dtype=float)
	if params.source_off: return np.zeros_like(phi)
	if extension is None: extension = extend_h(params.h, params.eps_ext)
	return -params.m * phi + extension.value(phi)


### The total-mass law.

def mass_ode_solution(phi_bar0, m, c, t):
	""" Solution of d/dt y + m y = c with y(0) = phi_bar0. Vectorized over t. """
	if not m > 0: raise ValueError("m must be positive")
	t = np.asarray(t, dtype=float)
	decay = np.exp(-m * t)
	return phi_bar0 * decay - (c / m) * np.expm1(-m * t)

def mass_bounds(params:ModelParams, phi_bar0:float, *, area:float=1.0, omega_factor:Optional[bool]=None, extended:bool=False) -> tuple[float, float]:
	"""
	The envelope (c1, c2) of every convex combination of phi_bar0 with the asymptotes
	min(h)/m and max(h)/m. With `extended`, the asymptotes widen by the extension margin.
	With `omega_factor`, divide the asymptotes by |Omega| too, the form the bound is often quoted in.
	"""
	if not -1 < phi_bar0 < 1: raise AdmissibilityError("initial mean %r lies outside (-1, 1)" % phi_bar0)
	if params.source_off: return (float(phi_bar0), float(phi_bar0))
	if not params.m > 0: raise AdmissibilityError("source rate m must be positive, got %r" % params.m)
	if omega_factor is None: omega_factor = params.omega_factor
	low, high = params.h.extrema()
	if extended: low, high = low - params.eps_ext, high + params.eps_ext
	divisor = params.m * (area if omega_factor else 1.0)
	c1, c2 = min(phi_bar0, low / divisor), max(phi_bar0, high / divisor)
	if not (-1 < c1 and c2 < 1):
		raise AdmissibilityError("mass envelope [%r, %r] touches the pure phases; need -1 < min(h)/m and max(h)/m < 1" % (c1, c2))
	return (float(c1), float(c2))

def check_extension_margin(params:ModelParams, phi_bar0:float, area:float=1.0) -> tuple[float, float]:
	""" The extended-source analogue of the admissibility condition: the eps-widened envelope stays inside (-1, 1). """
	return mass_bounds(params, phi_bar0, area=area, extended=True)

def ode_equilibrium(params:ModelParams) -> Optional[float]:
	""" For a constant source shape, the mean the mass law relaxes toward. """
	low, high = params.h.extrema()
	if params.source_off or low != high: return None
	return low / params.m
