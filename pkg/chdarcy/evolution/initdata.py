"""
Initial phase fields.

Every generator ends the same way: the field is clipped into [-(1-margin), 1-margin],
so the logarithmic potential and its derivative are finite and moderate at t = 0.
The zero-flux condition needs no work; the Neumann stencil sees ghost = interior.

Geometry for the disc is given relative to the domain: `center` is a fraction of
(lx, ly) and `radius` a fraction of lx. Interface widths are either absolute or a
multiple of the cell size hx (the config spelling "4h").
"""
import logging
from typing import NamedTuple, Optional

import numpy as np

from ..discrete.grid import Grid
from ..discrete.snapshot import read_snapshot

log = logging.getLogger(__name__)

KINDS = ('uniform', 'tanh_disc', 'random', 'snapshot')

class InitSpec(NamedTuple):
	kind: str = 'uniform'
	value: float = 0.0
	center: tuple[float, float] = (0.5, 0.5)
	radius: float = 0.2
	width: float = 4.0
	width_in_cells: bool = True
	inner: float = 0.9
	outer: float = -0.9
	mean: float = 0.0
	amplitude: float = 0.05
	seed: int = 7
	path: Optional[str] = None
	clip_margin: float = 0.05

	def validate(self):
		if self.kind not in KINDS: raise ValueError("unknown initial-data kind %r" % self.kind)
		if not 0 < self.clip_margin < 1: raise ValueError("clip margin must lie in (0, 1), got %r" % self.clip_margin)
		if self.kind == 'tanh_disc':
			if not self.radius > 0: raise ValueError("disc radius must be positive, got %r" % self.radius)
			if not self.width > 0: raise ValueError("interface width must be positive, got %r" % self.width)
		if self.kind == 'random' and self.amplitude < 0: raise ValueError("amplitude must be non-negative, got %r" % self.amplitude)
		if self.kind == 'snapshot' and not self.path: raise ValueError("snapshot initial data needs a path")
		return self

def parse_width(text:str) -> tuple[float, bool]:
	""" "4h" -> (4.0, True); "0.02" -> (0.02, False). """
	text = text.strip()
	if text.endswith('h'): return float(text[:-1] or 1), True
	return float(text), False


def tanh_disc(grid:Grid, center, radius, width, inner, outer):
	""" Smoothed indicator of a disc: inner at the core, outer far away, midway on the circle. """
	x, y = grid.centers()
	r = np.hypot(x - center[0], y - center[1])
	return 0.5 * (inner + outer) + 0.5 * (inner - outer) * np.tanh((radius - r) / width)

def clip_to_margin(phi, margin:float):
	bound = 1.0 - margin
	clipped = np.clip(phi, -bound, bound)
	touched = int(np.count_nonzero(clipped != phi))
	if touched: log.warning("clipped %d cells into [%g, %g]", touched, -bound, bound)
	return clipped

def generate(spec:InitSpec, grid:Grid) -> np.ndarray:
	spec.validate()
	if spec.kind == 'uniform':
		phi = np.full(grid.shape, float(spec.value))
	elif spec.kind == 'tanh_disc':
		center = (spec.center[0] * grid.lx, spec.center[1] * grid.ly)
		width = spec.width * grid.hx if spec.width_in_cells else spec.width
		phi = tanh_disc(grid, center, spec.radius * grid.lx, width, spec.inner, spec.outer)
	elif spec.kind == 'random':
		rng = np.random.default_rng(spec.seed)
		phi = spec.mean + spec.amplitude * rng.uniform(-1.0, 1.0, size=grid.shape)
	else:
		snap = read_snapshot(spec.path)
		if snap.grid != grid: raise ValueError("snapshot %s was written on %r, not %r" % (spec.path, snap.grid, grid))
		phi = snap.values
	return clip_to_margin(phi, spec.clip_margin)

def perturbed(phi, grid:Grid, delta:float, margin:float) -> np.ndarray:
	""" phi + delta cos(pi x / lx), clipped back into the margin band. """
	x, _ = grid.centers()
	return clip_to_margin(phi + delta * np.cos(np.pi * x / grid.lx), margin)
