"""
Discrete geometry and calculus on a uniform marker-and-cell (MAC) grid over a rectangle.

Scalars live at cell centers, vector components on the faces normal to them:

* a scalar field is a float64 array of shape (ny, nx), row-major, j outer and i inner,
  with cell (i, j) centered at ((i+1/2) hx, (j+1/2) hy);
* a vector field is a VectorField(x, y) with x-components on the (nx+1) x ny vertical
  faces (shape (ny, nx+1)) and y-components on the nx x (ny+1) horizontal faces
  (shape (ny+1, nx)).

With this arrangement the gradient (centers to faces) and the divergence (faces to
centers) are negative adjoints of one another, so the Laplacian built from them is
symmetric and the divergence theorem holds exactly: the sum of div(v) over the cells is
the net outward flux through the boundary faces. Most of what the rest of the package
calls "exact" rests on those two facts.

Boundary conditions enter only through the boundary faces of a gradient:

* NEUMANN_ZERO: the boundary-face gradient is zero.
* DIRICHLET_ZERO: a ghost cell holds the negated interior value, so the boundary value
  is zero to second order and the face gradient is 2 (f_b - f_cell)/h with f_b = 0.
* an EdgeValues instance: the outward normal derivative is prescribed on each edge.

Face quadrature gives boundary faces half the cell area, which makes summation by parts
exact for Dirichlet data as well as for zero-flux data.

Reductions go through numpy's pairwise summation in a fixed memory order, so results do
not depend on how many threads anything else uses.
"""
from functools import cached_property
from typing import NamedTuple, Union

import numpy as np
import scipy.sparse as sp

NEUMANN_ZERO = 'neumann_zero'
DIRICHLET_ZERO = 'dirichlet_zero'


class VectorField(NamedTuple):
	x: np.ndarray  # (ny, nx+1)
	y: np.ndarray  # (ny+1, nx)

	def __add__(self, other): return VectorField(self.x + other.x, self.y + other.y)
	def __sub__(self, other): return VectorField(self.x - other.x, self.y - other.y)
	def __neg__(self): return VectorField(-self.x, -self.y)

	def scaled(self, faces:"VectorField") -> "VectorField":
		""" Face-wise product with another face-shaped field, e.g. an interpolated scalar. """
		return VectorField(self.x * faces.x, self.y * faces.y)


class EdgeValues(NamedTuple):
	"""
	One number per boundary face, grouped by edge. Used both for prescribed outward normal
	derivatives and for traces of cell fields along the boundary.
	west/east have length ny (ordered by j); south/north have length nx (ordered by i).
	"""
	west: np.ndarray
	east: np.ndarray
	south: np.ndarray
	north: np.ndarray

	def __mul__(self, other:"EdgeValues") -> "EdgeValues":
		return EdgeValues(*(a * b for a, b in zip(self, other)))

	def __add__(self, other:"EdgeValues") -> "EdgeValues":
		return EdgeValues(*(a + b for a, b in zip(self, other)))

	def __neg__(self): return EdgeValues(*(-a for a in self))

	def max_abs(self) -> float: return max(float(np.max(np.abs(a))) for a in self)

BoundaryCondition = Union[str, EdgeValues]


class Grid:
	""" A uniform nx by ny cell layout over [0, lx] x [0, ly]. Immutable; operators are cached. """
	def __init__(self, nx:int, ny:int, lx:float=1.0, ly:float=1.0):
		if nx < 4 or ny < 4: raise ValueError("grid needs at least 4 cells each way, got %d x %d" % (nx, ny))
		if not (lx > 0 and ly > 0): raise ValueError("domain sides must be positive, got %r x %r" % (lx, ly))
		self.nx, self.ny, self.lx, self.ly = int(nx), int(ny), float(lx), float(ly)
		self.hx, self.hy = self.lx / self.nx, self.ly / self.ny

	def __eq__(self, other):
		return isinstance(other, Grid) and self.key() == other.key()
	def __hash__(self): return hash(self.key())
	def __repr__(self): return "Grid(%d, %d, %r, %r)" % self.key()
	def key(self): return (self.nx, self.ny, self.lx, self.ly)

	@property
	def shape(self): return (self.ny, self.nx)
	@property
	def size(self): return self.nx * self.ny
	@property
	def area(self): return self.lx * self.ly
	@property
	def cell_area(self): return self.hx * self.hy

	# Coordinates and allocation.

	def centers(self):
		x = (np.arange(self.nx) + 0.5) * self.hx
		y = (np.arange(self.ny) + 0.5) * self.hy
		return np.meshgrid(x, y)

	def x_faces(self):
		return np.meshgrid(np.arange(self.nx + 1) * self.hx, (np.arange(self.ny) + 0.5) * self.hy)

	def y_faces(self):
		return np.meshgrid((np.arange(self.nx) + 0.5) * self.hx, np.arange(self.ny + 1) * self.hy)

	def zeros(self): return np.zeros(self.shape)
	def zero_vector(self): return VectorField(np.zeros((self.ny, self.nx + 1)), np.zeros((self.ny + 1, self.nx)))
	def zero_edges(self): return EdgeValues(np.zeros(self.ny), np.zeros(self.ny), np.zeros(self.nx), np.zeros(self.nx))

	def check(self, f, what="field"):
		f = np.asarray(f, dtype=float)
		if f.shape != self.shape: raise ValueError("%s has shape %r; grid wants %r" % (what, f.shape, self.shape))
		return f

	# Stencils.

	def grad(self, f, bc:BoundaryCondition=NEUMANN_ZERO) -> VectorField:
		f = self.check(f)
		gx = np.empty((self.ny, self.nx + 1))
		gy = np.empty((self.ny + 1, self.nx))
		gx[:, 1:-1] = (f[:, 1:] - f[:, :-1]) / self.hx
		gy[1:-1, :] = (f[1:, :] - f[:-1, :]) / self.hy
		if isinstance(bc, EdgeValues):
			# Outward normals point in -x, +x, -y, +y on west, east, south, north.
			gx[:, 0], gx[:, -1] = -bc.west, bc.east
			gy[0, :], gy[-1, :] = -bc.south, bc.north
		elif bc == NEUMANN_ZERO:
			gx[:, 0] = gx[:, -1] = 0.0
			gy[0, :] = gy[-1, :] = 0.0
		elif bc == DIRICHLET_ZERO:
			gx[:, 0], gx[:, -1] = 2 * f[:, 0] / self.hx, -2 * f[:, -1] / self.hx
			gy[0, :], gy[-1, :] = 2 * f[0, :] / self.hy, -2 * f[-1, :] / self.hy
		else:
			raise ValueError("unknown boundary condition %r" % (bc,))
		return VectorField(gx, gy)

	def div(self, v:VectorField):
		return (v.x[:, 1:] - v.x[:, :-1]) / self.hx + (v.y[1:, :] - v.y[:-1, :]) / self.hy

	def laplacian(self, f, bc:BoundaryCondition=NEUMANN_ZERO):
		return self.div(self.grad(f, bc))

	def face_interp(self, f) -> VectorField:
		""" Mean of the two neighbours on interior faces; copy of the adjacent cell on boundary faces. """
		f = self.check(f)
		fx = np.empty((self.ny, self.nx + 1))
		fy = np.empty((self.ny + 1, self.nx))
		fx[:, 1:-1] = 0.5 * (f[:, 1:] + f[:, :-1])
		fx[:, 0], fx[:, -1] = f[:, 0], f[:, -1]
		fy[1:-1, :] = 0.5 * (f[1:, :] + f[:-1, :])
		fy[0, :], fy[-1, :] = f[0, :], f[-1, :]
		return VectorField(fx, fy)

	def to_centers(self, v:VectorField):
		""" Average face components onto cell centers: returns the (x, y) component arrays. """
		return 0.5 * (v.x[:, 1:] + v.x[:, :-1]), 0.5 * (v.y[1:, :] + v.y[:-1, :])

	def flux_source(self, g:EdgeValues):
		"""
		The cell field a prescribed outward normal derivative adds to the zero-flux Laplacian:
		laplacian(f, g) == laplacian(f, NEUMANN_ZERO) + flux_source(g).
		"""
		s = self.zeros()
		s[:, 0] += g.west / self.hx
		s[:, -1] += g.east / self.hx
		s[0, :] += g.south / self.hy
		s[-1, :] += g.north / self.hy
		return s

	# Boundary bookkeeping.

	def trace(self, f) -> EdgeValues:
		""" Cell values adjacent to each boundary face; the same one-sided copy face_interp uses. """
		f = self.check(f)
		return EdgeValues(f[:, 0].copy(), f[:, -1].copy(), f[0, :].copy(), f[-1, :].copy())

	def outward(self, v:VectorField) -> EdgeValues:
		""" The outward normal component of a face field on the boundary faces. """
		return EdgeValues(-v.x[:, 0], v.x[:, -1].copy(), -v.y[0, :], v.y[-1, :].copy())

	def edge_integral(self, e:EdgeValues) -> float:
		return float(self.hy * (np.sum(e.west) + np.sum(e.east)) + self.hx * (np.sum(e.south) + np.sum(e.north)))

	def net_flux(self, v:VectorField) -> float:
		return self.edge_integral(self.outward(v))

	# Quadrature.

	def inner(self, f, g) -> float: return float(np.sum(f * g) * self.cell_area)
	def norm_l2(self, f) -> float: return float(np.sqrt(np.sum(f * f) * self.cell_area))
	def integral(self, f) -> float: return float(np.sum(f) * self.cell_area)
	def mean(self, f) -> float: return float(np.sum(f) * self.cell_area / self.area)

	@cached_property
	def face_weights(self) -> VectorField:
		wx = np.full((self.ny, self.nx + 1), self.cell_area)
		wx[:, 0] = wx[:, -1] = 0.5 * self.cell_area
		wy = np.full((self.ny + 1, self.nx), self.cell_area)
		wy[0, :] = wy[-1, :] = 0.5 * self.cell_area
		return VectorField(wx, wy)

	def inner_faces(self, v:VectorField, w:VectorField) -> float:
		k = self.face_weights
		return float(np.sum(v.x * w.x * k.x) + np.sum(v.y * w.y * k.y))

	def norm_l2_faces(self, v:VectorField) -> float:
		return float(np.sqrt(self.inner_faces(v, v)))

	# Assembled operators, flattened row-major to match f.ravel().

	def laplacian_matrix(self, bc:str=NEUMANN_ZERO) -> sp.csr_matrix:
		if bc == NEUMANN_ZERO: return self._neumann_matrix
		if bc == DIRICHLET_ZERO: return self._dirichlet_matrix
		raise ValueError("no assembled Laplacian for boundary condition %r" % (bc,))

	@cached_property
	def _neumann_matrix(self): return self.__assemble(-1.0)

	@cached_property
	def _dirichlet_matrix(self): return self.__assemble(-3.0)

	def __assemble(self, corner:float) -> sp.csr_matrix:
		def second_difference(n, h):
			main = np.full(n, -2.0)
			main[0] = main[-1] = corner
			off = np.ones(n - 1)
			return sp.diags([off, main, off], [-1, 0, 1]) / (h * h)
		lx = second_difference(self.nx, self.hx)
		ly = second_difference(self.ny, self.hy)
		return (sp.kron(sp.identity(self.ny), lx) + sp.kron(ly, sp.identity(self.nx))).tocsr()
