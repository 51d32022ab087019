"""
Poisson problems on the MAC grid.

Two problems matter. The pressure solves -Lap q = f with q = 0 on the boundary; the
discrete operator is symmetric positive definite, so conjugate gradients applies as-is.
The chemical-potential reconstruction solves -Lap mu = f with a prescribed outward
normal derivative; that operator is only semi-definite, its kernel being the constants.
Rather than pin a point value (which breaks symmetry), the Neumann solve works on the
mean-zero subspace: the right-hand side is projected, CG runs on the projected operator,
and the result is shifted to whatever mean the caller asks for. The solvability
condition (integral of f plus boundary integral of g vanishes) is checked first,
because no amount of iteration fixes incompatible data.

Small grids may use a sparse direct factorization instead. It is computed once per
solver and reused, which is what makes the pressure solve cheap inside a time loop.
"""
import logging
from functools import cached_property
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg, splu, LinearOperator

from ..interface import CompatibilityError, ConvergenceError
from .grid import Grid, VectorField, EdgeValues, BoundaryCondition, DIRICHLET_ZERO, NEUMANN_ZERO

log = logging.getLogger(__name__)

DIRECT_LIMIT = 64 * 64
METHODS = ('auto', 'cg', 'direct')

class EllipticOptions(NamedTuple):
	tol: float = 1e-10
	max_iter: int = 0  # Zero means 20 * (nx + ny).
	method: str = 'auto'

	def validate(self, grid:Grid=None):
		if not 0 < self.tol <= 1e-4: raise ValueError("elliptic tolerance must lie in (0, 1e-4], got %r" % self.tol)
		if self.max_iter < 0: raise ValueError("elliptic max_iter must be non-negative, got %r" % self.max_iter)
		if self.method not in METHODS: raise ValueError("elliptic method must be one of %s, got %r" % (", ".join(METHODS), self.method))
		if grid is not None and self.method == 'direct' and grid.size > DIRECT_LIMIT:
			raise ValueError("direct elliptic method is limited to %d cells; grid has %d" % (DIRECT_LIMIT, grid.size))
		return self

class Solved(NamedTuple):
	field: np.ndarray
	iterations: int
	residual: float  # Relative residual of the linear system actually solved.


class EllipticSolver:
	""" Owns the assembled operators (and factorizations) for one grid. Reentrant: solves share nothing mutable. """
	def __init__(self, grid:Grid, options:EllipticOptions=EllipticOptions()):
		self.grid, self.options = grid, options.validate(grid)
		self.method = options.method
		if self.method == 'auto': self.method = 'direct' if grid.size <= DIRECT_LIMIT else 'cg'
		self.max_iter = options.max_iter or 20 * (grid.nx + grid.ny)

	@cached_property
	def _dirichlet(self) -> sp.csr_matrix: return (-self.grid.laplacian_matrix(DIRICHLET_ZERO)).tocsr()

	@cached_property
	def _neumann(self) -> sp.csr_matrix: return (-self.grid.laplacian_matrix(NEUMANN_ZERO)).tocsr()

	@cached_property
	def _dirichlet_lu(self): return splu(self._dirichlet.tocsc())

	@cached_property
	def _bordered_lu(self):
		""" [[A, 1], [1^T, 0]]: nonsingular, and its solutions have zero sum. """
		n = self.grid.size
		ones = sp.csr_matrix(np.ones((n, 1)))
		bordered = sp.bmat([[self._neumann, ones], [ones.T, None]], format='csc')
		return splu(bordered)

	def _cg(self, operator, rhs, what) -> tuple[np.ndarray, int]:
		count = [0]
		def tally(_): count[0] += 1
		x, info = cg(operator, rhs, rtol=self.options.tol, atol=0.0, maxiter=self.max_iter, callback=tally)
		if info != 0:
			residual = float(np.linalg.norm(rhs - operator @ x) / np.linalg.norm(rhs))
			raise ConvergenceError(what, count[0], residual)
		return x, count[0]

	def solve_dirichlet(self, f) -> Solved:
		""" -Lap q = f, q = 0 on the boundary (ghost value = -interior). """
		b = self.grid.check(f, "Dirichlet right-hand side").ravel()
		norm_b = float(np.linalg.norm(b))
		if norm_b == 0: return Solved(self.grid.zeros(), 0, 0.0)
		if self.method == 'direct':
			x, iterations = self._dirichlet_lu.solve(b), 0
		else:
			x, iterations = self._cg(self._dirichlet, b, "Dirichlet CG")
		residual = float(np.linalg.norm(b - self._dirichlet @ x)) / norm_b
		log.debug("Dirichlet solve: %d iterations, relative residual %.2e", iterations, residual)
		return Solved(x.reshape(self.grid.shape), iterations, residual)

	def solve_neumann(self, f, g:EdgeValues=None, target_mean:float=0.0) -> Solved:
		""" -Lap mu = f with outward normal derivative g, on the mean-zero subspace, then shifted to target_mean. """
		grid = self.grid
		f = grid.check(f, "Neumann right-hand side")
		if g is None: g = grid.zero_edges()
		defect = grid.integral(f) + grid.edge_integral(g)
		g_norm = float(np.sqrt(grid.edge_integral(g * g)))
		allowance = 1e-8 * (grid.norm_l2(f) + g_norm + 1.0)
		if abs(defect) > allowance: raise CompatibilityError(defect, allowance)
		b = (f + grid.flux_source(g)).ravel()
		b = b - b.mean()
		norm_b = float(np.linalg.norm(b))
		if norm_b == 0:
			x, iterations = np.zeros(grid.size), 0
		elif self.method == 'direct':
			x, iterations = self._bordered_lu.solve(np.append(b, 0.0))[:-1], 0
		else:
			A = self._neumann
			def projected(v):
				v = v - v.mean()
				w = A @ v
				return w - w.mean()
			operator = LinearOperator(A.shape, matvec=projected, dtype=float)
			x, iterations = self._cg(operator, b, "Neumann CG")
		x = x - x.mean()
		residual = float(np.linalg.norm(b - self._neumann @ x)) / norm_b if norm_b else 0.0
		log.debug("Neumann solve: %d iterations, relative residual %.2e", iterations, residual)
		return Solved(x.reshape(grid.shape) + target_mean, iterations, residual)


def pressure_rhs(grid:Grid, source_values, phi, mu, mu_bc:BoundaryCondition) -> np.ndarray:
	""" S + div(face_interp(phi) grad mu): the pressure equation's right-hand side. """
	return source_values + grid.div(grid.grad(mu, mu_bc).scaled(grid.face_interp(phi)))

def darcy_update(grid:Grid, q, phi, mu, mu_bc:BoundaryCondition) -> VectorField:
	"""
	u = -grad q - face_interp(phi) grad mu. Uses the same interpolant and the same boundary
	data for grad mu as pressure_rhs, so div u reproduces the source to solver tolerance.
	"""
	return -grid.grad(q, DIRICHLET_ZERO) - grid.grad(mu, mu_bc).scaled(grid.face_interp(phi))
