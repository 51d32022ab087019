"""
CHDFIELD v1 snapshots: one text header line

	CHDFIELD v1 <name> <nx> <ny> <lx> <ly> <t>

followed by nx*ny little-endian float64 values in row-major order (j outer, i inner).
Floats in the header are written with repr(), so a snapshot read back reproduces the
grid and time exactly.
"""
from typing import NamedTuple

import numpy as np

from .grid import Grid

MAGIC = b'CHDFIELD'
VERSION = b'v1'

class Snapshot(NamedTuple):
	name: str
	grid: Grid
	t: float
	values: np.ndarray


def encode(name:str, values, grid:Grid, t:float) -> bytes:
	if not name or any(c.isspace() for c in name): raise ValueError("snapshot name must be a single word, got %r" % name)
	values = grid.check(values, name)
	header = "CHDFIELD v1 %s %d %d %r %r %r\n" % (name, grid.nx, grid.ny, grid.lx, grid.ly, float(t))
	return header.encode('ascii') + values.astype('<f8').tobytes(order='C')

def decode(blob:bytes, origin:str="snapshot") -> Snapshot:
	newline = blob.find(b'\n')
	if newline < 0: raise ValueError("%s: missing header line" % origin)
	words = blob[:newline].split()
	if len(words) != 8 or words[0] != MAGIC or words[1] != VERSION:
		raise ValueError("%s: not a CHDFIELD v1 header: %r" % (origin, blob[:min(newline, 80)]))
	name = words[2].decode('ascii')
	nx, ny = int(words[3]), int(words[4])
	lx, ly, t = float(words[5]), float(words[6]), float(words[7])
	payload = blob[newline + 1:]
	if len(payload) != 8 * nx * ny:
		raise ValueError("%s: expected %d bytes of data, found %d" % (origin, 8 * nx * ny, len(payload)))
	values = np.frombuffer(payload, dtype='<f8').astype(float).reshape(ny, nx)
	return Snapshot(name, Grid(nx, ny, lx, ly), t, values)

def write_snapshot(path, name:str, values, grid:Grid, t:float):
	with open(path, 'wb') as fh: fh.write(encode(name, values, grid, t))

def read_snapshot(path) -> Snapshot:
	with open(path, 'rb') as fh: return decode(fh.read(), origin=str(path))
