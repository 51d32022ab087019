""" Bits and bobs in support of showing tables of numbers to people and to spreadsheets. """
import csv
import sys

def cell_text(cell) -> str:
	if isinstance(cell, float): return "%.6g" % cell
	return str(cell)

def print_grid(grid, file=None):
	""" Box-drawn table; the first row is taken as the header. """
	file = file or sys.stdout
	lens = list(map(len, grid))
	assert len(set(lens)) == 1, lens
	grid = [[cell_text(cell) for cell in row] for row in grid]
	width = [max(map(len, column)) for column in zip(*grid)]
	horizontal = '─'
	vertical = ' │ '
	segments = [horizontal*w for w in width]
	print((horizontal + '┬' + horizontal).join(segments), file=file)
	for r, row in enumerate(grid):
		if r == 1: print((horizontal + '┼' + horizontal).join(segments), file=file)
		print(vertical.join(s.rjust(w, ' ') for s, w in zip(row, width)), file=file)
	print((horizontal + '┴' + horizontal).join(segments), file=file)

def write_csv_grid(path, grid, comments=()):
	"""
	Rows go out through csv.writer, floats in repr form so a reader gets the same bits back.
	`comments` become leading '# ' lines.
	"""
	with open(path, 'w', newline="") as fh:
		for line in comments: fh.write("# %s\n" % line)
		csv.writer(fh).writerows([repr(float(c)) if isinstance(c, float) else c for c in row] for row in grid)

def read_csv_grid(path):
	""" The inverse of write_csv_grid, minus the comments: a header row and a list of rows of strings. """
	with open(path, newline="") as fh:
		rows = list(csv.reader(line for line in fh if not line.startswith('#')))
	return rows[0], rows[1:]
