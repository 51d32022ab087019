""" Small is beautiful. These fits need no introduction. """
import numpy as np

def parse_span(text:str) -> np.ndarray:
	""" "start:stop:count" -> count evenly spaced values, both ends included. A bare number is a span of one. """
	parts = text.split(':')
	if len(parts) == 1: return np.array([float(parts[0])])
	if len(parts) != 3: raise ValueError("expected start:stop:count, got %r" % text)
	count = int(parts[2])
	if count < 1: raise ValueError("span count must be positive, got %r" % text)
	return np.linspace(float(parts[0]), float(parts[1]), count)

def observed_order(steps, errors) -> float:
	""" Least-squares slope of log(error) against log(step). """
	return float(np.polyfit(np.log(steps), np.log(errors), 1)[0])

def pairwise_orders(steps, errors) -> list:
	""" Orders between consecutive levels; the first level has none. """
	return [None] + [float(np.log(errors[i-1] / errors[i]) / np.log(steps[i-1] / steps[i])) for i in range(1, len(steps))]

def exponential_rate(t, y) -> tuple[float, float]:
	"""
	Fit log y = a + rate * t over the samples with y > 0. Returns (rate, exp(a)).
	With fewer than two positive samples there is nothing to fit: (nan, nan).
	"""
	t, y = np.asarray(t, dtype=float), np.asarray(y, dtype=float)
	keep = y > 0
	if np.count_nonzero(keep) < 2: return float('nan'), float('nan')
	rate, intercept = np.polyfit(t[keep], np.log(y[keep]), 1)
	return float(rate), float(np.exp(intercept))
