
import itertools
import logging
import math

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . errors import (
    DegenerateModelError, InvalidArgumentError, UnsupportedDimensionError
)

logger = logging.getLogger(__name__)

modes = ["standard", "paper"]

# Values closer than this (relative) are one eigenvalue with multiplicity
MERGE_TOL = 1e-12

# The model operator at one critical point: Hessian eigenvalues xi (sorted),
# acting on p-forms over R^n.
class OscillatorModel:

    def __init__(self, xi, p):
        self.xi = np.sort(np.asarray(xi, dtype=float).reshape(-1))
        self.p = int(p)
        if not 0 <= self.p <= self.dimension:
            raise InvalidArgumentError(
                "degree %d outside 0..%d" % (self.p, self.dimension)
            )

    @property
    def dimension(self):
        return len(self.xi)

    @property
    def index(self):
        return int(np.count_nonzero(self.xi < 0))

    def check(self):
        if np.any(self.xi == 0):
            raise DegenerateModelError(
                "zero Hessian eigenvalue in %s" % self.xi.tolist()
            )

    def to_dict(self):
        return {"xi": [float(v) for v in self.xi], "p": self.p,
                "index": self.index}

# Sorted (value, multiplicity) entries up to a cutoff
class ModelSpectrum:

    def __init__(self, entries, mode="standard", cutoff=None,
                 provenance="closed-form", errors=None):
        self.entries = [(float(v), int(m)) for v, m in entries]
        self.mode = mode
        self.cutoff = cutoff
        self.provenance = provenance
        self.errors = errors

    def __len__(self):
        return sum(m for v, m in self.entries)

    # Eigenvalues repeated by multiplicity
    def values(self):
        return [v for v, m in self.entries for i in range(m)]

    def multiplicity(self, value, tol=1e-9):
        return sum(m for v, m in self.entries if abs(v - value) <= tol)

    def first(self, k):
        return np.array(self.values()[:k])

    def scaled(self, c):
        return ModelSpectrum([(c * v, m) for v, m in self.entries], self.mode,
                             self.cutoff, self.provenance)

    def to_dict(self):
        d = {
            "mode": self.mode,
            "entries": [[v, m] for v, m in self.entries],
            "cutoff": self.cutoff,
            "provenance": self.provenance,
        }
        if self.errors is not None:
            d["errors"] = [float(e) for e in self.errors]
        return d

    @staticmethod
    def from_dict(d):
        return ModelSpectrum(d["entries"], d["mode"], d.get("cutoff"),
                             d.get("provenance", "closed-form"),
                             d.get("errors"))

def merge_values(values):
    values = sorted(values)
    entries = []
    for v in values:
        if entries and abs(v - entries[-1][0]) <= MERGE_TOL * max(1.0, abs(v)):
            entries[-1][1] += 1
        else:
            entries.append([v, 1])
    return [(v, m) for v, m in entries]

def merge_spectra(spectra, mode, cutoff):
    values = []
    for s in spectra:
        values.extend(s.values())
    return ModelSpectrum(merge_values(values), mode, cutoff)

# Closed-form spectrum of the model operator in degree p.
#
#   standard: sum_j |xi_j|(1 + 2 a_j) + sum_{j in J} xi_j - sum_{j not in J} xi_j
#   paper:    sum_{j in J, xi_j > 0} xi_j - sum_{j not in J, xi_j < 0} xi_j
#             + sum_j a_j |xi_j|
#
# over |J| = p and multi-indices a.  The second is exactly half the first.
def oscillator_spectrum(model, cutoff, mode="standard"):

    if not cutoff > 0:
        raise InvalidArgumentError("cutoff must be positive, got %s" % cutoff)
    if mode not in modes:
        raise InvalidArgumentError("unknown oracle mode %s" % mode)

    model.check()

    xi = model.xi
    n = model.dimension
    absxi = np.abs(xi)
    step = 2 * absxi if mode == "standard" else absxi
    limit = cutoff * (1 + MERGE_TOL)

    values = []

    for J in itertools.combinations(range(n), model.p):
        inJ = np.zeros(n, dtype=bool)
        inJ[list(J)] = True
        if mode == "standard":
            base = absxi.sum() + xi[inJ].sum() - xi[~inJ].sum()
        else:
            base = xi[inJ & (xi > 0)].sum() - xi[~inJ & (xi < 0)].sum()
        if base > limit:
            continue
        ranges = [range(int(math.floor((cutoff - base) / s + 1e-9)) + 1)
                  for s in step]
        for alpha in itertools.product(*ranges):
            v = base + float(np.dot(alpha, step))
            if v <= limit:
                values.append(v)

    return ModelSpectrum(merge_values(values), mode, cutoff)

def default_box(xi):
    return 8.0 / math.sqrt(np.abs(xi).min())

# Dirichlet levels of -d^2/dx^2 + xi^2 x^2 on [-R, R], m interior points
def _box_levels(xi, R, m, count):
    h = 2 * R / (m + 1)
    x = -R + h * np.arange(1, m + 1)
    diag = 2 / h ** 2 + xi ** 2 * x ** 2
    off = np.full(m - 1, -1 / h ** 2)
    e = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1),
                         eigvals_only=True)
    return e, h

# Lowest levels of the model operator by direct diagonalization on a box,
# Richardson-extrapolated from m and 2m interior points per axis.  The
# errors attribute holds |fine - extrapolated| per eigenvalue.
def brute_force_oscillator(model, R=None, m=400, count=10):

    n = model.dimension
    if n > 2:
        raise UnsupportedDimensionError(
            "brute-force oscillator supports n <= 2, got %d" % n
        )

    model.check()

    xi = model.xi
    if R is None:
        R = default_box(xi)
    if R < 6.0 / math.sqrt(np.abs(xi).min()):
        raise InvalidArgumentError("box half-width %g too small" % R)
    if m < 200:
        raise InvalidArgumentError("need m >= 200 grid points, got %d" % m)

    per_axis = count + 2

    # Richardson in h^2, axis by axis
    levels = []
    fine_levels = []
    for x in xi:
        e1, h1 = _box_levels(x, R, m, per_axis)
        e2, h2 = _box_levels(x, R, 2 * m, per_axis)
        levels.append((h1 ** 2 * e2 - h2 ** 2 * e1) / (h1 ** 2 - h2 ** 2))
        fine_levels.append(e2)

    def sums(axes):
        out = axes[0]
        for a in axes[1:]:
            out = (out[:, None] + a[None, :]).ravel()
        return out

    extrap = []
    fine = []
    for J in itertools.combinations(range(n), model.p):
        inJ = np.zeros(n, dtype=bool)
        inJ[list(J)] = True
        const = xi[inJ].sum() - xi[~inJ].sum()
        extrap.append(sums(levels) + const)
        fine.append(sums(fine_levels) + const)

    extrap = np.concatenate(extrap)
    fine = np.concatenate(fine)
    order = np.argsort(extrap)[:count]

    values = extrap[order]
    errors = np.abs(fine[order] - values)

    logger.debug("Brute force xi=%s p=%d: %s", xi.tolist(), model.p,
                 np.round(values, 6).tolist())

    return ModelSpectrum([(v, 1) for v in values], "standard", None,
                         "brute-force", errors)

def model_from_critical_point(cp, p):
    return OscillatorModel(cp.xi, p)

# Hodge dual model: xi -> -xi (re-sorted), p -> n - p
def degree_dual_model(model):
    return OscillatorModel(-model.xi[::-1], model.dimension - model.p)

# Union over critical points of their degree-p oscillator spectra
def aggregate_limit_spectrum(morse_data, p, cutoff, mode="standard"):
    spectra = [
        oscillator_spectrum(model_from_critical_point(cp, p), cutoff, mode)
        for cp in morse_data.points
        if p <= cp.dimension
    ]
    return merge_spectra(spectra, mode, cutoff)

# Multiplicity of the zero eigenvalue per degree; equals the Morse counts
def zero_mode_counts(morse_data, mode="standard"):
    counts = []
    for p in range(morse_data.dimension + 1):
        spec = aggregate_limit_spectrum(morse_data, p, 1e-9, mode) \
            if len(morse_data) else ModelSpectrum([], mode)
        counts.append(spec.multiplicity(0.0))
    return counts

class MorseReport:

    def __init__(self, C, b, slacks):
        self.C = list(C)
        self.b = list(b)
        self.slacks = list(slacks)

    @property
    def passed(self):
        return all(s >= 0 for s in self.slacks)

    @property
    def euler_equality(self):
        return len(self.slacks) > 0 and self.slacks[-1] == 0

    def to_dict(self):
        return {
            "C": self.C,
            "b": self.b,
            "slacks": self.slacks,
            "pass": self.passed,
            "euler_equality": self.euler_equality,
        }

# slack_k = sum_{i<=k} (-1)^(k-i) (C_i - b_i)
def morse_inequalities_check(C, b):

    if len(C) != len(b):
        raise InvalidArgumentError(
            "Morse counts and Betti numbers differ in length: %d, %d" % (
                len(C), len(b)
            )
        )

    slacks = []
    for k in range(len(C)):
        slacks.append(sum(
            (-1) ** (k - i) * (C[i] - b[i]) for i in range(k + 1)
        ))

    return MorseReport(C, b, slacks)
