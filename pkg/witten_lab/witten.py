
import logging
import math

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.sparse as sp

from . complex import (
    coboundary_ranks, hodge_laplacian, normalized_coboundary
)
from . eigen import (
    LU_FILL_LIMIT, SpectrumTable, gap_count, operator_norm_estimate,
    smallest_eigs
)
from . errors import (
    InvalidArgumentError, KernelMismatchError, LabError, OverflowGuardError
)
from . morse import find_critical_points, morse_counts

logger = logging.getLogger(__name__)

# Largest admissible |f(b_tau) - f(b_sigma)| / t between adjacent simplices
OVERFLOW_GUARD = 30.0

# Localization width sqrt(t) should span this many mesh cells
MIN_WIDTH_CELLS = 20

# Witten-deformed coboundaries D_t^p = W_{p+1}^-1 d_p W_p, W_p the diagonal
# of exp(f(barycentre)/t).  Entries only involve local differences of f.
class WittenComplex:

    def __init__(self, complex, field, t, D):
        self.complex = complex
        self.field = field
        self.t = t
        self.D = D

    @property
    def dimension(self):
        return self.complex.dimension

def deform(complex, field, t):

    if not t > 0:
        raise InvalidArgumentError("t must be positive, got %s" % t)

    mesh = complex.mesh
    field.check_domain(mesh)

    fb = [field.value(mesh, complex.barycenters[p])
          for p in range(complex.dimension + 1)]

    D = []
    for p, d in enumerate(complex.d):

        d = d.tocoo()
        diff = fb[p][d.col] - fb[p + 1][d.row]
        ratio = np.abs(diff) / t

        if len(ratio) and ratio.max() > OVERFLOW_GUARD:
            j = int(ratio.argmax())
            raise OverflowGuardError(
                "local f difference / t = %.3g exceeds %g between %d-simplex %d "
                "and %d-simplex %d; refine the mesh or raise t" % (
                    ratio[j], OVERFLOW_GUARD, p, d.col[j], p + 1, d.row[j]
                ),
                ratio=float(ratio[j]), t=t, degree=p
            )

        D.append(sp.csr_matrix(
            (d.data * np.exp(diff / t), (d.row, d.col)), shape=d.shape
        ))

    return WittenComplex(complex, field, t, D)

def laplacian(wc, p):
    return hodge_laplacian(wc.complex, p, coboundaries=wc.D)

def complex_betti(complex):
    return complex.betti_numbers()

# Kernel dimension of the deformed Laplacian from its computed smallest
# eigenvalues.  Returns (count, method).  Surplus eigenvalues below the
# floating-point floor of the operator are accepted as tunnelling splittings
# only while the count stays within the Morse count C_p, the size of the
# small-eigenvalue cluster; the kernel dimension is then b_p by the
# conjugation D_t = e^(-f/t) d e^(f/t).
def kernel_count(wc, p, spectrum, b=None, C=None):

    if b is None:
        b = complex_betti(wc.complex)
    bp = b[p]

    values = spectrum.values
    count = gap_count(values)

    if count == bp:
        return count, "gap"

    if count > bp:
        A = laplacian(wc, p)
        floor = 64 * np.finfo(float).eps * operator_norm_estimate(A)
        surplus = values[bp:count]
        if np.all(np.abs(surplus) < floor):
            if C is None:
                C = _morse_counts(wc)
            if C is not None and count <= C[p]:
                logger.debug("Kernel of degree %d at t=%g: %d of C_p=%d "
                             "eigenvalues under the floor %.3g", p, wc.t,
                             count, C[p], floor)
                return bp, "conjugation"

    raise KernelMismatchError(
        "degree %d at t=%g: %d eigenvalues below the gap threshold, "
        "Betti number %d" % (p, wc.t, count, bp),
        degree=p, t=wc.t, count=count, betti=bp
    )

def _morse_counts(wc):
    try:
        return morse_counts(find_critical_points(wc.field, wc.complex.mesh))
    except LabError as e:
        logger.debug("No Morse count for %s: %s", wc.field.id, e)
        return None

# Number of eigenvalues with t*lambda <= threshold.  Takes a SpectrumTable
# or a row of t*lambda values.
def cluster_count(spectrum, threshold):
    if threshold <= 0:
        raise InvalidArgumentError("threshold must be positive")
    if isinstance(spectrum, SpectrumTable):
        values = spectrum.t_lambda
    else:
        values = np.asarray(spectrum, dtype=float)
    values = values[np.isfinite(values)]
    return int(np.count_nonzero(values <= threshold))

# Nonzero spectra of B^T B (degree p) and B B^T (degree p+1), B the
# normalized deformed coboundary, paired in order.  The kernels are skipped
# using the exact coboundary ranks.
def supersymmetry_pairs(wc, k, p=0, tol=1e-8, seed=0):

    cx = wc.complex
    b = complex_betti(cx)
    rank = coboundary_ranks(cx, b)[p]

    B = normalized_coboundary(cx, p, wc.D[p])
    lower = (B.T @ B).tocsr()
    upper = (B @ B.T).tocsr()

    out = []
    for M, n in ((lower, cx.dims[p]), (upper, cx.dims[p + 1])):
        kernel = n - rank
        if kernel + k >= n:
            raise InvalidArgumentError(
                "k=%d too large for degree pair (%d, %d)" % (k, p, p + 1)
            )
        tbl = smallest_eigs(M, kernel + k, tol=tol, seed=seed)
        out.append(tbl.values[kernel:])

    return np.column_stack(out)

def geometric_schedule(start, stop, n):
    if not (start > stop > 0) or n < 2:
        raise InvalidArgumentError(
            "geometric schedule needs start > stop > 0 and n >= 2"
        )
    return [float(v) for v in np.geomspace(start, stop, int(n))]

# "geom:a:b:n", "list:t1,t2,..." or a single number
def parse_schedule(text):

    text = str(text).strip()

    try:
        if text.startswith("geom:"):
            a, b, n = text[5:].split(":")
            sched = geometric_schedule(float(a), float(b), int(n))
        elif text.startswith("list:"):
            sched = [float(v) for v in text[5:].split(",") if v.strip()]
        elif text:
            sched = [float(text)]
        else:
            sched = []
    except ValueError:
        raise InvalidArgumentError("cannot parse schedule %r" % text)

    check_schedule(sched)
    return sched

def check_schedule(sched):
    if len(sched) == 0:
        raise InvalidArgumentError("empty t schedule")
    if any(not t > 0 for t in sched):
        raise InvalidArgumentError("schedule values must be positive")
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise InvalidArgumentError("schedule must be strictly decreasing")

def width_check(complex, t):
    h = complex.mesh.edge_lengths().max()
    cells = math.sqrt(t) / h
    if cells < MIN_WIDTH_CELLS:
        logger.warning(
            "t=%g: localization width spans %.1f mesh cells (< %d)",
            t, cells, MIN_WIDTH_CELLS
        )
    return cells

# One (t, p) solve
def solve_at(complex, field, t, p, k, tol=1e-8, seed=0, dense_limit=600,
             lu_fill_limit=LU_FILL_LIMIT, check_kernel=True):

    wc = deform(complex, field, t)
    A = laplacian(wc, p)
    tbl = smallest_eigs(A, k, tol=tol, seed=seed, dense_limit=dense_limit,
                        lu_fill_limit=lu_fill_limit, degree=p, t=t)

    kernel = None
    if check_kernel:
        kernel = kernel_count(wc, p, tbl)

    return tbl, kernel

# t * lambda_i^p(t) over a decreasing schedule, per degree
class FlowResult:

    def __init__(self, schedule, degrees=None, oracle=None, skipped=None,
                 kernel=None, residuals=None):
        self.schedule = [float(t) for t in schedule]
        self.degrees = degrees if degrees else {}
        self.oracle = oracle if oracle else {}
        self.skipped = skipped if skipped else []
        self.kernel = kernel if kernel else {}
        self.residuals = residuals if residuals else {}

    # Row of t*lambda at one schedule index, None when skipped
    def row(self, p, i):
        return self.degrees[p][i]

    def track(self, p, j):
        return [
            None if row is None else row[j]
            for row in self.degrees[p]
        ]

    def to_dict(self):
        return {
            "schedule": self.schedule,
            "degrees": {str(p): v for p, v in sorted(self.degrees.items())},
            "oracle": {str(p): v for p, v in sorted(self.oracle.items())},
            "kernel": {str(p): v for p, v in sorted(self.kernel.items())},
            "residuals": {
                str(p): v for p, v in sorted(self.residuals.items())
            },
            "skipped": self.skipped,
        }

    @staticmethod
    def from_dict(d):
        return FlowResult(
            d["schedule"],
            {int(p): v for p, v in d["degrees"].items()},
            {int(p): v for p, v in d.get("oracle", {}).items()},
            d.get("skipped", []),
            {int(p): v for p, v in d.get("kernel", {}).items()},
            {int(p): v for p, v in d.get("residuals", {}).items()},
        )

def spectral_flow(complex, field, t_schedule, p, k, tol=1e-8, seed=0,
                  workers=1, dense_limit=600, lu_fill_limit=LU_FILL_LIMIT,
                  check_kernel=True):

    check_schedule(t_schedule)
    complex.check_degree(p)

    if check_kernel:
        complex_betti(complex)

    def work(t):
        width_check(complex, t)
        try:
            return solve_at(complex, field, t, p, k, tol, seed, dense_limit,
                            lu_fill_limit, check_kernel)
        except KernelMismatchError:
            raise
        except LabError as e:
            return e

    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as pool:
        results = list(pool.map(work, t_schedule))

    rows = []
    kernel = []
    residuals = []
    skipped = []

    for t, res in zip(t_schedule, results):
        if isinstance(res, LabError):
            logger.warning("Skipped t=%g in degree %d: %s", t, p, res)
            skipped.append({
                "t": float(t), "degree": p, "code": res.code,
                "message": str(res)
            })
            rows.append(None)
            kernel.append(None)
            residuals.append(None)
            continue
        tbl, kc = res
        rows.append([float(v) for v in tbl.t_lambda])
        residuals.append(float(tbl.residuals.max()))
        kernel.append(None if kc is None else {"count": kc[0], "method": kc[1]})
        logger.info("t=%g degree %d: t*lambda %s", t, p,
                    np.round(tbl.t_lambda, 4).tolist())

    return FlowResult(t_schedule, {p: rows}, skipped=skipped,
                      kernel={p: kernel}, residuals={p: residuals})
