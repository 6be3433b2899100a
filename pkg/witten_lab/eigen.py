
import logging
import math

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . errors import InvalidArgumentError, SolverError

logger = logging.getLogger(__name__)

# Eigenvalues below this fraction of (1 + largest computed eigenvalue) count
# as zero
GAP_THRESHOLD = 1e-8

# Largest number of nonzeros in the sparse LU factors before the solver
# switches to LOBPCG
LU_FILL_LIMIT = 100_000_000

# Fill-reducing column ordering on the structure of A + A^T
ORDERING = "MMD_AT_PLUS_A"

# Shift of the preconditioner factorization, relative to ||A||_1
PRECONDITIONER_SHIFT = 1e-3

GUARD_VECTORS = 4
MAX_REFINE = 30

# Smallest eigenvalues of one operator, with their relative residuals
class SpectrumTable:

    def __init__(self, values, residuals, iterations=0, degree=None, t=None,
                 method="dense"):
        self.values = np.asarray(values, dtype=float)
        self.residuals = np.asarray(residuals, dtype=float)
        self.iterations = int(iterations)
        self.degree = degree
        self.t = t
        self.method = method

    def __len__(self):
        return len(self.values)

    @property
    def t_lambda(self):
        if self.t is None:
            return self.values.copy()
        return self.t * self.values

    @staticmethod
    def from_dict(d):
        return SpectrumTable(
            d["values"], d["residuals"], d.get("iterations", 0),
            d.get("degree"), d.get("t"), d.get("method", "dense")
        )

    def to_dict(self):
        return {
            "degree": self.degree,
            "t": self.t,
            "values": [float(v) for v in self.values],
            "residuals": [float(v) for v in self.residuals],
            "iterations": self.iterations,
            "method": self.method,
        }

    # Rows for the CSV table: degree, t, index, lambda, t*lambda, residual
    def rows(self):
        tl = self.t_lambda
        return [
            [self.degree, self.t, i, float(self.values[i]), float(tl[i]),
             float(self.residuals[i])]
            for i in range(len(self.values))
        ]

def gap_count(values, threshold=GAP_THRESHOLD):
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return 0
    cut = threshold * (1 + values.max())
    return int(np.count_nonzero(values < cut))

def operator_norm_estimate(A):
    if sp.issparse(A):
        return float(spla.norm(A, 1))
    return float(np.linalg.norm(np.asarray(A), 1))

# Counts operator applications made by an iterative solver
class CountingOperator:
    def __init__(self, shape, fn):
        self.calls = 0
        self.fn = fn
        self.op = spla.LinearOperator(shape, matvec=self.matvec,
                                      matmat=self.matmat, dtype=float)
    def matvec(self, x):
        self.calls += 1
        return self.fn(x)
    def matmat(self, X):
        self.calls += X.shape[1]
        return self.fn(X)

def _dense(A, k):
    M = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    M = (M + M.T) / 2
    w, V = scipy.linalg.eigh(M, subset_by_index=[0, k - 1])
    return w, V, 1

def _relative_residuals(A, w, V, norm):
    R = A @ V - V * w
    return np.linalg.norm(R, axis=0) / (np.linalg.norm(V, axis=0) * norm)

# Sparse LU of the shifted operator, symmetric ordering, no pivoting
def _factorize(C):
    return spla.splu(C, permc_spec=ORDERING, diag_pivot_thresh=0.0,
                     options={"SymmetricMode": True})

def _shift_invert(A, k, lu, shift, rng):

    # (A - sI)^-1 has the wanted eigenvalues as its largest ones
    op = CountingOperator(A.shape, lu.solve)
    v0 = rng.standard_normal(A.shape[0])

    try:
        mu, V = spla.eigsh(op.op, k=k, which="LM", tol=0, v0=v0,
                           maxiter=max(1000, 20 * k))
    except spla.ArpackNoConvergence as e:
        raise SolverError(
            "shift-invert iteration did not converge: %d of %d pairs" % (
                len(e.eigenvalues), k
            ),
            converged=len(e.eigenvalues), iterations=op.calls
        )

    return 1.0 / mu + shift, V, op.calls

# Incomplete LU of A + s I, s = PRECONDITIONER_SHIFT ||A||_1, or the
# diagonal of the same matrix when the factorization breaks down
def _preconditioner(A, norm):

    n = A.shape[0]
    P = (A + PRECONDITIONER_SHIFT * norm * sp.identity(n, format="csr")).tocsc()

    try:
        ilu = spla.spilu(P, drop_tol=1e-5, fill_factor=20,
                         permc_spec=ORDERING, diag_pivot_thresh=0.0,
                         options={"SymmetricMode": True})
        solve = ilu.solve
    except RuntimeError as e:
        logger.warning("Incomplete factorization failed (%s), using the "
                       "diagonal", e)
        d = P.diagonal()
        def solve(x):
            return (x.reshape(n, -1) / d[:, None]).reshape(x.shape)

    return spla.LinearOperator(A.shape, matvec=solve, matmat=solve,
                               dtype=float)

def _ritz(A, Q):
    H = Q.T @ (A @ Q)
    w, U = scipy.linalg.eigh((H + H.T) / 2)
    return w, Q @ U

# Block inverse iteration with Rayleigh-Ritz until the k leading pairs meet
# the residual contract.  (A - sI)^-1 is applied by preconditioned conjugate
# gradients, accurate to rtol relative.
def _refine(A, w, V, k, shift, M, tol, norm):

    n = A.shape[0]
    C = CountingOperator(A.shape, lambda x: A @ x - shift * x)
    rtol = max(1e-2 * tol, 1000 * math.sqrt(n) * np.finfo(float).eps)

    for step in range(MAX_REFINE):

        r = _relative_residuals(A, w[:k], V[:, :k], norm)
        if r.max() <= tol:
            break

        Y = np.empty_like(V)
        for j in range(V.shape[1]):
            Y[:, j], info = spla.cg(C.op, V[:, j], x0=V[:, j] / (w[j] - shift),
                                    rtol=rtol, atol=0.0, M=M)
            if info > 0:
                logger.debug("CG stopped after %d iterations, vector %d",
                             info, j)

        Q, _ = np.linalg.qr(Y)
        w, V = _ritz(A, Q)

        logger.debug("Refinement step %d: max residual %.3g", step,
                     r.max())

    return w, V, C.calls

def _lobpcg(A, k, shift, tol, rng, norm):

    n = A.shape[0]
    M = _preconditioner(A, norm)

    # k wanted vectors plus guard vectors
    m = max(k, min(k + max(GUARD_VECTORS, k), n // 5 - 1))

    op = CountingOperator(A.shape, lambda x: A @ x)
    X = rng.standard_normal((n, m))

    try:
        _, V = spla.lobpcg(op.op, X, M=M, largest=False, tol=tol * norm,
                           maxiter=500)
    except np.linalg.LinAlgError as e:
        logger.warning("LOBPCG broke down (%s), refining the start block", e)
        V = X

    w, V = _ritz(A, np.linalg.qr(np.asarray(V))[0])

    w, V, calls = _refine(A, w, V, k, shift, M, tol, norm)

    return w[:k], V[:, :k], op.calls + calls

# The k smallest eigenvalues of a symmetric PSD operator, certified by
# relative residual ||Av - lv|| / ||A||_1 <= tol.  Small operators are solved
# densely, large ones by shift-invert Lanczos around a small negative shift,
# or preconditioned LOBPCG refined by inverse iteration when the LU fill is
# over budget.
def smallest_eigs(A, k, tol=1e-8, seed=0, dense_limit=600,
                  lu_fill_limit=LU_FILL_LIMIT, degree=None, t=None):

    n = A.shape[0]
    if A.shape != (n, n):
        raise InvalidArgumentError("operator is not square: %s" % (A.shape,))
    if k < 1 or k >= n:
        raise InvalidArgumentError(
            "k must satisfy 1 <= k < dimension %d, got %s" % (n, k)
        )

    norm = operator_norm_estimate(A)
    rng = np.random.default_rng(seed)

    if norm == 0:
        return SpectrumTable(np.zeros(k), np.zeros(k), 0, degree, t, "dense")

    if n <= dense_limit:
        w, V, its = _dense(A, k)
        method = "dense"
    else:
        A = sp.csr_matrix(A)
        shift = -1e-6 * norm
        C = (A - shift * sp.identity(n, format="csr")).tocsc()
        lu = None
        fill = None
        try:
            lu = _factorize(C)
            fill = lu.L.nnz + lu.U.nnz
        except (RuntimeError, MemoryError) as e:
            logger.warning("LU factorization failed (%s), using LOBPCG", e)
        if lu is not None and fill <= lu_fill_limit:
            w, V, its = _shift_invert(A, k, lu, shift, rng)
            method = "shift-invert"
        else:
            if fill is not None:
                logger.info("LU fill %d over limit, using LOBPCG", fill)
            lu = None
            w, V, its = _lobpcg(A, k, shift, tol, rng, norm)
            method = "lobpcg"

    order = np.argsort(w)
    w = np.asarray(w)[order]
    V = np.asarray(V)[:, order]

    residuals = _relative_residuals(A, w, V, norm)

    if residuals.max() > tol:
        raise SolverError(
            "residual %.3g exceeds tolerance %.3g" % (residuals.max(), tol),
            residuals=[float(r) for r in residuals], iterations=its,
            method=method
        )

    logger.debug("%s solve n=%d k=%d: %d applications, max residual %.2g",
                 method, n, k, its, residuals.max())

    return SpectrumTable(w, residuals, its, degree, t, method)

# Dimension of the kernel by the gap threshold, growing k until the count
# no longer fills the window
def kernel_dimension(A, tol=1e-8, seed=0, dense_limit=600, window=8):

    n = A.shape[0]

    if n <= dense_limit:
        M = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
        w = scipy.linalg.eigvalsh((M + M.T) / 2)
        k = min(window, n)
        while gap_count(w[:k]) == k and k < n:
            k = min(2 * k, n)
        return gap_count(w[:k])

    k = min(window, n - 1)
    while True:
        tbl = smallest_eigs(A, k, tol=tol, seed=seed, dense_limit=dense_limit)
        count = gap_count(tbl.values)
        if count < k or k == n - 1:
            return count
        k = min(2 * k, n - 1)
