
import math

import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from witten_lab.complex import build_complex, hodge_laplacian
from witten_lab.eigen import (
    SpectrumTable, gap_count, kernel_dimension, operator_norm_estimate,
    smallest_eigs
)
from witten_lab.errors import InvalidArgumentError, SolverError
from witten_lab.mesh import build_circle, build_flat_torus

def circle_values(n, k):
    h = 2 * math.pi / n
    v = [(2 - 2 * math.cos(2 * math.pi * j / n)) / h ** 2 for j in range(n)]
    return np.sort(v)[:k]

def test_dense_circle():

    A = hodge_laplacian(build_complex(build_circle(64)), 0)
    tbl = smallest_eigs(A, 5)

    assert(tbl.method == "dense")
    assert(np.allclose(tbl.values, circle_values(64, 5), atol=1e-9))
    assert(np.all(tbl.residuals <= 1e-8))

def test_shift_invert_circle():

    A = hodge_laplacian(build_complex(build_circle(800)), 0)
    tbl = smallest_eigs(A, 5, dense_limit=600)

    assert(tbl.method == "shift-invert")
    assert(tbl.iterations > 0)
    norm = operator_norm_estimate(A)
    assert(np.allclose(tbl.values, circle_values(800, 5),
                       atol=1e-8 * norm))

def test_lobpcg_circle():

    A = hodge_laplacian(build_complex(build_circle(700)), 0)
    tbl = smallest_eigs(A, 3, tol=1e-6, dense_limit=600, lu_fill_limit=1)

    assert(tbl.method == "lobpcg")
    assert(np.all(tbl.residuals <= 1e-6))
    assert(abs(tbl.values[0]) < 1e-4)

# Forced fallback on a surface operator with a two dimensional kernel
def test_lobpcg_torus_degree_one():

    A = hodge_laplacian(build_complex(build_flat_torus(32, 32)), 1)
    tbl = smallest_eigs(A, 4, lu_fill_limit=1)

    assert(tbl.method == "lobpcg")
    assert(np.all(tbl.residuals <= 1e-8))

    norm = operator_norm_estimate(A)
    exact = scipy.linalg.eigh(A.toarray(), eigvals_only=True,
                              subset_by_index=[0, 3])
    assert(np.allclose(tbl.values, exact, atol=1e-7 * norm))
    assert(gap_count(tbl.values) == 2)

def test_lobpcg_singular_ilu(mocker, caplog):

    A = hodge_laplacian(build_complex(build_circle(700)), 0)

    mocker.patch("witten_lab.eigen.spla.spilu",
                 side_effect=RuntimeError("Factor is exactly singular"))

    tbl = smallest_eigs(A, 3, dense_limit=600, lu_fill_limit=1)

    assert(tbl.method == "lobpcg")
    assert(np.all(tbl.residuals <= 1e-8))
    assert(np.allclose(tbl.values, circle_values(700, 3),
                       atol=1e-7 * operator_norm_estimate(A)))
    assert("using the diagonal" in caplog.text)

def test_bad_k():

    A = sp.identity(6, format="csr")

    with pytest.raises(InvalidArgumentError):
        smallest_eigs(A, 0)
    with pytest.raises(InvalidArgumentError):
        smallest_eigs(A, 6)

def test_zero_operator():

    tbl = smallest_eigs(sp.csr_matrix((10, 10)), 3)

    assert(list(tbl.values) == [0, 0, 0])

def test_deterministic():

    A = hodge_laplacian(build_complex(build_circle(700)), 0)

    t1 = smallest_eigs(A, 4, seed=3, dense_limit=600)
    t2 = smallest_eigs(A, 4, seed=3, dense_limit=600)

    assert(np.array_equal(t1.values, t2.values))

def test_no_convergence(mocker):

    n = 700
    A = hodge_laplacian(build_complex(build_circle(n)), 0)

    mocker.patch(
        "witten_lab.eigen.spla.eigsh",
        side_effect=spla.ArpackNoConvergence(
            "no convergence", np.zeros(1), np.zeros((n, 1))
        )
    )

    with pytest.raises(SolverError) as e:
        smallest_eigs(A, 4, dense_limit=600)

    assert(e.value.code == "solver-failure")
    assert(e.value.details["converged"] == 1)

def test_residual_rejected(mocker):

    A = hodge_laplacian(build_complex(build_circle(16)), 0)

    V = np.zeros((16, 2))
    V[0, 0] = 1
    V[1, 1] = 1
    mocker.patch("witten_lab.eigen._dense",
                 return_value=(np.array([0.0, 1.0]), V, 1))

    with pytest.raises(SolverError) as e:
        smallest_eigs(A, 2)

    assert("residuals" in e.value.details)

# Eigenvalues move by at most the spectral norm of a symmetric perturbation
def test_perturbation_bound():

    rng = np.random.default_rng(11)

    for trial in range(200):

        n = int(rng.integers(6, 51))
        G = rng.standard_normal((n, n))
        A = G @ G.T
        E = rng.standard_normal((n, n)) * 1e-3
        E = (E + E.T) / 2

        k = int(rng.integers(1, n))
        a = smallest_eigs(A, k).values
        b = smallest_eigs(A + E, k).values

        bound = np.linalg.norm(E, 2)
        slack = 1e-12
        assert(np.all(np.abs(a - b) <= bound + slack))

def test_gap_count():
    assert(gap_count([0.0, 1e-12, 1.0]) == 2)
    assert(gap_count([0.5, 1.0]) == 0)
    assert(gap_count([]) == 0)

def test_kernel_dimension():

    A = hodge_laplacian(build_complex(build_circle(16)), 0)

    assert(kernel_dimension(A) == 1)
    assert(kernel_dimension(sp.csr_matrix((5, 5))) == 5)

def test_kernel_dimension_sparse():
    A = hodge_laplacian(build_complex(build_circle(700)), 1)
    assert(kernel_dimension(A, dense_limit=600) == 1)

def test_table():

    tbl = SpectrumTable([1.0, 2.0], [1e-12, 1e-12], degree=0, t=0.5)

    assert(list(tbl.t_lambda) == [0.5, 1.0])
    assert(tbl.rows()[1] == [0, 0.5, 1, 2.0, 1.0, 1e-12])
