
import logging
import threading

import numpy as np
import scipy.sparse as sp

from . errors import DegenerateMeshError, InvalidArgumentError

logger = logging.getLogger(__name__)

# Simplex keys: a sorted vertex tuple packed into one integer, so that
# lexicographically sorted simplex lists have sorted keys.
def simplex_keys(simplices, nverts):
    s = np.asarray(simplices, dtype=np.int64)
    key = np.zeros(len(s), dtype=np.int64)
    for j in range(s.shape[1]):
        key = key * nverts + s[:, j]
    return key

# Signed incidence matrix of degree p: rows are (p+1)-simplices, columns are
# p-simplices.  Omitting vertex j of a simplex gives a face with sign (-1)^j.
def incidence(mesh, p):

    upper = mesh.simplices[p + 1]
    lower = mesh.simplices[p]
    nv = mesh.count(0)

    lower_keys = simplex_keys(lower, nv)

    rows = []
    cols = []
    vals = []

    for j in range(p + 2):
        face = np.delete(upper, j, axis=1)
        keys = simplex_keys(face, nv)
        idx = np.searchsorted(lower_keys, keys)
        rows.append(np.arange(len(upper)))
        cols.append(idx)
        vals.append(np.full(len(upper), (-1) ** j, dtype=np.int64))

    d = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(upper), len(lower)), dtype=np.int64
    )
    return d

def _cot(u, v):
    cross = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0] if u.shape[1] == 2 else \
        np.linalg.norm(np.cross(u, v), axis=1)
    return np.einsum("ij,ij->i", u, v) / np.abs(cross)

# Circumcentric Hodge stars of a triangulated surface: vertex dual areas
# (Voronoi cells), edge weights dual/primal length = (cot a + cot b)/2 and
# face weights 1/area.
def surface_stars(mesh, degenerate_weight_ratio=None):

    f = mesh.simplices[2]
    nv, ne, nf = mesh.counts()
    X = mesh.vertices

    p0 = X[f[:, 0]]
    e01 = mesh.displacement(p0, X[f[:, 1]])
    e02 = mesh.displacement(p0, X[f[:, 2]])
    e12 = e02 - e01

    # Angle cotangents at the three corners
    cot0 = _cot(e01, e02)
    cot1 = _cot(-e01, e12)
    cot2 = _cot(-e02, -e12)

    l01 = np.einsum("ij,ij->i", e01, e01)
    l02 = np.einsum("ij,ij->i", e02, e02)
    l12 = np.einsum("ij,ij->i", e12, e12)

    star0 = np.zeros(nv)
    np.add.at(star0, f[:, 0], (l01 * cot2 + l02 * cot1) / 8)
    np.add.at(star0, f[:, 1], (l01 * cot2 + l12 * cot0) / 8)
    np.add.at(star0, f[:, 2], (l02 * cot1 + l12 * cot0) / 8)

    ekeys = simplex_keys(mesh.simplices[1], nv)
    def edge_index(a, b):
        return np.searchsorted(ekeys, simplex_keys(np.column_stack([a, b]), nv))

    i01 = edge_index(f[:, 0], f[:, 1])
    i02 = edge_index(f[:, 0], f[:, 2])
    i12 = edge_index(f[:, 1], f[:, 2])

    star1 = np.zeros(ne)
    np.add.at(star1, i01, cot2 / 2)
    np.add.at(star1, i02, cot1 / 2)
    np.add.at(star1, i12, cot0 / 2)

    area = mesh.face_areas()
    star2 = 1.0 / area

    if degenerate_weight_ratio is not None:

        # Barycentric dual length: barycentre to edge midpoint, per triangle
        bary = (e01 + e02) / 3
        bw = np.zeros(ne)
        np.add.at(bw, i01, np.linalg.norm(bary - e01 / 2, axis=1))
        np.add.at(bw, i02, np.linalg.norm(bary - e02 / 2, axis=1))
        np.add.at(bw, i12, np.linalg.norm(bary - (e01 + e02) / 2, axis=1))
        bw = bw / mesh.edge_lengths()

        zero = np.abs(star1) <= 1e-12 * np.abs(star1).max()
        star1[zero] = degenerate_weight_ratio * bw[zero]
        if zero.any():
            logger.debug("Replaced %d zero dual edge weights", int(zero.sum()))

    bad = np.flatnonzero(star0 <= 0)
    if len(bad):
        raise DegenerateMeshError(
            "vertex %d has non-positive dual area %g" % (bad[0], star0[bad[0]]),
            simplex=(int(bad[0]),)
        )
    bad = np.flatnonzero(star1 <= 0)
    if len(bad):
        e = tuple(int(v) for v in mesh.simplices[1][bad[0]])
        raise DegenerateMeshError(
            "edge %s has non-positive dual weight %g" % (e, star1[bad[0]]),
            simplex=e
        )

    return [star0, star1, star2]

# Discrete de Rham data of a mesh: integer coboundaries d[p] and diagonal
# mass vectors mass[p] per degree.
# Betti numbers are computed on first use, once, under a lock.
class CochainComplex:

    def __init__(self, mesh, d, mass):
        self.mesh = mesh
        self.d = d
        self.mass = mass
        self.barycenters = [mesh.barycenters(p) for p in range(mesh.dimension + 1)]
        self._betti = None
        self._lock = threading.Lock()

    def betti_numbers(self):
        with self._lock:
            if self._betti is None:
                self._betti = betti(self)
            return list(self._betti)

    @property
    def dimension(self):
        return self.mesh.dimension

    @property
    def dims(self):
        return list(self.mesh.counts())

    def euler_characteristic(self):
        return sum((-1) ** p * n for p, n in enumerate(self.dims))

    def check_degree(self, p):
        if p < 0 or p > self.dimension:
            raise InvalidArgumentError(
                "degree %s outside 0..%d" % (p, self.dimension)
            )

def build_complex(mesh, degenerate_weight_ratio=1e-3):

    d = [incidence(mesh, p) for p in range(mesh.dimension)]

    if mesh.dimension == 1:
        h = mesh.edge_lengths()
        # Vertex dual cell: half of each adjacent edge
        star0 = np.zeros(mesh.count(0))
        e = mesh.simplices[1]
        np.add.at(star0, e[:, 0], h / 2)
        np.add.at(star0, e[:, 1], h / 2)
        mass = [star0, 1.0 / h]
    else:
        ratio = degenerate_weight_ratio if mesh.kind == "torus" else None
        mass = surface_stars(mesh, ratio)

    logger.debug("Complex for %s: dims %s", mesh.name, mesh.counts())

    return CochainComplex(mesh, d, mass)

# B_p = M_{p+1}^{1/2} D M_p^{-1/2}, for the coboundary D of degree p (the
# undeformed d_p when D is omitted)
def normalized_coboundary(complex, p, D=None):
    if D is None:
        D = complex.d[p].astype(float)
    left = sp.diags(np.sqrt(complex.mass[p + 1]))
    right = sp.diags(1.0 / np.sqrt(complex.mass[p]))
    return (left @ D @ right).tocsr()

# Mass-normalized Laplacian B_p^T B_p + B_{p-1} B_{p-1}^T, symmetric PSD and
# similar to d*d + dd* in the mass inner products.  coboundaries optionally
# replaces the undeformed d.
def hodge_laplacian(complex, p, coboundaries=None):

    complex.check_degree(p)

    n = complex.dims[p]
    A = sp.csr_matrix((n, n))

    def cob(q):
        return None if coboundaries is None else coboundaries[q]

    if p < complex.dimension:
        B = normalized_coboundary(complex, p, cob(p))
        A = A + B.T @ B
    if p > 0:
        B = normalized_coboundary(complex, p - 1, cob(p - 1))
        A = A + B @ B.T

    A = ((A + A.T) / 2).tocsr()
    A.eliminate_zeros()
    return A

# Betti numbers as kernel dimensions of the undeformed Hodge Laplacians
def betti(complex, tol=1e-8, seed=0):

    from . eigen import kernel_dimension

    return [
        kernel_dimension(hodge_laplacian(complex, p), tol=tol, seed=seed)
        for p in range(complex.dimension + 1)
    ]

def euler_characteristic(mesh):
    return mesh.euler_characteristic()

# Observed convergence order of the first nonzero plain 0-form eigenvalues
# between circles of n and 2n vertices, against the continuum values j^2/R^2
def refinement_orders(n, radius=1.0, count=5):

    from . mesh import build_circle
    from . eigen import smallest_eigs

    errs = []
    for m in (n, 2 * n):
        cx = build_complex(build_circle(m, radius))
        tbl = smallest_eigs(hodge_laplacian(cx, 0), count + 1)
        vals = tbl.values[1:]
        exact = np.array([((j + 2) // 2) ** 2 for j in range(count)]) / radius ** 2
        errs.append(np.abs(vals - exact))

    return np.log2(errs[0] / errs[1])

# Ranks of d_0 .. d_{n-1} from Betti numbers: ker d_p = b_p + rank d_{p-1}
def coboundary_ranks(complex, b):
    ranks = []
    prev = 0
    for p in range(complex.dimension):
        r = complex.dims[p] - b[p] - prev
        ranks.append(r)
        prev = r
    return ranks
