
import logging
import math

import numpy as np

from . errors import (
    InvalidArgumentError, MeshParseError, NonManifoldError, NegativeAreaError,
    OrientationError
)

logger = logging.getLogger(__name__)

# Simplicial meshes of the model manifolds.  Vertex coordinates are model
# coordinates in length units: arc length s on the circle, (x1, x2) on the
# flat torus, and embedding coordinates (x, y, z) for loaded surfaces.
# Periodic models carry their periods, and every displacement between two
# vertices is taken as the shortest periodic representative.
class Mesh:

    def __init__(self, kind, vertices, simplices, periods=None, radius=None,
                 name=None):

        self.kind = kind
        self.vertices = np.array(vertices, dtype=float)
        if self.vertices.ndim == 1:
            self.vertices = self.vertices[:, None]
        self.simplices = tuple(
            np.array(s, dtype=np.int64).reshape(len(s), p + 1)
            for p, s in enumerate(simplices)
        )
        self.periods = None if periods is None else tuple(float(v) for v in periods)
        self.radius = radius
        self.name = name if name else kind

        self.vertices.setflags(write=False)
        for s in self.simplices:
            s.setflags(write=False)

    @property
    def dimension(self):
        return len(self.simplices) - 1

    @property
    def periodic(self):
        return self.periods is not None

    def count(self, p):
        return len(self.simplices[p])

    def counts(self):
        return tuple(len(s) for s in self.simplices)

    def euler_characteristic(self):
        return sum((-1) ** p * n for p, n in enumerate(self.counts()))

    # Shortest displacement from a to b, coordinate arrays of equal shape
    def displacement(self, a, b):
        d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
        if self.periodic:
            per = np.array(self.periods)
            d = d - per * np.round(d / per)
        return d

    def wrap(self, x):
        x = np.asarray(x, dtype=float)
        if self.periodic:
            x = np.mod(x, np.array(self.periods))
        return x

    # Representative point of each p-simplex: the mean of its vertices,
    # unwrapped relative to the first vertex on periodic models.
    def barycenters(self, p):
        s = self.simplices[p]
        base = self.vertices[s[:, 0]]
        if p == 0:
            return base.copy()
        offsets = [self.displacement(base, self.vertices[s[:, j]])
                   for j in range(1, p + 1)]
        return self.wrap(base + sum(offsets) / (p + 1))

    def edge_vectors(self):
        e = self.simplices[1]
        return self.displacement(self.vertices[e[:, 0]], self.vertices[e[:, 1]])

    def edge_lengths(self):
        return np.linalg.norm(self.edge_vectors(), axis=1)

    def face_areas(self):
        f = self.simplices[2]
        v0 = self.vertices[f[:, 0]]
        e1 = self.displacement(v0, self.vertices[f[:, 1]])
        e2 = self.displacement(v0, self.vertices[f[:, 2]])
        if e1.shape[1] == 2:
            return 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        return 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)

    # Primal volume of each p-simplex (vertices count 1)
    def volumes(self, p):
        if p == 0:
            return np.ones(self.count(0))
        if p == 1:
            return self.edge_lengths()
        return self.face_areas()

    def total_volume(self):
        return float(self.volumes(self.dimension).sum())

    # Largest distance scale of the model, used to size tolerances
    def diameter(self):
        if self.periodic:
            return float(np.linalg.norm(self.periods))
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(np.linalg.norm(span))

    # Every face of a listed simplex is listed exactly once
    def validate(self):
        for p in range(1, self.dimension + 1):
            faces = {tuple(v) for v in self.simplices[p - 1]}
            if len(faces) != self.count(p - 1):
                raise InvalidArgumentError(
                    "duplicate %d-simplices in mesh %s" % (p - 1, self.name)
                )
            for s in self.simplices[p]:
                for j in range(p + 1):
                    face = tuple(np.delete(s, j))
                    if face not in faces:
                        raise InvalidArgumentError(
                            "face %s of simplex %s is not listed" % (face, tuple(s))
                        )
        vols = [self.volumes(p) for p in range(1, self.dimension + 1)]
        for p, v in enumerate(vols, start=1):
            if len(v) and v.min() <= 0:
                raise NegativeAreaError(
                    "%d-simplex %d has non-positive volume" % (p, int(v.argmin()))
                )
        return self

    def describe(self):
        return {
            "kind": self.kind,
            "name": self.name,
            "counts": list(self.counts()),
            "euler": self.euler_characteristic(),
            "volume": self.total_volume(),
        }

# Unique sorted edges of a list of sorted triangles, lexicographic order
def edges_of(faces):
    faces = np.asarray(faces, dtype=np.int64)
    e = np.concatenate([faces[:, [0, 1]], faces[:, [0, 2]], faces[:, [1, 2]]])
    return np.unique(e, axis=0)

# Uniform n-gon of the circle of circumference 2*pi*radius
def build_circle(n, radius=1.0):

    if n < 3:
        raise InvalidArgumentError("circle needs n >= 3 vertices, got %s" % n)
    if radius <= 0:
        raise InvalidArgumentError("circle radius must be positive, got %s" % radius)

    length = 2 * math.pi * radius
    s = length * np.arange(n) / n

    edges = [tuple(sorted((i, (i + 1) % n))) for i in range(n)]
    edges = sorted(edges)

    mesh = Mesh("circle", s, [np.arange(n)[:, None], edges],
                periods=(length,), radius=radius,
                name="circle-n%d" % n)
    return mesh.validate()

# Periodic right-triangle grid of [0,L1] x [0,L2].  Each grid square is split
# along its (+1,+1) diagonal.
def build_flat_torus(n1, n2, L1=2 * math.pi, L2=2 * math.pi):

    if n1 < 3 or n2 < 3:
        raise InvalidArgumentError(
            "torus needs n1, n2 >= 3, got %s, %s" % (n1, n2)
        )
    if L1 <= 0 or L2 <= 0:
        raise InvalidArgumentError("torus side lengths must be positive")

    i, j = np.meshgrid(np.arange(n1), np.arange(n2), indexing="xy")
    i = i.ravel()
    j = j.ravel()
    coords = np.column_stack([i * L1 / n1, j * L2 / n2])

    def vid(a, b):
        return (a % n1) + n1 * (b % n2)

    v00 = vid(i, j)
    v10 = vid(i + 1, j)
    v11 = vid(i + 1, j + 1)
    v01 = vid(i, j + 1)

    faces = np.concatenate([
        np.column_stack([v00, v10, v11]),
        np.column_stack([v00, v11, v01]),
    ])
    faces = np.sort(faces, axis=1)
    faces = faces[np.lexsort(faces.T[::-1])]

    mesh = Mesh("torus", coords,
                [np.arange(n1 * n2)[:, None], edges_of(faces), faces],
                periods=(L1, L2), name="torus-%dx%d" % (n1, n2))
    return mesh.validate()

# Read an OFF file: "OFF", "V F E", V vertex lines, F face lines "3 i j k".
# Comments after '#' and blank lines are ignored.
def read_off(path):

    try:
        with open(path) as f:
            lines = [l.split("#")[0].strip() for l in f]
    except OSError as e:
        raise MeshParseError("cannot read mesh file %s: %s" % (path, e))

    lines = [l for l in lines if l]

    try:
        if not lines or lines[0] != "OFF":
            raise ValueError("missing OFF header")
        nv, nf = [int(v) for v in lines[1].split()[:2]]
        vertices = np.array([
            [float(x) for x in lines[2 + k].split()[:3]] for k in range(nv)
        ])
        faces = []
        for k in range(nf):
            row = [int(x) for x in lines[2 + nv + k].split()]
            if row[0] != 3 or len(row) < 4:
                raise ValueError("face %d is not a triangle" % k)
            faces.append(row[1:4])
        faces = np.array(faces, dtype=np.int64).reshape(nf, 3)
    except (ValueError, IndexError) as e:
        raise MeshParseError("%s: %s" % (path, e))

    if vertices.shape != (nv, 3):
        raise MeshParseError("%s: vertex lines need 3 coordinates" % path)
    if nf and (faces.min() < 0 or faces.max() >= nv):
        raise MeshParseError("%s: face index out of range" % path)

    return vertices, faces

# Load a closed orientable triangulated surface
def load_mesh(path):

    vertices, faces = read_off(path)

    for k, f in enumerate(faces):
        if len(set(f)) != 3:
            raise NegativeAreaError("face %d repeats a vertex" % k)

    sorted_faces = np.sort(faces, axis=1)
    order = np.lexsort(sorted_faces.T[::-1])
    sorted_faces = sorted_faces[order]
    edges = edges_of(sorted_faces)

    # Each edge of a closed surface bounds exactly two triangles
    incidence = {}
    for k, f in enumerate(sorted_faces):
        for a, b in ((f[0], f[1]), (f[0], f[2]), (f[1], f[2])):
            incidence.setdefault((a, b), []).append(k)
    for e, fs in incidence.items():
        if len(fs) != 2:
            raise NonManifoldError(
                "edge %s has %d incident triangles" % (e, len(fs)),
                edge=e
            )

    # Consistent orientation: each directed edge is used exactly once
    directed = {}
    for f in faces:
        for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
            directed[(a, b)] = directed.get((a, b), 0) + 1
    bad = [e for e, c in directed.items() if c != 1]
    if bad:
        raise OrientationError(
            "faces are not consistently oriented at edge %s" % (bad[0],)
        )

    mesh = Mesh("surface", vertices,
                [np.arange(len(vertices))[:, None], edges, sorted_faces],
                name=str(path))

    mesh.validate()

    logger.debug("Loaded %s: V=%d E=%d F=%d", path, *mesh.counts())

    return mesh
