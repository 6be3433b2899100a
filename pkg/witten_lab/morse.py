
import logging
import warnings

import numpy as np

from . errors import (
    DomainMismatchError, IncompleteSearchWarning, InvalidArgumentError,
    NotMorseError
)

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
DEDUPE_RADIUS = 1e-6
NONDEGENERACY = 1e-8

class CriticalPoint:

    def __init__(self, location, xi, value=None):
        self.location = np.asarray(location, dtype=float)
        self.xi = np.sort(np.asarray(xi, dtype=float))
        self.value = value

    @property
    def index(self):
        return int(np.count_nonzero(self.xi < 0))

    @property
    def dimension(self):
        return len(self.xi)

    @staticmethod
    def from_dict(d):
        return CriticalPoint(d["location"], d["xi"], d.get("value"))

    def to_dict(self):
        return {
            "location": [float(v) for v in self.location],
            "xi": [float(v) for v in self.xi],
            "index": self.index,
            "value": None if self.value is None else float(self.value),
        }

class MorseData:

    def __init__(self, points, dimension):
        self.points = list(points)
        self.dimension = dimension

    def __len__(self):
        return len(self.points)

    @property
    def counts(self):
        c = [0] * (self.dimension + 1)
        for cp in self.points:
            c[cp.index] += 1
        return c

    # Poincare-Hopf sum, sum (-1)^p C_p
    def euler_sum(self):
        return sum((-1) ** p * c for p, c in enumerate(self.counts))

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "counts": self.counts,
            "points": [cp.to_dict() for cp in self.points],
        }

    @staticmethod
    def from_dict(d):
        return MorseData(
            [CriticalPoint.from_dict(v) for v in d["points"]], d["dimension"]
        )

# f at the mesh vertices, or at the barycentres of the p-simplices
def evaluate_field(field, mesh, at="vertices", p=0):
    field.check_domain(mesh)
    if at == "vertices":
        x = mesh.vertices
    elif at == "barycenters":
        x = mesh.barycenters(p)
    else:
        raise InvalidArgumentError("evaluate_field at %s?" % at)
    return field.value(mesh, x)

def morse_counts(morse_data):
    return morse_data.counts

def _classify(field, mesh, x, H):

    xi = np.linalg.eigvalsh(H)
    top = np.abs(xi).max() if len(xi) else 0.0
    if top == 0 or np.abs(xi).min() < NONDEGENERACY * top:
        raise NotMorseError(
            "degenerate critical point at %s, Hessian eigenvalues %s" % (
                np.round(x, 12).tolist(), xi.tolist()
            ),
            location=[float(v) for v in x]
        )
    return CriticalPoint(x, xi, float(field.value(mesh, x[None, :])[0]))

# Snap coordinates within tolerance of a period back to zero
def _canonical(mesh, x, radius):
    x = mesh.wrap(x)
    if mesh.periodic:
        per = np.array(mesh.periods)
        x = np.where(np.abs(x - per) < radius, 0.0, x)
    return x

def _dedupe(mesh, points, radius):

    if len(points) == 0:
        return points

    points = _canonical(mesh, points, radius)

    # Coarse grid first, then a greedy pass over the survivors
    cells = np.round(points / radius).astype(np.int64)
    _, first = np.unique(cells, axis=0, return_index=True)
    candidates = points[np.sort(first)]
    candidates = candidates[np.lexsort(candidates.T[::-1])]

    kept = []
    for x in candidates:
        if kept:
            d = np.linalg.norm(mesh.displacement(np.array(kept), x), axis=1)
            if d.min() < radius:
                continue
        kept.append(x)

    return np.array(kept)

# Newton on grad f = 0 seeded from every vertex, all seeds advanced together
def _newton(field, mesh, seeds, gtol):

    x = np.array(seeds, dtype=float)
    active = np.ones(len(x), dtype=bool)
    done = np.zeros(len(x), dtype=bool)
    step_cap = mesh.diameter() / 8

    for it in range(NEWTON_MAX_ITER):

        idx = np.flatnonzero(active & ~done)
        if len(idx) == 0:
            break

        g = field.gradient(mesh, x[idx])
        conv = np.linalg.norm(g, axis=1) <= gtol
        done[idx[conv]] = True

        idx = idx[~conv]
        g = g[~conv]
        if len(idx) == 0:
            break

        H = field.hessian(mesh, x[idx])
        ev = np.linalg.eigvalsh(H)
        top = np.abs(ev).max(axis=1)
        regular = (top > 0) & (np.abs(ev).min(axis=1) > 1e-10 * top)
        active[idx[~regular]] = False

        idx = idx[regular]
        if len(idx) == 0:
            break

        step = np.linalg.solve(H[regular], g[regular][:, :, None])[:, :, 0]
        size = np.linalg.norm(step, axis=1)
        big = size > step_cap
        step[big] *= (step_cap / size[big])[:, None]

        x[idx] = mesh.wrap(x[idx] - step)

    logger.debug("Newton: %d of %d seeds converged", int(done.sum()), len(x))

    return x[done]

# Critical points of the height function z on a round sphere, by Riemannian
# Newton: grad = e_z - (z/R^2) p, Hess = -(z/R^2) I on the tangent plane.
def _sphere_height(field, mesh):

    center = mesh.vertices.mean(axis=0)
    p = mesh.vertices - center
    r = np.linalg.norm(p, axis=1)
    R = r.mean()
    if np.abs(r - R).max() > 1e-6 * R:
        raise DomainMismatchError(
            "height field needs a sphere-like mesh, %s is not" % mesh.name
        )

    ez = np.array([0.0, 0.0, 1.0])

    found = []
    for q in p:
        for it in range(NEWTON_MAX_ITER):
            z = q[2]
            if abs(z) < 1e-10 * R:
                break
            grad = ez - (z / R ** 2) * q
            if np.linalg.norm(grad) <= NEWTON_TOL:
                found.append(q.copy())
                break
            q = q + grad * R ** 2 / z
            q = R * q / np.linalg.norm(q)

    pts = _dedupe(mesh, np.array(found).reshape(-1, 3), DEDUPE_RADIUS * mesh.diameter())

    cps = []
    for q in pts:
        k = -field.factor * q[2] / R ** 2
        cps.append(
            _classify(field, mesh, q + center, np.diag([k, k]))
        )
    return cps

def find_critical_points(field, mesh):

    field.check_domain(mesh)

    if field.is_constant():
        raise NotMorseError("field %s is constant" % field.id)

    if field.model == "surface":
        cps = _sphere_height(field, mesh)
    else:
        scale = field.scale()
        gtol = NEWTON_TOL * scale * 2 * np.pi / mesh.diameter()
        radius = DEDUPE_RADIUS * mesh.diameter()

        roots = _newton(field, mesh, mesh.vertices, gtol)
        roots = _dedupe(mesh, roots, radius)

        cps = [
            _classify(field, mesh, x, field.hessian(mesh, x[None, :])[0])
            for x in roots
        ]

    cps.sort(key=lambda cp: tuple(np.round(cp.location, 9)))
    md = MorseData(cps, mesh.dimension)

    _check_search(field, mesh, md)

    logger.info("Field %s on %s: %d critical points, C=%s",
                field.id, mesh.name, len(md), md.counts)

    return md

def _check_search(field, mesh, md):

    if mesh.dimension == 1:

        # Every sign change of f' across an edge must hold a critical point
        e = mesh.simplices[1]
        x = mesh.vertices[:, 0]
        g = field.gradient(mesh, mesh.vertices)[:, 0]
        locs = np.array([cp.location[0] for cp in md.points])
        for a, b in e:
            if g[a] * g[b] >= 0:
                continue
            lo = x[a]
            span = mesh.displacement(x[a], x[b])
            if len(locs):
                off = mesh.displacement(np.full(len(locs), lo), locs) / span
                if np.any((off >= -1e-9) & (off <= 1 + 1e-9)):
                    continue
            warnings.warn(
                "no critical point found on edge (%d, %d) where f' changes sign"
                % (a, b), IncompleteSearchWarning
            )
            return

    chi = mesh.euler_characteristic()
    if md.euler_sum() != chi:
        warnings.warn(
            "Poincaré-Hopf sum %d differs from Euler characteristic %d" % (
                md.euler_sum(), chi
            ), IncompleteSearchWarning
        )
