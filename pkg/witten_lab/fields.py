
import math

import numpy as np

from . errors import InvalidArgumentError, DomainMismatchError

# The field catalog.  Circle and torus fields are all of the form
#
#   f = value + sum_i a_i cos(k_i theta_i)
#
# with theta = s/R on the circle and theta_i = 2 pi x_i / L_i on the torus,
# so values, gradients and Hessians in model coordinates are exact.

catalog = {
    "cos-theta": "circle",
    "cos-k-theta": "circle",
    "sum-cos": "torus",
    "cos2-plus-cos": "torus",
    "tilted": "torus",
    "height": "surface",
    "constant": None,
}

descriptions = {
    "cos-theta": "cos θ",
    "cos-k-theta": "cos kθ",
    "sum-cos": "cos θ₁ + cos θ₂",
    "cos2-plus-cos": "cos 2θ₁ + cos θ₂",
    "tilted": "cos θ₁ + ε cos θ₂",
    "height": "z",
    "constant": "f ≡ value",
}

class ScalarField:

    def __init__(self, id, model, amplitudes=(), wavenumbers=(), value=0.0,
                 factor=1.0, params=None):
        self.id = id
        self.model = model
        self.amplitudes = np.array(amplitudes, dtype=float)
        self.wavenumbers = np.array(wavenumbers, dtype=float)
        self.value0 = float(value)
        self.factor = float(factor)
        self.params = dict(params) if params else {}

    def describe(self):
        d = {"id": self.id}
        d.update(self.params)
        if self.factor != 1.0:
            d["factor"] = self.factor
        return d

    def is_constant(self):
        return self.id == "constant" or not np.any(self.amplitudes * self.factor)

    # Rough size of f, used to scale tolerances
    def scale(self):
        return self.factor * (
            abs(self.value0) + float(np.abs(self.amplitudes).sum())
        ) or 1.0

    # Applies on this mesh?
    def check_domain(self, mesh):
        if self.model is None:
            ok = mesh.kind in ("circle", "torus")
        else:
            ok = mesh.kind == self.model
        if not ok:
            raise DomainMismatchError(
                "field %s is not defined on a %s model" % (self.id, mesh.kind),
                field=self.id, model=mesh.kind
            )

    # Model coordinate x -> angle theta, per axis
    def _angle_scale(self, mesh):
        if mesh.kind == "circle":
            return np.array([1.0 / mesh.radius])
        if mesh.kind == "torus":
            return np.array([2 * math.pi / L for L in mesh.periods])
        raise DomainMismatchError("no angle coordinates on %s" % mesh.kind)

    def _terms(self, mesh, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        c = self._angle_scale(mesh)
        dim = len(c)
        a = np.zeros(dim)
        k = np.zeros(dim)
        a[:len(self.amplitudes)] = self.amplitudes
        k[:len(self.wavenumbers)] = self.wavenumbers
        phase = k * c * x
        return self.factor * a, k * c, phase

    def value(self, mesh, x):
        if self.model == "surface":
            return self.factor * np.atleast_2d(x)[:, 2]
        a, w, phase = self._terms(mesh, x)
        return self.factor * self.value0 + (a * np.cos(phase)).sum(axis=1)

    def gradient(self, mesh, x):
        if self.model == "surface":
            g = np.zeros_like(np.atleast_2d(x), dtype=float)
            g[:, 2] = self.factor
            return g
        a, w, phase = self._terms(mesh, x)
        return -a * w * np.sin(phase)

    def hessian(self, mesh, x):
        x = np.atleast_2d(x)
        if self.model == "surface":
            return np.zeros((len(x), 3, 3))
        a, w, phase = self._terms(mesh, x)
        diag = -a * w * w * np.cos(phase)
        H = np.zeros((len(x), diag.shape[1], diag.shape[1]))
        idx = np.arange(diag.shape[1])
        H[:, idx, idx] = diag
        return H

def make_field(id, k=1, epsilon=0.3, value=0.0):

    if id not in catalog:
        raise InvalidArgumentError(
            "unknown field %s, expected one of %s" % (id, ", ".join(catalog))
        )

    model = catalog[id]

    if id == "cos-theta":
        return ScalarField(id, model, [1.0], [1.0])
    if id == "cos-k-theta":
        if int(k) != k or k < 1:
            raise InvalidArgumentError("cos-k-theta needs integer k >= 1, got %s" % k)
        return ScalarField(id, model, [1.0], [k], params={"k": int(k)})
    if id == "sum-cos":
        return ScalarField(id, model, [1.0, 1.0], [1.0, 1.0])
    if id == "cos2-plus-cos":
        return ScalarField(id, model, [1.0, 1.0], [2.0, 1.0])
    if id == "tilted":
        return ScalarField(id, model, [1.0, epsilon], [1.0, 1.0],
                           params={"epsilon": float(epsilon)})
    if id == "height":
        return ScalarField(id, model)
    return ScalarField(id, model, value=value, params={"value": float(value)})

# c * f, c > 0
def rescale_field(field, c):
    if c <= 0:
        raise InvalidArgumentError("rescaling factor must be positive, got %s" % c)
    return ScalarField(field.id, field.model, field.amplitudes,
                       field.wavenumbers, field.value0, field.factor * c,
                       field.params)

# A torus field restricted to one closed leaf, as a function of arc length s
# along the leaf: s -> f(base + s u).  Lives on circle meshes of the leaf's
# length.
class LeafRestriction:

    def __init__(self, field, torus, base, direction, length, intercept=None):
        self.field = field
        self.torus = torus
        self.base = np.asarray(base, dtype=float)
        self.direction = np.asarray(direction, dtype=float)
        self.length = float(length)
        self.intercept = intercept
        self.id = "%s|leaf" % field.id
        self.model = "circle"

    def describe(self):
        d = {"leaf_of": self.field.describe(), "intercept": self.intercept}
        return d

    def is_constant(self):
        return False

    def scale(self):
        return self.field.scale()

    def check_domain(self, mesh):
        if mesh.kind != "circle" or abs(mesh.periods[0] - self.length) > \
           1e-9 * self.length:
            raise DomainMismatchError(
                "leaf restriction needs a circle of length %g" % self.length
            )

    def points(self, s):
        s = np.asarray(s, dtype=float).reshape(-1)
        return self.torus.wrap(self.base + s[:, None] * self.direction)

    def value(self, mesh, x):
        x = np.atleast_2d(x)[:, 0]
        return self.field.value(self.torus, self.points(x))

    def gradient(self, mesh, x):
        x = np.atleast_2d(x)[:, 0]
        g = self.field.gradient(self.torus, self.points(x))
        return (g @ self.direction)[:, None]

    def hessian(self, mesh, x):
        x = np.atleast_2d(x)[:, 0]
        H = self.field.hessian(self.torus, self.points(x))
        u = self.direction
        return np.einsum("i,nij,j->n", u, H, u)[:, None, None]
