
import logging
import math
import threading

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . complex import build_complex
from . eigen import smallest_eigs
from . errors import (
    DomainMismatchError, InsufficientKError, InvalidArgumentError,
    NotLeafwiseMorseError, NotMorseError, OverflowGuardError
)
from . fields import LeafRestriction
from . mesh import Mesh, build_circle
from . morse import NONDEGENERACY, find_critical_points
from . oracle import OscillatorModel, oscillator_spectrum
from . witten import deform, laplacian, parse_schedule

logger = logging.getLogger(__name__)

# Kronecker foliation of the torus [0, 2 pi)^2 by closed lines of direction
# (a, b).  The leaf with intercept c is {x : b x1 - a x2 = c (mod 2 pi)},
# parametrized by arc length from its base point.  The invariant transverse
# measure is dc / 2 pi, total mass 1.
class KroneckerModel:

    def __init__(self, a, b, n_leaf, n_trans):

        self.a = int(a)
        self.b = int(b)
        self.n_leaf = int(n_leaf)
        self.n_trans = int(n_trans)

        norm2 = self.a ** 2 + self.b ** 2
        self.length = 2 * math.pi * math.sqrt(norm2)
        self.direction = np.array([self.a, self.b]) / math.sqrt(norm2)
        self.normal = np.array([self.b, -self.a]) / norm2

        two_pi = 2 * math.pi
        self.torus = Mesh(
            "torus", np.zeros((0, 2)),
            [np.zeros((0, 1)), np.zeros((0, 2)), np.zeros((0, 3))],
            periods=(two_pi, two_pi), name="kronecker-%d-%d" % (a, b)
        )

        self._leaf_complex = None
        self._lock = threading.Lock()

    @property
    def slope(self):
        return [self.a, self.b]

    # Midpoint intercepts c_j = 2 pi (j + 1/2) / n
    def intercepts(self, n=None):
        n = self.n_trans if n is None else n
        return 2 * math.pi * (np.arange(n) + 0.5) / n

    def weights(self, n=None):
        n = self.n_trans if n is None else n
        return np.full(n, 1.0 / n)

    def base_point(self, intercept):
        return self.torus.wrap(intercept * self.normal)

    # Point of the leaf with this intercept at arc length s
    def point(self, intercept, s):
        return self.torus.wrap(self.base_point(intercept) + s * self.direction)

    # All leaves are isometric circles of length l; one complex serves all
    @property
    def leaf_complex(self):
        with self._lock:
            if self._leaf_complex is None:
                mesh = build_circle(self.n_leaf, self.length / (2 * math.pi))
                self._leaf_complex = build_complex(mesh)
            return self._leaf_complex

    def to_dict(self):
        return {
            "slope": self.slope,
            "leaf_length": self.length,
            "n_leaf": self.n_leaf,
            "n_trans": self.n_trans,
        }

def build_kronecker(a, b, n_leaf=512, n_trans=64):

    if a == 0 and b == 0:
        raise InvalidArgumentError("slope (0, 0) is not a direction")
    if math.gcd(abs(int(a)), abs(int(b))) != 1:
        raise InvalidArgumentError(
            "slope (%d, %d) is not coprime" % (a, b)
        )
    if n_leaf < 64:
        raise InvalidArgumentError("n_leaf must be >= 64, got %d" % n_leaf)
    if n_trans < 16:
        raise InvalidArgumentError("n_trans must be >= 16, got %d" % n_trans)

    return KroneckerModel(a, b, n_leaf, n_trans)

# Closed-leaf direction (a, b) approximating the irrational ratio b/a = x
def irrational_slope_convergent(x, max_denominator=32):
    fr = Fraction(x).limit_denominator(max_denominator)
    a, b = fr.denominator, fr.numerator
    logger.warning(
        "Slope ratio %r approximated by %d/%d (error %.3g)",
        x, b, a, abs(x - b / a)
    )
    return a, b

# "a/b" -> (a, b)
def parse_slope(text):
    try:
        a, b = str(text).split("/")
        return int(a), int(b)
    except ValueError:
        raise InvalidArgumentError("cannot parse slope %r, expected a/b" % text)

def leafwise_restrict(field, model, intercept):
    if field.model not in ("torus", None):
        raise DomainMismatchError(
            "field %s is not defined on the torus" % field.id
        )
    return LeafRestriction(field, model.torus, model.base_point(intercept),
                           model.direction, model.length, intercept)

# Test functions on the rescaled (t * lambda) axis

class TestFunction:

    def __init__(self, descriptor, xs, ys):
        self.descriptor = descriptor
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)

    # Right end of the support
    @property
    def support(self):
        return float(self.xs[-1])

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.xs, self.ys,
                         left=self.ys[0], right=0.0)

    def __str__(self):
        return self.descriptor

# "plateau:a:b" is 1 on [0, a] and falls linearly to 0 at b;
# "tent:lo:peak:hi" rises from 0 at lo to 1 at peak and falls to 0 at hi.
def parse_test_function(text):

    parts = str(text).split(":")

    try:
        vals = [float(v) for v in parts[1:]]
    except ValueError:
        raise InvalidArgumentError("cannot parse test function %r" % text)

    if parts[0] == "plateau" and len(vals) == 2:
        a, b = vals
        if not 0 < a < b:
            raise InvalidArgumentError("plateau needs 0 < a < b")
        return TestFunction(text, [0, a, b], [1, 1, 0])

    if parts[0] == "tent" and len(vals) == 3:
        lo, peak, hi = vals
        if not 0 < lo < peak < hi:
            raise InvalidArgumentError("tent needs 0 < lo < peak < hi")
        return TestFunction(text, [0, lo, peak, hi], [0, 0, 1, 0])

    raise InvalidArgumentError("unknown test function %r" % text)

class FoliatedCriticalSet:

    def __init__(self, samples, counts, per_leaf, n_trans):
        self.samples = samples
        self.counts = counts
        self.per_leaf = per_leaf
        self.n_trans = n_trans

    @property
    def total_measure(self):
        return sum(self.counts)

    def to_dict(self):
        return {
            "c": self.counts,
            "n_trans": self.n_trans,
            "samples": self.samples,
        }

def _map(workers, fn, items):
    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as pool:
        return list(pool.map(fn, items))

# Critical points of f restricted to one leaf
def leaf_critical_points(field, model, intercept):

    lr = leafwise_restrict(field, model, intercept)
    mesh = model.leaf_complex.mesh

    if field.is_constant():
        raise NotLeafwiseMorseError(
            "field %s is constant" % field.id, intercept=float(intercept)
        )

    try:
        return find_critical_points(lr, mesh)
    except NotMorseError as e:
        s = e.details.get("location", [0.0])[0]
        raise NotLeafwiseMorseError(
            "leafwise degenerate critical point on leaf with intercept %.6g "
            "at %s" % (intercept, model.point(intercept, s).tolist()),
            intercept=float(intercept),
            location=model.point(intercept, s).tolist()
        )

def foliated_critical_set(field, model, n_trans=None, workers=1):

    n = model.n_trans if n_trans is None else n_trans
    cs = model.intercepts(n)
    w = model.weights(n)

    mds = _map(workers, lambda c: leaf_critical_points(field, model, c), cs)

    samples = []
    per_leaf = []
    counts = [0.0, 0.0]

    for c, nu, md in zip(cs, w, mds):
        per_leaf.append(md.counts)
        for cp in md.points:
            f2 = float(cp.xi[0])
            x = model.point(c, cp.location[0])
            H = field.hessian(model.torus, x[None, :])[0]
            hnorm = float(np.linalg.norm(H, 2))
            # |f''| along the leaf against the full Hessian: crit_F(f) is
            # transverse to the leaf where this is nondegenerate
            margin = abs(f2) / hnorm if hnorm > 0 else 0.0
            samples.append({
                "intercept": float(c),
                "s": float(cp.location[0]),
                "location": x.tolist(),
                "f2": f2,
                "index": cp.index,
                "E1": abs(f2),
                "leafwise_margin": margin,
                "leafwise_morse": bool(margin >= NONDEGENERACY),
                "weight": float(nu),
            })
            counts[cp.index] += nu

    weak = sum(not s["leafwise_morse"] for s in samples)
    if weak:
        logger.warning("%d of %d leafwise critical points are nearly "
                       "degenerate (margin < %g)", weak, len(samples),
                       NONDEGENERACY)

    return FoliatedCriticalSet(samples, counts, per_leaf, n)

class TransversalityResult:

    def __init__(self, passed, margin, point=None):
        self.passed = passed
        self.margin = margin
        self.point = point

    def to_dict(self):
        return {"pass": self.passed, "margin": self.margin,
                "point": self.point}

# d^2_x f restricted to T_x M x F_x is the vector H u; it must be nonzero at
# every leafwise critical point.  The margin is min |H u| / max |H|.
def transversality_check(field, model, fcs=None):

    if fcs is None:
        try:
            fcs = foliated_critical_set(field, model)
        except NotLeafwiseMorseError as e:
            return TransversalityResult(False, 0.0, e.details.get("location"))

    u = model.direction
    worst = None
    hmax = 0.0
    for smp in fcs.samples:
        H = field.hessian(model.torus, np.array([smp["location"]]))[0]
        hu = float(np.linalg.norm(H @ u))
        hmax = max(hmax, float(np.linalg.norm(H, 2)))
        if worst is None or hu < worst[0]:
            worst = (hu, smp["location"])

    if worst is None:
        return TransversalityResult(True, float("inf"))

    margin = worst[0] / hmax if hmax > 0 else 0.0
    return TransversalityResult(worst[0] > 0, margin,
                                None if worst[0] > 0 else worst[1])

def leafwise_witten_spectrum(model, field, intercept, t, p, k, tol=1e-8,
                             seed=0):

    lr = leafwise_restrict(field, model, intercept)

    try:
        wc = deform(model.leaf_complex, lr, t)
    except OverflowGuardError as e:
        details = dict(e.details)
        details["intercept"] = float(intercept)
        raise OverflowGuardError(
            "%s (leaf with intercept %.6g)" % (e, intercept), **details
        )

    return smallest_eigs(laplacian(wc, p), k, tol=tol, seed=seed, degree=p,
                         t=t)

# Leaf sum of phi over the t = 0 oscillator levels at the leaf's critical
# points
def _oracle_leaf_sum(field, model, intercept, p, phi):
    md = leaf_critical_points(field, model, intercept)
    total = 0.0
    for cp in md.points:
        spec = oscillator_spectrum(OscillatorModel(cp.xi, p), phi.support)
        total += float(phi(np.array(spec.values())).sum())
    return total

def _leaf_sum(field, model, intercept, t, p, phi, k, tol, seed):
    if t == 0:
        return _oracle_leaf_sum(field, model, intercept, p, phi)
    tbl = leafwise_witten_spectrum(model, field, intercept, t, p, k, tol, seed)
    tl = tbl.t_lambda
    if tl[-1] <= phi.support:
        raise InsufficientKError(
            "k=%d: t*lambda_k = %.4g does not clear the support %.4g of %s "
            "(t=%g, leaf %.6g)" % (k, tl[-1], phi.support, phi, t, intercept),
            k=k, t=t
        )
    return float(phi(tl).sum())

# tau_t(phi(Delta_t^p)): nu-average over sampled leaves of sum_j phi(t lambda_j).
# t = 0 uses the oscillator limit.
def trace(model, field, t, p, phi, k=16, tol=1e-8, seed=0, n_trans=None,
          workers=1):

    if t < 0:
        raise InvalidArgumentError("t must be >= 0, got %s" % t)
    if isinstance(phi, str):
        phi = parse_test_function(phi)

    n = model.n_trans if n_trans is None else n_trans
    cs = model.intercepts(n)
    w = model.weights(n)

    sums = _map(workers, lambda c: _leaf_sum(field, model, c, t, p, phi, k,
                                             tol, seed), cs)

    value = float(np.dot(w, sums))
    logger.debug("trace t=%g p=%d phi=%s: %.6g", t, p, phi, value)
    return value

# Trace series over a schedule followed by the t = 0 point, and the largest
# jump between consecutive values
def trace_continuity(model, field, schedule, phi, p=0, k=16, workers=1):

    if isinstance(schedule, str):
        schedule = parse_schedule(schedule)
    if isinstance(phi, str):
        phi = parse_test_function(phi)

    ts = list(schedule) + [0.0]
    values = []
    for t in ts:
        values.append(trace(model, field, t, p, phi, k, workers=workers))
        logger.info("tau_%g(phi(Delta^%d)) = %.6g", t, p, values[-1])

    jumps = np.abs(np.diff(values))
    return {
        "schedule": ts,
        "traces": values,
        "max_jump": float(jumps.max()) if len(jumps) else 0.0,
    }

# nu-integral of 1/E_1 over the leafwise critical set
def hessian_singular_integral(model, field, fcs=None):
    if fcs is None:
        fcs = foliated_critical_set(field, model)
    return float(sum(s["weight"] / s["E1"] for s in fcs.samples))

def alternating_slacks(c, beta):
    return [
        sum((-1) ** (k - i) * (c[i] - beta[i]) for i in range(k + 1))
        for k in range(len(c))
    ]

class TraceReport:

    def __init__(self, slope, schedule, traces, c, beta, slacks, error_bars,
                 phi, trace_slacks=None, continuity=None):
        self.slope = slope
        self.schedule = schedule
        self.traces = traces
        self.c = c
        self.beta = beta
        self.slacks = slacks
        self.error_bars = error_bars
        self.phi = phi
        self.trace_slacks = trace_slacks
        self.continuity = continuity

    @property
    def passed(self):
        return all(s >= -e for s, e in zip(self.slacks, self.error_bars))

    def to_dict(self):
        return {
            "slope": self.slope,
            "schedule": self.schedule,
            "traces": {str(p): v for p, v in sorted(self.traces.items())},
            "c": self.c,
            "beta": self.beta,
            "slacks": self.slacks,
            "error_bars": self.error_bars,
            "phi": str(self.phi),
            "trace_slacks": self.trace_slacks,
            "continuity": self.continuity,
            "pass": self.passed,
        }

# Plateau used for the trace-based alternating sums: counts the near-zero
# cluster only
KERNEL_PLATEAU = "plateau:0.25:0.5"

# Trace schedule: steps small enough near the top that the O(t) drift of the
# traces stays under the continuity bound
DEFAULT_SCHEDULE = "geom:0.05:0.01:25"

# Measured Morse inequalities: sum (-1)^(k-i) c_i >= sum (-1)^(k-i) beta_i,
# with c_i the nu-measure of index-i leafwise critical points and beta_i the
# nu-measure of the leafwise kernels.  Error bars compare n_trans and
# n_trans / 2 leaves.
def connes_fack_check(model, field, t_min=None, schedule=DEFAULT_SCHEDULE,
                      phi="tent:1:2:3", k=16, workers=1):

    if isinstance(schedule, str):
        schedule = parse_schedule(schedule)
    if isinstance(phi, str):
        phi = parse_test_function(phi)
    if t_min is None:
        t_min = schedule[-1]

    fcs = foliated_critical_set(field, model, workers=workers)
    half = foliated_critical_set(field, model, max(1, model.n_trans // 2),
                                 workers=workers)

    # Leaves are isometric circles and the kernel is unchanged by the
    # deformation, so beta is the undeformed leaf Betti vector times the
    # total measure
    beta = [float(v) for v in model.leaf_complex.betti_numbers()]

    slacks = alternating_slacks(fcs.counts, beta)
    coarse = alternating_slacks(half.counts, beta)
    error_bars = [abs(a - b) for a, b in zip(slacks, coarse)]

    plateau = parse_test_function(KERNEL_PLATEAU)
    kernel_traces = [
        trace(model, field, t_min, p, plateau, k, workers=workers)
        for p in range(2)
    ]
    trace_slacks = alternating_slacks(kernel_traces, beta)

    conts = [
        trace_continuity(model, field, schedule, phi, p, k, workers)
        for p in range(2)
    ]

    logger.info("Connes-Fack slope %s: c=%s beta=%s slacks=%s",
                model.slope, fcs.counts, beta, slacks)

    return TraceReport(
        model.slope, conts[0]["schedule"],
        {p: c["traces"] for p, c in enumerate(conts)}, fcs.counts, beta,
        slacks, error_bars, phi, trace_slacks,
        {"max_jump": conts[0]["max_jump"],
         "max_jump_by_degree": [c["max_jump"] for c in conts],
         "kernel_traces": kernel_traces, "t_min": t_min}
    )
