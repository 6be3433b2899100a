
# Desk-scale runs against the oscillator limits.  Minutes each; deselect
# with -m 'not slow'.

import numpy as np
import pytest

from witten_lab.cli import main
from witten_lab.complex import build_complex
from witten_lab.fields import make_field
from witten_lab.foliation import build_kronecker, connes_fack_check
from witten_lab.mesh import build_circle, build_flat_torus
from witten_lab.morse import find_critical_points
from witten_lab.oracle import aggregate_limit_spectrum
from witten_lab.output import read_json
from witten_lab.witten import (
    cluster_count, complex_betti, deform, parse_schedule, solve_at,
    spectral_flow, supersymmetry_pairs
)

example_circle_limits = [0.0, 2.0, 2.0, 4.0, 4.0]

pytestmark = pytest.mark.slow

def test_circle_convergence():

    cx = build_complex(build_circle(8192))
    f = make_field("cos-theta")

    tbl, (count, method) = solve_at(cx, f, 0.02, 0, 5)
    ell = np.array(example_circle_limits)

    assert(count == 1)
    assert(np.all(np.abs(tbl.t_lambda - ell) <= 0.05 * (1 + ell)))

    sched = parse_schedule("geom:1.0:0.02:25")
    flow = spectral_flow(cx, f, sched, 0, 5)

    assert(flow.skipped == [])
    assert(all(k["count"] == 1 for k in flow.kernel[0]))

    # Distance to the limit shrinks over the last five schedule points
    err = np.abs(np.array(flow.degrees[0][-5:]) - ell)
    assert(np.all(np.diff(err, axis=0) <= 1e-9))

def test_torus_convergence():

    cx = build_complex(build_flat_torus(192, 192))
    f = make_field("sum-cos")

    tbl, (count, method) = solve_at(cx, f, 0.05, 1, 8)
    assert(count == 2)

    md = find_critical_points(f, cx.mesh)
    ell = np.array(aggregate_limit_spectrum(md, 1, 6.0).values()[:8])

    assert(np.all(np.abs(tbl.t_lambda - ell) <= 0.1 * np.maximum(ell, 1)))

def test_small_eigenvalues_count_critical_points():

    cx = build_complex(build_flat_torus(192, 192))
    f = make_field("cos2-plus-cos")
    C = [2, 4, 2]

    for p, k in enumerate([4, 6, 4]):
        tbl, (count, method) = solve_at(cx, f, 0.05, p, k)
        assert(cluster_count(tbl, 0.5) == C[p])
        assert(count == complex_betti(cx)[p])

def test_supersymmetry():

    cx = build_complex(build_circle(2048))
    wc = deform(cx, make_field("cos-theta"), 0.2)

    pairs = supersymmetry_pairs(wc, 6)

    assert(np.all(np.abs(pairs[:, 0] - pairs[:, 1]) <= 1e-6 * pairs[:, 0]))

@pytest.mark.parametrize("args,C", [
    (["--model", "circle", "--field", "cos-theta"], [1, 1]),
    (["--model", "torus", "--n", "32", "--field", "sum-cos"], [1, 2, 1]),
    (["--model", "torus", "--n", "32", "--field", "cos2-plus-cos"], [2, 4, 2]),
])
def test_morse_check(tmp_path, args, C):

    assert(main(["morse-check", "--out", str(tmp_path)] + args) == 0)

    report = read_json(str(tmp_path / "morse.json"))["report"]
    assert(report["C"] == C)
    assert(report["pass"] is True)
    assert(report["euler_equality"] is True)

@pytest.mark.parametrize("slope", [(1, 0), (1, 1)])
@pytest.mark.parametrize("epsilon", [0.0, 0.3])
def test_foliated_inequalities(slope, epsilon):

    model = build_kronecker(*slope, n_leaf=512, n_trans=64)
    report = connes_fack_check(model, make_field("tilted", epsilon=epsilon))

    assert(report.passed)
    assert(all(e <= 0.02 for e in report.error_bars))
    assert(report.continuity["max_jump"] <= 0.05)
    assert(all(j <= 0.05 for j in report.continuity["max_jump_by_degree"]))
