
import math

import numpy as np
import pytest

from witten_lab.errors import (
    DomainMismatchError, IncompleteSearchWarning, NotMorseError
)
from witten_lab.fields import make_field, rescale_field
from witten_lab.mesh import build_circle, build_flat_torus, load_mesh
from witten_lab.morse import (
    CriticalPoint, MorseData, _classify, evaluate_field, find_critical_points,
    morse_counts
)

def test_circle_cos():

    md = find_critical_points(make_field("cos-theta"), build_circle(64))

    assert(md.counts == [1, 1])
    assert(len(md) == 2)

    top, bottom = md.points
    assert(abs(top.location[0]) < 1e-9)
    assert(abs(bottom.location[0] - math.pi) < 1e-9)
    assert(np.allclose(top.xi, [-1.0]))
    assert(np.allclose(bottom.xi, [1.0]))
    assert(top.index == 1 and bottom.index == 0)
    assert(abs(top.value - 1.0) < 1e-12)

def test_circle_radius():

    md = find_critical_points(make_field("cos-theta"), build_circle(64, 2.0))

    # cos(s/R): second derivative -1/R^2 at s = 0
    assert(np.allclose(md.points[0].xi, [-0.25]))
    assert(abs(md.points[1].location[0] - 2 * math.pi) < 1e-9)

def test_cos_k():
    md = find_critical_points(make_field("cos-k-theta", k=3), build_circle(96))
    assert(md.counts == [3, 3])

def test_sum_cos():

    md = find_critical_points(make_field("sum-cos"), build_flat_torus(16, 16))

    assert(md.counts == [1, 2, 1])
    assert(md.euler_sum() == 0)

    want = [(0, 0), (0, math.pi), (math.pi, 0), (math.pi, math.pi)]
    got = [tuple(cp.location) for cp in md.points]
    assert(np.allclose(got, want, atol=1e-9))

def test_cos2_plus_cos():
    md = find_critical_points(make_field("cos2-plus-cos"),
                              build_flat_torus(16, 16))
    assert(md.counts == [2, 4, 2])

def test_tilted():

    md = find_critical_points(make_field("tilted", epsilon=0.3),
                              build_flat_torus(12, 12))

    assert(md.counts == [1, 2, 1])
    assert(np.allclose(md.points[0].xi, [-1.0, -0.3]))

def test_height(octahedron_path):

    md = find_critical_points(make_field("height"), load_mesh(octahedron_path))

    assert(md.counts == [1, 0, 1])
    assert(abs(md.points[0].location[2] + 1) < 1e-12)
    assert(abs(md.points[1].location[2] - 1) < 1e-12)

def test_constant():
    with pytest.raises(NotMorseError):
        find_critical_points(make_field("constant"), build_circle(16))

def test_wrong_model():
    with pytest.raises(DomainMismatchError):
        find_critical_points(make_field("sum-cos"), build_circle(16))

def test_degenerate():

    mesh = build_circle(16)

    with pytest.raises(NotMorseError) as e:
        _classify(make_field("cos-theta"), mesh, np.array([0.5]),
                  np.array([[0.0]]))

    assert(e.value.details["location"] == [0.5])
    assert(e.value.exit_code == 3)

def test_missed_point(mocker):

    mocker.patch("witten_lab.morse._newton", return_value=np.zeros((0, 1)))

    with pytest.warns(IncompleteSearchWarning):
        md = find_critical_points(make_field("cos-theta"), build_circle(15))

    assert(len(md) == 0)

def test_evaluate():

    mesh = build_circle(4)
    f = make_field("cos-theta")
    half = math.sqrt(2) / 2

    assert(np.allclose(evaluate_field(f, mesh), [1, 0, -1, 0], atol=1e-15))
    assert(np.allclose(evaluate_field(f, mesh, "barycenters", 1),
                       [half, half, -half, -half]))

def test_data_dict():

    md = MorseData([
        CriticalPoint([0.0, 0.0], [-1.0, -1.0], 2.0),
        CriticalPoint([math.pi, math.pi], [1.0, 1.0], -2.0),
    ], 2)

    d = md.to_dict()

    assert(d["counts"] == [1, 0, 1])
    assert(d["points"][0]["index"] == 2)

    back = MorseData.from_dict(d)
    assert(back.counts == md.counts)
    assert(back.points[1].value == -2.0)

def test_seed_density():

    f = make_field("cos2-plus-cos")

    coarse = find_critical_points(f, build_flat_torus(16, 16))
    fine = find_critical_points(f, build_flat_torus(32, 32))

    assert(len(coarse) == len(fine))
    assert(np.allclose([cp.location for cp in coarse.points],
                       [cp.location for cp in fine.points], atol=1e-9))
    assert([cp.index for cp in coarse.points] ==
           [cp.index for cp in fine.points])

def test_rescaled_index():

    mesh = build_flat_torus(16, 16)
    f = make_field("cos2-plus-cos")
    md = find_critical_points(f, mesh)

    for c in [0.25, 4.0]:
        scaled = find_critical_points(rescale_field(f, c), mesh)
        assert([cp.index for cp in scaled.points] ==
               [cp.index for cp in md.points])
        assert(np.allclose([cp.xi for cp in scaled.points],
                           [c * cp.xi for cp in md.points]))

def test_morse_counts():

    assert(morse_counts(MorseData([], 2)) == [0, 0, 0])
    assert(morse_counts(MorseData([], 1)) == [0, 0])

    md = find_critical_points(make_field("cos-k-theta", k=2), build_circle(32))
    assert(morse_counts(md) == [2, 2])
