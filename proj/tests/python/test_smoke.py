import math

import pytest

import modshadow as ms


def test_frame_algebra_roundtrip():
    g = ms.tangent_to_frame(ms.UnitTangent(0.2, 1.3, 0.9))
    u = ms.frame_to_tangent(g)
    assert u.base.re == pytest.approx(0.2, abs=1e-12)
    assert u.base.im == pytest.approx(1.3, abs=1e-12)
    h = ms.compose(g, ms.inverse(g))
    assert ms.chart_dist(h, ms.FrameElement.identity()) < 1e-13


def test_flow_contraction_identity():
    g = ms.FrameElement.identity()
    lhs = ms.geodesic_flow(ms.stable_move(g, 0.5), 1.0)
    rhs = ms.stable_move(ms.geodesic_flow(g, 1.0), 0.5 * math.exp(-1.0))
    assert ms.chart_dist(lhs, rhs) < 1e-13


def test_spectrum_and_axis():
    classes = ms.enumerate_classes(6)
    assert classes[0].word == "RL"
    assert classes[0].length == pytest.approx(1.9248473002384139, abs=1e-12)
    frame, period = ms.axis_frame(classes[0].representative)
    assert period == pytest.approx(classes[0].length, abs=1e-12)
    assert ms.quotient_dist(ms.geodesic_flow(frame, period), frame) < 1e-10


def test_bracket_roundtrip():
    y = ms.tangent_to_frame(ms.UnitTangent(0.1, 1.2, 1.4))
    z = ms.stable_move(y, 0.03)
    br = ms.bowen_bracket(y, z, 0.1)
    assert br.residual < 1e-11
    assert br.params.sigma == pytest.approx(-0.03, abs=1e-12)


def test_find_periodic_orbit_on_axis():
    gamma = ms.DeckElement(2, 1, 1, 1)
    frame, period = ms.axis_frame(gamma)
    r = ms.find_periodic_orbit(frame, 0.19)
    assert r.T == pytest.approx(period, abs=1e-9)
    assert r.closure_residual <= 1e-9
    assert r.start_distance < 1e-6
    assert ms.canonical_word(r.gamma) == "RL"
    assert abs(r.gamma.trace()) == 3


def test_density_smoke():
    w = ms.Window()
    w.im_hi = 2.0
    w.sample_count = 5
    rep = ms.density_experiment(w, 0.2, seed=7)
    assert rep.samples == 5
    assert rep.coverage >= 0.8
    assert rep.max_start_distance <= 0.2
