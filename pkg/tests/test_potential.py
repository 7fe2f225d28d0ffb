import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from velojump.errors import CriticalPointError, MorseError
from velojump.potential import (
    Potential1D,
    PotentialTorus,
    W_POINTS,
    cosine_torus,
    directional_profile,
    load_potential,
    locate_critical_points,
    named_potential,
    parse_potential,
    piecewise_cubic,
    piecewise_linear,
    polynomial,
    quartic_double_well,
    torus_trig,
    two_well_barrier,
    two_well_torus,
    zero_torus,
)


def test_quartic_critical_points():
    p = polynomial([0.25, 0, -0.5, 0, 0], (-3, 3), grid_n=1000)
    kinds = [c.kind for c in p.critical_points]
    assert kinds == ["min", "max", "min"]
    pos = [c.position for c in p.critical_points]
    assert pos == pytest.approx([-1, 0, 1], abs=1e-12)
    assert [c.value for c in p.critical_points] == pytest.approx([-0.25, 0, -0.25], abs=1e-14)


def test_parabola_and_line():
    cps = polynomial([1, 0, 0], (-1, 1)).critical_points
    assert len(cps) == 1 and cps[0].kind == "min" and abs(cps[0].position) < 1e-12
    assert locate_critical_points(lambda x: x, lambda x: np.ones_like(np.asarray(x, float)),
                                  lambda x: 0.0 * np.asarray(x, float), (0, 1)) == []


def test_morse_violation():
    # x^4: the derivative changes sign at 0 but the curvature vanishes there
    with pytest.raises(MorseError):
        locate_critical_points(lambda x: x**4, lambda x: 4 * x**3, lambda x: 12 * x**2, (-1, 1.3), 100)


def test_close_roots_flagged():
    # roots 0.02 apart land in adjacent cells of a grid with spacing 1/49
    d = lambda x: (x - 0.5) * (x - 0.52)
    with pytest.raises(CriticalPointError):
        locate_critical_points(lambda x: 0.0, d, lambda x: 2 * x - 1.02, (0, 1), grid_n=50)


def test_critical_points_alternate_and_are_morse():
    for p in (quartic_double_well(-0.1), piecewise_cubic([(0, 1), (1, 0), (2, 1.5), (3, -1), (4, 2)])):
        kinds = [c.kind for c in p.critical_points]
        assert all(a != b for a, b in zip(kinds, kinds[1:]))
        for c in p.critical_points:
            assert abs(float(p.deriv(c.position))) <= 1e-10
            assert abs(float(p.deriv2(c.position))) >= 1e-8


@pytest.mark.parametrize("p", [quartic_double_well(0.0), quartic_double_well(-0.1),
                               piecewise_cubic([(0, 1), (1, 0), (2, 1.5), (3, -1), (4, 2)])])
def test_derivative_matches_finite_difference(p, rng):
    a, b = p.domain
    xs = rng.uniform(a, b, 100)
    h = 1e-5
    fd = (p.eval(xs + h) - p.eval(xs - h)) / (2 * h)
    assert np.max(np.abs(fd - p.deriv(xs))) < 1e-8


@pytest.mark.parametrize("p", [quartic_double_well(-0.1), piecewise_linear(W_POINTS),
                               piecewise_cubic([(0, 1), (1, 0), (2, 1.5), (3, -1), (4, 2)])])
def test_monotone_between_critical_points(p):
    a, b = p.domain
    edges = [a] + list(p.cp_positions) + [b]
    for lo, hi in zip(edges[:-1], edges[1:]):
        u = p.eval(np.linspace(lo, hi, 2001))
        d = np.diff(u)
        assert np.all(d > 0) or np.all(d < 0)


def test_piecewise_linear_rejects_bad_input():
    with pytest.raises(ValueError):
        piecewise_linear([(0, 1), (1, 1), (2, 3)])
    with pytest.raises(ValueError):
        piecewise_linear([(0, 0), (1, 1)])
    with pytest.raises(ValueError):
        piecewise_linear([(0, 1), (0, 0), (1, 1)])


def test_piecewise_linear_extends_linearly():
    p = piecewise_linear(W_POINTS)
    assert float(p.eval(-1.0)) == pytest.approx(2.0)
    assert float(p.eval(5.0)) == pytest.approx(5.0)
    assert [c.position for c in p.minima] == [1.0, 3.0]


@given(st.floats(0.1, 10), st.floats(-5, 5))
def test_scaled(s, shift):
    p = piecewise_linear(W_POINTS)
    q = p.scaled(s, shift)
    xs = np.linspace(-1, 5, 37)
    assert np.allclose(q.eval(xs), s * p.eval(xs) + shift, atol=1e-12)
    assert np.allclose(q.deriv(xs), s * p.deriv(xs), atol=1e-12)


@pytest.mark.parametrize("p", [cosine_torus(2), two_well_torus(2), two_well_torus(3)])
def test_torus_periodic_gradient_and_bound(p, rng):
    x = rng.random((50, p.dim))
    for i in range(p.dim):
        e = np.zeros(p.dim)
        e[i] = 1.0
        assert np.max(np.abs(p.eval(x) - p.eval(x + e))) < 1e-10
    h = 1e-6
    for i in range(p.dim):
        e = np.zeros(p.dim)
        e[i] = h
        fd = (p.eval(x + e) - p.eval(x - e)) / (2 * h)
        assert np.max(np.abs(fd - p.grad(x)[:, i])) < 1e-6
    g = np.linalg.norm(p.grad(rng.random((5000, p.dim))), axis=1)
    assert np.all(g <= p.grad_sup)


def test_two_well_structure():
    p = two_well_torus(2)
    assert float(p.eval(np.zeros(2))) == pytest.approx(-1.5)
    assert float(p.eval(np.array([0.5, 0.0]))) == pytest.approx(-0.5)
    assert two_well_barrier() == pytest.approx(0.5625)
    # saddle on the x_1 axis where cos(2 pi x_1) = -b/(4a)
    xs = np.linspace(0.25, 0.5, 20001)
    profile = p.eval(np.column_stack([xs, np.zeros_like(xs)]))
    assert profile.max() - (-0.5) == pytest.approx(0.5625, abs=1e-6)


def test_directional_profile_examples():
    prof = directional_profile(zero_torus(3), [0.2, 0.3, 0.4], [0, 0, 1])
    assert prof(0.7)[0] == 0 and prof(0.7)[1] == 0
    p = torus_trig([[1.0]], [1 / (2 * math.pi)], [0.0])
    v, s = directional_profile(p, [0.0], [1.0])(0.25)
    assert v == pytest.approx(0.0, abs=1e-15) and s == pytest.approx(-1.0, abs=1e-14)
    q = cosine_torus(2)
    v, _ = directional_profile(q, [0.9, 0.3], [1.0, 0.0])(0.2)
    assert v == pytest.approx(float(q.eval(np.array([0.1, 0.3]))), abs=1e-12)


def test_directional_profile_slope_integrates(rng):
    p = two_well_torus(2)
    y = rng.normal(size=2)
    y /= np.linalg.norm(y)
    prof = directional_profile(p, rng.random(2), y)
    s = np.linspace(0, 1.7, 10001)
    v, d = prof(s)
    trap = np.sum(0.5 * (d[1:] + d[:-1]) * np.diff(s))
    assert trap == pytest.approx(v[-1] - v[0], abs=1e-6)


def test_directional_profile_rejects_nonunit():
    with pytest.raises(ValueError):
        directional_profile(cosine_torus(2), [0, 0], [1, 1])


def test_parse_formats(tmp_path):
    q = parse_potential("kind=quartic\ncoeffs: 0.25 0 -0.5 -0.1 0\ndomain: -3 3\n")
    assert float(q.eval(0.5)) == pytest.approx(0.5**4 / 4 - 0.125 - 0.05)
    w = parse_potential("# W\nkind=piecewise_linear\n0 1\n1 0\n2 1.5\n3 -1\n4 2\n")
    assert [c.position for c in w.critical_points] == [1, 2, 3]
    t = parse_potential("kind=torus_trig\ndim: 2\nterm: 0.5 0 1 0\nterm: 0.5 0 0 1\n")
    assert isinstance(t, PotentialTorus) and t.dim == 2
    assert float(t.eval(np.zeros(2))) == pytest.approx(1.0)
    f = tmp_path / "w.txt"
    f.write_text("kind=piecewise_linear\n0 1\n1 0\n2 1.5\n3 -1\n4 2\n")
    assert isinstance(load_potential(str(f)), Potential1D)
    with pytest.raises(ValueError):
        parse_potential("kind=spline\n")
    with pytest.raises(KeyError):
        named_potential("nope")
