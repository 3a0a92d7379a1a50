import math
from fractions import Fraction

import numpy as np
import pytest

from cf_core import future_t, past_v, sample_generic_real
from natural_extension import (LOG2, FixedPointError, OrbitPoint, Rectangle, curve_config, d_on_f, d_on_g,
                               density_tv, ext_map, f_curve, g_curve, gauss_map, m_tong, orbit,
                               preimage_boxes, rectangle_measure, rectangle_of)


def test_gauss_map():
    assert gauss_map(Fraction(3, 7)) == Fraction(1, 3)
    assert gauss_map(Fraction(0)) == 0
    assert gauss_map(0.4) == pytest.approx(0.5)


def test_ext_map_is_exact_on_fractions():
    p = ext_map(OrbitPoint(Fraction(3, 7), Fraction(0)))
    assert p == OrbitPoint(Fraction(1, 3), Fraction(1, 2))
    assert p.exact


def test_ext_map_undefined_at_t_zero():
    with pytest.raises(FixedPointError):
        ext_map(OrbitPoint(Fraction(0), Fraction(1, 2)))


def test_orbit_stops_on_rationals():
    points = orbit(Fraction(5, 8), 10)
    assert len(points) == 5
    assert points[-1].t == 0
    # v_4 = q_3 / q_4 for 5/8 = [0; 1, 1, 1, 2]
    assert points[-1].v == Fraction(3, 8)


def test_points_outside_omega_rejected():
    with pytest.raises(ValueError):
        OrbitPoint(1, 0)


def test_rectangle_of():
    rect = rectangle_of(OrbitPoint(0.3, 0.4))
    assert (rect.a, rect.b) == (2, 3)
    assert rect.contains(OrbitPoint(Fraction(3, 10), Fraction(2, 5)))


def test_density_and_measure():
    assert density_tv(0.0, 0.0) == pytest.approx(1 / LOG2)
    assert rectangle_measure(0.0, 1.0, 0.0, 1.0) == pytest.approx(1.0)
    assert Rectangle(1, 1).measure() == pytest.approx(math.log(10 / 9) / LOG2)


def test_preimages_cover_omega():
    boxes, tail = preimage_boxes((0.0, 1.0, 0.0, 1.0), max_digit=1000)
    assert len(boxes) == 1000
    total = sum(rectangle_measure(*box) for box in boxes)
    assert total + tail == pytest.approx(1.0, abs=1e-12)


def test_preimage_measure_is_invariant():
    box = (0.2, 0.3, 0.25, 0.5)
    boxes, tail = preimage_boxes(box)
    assert tail == 0.0
    assert sum(rectangle_measure(*b) for b in boxes) == pytest.approx(rectangle_measure(*box), rel=1e-12)


def test_curves_parametrize_the_thresholds():
    a, b, r, R, t = 2, 3, 2.9, 3.6, 0.3
    assert d_on_f(a, r, t) == pytest.approx(1 / (t * f_curve(a, r, t)))
    assert d_on_g(b, R, t) == pytest.approx(1 / (t * g_curve(b, R, t)))


def test_g_curve_needs_positive_t():
    with pytest.raises(ValueError):
        g_curve(1, 3.6, 0.0)


def test_curve_config_values():
    config = curve_config(1, 3, 2.9, 3.6)
    assert config.F == pytest.approx(11.6 / 16.6)
    assert config.G == pytest.approx(7.2 / 28.6)
    assert config.G1 == pytest.approx(3.6 / 14.8)
    assert set(config.to_dict()) == {'a', 'b', 'r', 'R', 'F', 'G', 'G1', 'S', 'w', 'L'}


@pytest.mark.parametrize('a, b', [(1, 1), (2, 3), (17, 29), (5, 1)])
def test_curves_meet_at_s(a, b):
    config = curve_config(a, b, 2.9, 3.6)
    assert f_curve(a, 2.9, config.S) == pytest.approx(g_curve(b, 3.6, config.S), rel=1e-10)
    assert m_tong(a, b, 2.9, 3.6) == pytest.approx(d_on_f(a, 2.9, config.S), rel=1e-10)


def test_m_tong_reference_value():
    assert m_tong(1, 1, 2.9, 3.6) == pytest.approx(2.2993, abs=1e-4)


def test_curve_config_rejects_small_thresholds():
    with pytest.raises(ValueError):
        curve_config(1, 1, 1.0, 3.6)


def test_orbit_reaches_future_and_past_of_random_reals(rng):
    for _ in range(3):
        x = sample_generic_real(rng)
        points = orbit(x.value, 40)
        assert len(points) == 41
        for n, point in enumerate(points):
            assert point == OrbitPoint(future_t(x, n), past_v(x, n))


def test_preimage_measure_on_random_boxes(rng):
    for _ in range(50):
        t0, t1 = sorted(rng.uniform(0.0, 1.0, size=2))
        v0, v1 = sorted(rng.uniform(1e-3, 1.0, size=2))
        boxes, tail = preimage_boxes((t0, t1, v0, v1))
        assert tail == 0.0
        total = sum(rectangle_measure(*box) for box in boxes)
        assert total == pytest.approx(rectangle_measure(t0, t1, v0, v1), abs=1e-9)


def test_preimage_tail_bound_covers_dropped_branches():
    box = (0.1, 0.9, 1e-5, 0.5)
    boxes, tail = preimage_boxes(box, max_digit=1000)
    assert tail > 0
    total = sum(rectangle_measure(*b) for b in boxes)
    assert 0 <= rectangle_measure(*box) - total <= tail + 1e-12


@pytest.mark.parametrize('r, R', [(1.5, 1.5), (2.9, 3.6), (5.2, 2.1), (1.1, 9.0)])
def test_m_tong_is_d_at_the_intersection(r, R):
    for a in range(1, 11):
        for b in range(1, 11):
            S = curve_config(a, b, r, R).S
            value = m_tong(a, b, r, R)
            assert d_on_f(a, r, S) == pytest.approx(value, rel=1e-9)
            assert d_on_g(b, R, S) == pytest.approx(value, rel=1e-9)


@pytest.mark.parametrize('a, b, r, R', [(1, 1, 2.9, 3.6), (3, 7, 1.5, 1.5), (17, 29, 5.2, 2.1)])
def test_d_is_monotone_along_the_curves(a, b, r, R):
    ts = np.linspace(1e-3, 1.0, 2001)
    assert np.all(np.diff(d_on_f(a, r, ts)) < 0)

    pole = R / (b * (R + 1))
    ts = np.linspace(1e-3 * pole, 0.999 * pole, 2001)
    assert np.all(np.diff(d_on_g(b, R, ts)) > 0)
