import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial import cKDTree

from oracles import cantor_points
from panelweb.kleinian import GroupSpec, conjugate_group, cyclic
from panelweb.moebius import Circle, MoebiusTransform, apply_array, pair_circles
from panelweb.limitset import (
    BOUNDARY,
    HANDLEBODY_RANGE,
    PANELLED_WEB_CONSISTENT,
    TAU_DEDUP,
    BadDimension,
    DegenerateScales,
    ElementaryGroup,
    TooFewPoints,
    box_counting_dimension,
    canonical_order,
    dedup,
    dimension_threshold_check,
    forward_invariance_defect,
    limit_set_sample,
    prepare_planar,
    read_points_csv,
    sample_from_points,
    sample_to_csv,
    scalar_sign,
    scale_ladder,
    to_sphere,
)


def schottky2(r=1.0):
    """Rank-2 classical Schottky group: circles of radius r at +-2 and +-2i."""
    return GroupSpec((("a", pair_circles(Circle(-2, r), Circle(2, r))),
                      ("b", pair_circles(Circle(-2j, r), Circle(2j, r)))), ("rank-2 Schottky",))


def test_cyclic_group_has_two_limit_points():
    with pytest.warns(ElementaryGroup):
        s = limit_set_sample(cyclic(4), 6)
    assert s.points.tolist() == [0j] and s.has_infinity and len(s) == 2
    assert s.elementary


def test_trivial_group_returns_seeds():
    with pytest.warns(ElementaryGroup):
        s = limit_set_sample(GroupSpec(()), 4, seeds=[1 + 1j, 2])
    assert sorted(s.points.tolist(), key=lambda z: (z.real, z.imag)) == [1 + 1j, 2]
    assert s.elementary and s.generator_count == 0


def test_schottky_forward_invariance():
    G = schottky2()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        s8 = limit_set_sample(G, 8)
    s9 = limit_set_sample(G, 9)
    assert forward_invariance_defect(G, s8, s9) <= 10 * TAU_DEDUP


def test_sample_is_deterministic_and_sorted():
    G = schottky2()
    a, b = limit_set_sample(G, 5), limit_set_sample(G, 5)
    assert np.array_equal(a.points, b.points)
    assert sample_to_csv(a) == sample_to_csv(b)
    assert np.array_equal(a.points, a.points[canonical_order(a.points)])


def test_conjugation_equivariance():
    G = schottky2()
    M = MoebiusTransform(1, 0.3 + 0.1j, 0.2, 1)
    s = limit_set_sample(G, 5)
    t = limit_set_sample(conjugate_group(G, M), 5)
    mapped = apply_array(M, s.as_array())
    assert len(t) == len(s)
    d, _ = cKDTree(to_sphere(t.as_array())).query(to_sphere(mapped))
    assert d.max() < 1e-7


def test_dedup_merges_close_points():
    z = np.array([1.0, 1.0 + 1e-12, 2.0, complex(np.inf, np.inf), complex(np.inf, np.inf)])
    out = dedup(z)
    assert len(out) == 3 and np.isinf(out[-1])


@given(st.lists(st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False), max_size=50))
def test_dedup_properties(pts):
    z = np.array(pts, dtype=complex)
    out = dedup(z)
    assert len(out) <= len(z)
    if len(out) > 1:
        d, _ = cKDTree(to_sphere(out)).query(to_sphere(out), k=2)
        assert d[:, 1].min() > TAU_DEDUP
    if len(z):
        d, _ = cKDTree(to_sphere(out)).query(to_sphere(z))
        assert d.max() <= TAU_DEDUP


# -- box counting ------------------------------------------------------------------------

def test_cantor_oracle():
    est = box_counting_dimension(cantor_points(12).astype(complex))
    assert abs(est.d - math.log(2) / math.log(3)) <= 0.1
    assert est.fit_r2 > 0.95


def test_segment_oracle():
    z = np.linspace(0, 1, 10_000).astype(complex)
    assert abs(box_counting_dimension(z).d - 1.0) <= 0.1


def test_filled_square_is_near_two():
    x, y = np.meshgrid(np.linspace(0, 1, 300), np.linspace(0, 1, 300))
    assert box_counting_dimension((x + 1j * y).ravel()).d > 1.8


def test_schottky_dimension_in_unit_interval():
    est = box_counting_dimension(limit_set_sample(schottky2(), 8))
    assert 0 < est.d < 1
    assert scalar_sign(est.d, 4).sign == "positive"


def test_infinity_changes_chart():
    s = sample_from_points(list(np.linspace(0, 1, 200).astype(complex)) + [complex(np.inf, np.inf)])
    z = prepare_planar(s)
    assert np.isfinite(z).all() and len(z) == 201


def test_dimension_errors():
    with pytest.raises(TooFewPoints):
        box_counting_dimension(np.arange(10).astype(complex))
    with pytest.raises(DegenerateScales):
        box_counting_dimension(np.zeros(200, dtype=complex))
    with pytest.raises(DegenerateScales):
        box_counting_dimension(np.linspace(0, 1, 200).astype(complex), scales=[0.1])
    with pytest.raises(DegenerateScales):
        scale_ladder(1.0, 8, 1.5)


def test_explicit_scales_are_reported():
    est = box_counting_dimension(np.linspace(0, 1, 1000).astype(complex), scales=[0.1, 0.05, 0.025])
    assert est.scales_used == (0.1, 0.05, 0.025)
    assert est.to_json()["scales"] == [0.1, 0.05, 0.025]


def test_csv_round_trip():
    s = limit_set_sample(schottky2(), 3)
    text = sample_to_csv(s)
    assert text.startswith("re,im\n")
    back = read_points_csv(text)
    assert np.array_equal(back, s.as_array())
    with pytest.raises(ValueError):
        read_points_csv("x,y\n1,2\n")


# -- sign and labels ------------------------------------------------------------------------

def test_scalar_sign_examples():
    assert scalar_sign(1.2, 4).sign == "negative"
    assert scalar_sign(1.0, 4).sign == "zero"
    assert scalar_sign(0.4, 3).sign == "positive"
    assert scalar_sign(0.4, 3).quantity == pytest.approx(0.1)
    for bad in ((-0.1, 4), (1.0, 2), (math.nan, 4)):
        with pytest.raises(BadDimension):
            scalar_sign(*bad)


@given(st.floats(0, 2))
def test_scalar_sign_is_sign_of_one_minus_d(d):
    s = scalar_sign(d, 4)
    if abs(1 - d) > 1e-6:
        assert s.sign == ("positive" if d < 1 else "negative")


def test_threshold_labels():
    assert dimension_threshold_check(0.7) == HANDLEBODY_RANGE
    assert dimension_threshold_check(1.0) == BOUNDARY
    assert dimension_threshold_check(1.3) == PANELLED_WEB_CONSISTENT
