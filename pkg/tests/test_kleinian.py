import json
import math

import numpy as np
import pytest

from oracles import same_up_to_sign
from panelweb.kleinian import (
    ConjugationFailed,
    Disk,
    ExtensionCheckFailed,
    GroupSpec,
    HalfPlane,
    IdentityGenerator,
    LabelError,
    MoebiusImage,
    NotCoprime,
    OverlappingCircles,
    PowerCheckFailed,
    PreciseInvarianceFailed,
    Sector,
    SharedGeneratorMismatch,
    adjoin_extension,
    check_pairwise,
    check_precisely_invariant,
    complex_twist,
    conjugate_group,
    cyclic,
    dumps,
    first_combination,
    fuchsian_schottky,
    group_from_json,
    group_to_json,
    region_from_json,
    second_combination,
)
from panelweb.moebius import (
    IDENTITY,
    BadParameter,
    Circle,
    MoebiusTransform,
    circle_through_line,
    classify,
    compose,
    fixed_points,
    multiplier,
    pair_circles,
    power,
    rotation,
    scaling,
    translation,
)
from panelweb.panelled import lens_sector, panelled_sigma12, sector_pair


@pytest.fixture(scope="module")
def panelled():
    return panelled_sigma12()


def two_disk_groups():
    """<a> with circles left of the imaginary axis, <b> with circles right of it."""
    a = GroupSpec((("a", pair_circles(Circle(-3, 1), Circle(-3 + 4j, 1))),), ("left",))
    b = GroupSpec((("b", pair_circles(Circle(3, 1), Circle(3 + 4j, 1))),), ("right",))
    return a, b


# -- group specs ---------------------------------------------------------------------

def test_group_spec_validation():
    with pytest.raises(IdentityGenerator):
        GroupSpec((("a", IDENTITY),))
    with pytest.raises(LabelError):
        GroupSpec((("a", scaling(2)), ("a", scaling(3))))
    with pytest.raises(LabelError):
        GroupSpec((("A", scaling(2)),))
    G = GroupSpec((("a", scaling(4)), ("b", translation(1))))
    assert G.labels == ("a", "b") and "b" in G
    assert same_up_to_sign(G.word_transform("a B").matrix, compose(scaling(4), translation(-1)).matrix)


def test_group_json_round_trip():
    G = fuchsian_schottky(1, 2)
    text = dumps(group_to_json(G))
    H = group_from_json(json.loads(text))
    assert H.labels == G.labels and H.provenance == G.provenance
    assert all(same_up_to_sign(s.matrix, t.matrix) for s, t in zip(H.transforms, G.transforms))
    assert dumps(group_to_json(H)) == text


def test_group_json_accepts_circle_pairs():
    obj = {"generators": [{"label": "a", "pair": {"c1": {"circle": {"center": [-2, 0], "radius": 1}},
                                                  "c2": {"center": [2, 0], "radius": 1}}}]}
    G = group_from_json(obj)
    assert same_up_to_sign(G["a"].matrix, pair_circles(Circle(-2, 1), Circle(2, 1)).matrix)


def test_region_json():
    r = region_from_json({"sector": {"theta0": 1.0, "phi": 0.5}})
    assert isinstance(r, Sector) and r.contains(np.exp(1.2j))
    d = region_from_json({"disk": {"center": [0, 0], "radius": 2, "side": "outside"}})
    assert d.contains(3) and not d.contains(1)


# -- Fuchsian Schottky groups ---------------------------------------------------------

def test_schottky_sigma13():
    G = fuchsian_schottky(1, 3)
    assert len(G) == 4
    assert all(classify(t).hyperbolic for t in G.transforms)
    assert "8 circles" in G.provenance[0]


def test_schottky_annulus_is_cyclic():
    G = fuchsian_schottky(0, 2)
    assert len(G) == 1
    assert classify(G["a"]).hyperbolic
    # up to conjugacy it is z -> k z with k the multiplier
    k = multiplier(G["a"]).real
    assert set(fixed_points(conjugate_group(G, IDENTITY)["a"])) == set(fixed_points(G["a"]))
    assert k > 1


@pytest.mark.parametrize("g,n", [(1, 1), (2, 0), (0, 3), (2, 2)])
def test_schottky_generator_counts(g, n):
    G = fuchsian_schottky(g, n) if n else fuchsian_schottky(g, 1)
    assert len(G) == 2 * g + max(n, 1) - 1


def test_schottky_errors():
    with pytest.raises(OverlappingCircles):
        fuchsian_schottky(1, 2, gap=-0.5)
    with pytest.raises(BadParameter):
        fuchsian_schottky(0, 0)


# -- precise invariance ---------------------------------------------------------------

def test_full_sector_is_invariant_under_the_whole_group():
    G = cyclic(4)
    assert check_precisely_invariant(Sector(0.3, 0.2), "a", G) is None
    # a radially truncated sector is not <a>-invariant: a pushes it outward
    w = check_precisely_invariant(Sector(0.3, 0.2, 1.0, 4.0), "a", G)
    assert w is not None and w.reason == "in the subgroup moves B off itself"


def test_lens_sector_precisely_invariant_in_panelled_group(panelled):
    for phi in (math.pi / 4, math.pi / 3 - 0.02):
        assert check_precisely_invariant(lens_sector(phi), "a", panelled, depth=5) is None


def test_wide_sector_produces_witness(panelled):
    w = check_precisely_invariant(lens_sector(math.pi / 2), "a", panelled, depth=5)
    assert w is not None
    assert w.word  # a nontrivial word outside <a>
    assert lens_sector(math.pi / 2).contains(w.image)


def test_depth_must_be_positive():
    with pytest.raises(BadParameter):
        check_precisely_invariant(Sector(0, 0.5), "a", cyclic(4), depth=0)


# -- extension --------------------------------------------------------------------

def test_adjoin_extension_accepts_square_root():
    lam = 4.0
    g = compose(rotation(1, 2), scaling(math.sqrt(lam)))
    assert same_up_to_sign(power(g, 2).matrix, scaling(lam).matrix)
    E = adjoin_extension(cyclic(lam), g)
    assert len(E) == 2
    assert "I-bundle of type (ii)" in E.provenance[-1]


def test_adjoin_extension_rejections():
    with pytest.raises(IdentityGenerator):
        adjoin_extension(cyclic(4), IDENTITY)
    with pytest.raises(ExtensionCheckFailed):
        adjoin_extension(cyclic(4), translation(1))


# -- first combination -----------------------------------------------------------------

def test_two_cyclic_groups_combine_to_free_group():
    A, B = two_disk_groups()
    C = circle_through_line(math.pi / 2)
    # B1 is the side that the first group moves off itself
    G = first_combination(A, B, None, C, HalfPlane(C, False), HalfPlane(C, True))
    assert G.labels == ("a", "b")
    assert "free product" in G.provenance[-1] and "trivial group" in G.provenance[-1]


def test_combination_with_itself_fails_with_witness():
    A, _ = two_disk_groups()
    A2 = GroupSpec((("b", A["a"]),), ())
    C = circle_through_line(math.pi / 2)
    with pytest.raises(PreciseInvarianceFailed) as err:
        first_combination(A, A2, None, C, HalfPlane(C, False), HalfPlane(C, True), depth=4)
    assert err.value.witness.word


def test_shared_generator_mismatch():
    with pytest.raises(SharedGeneratorMismatch):
        first_combination(cyclic(4), cyclic(9), "a", None, Sector(0, 0.5), Sector(math.pi, 0.5))
    with pytest.raises(SharedGeneratorMismatch):
        first_combination(cyclic(4), cyclic(4, "b"), "a", None, Sector(0, 0.5), Sector(math.pi, 0.5))


def test_panelled_group_is_assembled(panelled):
    assert panelled.labels == ("a", "x", "y", "b", "t")
    prov = " | ".join(panelled.provenance)
    assert "first_combination" in prov and "amalgamated over <a>" in prov
    assert "round-handle step" in prov


# -- second combination ---------------------------------------------------------------

@pytest.mark.parametrize("phi", [math.pi / 4, math.pi / 3 - 0.02, math.pi / 6])
def test_second_combination_with_sector(phi):
    sp = sector_pair(phi)
    a, b = sp.group["a"], sp.group["b"]
    assert abs(multiplier(a) - multiplier(b)) < 1e-9
    G = second_combination(sp.group, "a", "b", sp.f, sp.B1, sp.B2, label="f")
    assert G.labels == ("a", "b", "f")
    assert "round-handle step" in G.provenance[-1]


def test_second_combination_identity_map():
    sp = sector_pair()
    with pytest.raises(ConjugationFailed):
        second_combination(sp.group, "a", "b", IDENTITY, sp.B1, sp.B2)
    with pytest.raises(PreciseInvarianceFailed) as err:
        second_combination(sp.group, "a", "a", IDENTITY, sp.B1, sp.B1)
    assert err.value.witness.word == ()


def test_pairwise_check_sees_identity():
    B = Sector(0, 0.5)
    w = check_pairwise(B, B, cyclic(4))
    assert w is not None and w.word == ()


# -- complex twists --------------------------------------------------------------------

@pytest.mark.parametrize("p,q", [(1, 3), (2, 3), (1, 5)])
def test_twist_root_power(p, q):
    lam = 4.0
    for a in (scaling(lam), compose(compose(MoebiusTransform(1, 2, 1, 3), scaling(lam)),
                                    MoebiusTransform(1, 2, 1, 3).inverse())):
        G = complex_twist(GroupSpec((("a", a),)), "a", p, q, lam)
        a0 = G["a0"]
        assert same_up_to_sign(power(a0, q).matrix, a.matrix)
        assert f"{p}/{q}-complex twist" in G.provenance[-1]


def test_twist_in_dilation_frame_is_the_rotated_root():
    G = complex_twist(cyclic(8), "a", 1, 3, 8)
    want = compose(scaling(2), rotation(1, 3))
    assert same_up_to_sign(G["a0"].matrix, want.matrix)


def test_twist_edge_cases():
    G = complex_twist(cyclic(4), "a", 0, 1, 4)
    assert G.labels == ("a",) and "no-op" in G.provenance[-1]
    with pytest.raises(NotCoprime):
        complex_twist(cyclic(4), "a", 2, 4, 4)
    with pytest.raises(PowerCheckFailed):
        complex_twist(cyclic(4), "a", 1, 3, 5)
    with pytest.raises(BadParameter):
        complex_twist(cyclic(4), "a", 1, 0, 4)


# -- regions ----------------------------------------------------------------------

def test_region_depth_signs():
    s = Sector(0, math.pi / 4)
    assert s.depth(np.array([1 + 0j]))[0] > 0 and s.depth(np.array([1j]))[0] < 0
    d = Disk(Circle(0, 1))
    assert d.depth(np.array([0.5]))[0] > 0 and d.depth(np.array([2.0]))[0] < 0
    h = HalfPlane(circle_through_line(0), True)
    assert h.depth(np.array([1j]))[0] > 0
    img = MoebiusImage(s, scaling(3))
    assert img.contains(3) and not img.contains(-3)
    with pytest.raises(BadParameter):
        Sector(0, math.pi)
