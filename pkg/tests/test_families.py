import pytest

from panelweb.families import (
    FAMILIES,
    build_family,
    family_table,
    m1,
    m1_g,
    m1_gn,
    m2,
    m3,
    m3_gn,
    m4_n,
)
from panelweb.handlebody import FORM_H, HandleDecomposition, chain_ranks, invariants, presentation_of
from panelweb.intlinalg import AbelianInvariants, exponent_matrix
from panelweb.moebius import BadParameter


def test_printed_manifolds():
    assert m1().report().h1 == AbelianInvariants(4, ())
    assert m2().report().h1 == AbelianInvariants(3, (6,))
    assert m3().report().chi == -2
    for rec in (m1(), m2(), m3()):
        assert rec.matches_closed_forms()


def test_m3_generators_and_relators():
    p = presentation_of(m3().decomposition)
    assert p.generators == tuple("abcef")
    assert str(p) == "< a, b, c, e, f | A b a b c, e C E c, F^3 c >"


def test_m1g():
    assert m1_g(1).report() == m1().report()
    r = m1_g(5).report()
    assert (r.b1, r.chi) == (12, -20)
    assert all(m1_g(g).asserted_form == FORM_H for g in range(1, 11))
    assert len(m1_g(3).decomposition.one_handles) == 2 * 3 + 4


def test_m1gn():
    r = m1_gn(1, 1).report()
    assert (r.b1, r.chi) == (4, -4)
    r = m1_gn(2, 3).report()
    assert (r.b1, r.chi) == (10, -16)
    assert all(m1_gn(g, n).report().b2 == 2 for g in range(0, 4) for n in range(1, 4))


def test_m3gn():
    r = m3_gn(0, 1).report()
    assert (r.b1, r.b2, r.chi) == (3, 4, 0)
    assert m3_gn(3, 2).report().chi == -16
    for g in range(0, 4):
        for n in range(1, 4):
            assert chain_ranks(m3_gn(g, n).decomposition).as_tuple() == (1, 2 * g + 7 * n, 10 * n + 2, 2 * g + 7 * n, 1)
            assert len(m3_gn(g, n).decomposition.two_handles) == 5 * n + 1


def test_m4n():
    r = m4_n(3).report()
    assert (r.b1, r.chi) == (7, -6)
    r = m4_n(1).report()
    assert (r.b1, r.b2, r.chi) == (3, 2, -2)
    assert chain_ranks(m4_n(4).decomposition).c2 == 8 * 4


def test_m4n_abelianization_survivors():
    # the exponent matrix kills every g, h, j column: the free part is spanned by k_i, l_i, m
    rec = m4_n(2)
    pres = presentation_of(rec.decomposition)
    rows = exponent_matrix(pres)
    gens = pres.generators
    # adding relators that kill k_i, l_i, m leaves a trivial group
    extra = [[1 if g == x else 0 for g in gens] for x in gens if x[0] in "klm"]
    from panelweb.intlinalg import invariants_of_matrix

    assert invariants_of_matrix(rows + extra, len(gens)) == AbelianInvariants(0, ())
    assert invariants_of_matrix(rows, len(gens)).free_rank == 5


def test_parameter_validation():
    for bad in (lambda: m1_g(0), lambda: m1_gn(0, 0), lambda: m3_gn(-1, 1), lambda: m4_n(0), lambda: m4_n(1.5)):
        with pytest.raises(BadParameter):
            bad()
    with pytest.raises(BadParameter):
        build_family("m9")
    with pytest.raises(BadParameter):
        build_family("m1g")
    with pytest.raises(BadParameter):
        build_family("m1", g=2)


def test_full_sweep_matches_closed_forms():
    for name, rng in (("m1g", {"g": range(1, 11)}), ("m1gn", {"g": range(1, 11), "n": range(1, 11)}),
                      ("m3gn", {"g": range(1, 11), "n": range(1, 11)}), ("m4n", {"n": range(1, 11)})):
        rows, verdicts = family_table(name, rng)
        assert all(r.matches_closed_forms for r in rows)
        for v in verdicts:
            assert v.chi_strictly_decreasing and v.b1_strictly_increasing and v.obstructed_when_chi_negative


def test_family_table_rejects_unknown_parameters():
    with pytest.raises(BadParameter):
        family_table("m4n", {"g": range(1, 3)})
    with pytest.raises(BadParameter):
        family_table("m1gn", {"g": range(1, 3)})


def test_registry_covers_constructors():
    assert set(FAMILIES) == {"m1", "m2", "m3", "m1g", "m1gn", "m3gn", "m4n"}
