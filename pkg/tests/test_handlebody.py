import json

import pytest
from hypothesis import given, strategies as st

from panelweb.families import m1, m2, m3
from panelweb.handlebody import (
    FORM_H,
    FORM_UNKNOWN,
    FORM_ZERO,
    HandleDecomposition,
    HandleError,
    InconsistentDecomposition,
    InconsistentReport,
    IntersectionForm,
    InvariantReport,
    NotDoubled,
    TwoHandle,
    boundary_check,
    chain_ranks,
    double,
    einstein_obstructed,
    euler_characteristic,
    from_spec_json,
    invariants,
    parse_form,
    presentation_of,
    to_spec_json,
)
from panelweb.intlinalg import AbelianInvariants
from panelweb.words import parse_word

EMPTY = HandleDecomposition((), (), doubled=True)


def test_presentations_of_printed_manifolds():
    assert str(presentation_of(m1().decomposition)) == "< a, b, c, d, e, f | A B a b c D, e d E C, F^3 D >"
    p2 = presentation_of(m2().decomposition)
    assert p2.relators[1] == parse_word("e d^-1 e^-1 c^-1")
    assert presentation_of(EMPTY).generators == () and presentation_of(EMPTY).relators == ()


def test_chain_ranks_and_euler_characteristic():
    assert chain_ranks(m1().decomposition).as_tuple() == (1, 6, 6, 6, 1)
    assert chain_ranks(EMPTY).as_tuple() == (1, 0, 0, 0, 1)
    assert euler_characteristic(m1().decomposition) == -4
    assert euler_characteristic(m3().decomposition) == -2
    assert euler_characteristic(EMPTY) == 2


def test_undoubled_is_rejected():
    hd = HandleDecomposition.from_words("ab", ["A B a b"], doubled=False)
    with pytest.raises(NotDoubled):
        chain_ranks(hd)
    with pytest.raises(NotDoubled):
        invariants(hd)
    assert chain_ranks(double(hd)).as_tuple() == (1, 2, 2, 2, 1)


def test_report_m1():
    r = invariants(m1().decomposition, FORM_H)
    assert r.chi == -4
    assert r.h1 == AbelianInvariants(4, ())
    assert r.betti == (1, 4, 2, 4, 1)
    assert r.h2 == AbelianInvariants(2, ())
    assert r.h3_rank == 4 and r.signature == 0
    assert r.intersection_form == FORM_H and r.einstein_obstructed


def test_report_m2():
    r = invariants(m2().decomposition)
    assert r.h1 == AbelianInvariants(3, (6,))
    assert r.b2 == 0
    assert r.h2 == AbelianInvariants(0, (6,))
    assert r.h3_rank == 3
    assert r.intersection_form == FORM_ZERO


def test_report_empty_and_unknown_form():
    r = invariants(EMPTY)
    assert r.chi == 2 and r.betti == (1, 0, 0, 0, 1) and not r.einstein_obstructed
    r = invariants(m1().decomposition)
    assert r.intersection_form == FORM_UNKNOWN


def test_report_with_dimension_adds_sign():
    r = invariants(m1().decomposition, FORM_H, dim_estimate=1.2)
    assert r.scalar_sign.sign == "negative"
    assert r.to_json()["scalar_sign"]["sign"] == "negative"


@pytest.mark.parametrize("rec", [m1, m2, m3])
def test_b2_equals_twice_the_corank_of_the_boundary_map(rec):
    # b2 = chi - 2 + 2 b1 = 2 (t - rank d2), so it can never be negative
    hd = rec().decomposition
    assert invariants(hd).b2 == 2 * (len(hd.two_handles) - boundary_check(hd))


def test_report_self_consistency_is_enforced():
    with pytest.raises(InconsistentReport):
        InvariantReport(
            chi=-1, betti=(1, 1, 0, 1, 1), h1=AbelianInvariants(1, ()), h2=AbelianInvariants(0, ()), h3_rank=1,
            signature=0, intersection_form=FORM_ZERO, einstein_obstructed=False,
        )


def test_einstein_obstruction_boundary():
    assert einstein_obstructed(invariants(m1().decomposition))
    torus_like = HandleDecomposition.from_words("ab", ["A B a b"], doubled=True)
    r = invariants(torus_like)
    assert r.chi == 0 and not einstein_obstructed(r)


def test_boundary_check_validates_b1():
    hd = m2().decomposition
    assert len(hd.one_handles) - boundary_check(hd) == invariants(hd).b1


def test_forms():
    assert str(FORM_ZERO) == "(0)" and str(FORM_H) == "H" and str(IntersectionForm("hyperbolic", 3)) == "3H"
    assert parse_form("2H") == IntersectionForm("hyperbolic", 2)
    for f in (FORM_ZERO, FORM_H, FORM_UNKNOWN):
        assert IntersectionForm.from_json(f.to_json()) == f
    with pytest.raises(InconsistentReport):
        invariants(m2().decomposition, FORM_H)  # H has rank 2 but b2 = 0


def test_bad_labels_and_framings():
    with pytest.raises(HandleError):
        HandleDecomposition(("A",), ())
    with pytest.raises(HandleError):
        HandleDecomposition(("a", "a"), ())
    with pytest.raises(HandleError):
        TwoHandle("a", framing=0.5)


def test_spec_json_round_trip_and_compact_words():
    hd = m1().decomposition
    obj = json.loads(json.dumps(to_spec_json(hd, FORM_H)))
    hd2, form = from_spec_json(obj)
    assert hd2 == hd and form == FORM_H
    compact = {"one_handles": list("abcdef"),
               "two_handles": [{"word": "ABabcD", "framing": 0}, {"word": "edEC", "framing": 0}, {"word": "F^3D", "framing": 0}],
               "doubled": True}
    assert from_spec_json(compact)[0] == hd
    with pytest.raises(HandleError):
        from_spec_json({"one_handles": [], "bogus": 1})


gen_pool = ["a", "b", "c", "d"]
relator = st.lists(st.tuples(st.sampled_from(gen_pool), st.sampled_from([1, -1])), max_size=6)


@given(st.lists(relator, max_size=4))
def test_cancelling_pair_changes_nothing(rels):
    words = [" ".join(l if e > 0 else l.upper() for l, e in r) or "1" for r in rels]
    # keep b2 >= 0: add enough free generators
    base = HandleDecomposition.from_words(gen_pool, words, doubled=True)
    try:
        ref = invariants(base)
    except InconsistentDecomposition:
        return
    plus = HandleDecomposition.from_words(gen_pool + ["x"], words + ["x"], doubled=True)
    assert invariants(plus) == ref
    shuffled = HandleDecomposition.from_words(gen_pool, list(reversed(words)), doubled=True)
    assert invariants(shuffled) == ref


def test_report_json_and_table():
    r = invariants(m2().decomposition)
    obj = r.to_json()
    assert obj["h1"] == {"free_rank": 3, "torsion": [6]}
    assert obj["intersection_form"] == {"kind": "zero", "k": 0}
    assert "H1                  Z^3 + Z_6" in r.table_lines()
