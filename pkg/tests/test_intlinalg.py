import random

import pytest
from hypothesis import given, strategies as st

from oracles import det_cofactor, invariant_factors_by_minors
from panelweb.handlebody import Presentation
from panelweb.intlinalg import (
    AbelianInvariants,
    UnknownGenerator,
    abelian_invariants,
    det,
    exponent_matrix,
    identity,
    matmul,
    matrix_from_json,
    matrix_to_json,
    smith_normal_form,
)
from panelweb.words import concat, cyclic_permute, invert_word, parse_word

matrices = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


def check_snf(a):
    res = smith_normal_form(a)
    assert matmul(matmul(res.U, a), res.V) == [list(r) for r in res.D]
    assert det(res.U) in (1, -1) and det(res.V) in (1, -1)
    m, n = len(a), len(a[0])
    for i in range(m):
        for j in range(n):
            if i != j:
                assert res.D[i][j] == 0
    inv = res.invariant_factors
    assert all(x > 0 for x in inv)
    assert all(y % x == 0 for x, y in zip(inv, inv[1:]))
    assert all(x == 0 for x in res.diagonal[res.rank :])
    assert list(inv) == invariant_factors_by_minors(a)
    return res


def test_identity_and_small_examples():
    assert smith_normal_form(identity(3)).invariant_factors == (1, 1, 1)
    assert check_snf([[2, 4], [6, 8]]).invariant_factors == (2, 4)
    assert check_snf([[0, 0], [0, 0]]).rank == 0


def test_relation_matrix_with_six_torsion():
    rows = [[0, 0, 1, -1, 0, 0], [0, 0, -1, -1, 0, 0], [0, 0, 0, -1, 0, -3]]
    assert check_snf(rows).invariant_factors == (1, 1, 6)


@given(matrices)
def test_snf_properties(a):
    check_snf(a)


def test_det_matches_cofactor_oracle():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 5)
        a = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        assert det(a) == det_cofactor(a)


def test_big_entries_stay_exact():
    a = [[10**30 + 1, 10**30], [10**30, 10**30 - 1]]
    res = check_snf(a)
    assert res.invariant_factors == (1, 1)


def test_exponent_matrix_rows():
    pres = Presentation(tuple("abcdef"), (parse_word("A B a b c D"), parse_word("F^3 D"), parse_word("A B a b")))
    assert exponent_matrix(pres) == [[0, 0, 1, -1, 0, 0], [0, 0, 0, -1, 0, -3], [0] * 6]
    with pytest.raises(UnknownGenerator):
        Presentation(("a",), (parse_word("b"),))


@pytest.mark.parametrize(
    "gens,rels,expected",
    [
        ("abcdef", ["A B a b c D", "e d E C", "F^3 D"], AbelianInvariants(4, ())),
        ("abcdef", ["A B a b c D", "e D E C", "F^3 D"], AbelianInvariants(3, (6,))),
        ("abcef", ["A b a b c", "e C E c", "F^3 c"], AbelianInvariants(3, ())),
        ("ab", [], AbelianInvariants(2, ())),
        ("", [], AbelianInvariants(0, ())),
    ],
)
def test_abelian_invariants(gens, rels, expected):
    assert abelian_invariants(Presentation(tuple(gens), tuple(parse_word(r) for r in rels))) == expected


def test_abelian_invariants_str():
    assert str(AbelianInvariants(3, (6,))) == "Z^3 + Z_6"
    assert str(AbelianInvariants(0, ())) == "0"


rel_words = st.lists(st.tuples(st.sampled_from("abcd"), st.sampled_from([1, -1])), max_size=8)


@given(st.lists(rel_words, min_size=1, max_size=4), st.data())
def test_tietze_invariance(rels, data):
    gens = tuple("abcd")
    base = [tuple(r) for r in rels]
    ref = abelian_invariants(Presentation(gens, base))
    i = data.draw(st.integers(0, len(base) - 1))
    j = data.draw(st.integers(0, len(base) - 1))
    k = data.draw(st.integers(0, 10))
    moved = list(base)
    moved[i] = invert_word(moved[i])
    assert abelian_invariants(Presentation(gens, moved)) == ref
    moved = list(base)
    moved[i] = cyclic_permute(concat(moved[i]), k)
    assert abelian_invariants(Presentation(gens, moved)) == ref
    if i != j:
        moved = list(base)
        moved[i] = concat(moved[i], moved[j])
        assert abelian_invariants(Presentation(gens, moved)) == ref
    assert abelian_invariants(Presentation(gens, list(reversed(base)))) == ref


def test_matrix_json_round_trip():
    a = [[1, -2, 3], [4, 5, 6]]
    obj = matrix_to_json(a)
    assert obj == {"rows": 2, "cols": 3, "data": a}
    assert matrix_from_json(obj) == a
