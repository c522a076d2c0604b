"""Constructors for the panelled-web manifolds and their infinite families.

Each constructor returns a doubled handle decomposition together with the
intersection form known for it (where one is known) and the closed-form
Betti numbers and Euler characteristic at the given parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .handlebody import (
    FORM_H,
    FORM_UNKNOWN,
    FORM_ZERO,
    HandleDecomposition,
    IntersectionForm,
    InvariantReport,
    invariants,
)
from .moebius import BadParameter


@dataclass(frozen=True)
class ClosedForms:
    b1: int
    b2: int
    chi: int


@dataclass(frozen=True)
class FamilyRecord:
    name: str
    params: Tuple[Tuple[str, int], ...]
    decomposition: HandleDecomposition
    asserted_form: Optional[IntersectionForm]
    closed_forms: ClosedForms

    def report(self, dim_estimate: Optional[float] = None) -> InvariantReport:
        return invariants(self.decomposition, self.asserted_form, dim_estimate)

    def matches_closed_forms(self) -> bool:
        r = self.report()
        cf = self.closed_forms
        return (r.b1, r.b2, r.chi) == (cf.b1, cf.b2, cf.chi)


def _int_param(name: str, value, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadParameter(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise BadParameter(f"{name} must be >= {minimum}, got {value}")
    return value


def _record(name, params, gens, words, form, b1, b2, chi) -> FamilyRecord:
    hd = HandleDecomposition.from_words(gens, words, doubled=True)
    return FamilyRecord(name, tuple(params), hd, form, ClosedForms(b1, b2, chi))


def _commutators(g: int) -> str:
    return " ".join(f"A{i} B{i} a{i} b{i}" for i in range(1, g + 1))


def m1() -> FamilyRecord:
    """Torus with one round handle and a 1/3 complex twist."""
    return _record(
        "m1", (), "abcdef", ["A B a b c D", "e d E C", "F^3 D"], FORM_H, 4, 2, -4
    )


def m2() -> FamilyRecord:
    """As m1 with the round handle attached with the opposite orientation,
    which produces 6-torsion in H1."""
    return _record(
        "m2", (), "abcdef", ["A B a b c D", "e D E C", "F^3 D"], FORM_ZERO, 3, 0, -4
    )


def m3() -> FamilyRecord:
    """Twisted I-bundle over the punctured torus with a 1/3 complex twist."""
    return _record("m3", (), "abcef", ["A b a b c", "e C E c", "F^3 c"], FORM_H, 3, 2, -2)


def m1_g(g: int) -> FamilyRecord:
    """Genus-g base surface, one round handle, one 1/3 twist."""
    g = _int_param("g", g, 1)
    gens = [x for i in range(1, g + 1) for x in (f"a{i}", f"b{i}")] + list("cdef")
    words = [f"{_commutators(g)} c D", "e d E C", "F^3 D"]
    return _record("m1g", (("g", g),), gens, words, FORM_H, 2 * g + 2, 2, -4 * g)


def m1_gn(g: int, n: int) -> FamilyRecord:
    """Genus-g base surface with n round handles (no twist handle)."""
    g = _int_param("g", g, 0)
    n = _int_param("n", n, 1)
    gens = [x for i in range(1, g + 1) for x in (f"a{i}", f"b{i}")]
    gens += [x for i in range(1, n + 1) for x in (f"c{i}", f"d{i}", f"e{i}")]
    tail = " ".join(f"c{i}" for i in range(1, n + 1)) + " " + " ".join(
        f"D{i}" for i in range(n, 0, -1)
    )
    words = [f"{_commutators(g)} {tail}".strip()]
    words += [f"e{i} d{i} E{i} C{i}" for i in range(1, n + 1)]
    return _record(
        "m1gn", (("g", g), ("n", n)), gens, words, FORM_H, 2 * g + 2 * n, 2, 4 - 4 * g - 4 * n
    )


_ATTACH = "dghjklm"


def m3_gn(g: int, n: int) -> FamilyRecord:
    """Genus-g base surface with n attached I-bundle pieces."""
    g = _int_param("g", g, 0)
    n = _int_param("n", n, 1)
    gens = [x for i in range(1, g + 1) for x in (f"a{i}", f"b{i}")]
    gens += [f"{x}{i}" for i in range(1, n + 1) for x in _ATTACH]
    words = [f"{_commutators(g)} {' '.join(f'D{i}' for i in range(n, 0, -1))}".strip()]
    for i in range(1, n + 1):
        words += [
            f"G{i} D{i}",
            f"k{i} h{i} K{i} g{i}",
            f"L{i} j{i} l{i} h{i}",
            f"M{i} D{i} m{i} J{i}",
            f"g{i} h{i} j{i}",
        ]
    return _record(
        "m3gn",
        (("g", g), ("n", n)),
        gens,
        words,
        FORM_UNKNOWN,
        2 * g + 3 * n,
        2 + 2 * n,
        4 - 4 * g - 4 * n,
    )


def m4_n(n: int) -> FamilyRecord:
    """A chain of n I-bundle pieces closed up by one round handle (label m)."""
    n = _int_param("n", n, 1)
    gens = [f"{x}{i}" for i in range(1, n + 1) for x in "ghjkl"] + ["m"]
    words = []
    for i in range(1, n + 1):
        words += [f"k{i} h{i} K{i} g{i}", f"L{i} j{i} l{i} h{i}", f"g{i} h{i} j{i}"]
    words += [f"g{i + 1} j{i}" for i in range(1, n)]
    words.append(f"M j{n} m g1")
    return _record("m4n", (("n", n),), gens, words, FORM_UNKNOWN, 2 * n + 1, 2 * n, -2 * n)


@dataclass(frozen=True)
class FamilyInfo:
    build: Callable[..., FamilyRecord]
    params: Tuple[str, ...]
    # parameter that grows along the family in the growth statements
    growing: Tuple[str, ...] = field(default_factory=tuple)


FAMILIES: Dict[str, FamilyInfo] = {
    "m1": FamilyInfo(m1, ()),
    "m2": FamilyInfo(m2, ()),
    "m3": FamilyInfo(m3, ()),
    "m1g": FamilyInfo(m1_g, ("g",), ("g",)),
    "m1gn": FamilyInfo(m1_gn, ("g", "n"), ("g", "n")),
    "m3gn": FamilyInfo(m3_gn, ("g", "n"), ("g", "n")),
    "m4n": FamilyInfo(m4_n, ("n",), ("n",)),
}


def build_family(name: str, **params) -> FamilyRecord:
    try:
        info = FAMILIES[name]
    except KeyError:
        raise BadParameter(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}") from None
    missing = [p for p in info.params if params.get(p) is None]
    if missing:
        raise BadParameter(f"family {name} needs parameter(s) {', '.join(missing)}")
    extra = [p for p, v in params.items() if p not in info.params and v is not None]
    if extra:
        raise BadParameter(f"family {name} takes no parameter(s) {', '.join(extra)}")
    return info.build(*(params[p] for p in info.params))


@dataclass(frozen=True)
class TableRow:
    params: Tuple[Tuple[str, int], ...]
    b1: int
    b2: int
    chi: int
    torsion: Tuple[int, ...]
    einstein_obstructed: bool
    matches_closed_forms: bool


@dataclass(frozen=True)
class MonotonicityVerdict:
    parameter: str
    chi_strictly_decreasing: bool
    b1_strictly_increasing: bool
    obstructed_when_chi_negative: bool


def family_table(name: str, ranges: Dict[str, range]) -> Tuple[List[TableRow], List[MonotonicityVerdict]]:
    """Rows over the Cartesian product of the ranges, in lexicographic
    parameter order, with monotonicity verdicts along each growing parameter."""
    info = FAMILIES.get(name)
    if info is None:
        raise BadParameter(f"unknown family {name!r}")
    for p in ranges:
        if p not in info.params:
            raise BadParameter(f"family {name} has no parameter {p!r}")
    grids = [list(ranges.get(p, [])) for p in info.params]
    for p, grid in zip(info.params, grids):
        if not grid:
            raise BadParameter(f"missing range for parameter {p!r}")
    points = [()]
    for grid in grids:
        points = [pt + (v,) for pt in points for v in grid]
    rows = []
    for pt in points:
        rec = build_family(name, **dict(zip(info.params, pt)))
        rep = rec.report()
        rows.append(
            TableRow(
                rec.params,
                rep.b1,
                rep.b2,
                rep.chi,
                tuple(rep.h1.torsion),
                rep.einstein_obstructed,
                (rep.b1, rep.b2, rep.chi) == (rec.closed_forms.b1, rec.closed_forms.b2, rec.closed_forms.chi),
            )
        )
    verdicts = [_verdict(rows, info.params, p) for p in info.growing]
    return rows, verdicts


def _verdict(rows: List[TableRow], names, p) -> MonotonicityVerdict:
    j = names.index(p)
    lines: Dict[tuple, list] = {}
    for r in rows:
        vals = tuple(v for _, v in r.params)
        key = vals[:j] + vals[j + 1 :]
        lines.setdefault(key, []).append((vals[j], r))
    dec = inc = True
    for seq in lines.values():
        seq.sort(key=lambda x: x[0])
        for (_, r0), (_, r1) in zip(seq, seq[1:]):
            dec &= r1.chi < r0.chi
            inc &= r1.b1 > r0.b1
    obstructed = all(r.einstein_obstructed for r in rows if r.chi < 0)
    return MonotonicityVerdict(p, dec, inc, obstructed)
