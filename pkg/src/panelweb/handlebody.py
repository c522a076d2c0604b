"""Symbolic 4-dimensional handle decompositions and their invariants.

A decomposition has one implicit 0-handle, labelled 1-handles (generators)
and 2-handles attached along relator words with integer framings. The
closed manifolds of interest are doubles: every 2-handle gets a 0-framed
meridian and dual 3- and 4-handles are added. The double has the same
fundamental group as the original, because the meridians bound cocore
disks, so H1 comes from the pre-double presentation; chi comes from the
handle counts and H2, H3 follow by Poincare duality and the universal
coefficient theorem.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

from .intlinalg import AbelianInvariants, UnknownGenerator, abelian_invariants, exponent_matrix
from .words import Word, format_word, labels_of, parse_word

_LABEL = re.compile(r"^[a-z]\d*$")


class HandleError(ValueError):
    pass


class NotDoubled(HandleError):
    pass


class InconsistentDecomposition(HandleError):
    pass


class InconsistentReport(AssertionError):
    pass


# -- presentations and decompositions ------------------------------------------

@dataclass(frozen=True)
class Presentation:
    generators: Tuple[str, ...]
    relators: Tuple[Word, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))
        _check_labels(self.generators)
        known = set(self.generators)
        for rel in self.relators:
            missing = labels_of(rel) - known
            if missing:
                raise UnknownGenerator(f"relator uses unknown generator(s) {sorted(missing)}")

    def __str__(self):
        gens = ", ".join(self.generators)
        rels = ", ".join(format_word(r) for r in self.relators)
        return f"< {gens} | {rels} >"


def _check_labels(labels: Sequence[str]) -> None:
    seen = set()
    for lab in labels:
        if not isinstance(lab, str) or not _LABEL.match(lab):
            raise HandleError(f"bad generator label {lab!r}: expected a lowercase letter and optional digits")
        if lab in seen:
            raise HandleError(f"duplicate generator label {lab!r}")
        seen.add(lab)


@dataclass(frozen=True)
class TwoHandle:
    word: Word
    framing: int = 0

    def __post_init__(self):
        w = parse_word(self.word) if isinstance(self.word, str) else tuple(self.word)
        object.__setattr__(self, "word", w)
        if isinstance(self.framing, bool) or int(self.framing) != self.framing:
            raise HandleError(f"framing must be an integer, got {self.framing!r}")
        object.__setattr__(self, "framing", int(self.framing))


@dataclass(frozen=True)
class HandleDecomposition:
    one_handles: Tuple[str, ...] = ()
    two_handles: Tuple[TwoHandle, ...] = ()
    doubled: bool = False

    def __post_init__(self):
        object.__setattr__(self, "one_handles", tuple(self.one_handles))
        hs = tuple(h if isinstance(h, TwoHandle) else TwoHandle(*h) for h in self.two_handles)
        object.__setattr__(self, "two_handles", hs)
        # validates labels and relator letters
        presentation_of(self)

    @classmethod
    def from_words(cls, one_handles, words, doubled=True) -> "HandleDecomposition":
        return cls(tuple(one_handles), tuple(TwoHandle(w) for w in words), doubled)


def presentation_of(hd: HandleDecomposition) -> Presentation:
    """Generators are the 1-handles, relators the 2-handle attaching words.
    Doubling adds no relators."""
    return Presentation(hd.one_handles, tuple(h.word for h in hd.two_handles))


def double(hd: HandleDecomposition) -> HandleDecomposition:
    return replace(hd, doubled=True)


@dataclass(frozen=True)
class ChainRanks:
    c0: int
    c1: int
    c2: int
    c3: int
    c4: int

    def as_tuple(self) -> Tuple[int, int, int, int, int]:
        return (self.c0, self.c1, self.c2, self.c3, self.c4)

    @property
    def euler_characteristic(self) -> int:
        return self.c0 - self.c1 + self.c2 - self.c3 + self.c4


def _require_doubled(hd: HandleDecomposition) -> None:
    if not hd.doubled:
        raise NotDoubled("the decomposition is not doubled; call double() first")


def chain_ranks(hd: HandleDecomposition) -> ChainRanks:
    """(1, g, 2t, g, 1): the double has the original handles, t meridian
    2-handles, and g 3-handles and one 4-handle dual to the 1- and 0-handles."""
    _require_doubled(hd)
    g, t = len(hd.one_handles), len(hd.two_handles)
    return ChainRanks(1, g, 2 * t, g, 1)


def euler_characteristic(hd: HandleDecomposition) -> int:
    _require_doubled(hd)
    chi = chain_ranks(hd).euler_characteristic
    assert chi == 2 * (1 - len(hd.one_handles) + len(hd.two_handles))
    return chi


# -- reports -------------------------------------------------------------------

ZERO, HYPERBOLIC, UNKNOWN = "zero", "hyperbolic", "unknown"


@dataclass(frozen=True)
class IntersectionForm:
    """Zero, a sum of k hyperbolic planes H, or Unknown."""

    kind: str
    k: int = 0

    def __post_init__(self):
        if self.kind not in (ZERO, HYPERBOLIC, UNKNOWN):
            raise HandleError(f"unknown intersection form kind {self.kind!r}")
        if self.kind == HYPERBOLIC and self.k < 1:
            raise HandleError("a hyperbolic sum needs k >= 1")
        if self.kind != HYPERBOLIC and self.k:
            raise HandleError(f"k is only meaningful for hyperbolic forms")

    @property
    def rank(self) -> Optional[int]:
        return {ZERO: 0, HYPERBOLIC: 2 * self.k}.get(self.kind)

    def __str__(self):
        if self.kind == ZERO:
            return "(0)"
        if self.kind == UNKNOWN:
            return "unknown"
        return "H" if self.k == 1 else f"{self.k}H"

    def to_json(self) -> dict:
        return {"kind": self.kind, "k": self.k}

    @classmethod
    def from_json(cls, obj) -> "IntersectionForm":
        if isinstance(obj, str):
            return parse_form(obj)
        return cls(obj["kind"], int(obj.get("k", 0)))


def parse_form(text: str) -> IntersectionForm:
    t = text.strip().replace(" ", "")
    if t in ("(0)", "0", "zero"):
        return IntersectionForm(ZERO)
    if t == "unknown":
        return IntersectionForm(UNKNOWN)
    m = re.fullmatch(r"(\d*)H", t)
    if m:
        return IntersectionForm(HYPERBOLIC, int(m.group(1) or 1))
    raise HandleError(f"cannot parse intersection form {text!r}")


FORM_ZERO = IntersectionForm(ZERO)
FORM_H = IntersectionForm(HYPERBOLIC, 1)
FORM_UNKNOWN = IntersectionForm(UNKNOWN)


@dataclass(frozen=True)
class InvariantReport:
    chi: int
    betti: Tuple[int, int, int, int, int]
    h1: AbelianInvariants
    h2: AbelianInvariants
    h3_rank: int
    signature: int
    intersection_form: IntersectionForm
    einstein_obstructed: bool
    scalar_sign: Optional[object] = None

    def __post_init__(self):
        b0, b1, b2, b3, b4 = self.betti
        checks = [
            (b0 == 1 and b4 == 1, "b0 = b4 = 1"),
            (b3 == b1, "b3 = b1"),
            (b1 == self.h1.free_rank, "b1 = rank H1"),
            (b2 == self.h2.free_rank, "b2 = rank H2"),
            (self.chi == 2 - 2 * b1 + b2, "chi = 2 - 2 b1 + b2"),
            (tuple(self.h2.torsion) == tuple(self.h1.torsion), "tors H2 = tors H1"),
            (self.h3_rank == b1, "rank H3 = b1"),
            (self.einstein_obstructed == (self.chi < 0), "obstructed iff chi < 0"),
        ]
        rank = self.intersection_form.rank
        checks.append((rank is None or rank == b2, "form rank = b2"))
        for ok, what in checks:
            if not ok:
                raise InconsistentReport(f"report violates {what}: {self}")

    @property
    def b1(self) -> int:
        return self.betti[1]

    @property
    def b2(self) -> int:
        return self.betti[2]

    def to_json(self) -> dict:
        out = {
            "chi": self.chi,
            "betti": list(self.betti),
            "h1": {"free_rank": self.h1.free_rank, "torsion": sorted(self.h1.torsion)},
            "h2": {"free_rank": self.h2.free_rank, "torsion": sorted(self.h2.torsion)},
            "h3_rank": self.h3_rank,
            "signature": self.signature,
            "intersection_form": self.intersection_form.to_json(),
            "einstein_obstructed": self.einstein_obstructed,
        }
        if self.scalar_sign is not None:
            out["scalar_sign"] = self.scalar_sign.to_json()
        return out

    def table_lines(self) -> list:
        return [
            f"chi                 {self.chi}",
            f"betti               {' '.join(map(str, self.betti))}",
            f"H1                  {self.h1}",
            f"H2                  {self.h2}",
            f"H3                  {AbelianInvariants(self.h3_rank)}",
            f"signature           {self.signature}",
            f"intersection form   {self.intersection_form}",
            f"einstein obstructed {'yes' if self.einstein_obstructed else 'no'}",
        ] + ([f"scalar curvature    {self.scalar_sign}"] if self.scalar_sign is not None else [])


def einstein_obstructed(report: InvariantReport) -> bool:
    """Closed LCF 4-manifolds with chi < 0 carry no Einstein metric."""
    return report.chi < 0


def invariants(
    hd: HandleDecomposition,
    asserted_form: Optional[IntersectionForm] = None,
    dim_estimate: Optional[float] = None,
) -> InvariantReport:
    _require_doubled(hd)
    pres = presentation_of(hd)
    h1 = abelian_invariants(pres)
    b1 = h1.free_rank
    chi = euler_characteristic(hd)
    b2 = chi - 2 + 2 * b1
    if b2 < 0:
        raise InconsistentDecomposition(
            f"chi = {chi} and b1 = {b1} give b2 = {b2} < 0; the handle data cannot describe a closed double"
        )
    if asserted_form is not None:
        form = asserted_form
    elif b2 == 0:
        form = FORM_ZERO
    else:
        form = FORM_UNKNOWN
    sign = None
    if dim_estimate is not None:
        from .limitset import scalar_sign

        sign = scalar_sign(dim_estimate, 4)
    return InvariantReport(
        chi=chi,
        betti=(1, b1, b2, b1, 1),
        h1=h1,
        h2=AbelianInvariants(b2, h1.torsion),
        h3_rank=b1,
        signature=0,
        intersection_form=form,
        einstein_obstructed=chi < 0,
        scalar_sign=sign,
    )


def boundary_check(hd: HandleDecomposition) -> int:
    """Rank of the cellular boundary C2 -> C1 (the exponent matrix); b1 of
    the double is g minus this rank."""
    rows = exponent_matrix(presentation_of(hd))
    if not rows or not hd.one_handles:
        return 0
    from .intlinalg import smith_normal_form

    return smith_normal_form(rows).rank


# -- serialization ---------------------------------------------------------------

def to_spec_json(hd: HandleDecomposition, asserted_form: Optional[IntersectionForm] = None) -> dict:
    out = {
        "one_handles": list(hd.one_handles),
        "two_handles": [{"word": format_word(h.word), "framing": h.framing} for h in hd.two_handles],
        "doubled": hd.doubled,
    }
    if asserted_form is not None:
        out["asserted_form"] = asserted_form.to_json()
    return out


def from_spec_json(obj) -> Tuple[HandleDecomposition, Optional[IntersectionForm]]:
    """Parse a handle spec; also accepts the output of ``invariants --format
    json`` (the spec is then under "decomposition")."""
    if not isinstance(obj, dict):
        raise HandleError("handle spec must be a JSON object")
    if "decomposition" in obj:
        obj = obj["decomposition"]
    unknown = set(obj) - {"one_handles", "two_handles", "doubled", "asserted_form"}
    if unknown:
        raise HandleError(f"unknown handle-spec keys {sorted(unknown)}")
    ones = obj.get("one_handles", [])
    twos = []
    for h in obj.get("two_handles", []):
        if isinstance(h, str):
            twos.append(TwoHandle(h))
        else:
            twos.append(TwoHandle(h["word"], h.get("framing", 0)))
    doubled = obj.get("doubled", False)
    if not isinstance(doubled, bool):
        raise HandleError("'doubled' must be a boolean")
    form = obj.get("asserted_form")
    return (
        HandleDecomposition(tuple(ones), tuple(twos), doubled),
        IntersectionForm.from_json(form) if form is not None else None,
    )


def load_spec(path) -> Tuple[HandleDecomposition, Optional[IntersectionForm]]:
    with open(path) as fh:
        return from_spec_json(json.load(fh))
