"""Free-group words and their text syntax.

A word is a tuple of letters ``(label, e)`` with ``e`` in {+1, -1}. Labels
are a lowercase letter optionally followed by a decimal index (``a``,
``d3``, ``k12``). In text, an uppercase letter denotes the inverse
(``ABab`` is the commutator a^-1 b^-1 a b), and any letter may carry an
exponent: ``f^-3 d^-1``, ``F^3``, ``a_1^2``. Tokens may be separated by
whitespace or written contiguously.
"""
from __future__ import annotations

import re
from collections import Counter
from typing import Iterable, Tuple

Letter = Tuple[str, int]
Word = Tuple[Letter, ...]


class WordSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"([A-Za-z])_?(\d*)(?:\^([+-]?\d+))?")
_SKIP = re.compile(r"[\s*.]+")


def reduce_word(letters: Iterable[Letter]) -> Word:
    """Freely reduce: cancel adjacent x x^-1 pairs."""
    out = []
    for lab, e in letters:
        if out and out[-1][0] == lab and out[-1][1] == -e:
            out.pop()
        else:
            out.append((lab, e))
    return tuple(out)


def parse_word(text: str) -> Word:
    letters = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _SKIP.match(text, pos)
        if m:
            pos = m.end()
            continue
        if text[pos] == "1" and (pos + 1 == n or not text[pos + 1].isdigit()):
            # a lone 1 stands for the empty word
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise WordSyntaxError(f"unexpected character {text[pos]!r}", pos)
        ch, idx, exp = m.groups()
        k = int(exp) if exp is not None else 1
        if k == 0:
            raise WordSyntaxError("zero exponent", m.start(3))
        sign = -1 if ch.isupper() else 1
        lab = ch.lower() + idx
        e = sign * (1 if k > 0 else -1)
        letters.extend([(lab, e)] * abs(k))
        pos = m.end()
    return reduce_word(letters)


def syllables(word: Word):
    """Run-length form: [(label, exponent), ...]."""
    out = []
    for lab, e in word:
        if out and out[-1][0] == lab:
            out[-1][1] += e
        else:
            out.append([lab, e])
    return [(lab, k) for lab, k in out if k]


def format_word(word: Word, style: str = "caps") -> str:
    """Canonical text. ``caps``: ``A B a b c D``, ``F^3 D``; ``exp``:
    ``a^-1 b^-1 a b c d^-1``."""
    if not word:
        return "1"
    toks = []
    for lab, k in syllables(word):
        if style == "caps":
            base = lab if k > 0 else lab[0].upper() + lab[1:]
            toks.append(base if abs(k) == 1 else f"{base}^{abs(k)}")
        else:
            toks.append(lab if k == 1 else f"{lab}^{k}")
    return " ".join(toks)


def invert_word(word: Word) -> Word:
    return tuple((lab, -e) for lab, e in reversed(word))


def concat(*words: Word) -> Word:
    return reduce_word(x for w in words for x in w)


def cyclic_permute(word: Word, k: int) -> Word:
    if not word:
        return word
    k %= len(word)
    return reduce_word(word[k:] + word[:k])


def exponent_sums(word: Word) -> Counter:
    c = Counter()
    for lab, e in word:
        c[lab] += e
    return c


def labels_of(word: Word) -> set:
    return {lab for lab, _ in word}


def is_reduced(word: Word) -> bool:
    return all(not (x[0] == y[0] and x[1] == -y[1]) for x, y in zip(word, word[1:]))
