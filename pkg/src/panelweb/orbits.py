"""Reduced-word enumeration and vectorised orbit evaluation.

Letters are encoded as integers: generator j is 2j, its inverse 2j + 1, so
``x ^ 1`` is the inverse letter. Enumeration order is canonical: by length,
then lexicographic in the letter order a, A, b, B, ...
"""
from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from .words import Word

DEFAULT_LABELS = "abcdefghijklmnopqrstuvwxyz"


def word_count(k: int, depth: int) -> int:
    """1 + sum_{l=1..depth} 2k (2k-1)^(l-1)."""
    return 1 + sum(2 * k * (2 * k - 1) ** (ell - 1) for ell in range(1, depth + 1))


def letter_matrices(transforms: Sequence) -> np.ndarray:
    """(2k, 2, 2) array: each generator followed by its inverse."""
    out = np.empty((2 * len(transforms), 2, 2), dtype=complex)
    for j, t in enumerate(transforms):
        out[2 * j] = t.matrix
        out[2 * j + 1] = t.inverse().matrix
    return out


def decode(codes, labels: Sequence[str]) -> Word:
    return tuple((labels[c >> 1], -1 if c & 1 else 1) for c in codes)


def _levels(k: int, depth: int):
    """Yield (codes, parent) per length; parent[i] indexes the previous
    level's row that codes[i] extends by one letter."""
    if k < 1:
        raise ValueError("need at least one generator")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    level = np.zeros((1, 0), dtype=np.int16)
    yield level, None
    letters = np.arange(2 * k, dtype=np.int16)
    for ell in range(1, depth + 1):
        n = len(level)
        parent = np.repeat(np.arange(n), 2 * k)
        nxt = np.tile(letters, n)
        if ell > 1:
            keep = nxt != (level[parent, -1] ^ 1)
            parent, nxt = parent[keep], nxt[keep]
        level = np.concatenate([level[parent], nxt[:, None]], axis=1)
        yield level, parent


def word_levels(k: int, depth: int) -> Iterator[np.ndarray]:
    """Yield, for each length 0..depth, an (N, length) int array of reduced
    words in canonical order."""
    for level, _ in _levels(k, depth):
        yield level


def enumerate_reduced_words(k: int, depth: int, labels: Sequence[str] | None = None) -> Iterator[Word]:
    """All reduced words of length <= depth over k generators."""
    labels = list(labels) if labels is not None else list(DEFAULT_LABELS[:k])
    if len(labels) != k:
        raise ValueError("need one label per generator")
    for level in word_levels(k, depth):
        for row in level:
            yield decode(row.tolist(), labels)


def matrix_levels(letter_mats: np.ndarray, depth: int) -> Iterator[tuple]:
    """Yield (codes, matrices) per length; matrices[i] is the product of the
    letters of codes[i] from left to right, so it acts as x1 o x2 o ..."""
    mats = np.eye(2, dtype=complex)[None]
    for level, parent in _levels(len(letter_mats) // 2, depth):
        if parent is not None:
            mats = np.einsum("nij,njk->nik", mats[parent], letter_mats[level[:, -1]])
        yield level, mats


def apply_matrices(mats: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Apply each of N matrices to each of P finite points -> (N, P)."""
    a = mats[:, 0, 0][:, None]
    b = mats[:, 0, 1][:, None]
    c = mats[:, 1, 0][:, None]
    d = mats[:, 1, 1][:, None]
    z = np.asarray(z, dtype=complex)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        den = c * z + d
        out = (a * z + b) / den
        pole = np.abs(den) <= 1e-12 * np.maximum(1.0, np.maximum(np.abs(c * z), np.abs(d)))
    out[pole] = complex(np.inf, np.inf)
    return out


def apply_matrices_at_infinity(mats: np.ndarray) -> np.ndarray:
    a = mats[:, 0, 0]
    c = mats[:, 1, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a / c
    out[np.abs(c) <= 1e-12 * np.maximum(1.0, np.abs(a))] = complex(np.inf, np.inf)
    return out


def orbit_levels(letter_mats: np.ndarray, seeds: np.ndarray, depth: int) -> Iterator[np.ndarray]:
    """Yield the images of the seeds under all reduced words of each length.

    Works on points rather than matrices: a word x w' is evaluated as
    x(w'(s)), so only the first letter of w' has to be remembered.
    Infinite points are encoded as complex(inf, inf).
    """
    k2 = len(letter_mats)
    pts = np.asarray(seeds, dtype=complex).ravel()
    first = np.full(len(pts), -1, dtype=np.int16)
    yield pts
    for _ in range(depth):
        new_pts, new_first = [], []
        for x in range(k2):
            keep = first != (x ^ 1)
            src = pts[keep]
            m = letter_mats[x]
            img = apply_matrix(m, src)
            new_pts.append(img)
            new_first.append(np.full(len(img), x, dtype=np.int16))
        pts = np.concatenate(new_pts)
        first = np.concatenate(new_first)
        yield pts


def apply_matrix(m: np.ndarray, z: np.ndarray) -> np.ndarray:
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    fin = np.isfinite(z)
    out = np.empty_like(z)
    zf = z[fin]
    with np.errstate(divide="ignore", invalid="ignore"):
        den = c * zf + d
        img = (a * zf + b) / den
        pole = np.abs(den) <= 1e-12 * np.maximum(1.0, np.maximum(np.abs(c * zf), abs(d)))
    img[pole] = complex(np.inf, np.inf)
    out[fin] = img
    if (~fin).any():
        out[~fin] = complex(np.inf, np.inf) if abs(c) <= 1e-12 * max(1.0, abs(a)) else a / c
    return out
