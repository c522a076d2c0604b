"""Assembly of Kleinian groups: circle-pairing Schottky groups, extended
Fuchsian groups, the two combination theorems and complex twists, plus the
sampled precise-invariance check the combination theorems rely on.

Words act as compositions: the word x1 x2 ... xn is the map x1 o x2 o ... o xn.
"""
from __future__ import annotations

import cmath
import json
import math
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import orbits
from .moebius import (
    INF,
    BadParameter,
    Circle,
    IntersectingCircles,
    Line,
    MoebiusError,
    MoebiusTransform,
    TAU_FIX,
    apply_array,
    classify,
    compose,
    conjugate,
    fixed_points,
    inverse,
    is_inf,
    multiplier,
    normalizing_frame,
    pair_circles,
    power,
    rotation,
    scaling,
    transforms_close,
)
from .words import Word, format_word, parse_word

TAU_REGION = 1e-7
DEFAULT_DEPTH = 5
DEFAULT_SAMPLES = 64
D_EXT = 4

_LABEL = re.compile(r"^[a-z]\d*$")


class GroupError(ValueError):
    pass


class IdentityGenerator(GroupError):
    pass


class LabelError(GroupError):
    pass


class OverlappingCircles(GroupError):
    pass


class ExtensionCheckFailed(GroupError):
    pass


class SharedGeneratorMismatch(GroupError):
    pass


class ConjugationFailed(GroupError):
    pass


class RegionMapFailed(GroupError):
    pass


class NotCoprime(GroupError):
    pass


class PowerCheckFailed(GroupError):
    pass


class PreciseInvarianceFailed(GroupError):
    def __init__(self, witness: "Witness", what: str = ""):
        super().__init__(f"{what}: {witness}" if what else str(witness))
        self.witness = witness


# -- group specs ---------------------------------------------------------------

@dataclass(frozen=True)
class GroupSpec:
    generators: Tuple[Tuple[str, MoebiusTransform], ...] = ()
    provenance: Tuple[str, ...] = ()

    def __post_init__(self):
        gens = tuple((str(lab), t) for lab, t in self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "provenance", tuple(self.provenance))
        seen = set()
        for lab, t in gens:
            if not _LABEL.match(lab):
                raise LabelError(f"bad generator label {lab!r}: expected a lowercase letter and optional digits")
            if lab in seen:
                raise LabelError(f"duplicate generator label {lab!r}")
            seen.add(lab)
            if not isinstance(t, MoebiusTransform):
                raise GroupError(f"generator {lab!r} is not a MoebiusTransform")
            if t.is_identity():
                raise IdentityGenerator(f"generator {lab!r} is the identity")

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(lab for lab, _ in self.generators)

    @property
    def transforms(self) -> Tuple[MoebiusTransform, ...]:
        return tuple(t for _, t in self.generators)

    def __len__(self):
        return len(self.generators)

    def __getitem__(self, label: str) -> MoebiusTransform:
        for lab, t in self.generators:
            if lab == label:
                return t
        raise KeyError(label)

    def __contains__(self, label) -> bool:
        return label in self.labels

    def word_transform(self, word: Union[str, Word]) -> MoebiusTransform:
        if isinstance(word, str):
            word = parse_word(word)
        m = np.eye(2, dtype=complex)
        table = dict(self.generators)
        for lab, e in word:
            if lab not in table:
                raise LabelError(f"word uses unknown generator {lab!r}")
            t = table[lab] if e > 0 else table[lab].inverse()
            m = m @ t.matrix
        return MoebiusTransform.from_matrix(m)

    def letter_matrices(self) -> np.ndarray:
        return orbits.letter_matrices(self.transforms)

    def with_generator(self, label: str, t: MoebiusTransform, step: str) -> "GroupSpec":
        if label in self.labels:
            raise LabelError(f"label {label!r} already used")
        return GroupSpec(self.generators + ((label, t),), self.provenance + (step,))

    def free_label(self, preferred: Sequence[str] = ("f", "t", "s", "u", "v", "w")) -> str:
        for lab in list(preferred) + list(orbits.DEFAULT_LABELS):
            if lab not in self.labels:
                return lab
        raise LabelError("no free single-letter label left")

    def is_elementary(self) -> bool:
        """True when the group visibly has at most two limit points: no
        generators, or all generators share one fixed-point set."""
        if not self.generators:
            return True
        sets = []
        for t in self.transforms:
            if classify(t).kind == "elliptic" and len(self.generators) == 1:
                return True
            sets.append(tuple(fixed_points(t)))
        ref = sets[0]
        return all(_same_point_set(s, ref) for s in sets[1:])


def _same_point_set(s1, s2) -> bool:
    from .moebius import points_close

    if len(s1) != len(s2):
        return False
    return all(any(points_close(p, q, 1e-7) for q in s2) for p in s1)


def conjugate_group(G: GroupSpec, by: MoebiusTransform, step: Optional[str] = None) -> GroupSpec:
    """by G by^-1."""
    gens = tuple((lab, conjugate(t, by)) for lab, t in G.generators)
    return GroupSpec(gens, G.provenance + ((step or "conjugated"),))


def renormalize(G: GroupSpec, label: str) -> GroupSpec:
    """Conjugate G so that the loxodromic generator `label` becomes z -> k z."""
    frame = normalizing_frame(G[label])
    return conjugate_group(G, inverse(frame), f"renormalized so that {label} fixes 0 and infinity")


# -- regions -------------------------------------------------------------------

def _points(z) -> np.ndarray:
    """Encode points (complex or INF) as a complex array with inf+infj."""
    if isinstance(z, np.ndarray):
        return z.astype(complex)
    return np.array([complex(np.inf, np.inf) if is_inf(p) else complex(p) for p in z], dtype=complex)


class Region:
    """Open region of the Riemann sphere. ``depth`` is positive inside,
    negative outside and zero on the boundary (a signed, scale-free margin)."""

    def depth(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, p, margin: float = TAU_REGION) -> bool:
        return bool(self.depth(_points([p]))[0] > margin)

    def boundary_samples(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def interior_samples(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Disk(Region):
    circle: Circle
    inside: bool = True

    def depth(self, z):
        z = np.asarray(z, dtype=complex)
        c, r = self.circle.center, self.circle.radius
        with np.errstate(invalid="ignore", over="ignore"):
            rel = (np.abs(z - c) - r) / r
        rel = np.where(np.isfinite(z), rel, np.inf)
        return -rel if self.inside else rel

    def boundary_samples(self, n):
        return self.circle.sample(n)

    def interior_samples(self, n):
        c, r = self.circle.center, self.circle.radius
        rings = np.array([0.2, 0.5, 0.8, 0.95])
        per = max(1, n // len(rings))
        t = 2 * np.pi * (np.arange(per) + 0.5) / per
        s = rings[:, None] if self.inside else 1 / rings[:, None]
        return (c + r * s * np.exp(1j * t)[None, :]).ravel()

    def to_json(self):
        return {"disk": {"center": [self.circle.center.real, self.circle.center.imag],
                         "radius": self.circle.radius,
                         "side": "inside" if self.inside else "outside"}}


@dataclass(frozen=True)
class HalfPlane(Region):
    line: Line
    left: bool = True

    def depth(self, z):
        z = np.asarray(z, dtype=complex)
        w = (z - self.line.point) * np.conj(self.line.direction)
        with np.errstate(invalid="ignore", divide="ignore"):
            s = w.imag / np.abs(w)
        s = np.where(np.isfinite(z) & (np.abs(w) > 0), s, 0.0)
        return s if self.left else -s

    def boundary_samples(self, n):
        return self.line.sample(n)

    def interior_samples(self, n):
        rad = np.geomspace(1e-3, 1e3, max(2, n // 4))
        ang = np.array([0.15, 0.4, 0.6, 0.85]) * np.pi * (1 if self.left else -1)
        w = rad[None, :] * np.exp(1j * ang)[:, None]
        return (self.line.point + self.line.direction * w).ravel()

    def to_json(self):
        p, d = self.line.point, self.line.direction
        return {"halfplane": {"point": [p.real, p.imag], "direction": [d.real, d.imag],
                              "side": "left" if self.left else "right"}}


@dataclass(frozen=True)
class Sector(Region):
    """{z : |arg z - theta0| < phi, rmin < |z| < rmax} with apex at 0."""

    theta0: float
    phi: float
    rmin: float = 0.0
    rmax: float = math.inf

    def __post_init__(self):
        if not 0 < self.phi < math.pi:
            raise BadParameter(f"sector half-angle must lie in (0, pi), got {self.phi}")
        if self.rmin < 0 or not self.rmin < self.rmax:
            raise BadParameter("sector needs 0 <= rmin < rmax")

    def depth(self, z):
        z = np.asarray(z, dtype=complex)
        fin = np.isfinite(z) & (z != 0)
        zz = np.where(fin, z, 1.0)
        dev = np.angle(zz * cmath.exp(-1j * self.theta0))
        d = (self.phi - np.abs(dev)) / math.pi
        r = np.abs(zz)
        if self.rmin > 0:
            d = np.minimum(d, np.log(r / self.rmin))
        if math.isfinite(self.rmax):
            d = np.minimum(d, np.log(self.rmax / r))
        # the apex and infinity lie on the boundary unless cut off
        at0 = z == 0
        d = np.where(at0, -np.inf if self.rmin > 0 else 0.0, d)
        d = np.where(~np.isfinite(z), -np.inf if math.isfinite(self.rmax) else 0.0, d)
        return d

    def _radii(self, n):
        lo = self.rmin if self.rmin > 0 else 1e-3
        hi = self.rmax if math.isfinite(self.rmax) else 1e3
        if self.rmin > 0 and not math.isfinite(self.rmax):
            hi = max(hi, lo * 1e6)
        if math.isfinite(self.rmax) and self.rmin == 0:
            lo = min(lo, hi * 1e-6)
        return np.geomspace(lo, hi, max(2, n))

    def boundary_samples(self, n):
        rad = self._radii(n // 2)
        pts = [rad * cmath.exp(1j * (self.theta0 + s * self.phi)) for s in (-1, 1)]
        ang = self.theta0 + self.phi * np.linspace(-1, 1, max(2, n // 4))
        if self.rmin > 0:
            pts.append(self.rmin * np.exp(1j * ang))
        if math.isfinite(self.rmax):
            pts.append(self.rmax * np.exp(1j * ang))
        return np.concatenate(pts)

    def interior_samples(self, n):
        rad = self._radii(max(2, n // 4))
        if self.rmin > 0:
            rad = rad[(rad > self.rmin * 1.01)]
        if math.isfinite(self.rmax):
            rad = rad[(rad < self.rmax / 1.01)]
        if rad.size == 0:
            rad = np.array([math.sqrt(max(self.rmin, 1e-3) * min(self.rmax, 1e3))])
        ang = self.theta0 + self.phi * np.array([-0.9, -0.5, 0.0, 0.5, 0.9])
        return (rad[None, :] * np.exp(1j * ang)[:, None]).ravel()

    def to_json(self):
        out = {"theta0": self.theta0, "phi": self.phi}
        if self.rmin > 0:
            out["rmin"] = self.rmin
        if math.isfinite(self.rmax):
            out["rmax"] = self.rmax
        return {"sector": out}


@dataclass(frozen=True)
class MoebiusImage(Region):
    """The image of a region under a Moebius map, e.g. a bigon bounded by
    two circular arcs as the image of a sector."""

    base: Region
    transform: MoebiusTransform

    def depth(self, z):
        inv = self.transform.inverse()
        return self.base.depth(_apply_array(inv, np.asarray(z, dtype=complex)))

    def boundary_samples(self, n):
        return _apply_array(self.transform, self.base.boundary_samples(n))

    def interior_samples(self, n):
        return _apply_array(self.transform, self.base.interior_samples(n))

    def to_json(self):
        return {"image": {"base": self.base.to_json(), "transform": transform_to_json(self.transform)}}


def _apply_array(m: MoebiusTransform, z: np.ndarray) -> np.ndarray:
    return apply_array(m, np.asarray(z, dtype=complex))


# -- precise invariance ----------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    word: Word
    point: complex
    image: complex
    reason: str

    def __str__(self):
        return (f"word {format_word(self.word)} {self.reason}: "
                f"{_fmt_point(self.point)} -> {_fmt_point(self.image)}")

    def to_json(self) -> dict:
        return {"word": format_word(self.word), "point": _json_point(self.point),
                "image": _json_point(self.image), "reason": self.reason}


def _fmt_point(z) -> str:
    z = complex(z)
    if not np.isfinite(z):
        return "inf"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _json_point(z):
    z = complex(z)
    return "inf" if not np.isfinite(z) else [z.real, z.imag]


def _subgroup_generator(G: GroupSpec, h) -> Optional[MoebiusTransform]:
    if h is None:
        return None
    if isinstance(h, MoebiusTransform):
        return h
    return G.word_transform(h)


def _power_bound(G: GroupSpec, h: MoebiusTransform, depth: int) -> int:
    try:
        lh = math.log(abs(multiplier(h)))
    except MoebiusError:
        return 4 * depth
    longest = 0.0
    for t in G.transforms:
        try:
            longest = max(longest, math.log(abs(multiplier(t))))
        except MoebiusError:
            pass
    # keep |multiplier|^k well inside double range
    cap = max(1, int(300 / lh))
    return min(cap, 256, int(math.ceil(depth * max(longest, lh) / lh)) + 1)


def _match_power(mats: np.ndarray, powers: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Index of the power each matrix equals up to sign, or -1."""
    out = np.full(len(mats), -1, dtype=np.int64)
    scale = np.maximum(1.0, np.abs(mats).reshape(len(mats), -1).max(axis=1))
    for j, p in enumerate(powers):
        diff = np.minimum(
            np.abs(mats - p).reshape(len(mats), -1).max(axis=1),
            np.abs(mats + p).reshape(len(mats), -1).max(axis=1),
        )
        out[(out < 0) & (diff <= tol * scale)] = j
    return out


def _membership(mats: np.ndarray, powers: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    return _match_power(mats, powers, tol) >= 0


def chordal(z: np.ndarray, w) -> np.ndarray:
    """Chordal distance on the Riemann sphere (diameter 2)."""
    z = np.asarray(z, dtype=complex)
    fin = np.isfinite(z)
    zf = np.where(fin, z, 0)
    with np.errstate(over="ignore", invalid="ignore"):
        if is_inf(w):
            d = 2 / np.sqrt(1 + np.abs(zf) ** 2)
            return np.where(fin, d, 0.0)
        w = complex(w)
        d = 2 * np.abs(zf - w) / np.sqrt((1 + np.abs(zf) ** 2) * (1 + abs(w) ** 2))
        return np.where(fin, d, 2 / math.sqrt(1 + abs(w) ** 2))


TAU_VERTEX = 1e-6


def _near_fixed_points(img: np.ndarray, h: Optional[MoebiusTransform]) -> np.ndarray:
    """Images this close to a fixed point of h sit at a vertex of the
    region, where the inside/outside test is ill-conditioned."""
    near = np.zeros(img.shape, dtype=bool)
    if h is None:
        return near
    for fp in fixed_points(h):
        near |= chordal(img, fp) < TAU_VERTEX
    return near


def _subgroup_powers(G, h, depth):
    if h is None:
        return np.eye(2, dtype=complex)[None]
    k = _power_bound(G, h, depth)
    return np.stack([power(h, j).matrix for j in range(-k, k + 1)])


def check_precisely_invariant(
    B: Region,
    H,
    G: GroupSpec,
    depth: int = DEFAULT_DEPTH,
    samples: int = DEFAULT_SAMPLES,
    tol: float = TAU_REGION,
    chunk: int = 4096,
) -> Optional[Witness]:
    """Sampled test that B is precisely invariant under <H> in G.

    H is a generator label, a word (text or tuple), a transform, or None
    for the trivial subgroup. Elements of <H> (up to the enumeration depth)
    must keep the samples of B in its closure; every other reduced word
    must move them out of B. Returns None on success, else the first
    violation in canonical word order. Passing is evidence, not proof.
    """
    if depth < 1:
        raise BadParameter("depth must be >= 1")
    if not G.generators:
        return None
    h = _subgroup_generator(G, H)
    pts = np.concatenate([B.boundary_samples(samples), B.interior_samples(samples)])
    pts = pts[np.isfinite(pts)]
    powers = _subgroup_powers(G, h, depth)
    lm = G.letter_matrices()
    for codes, mats in orbits.matrix_levels(lm, depth):
        if codes.shape[1] == 0:
            continue
        for start in range(0, len(mats), chunk):
            m = mats[start : start + chunk]
            idx = _match_power(m, powers)
            inside_h = idx >= 0
            if inside_h.any():
                # the exact power is far less noisy than a long word product
                m = m.copy()
                m[inside_h] = powers[idx[inside_h]]
            img = orbits.apply_matrices(m, pts)
            dep = B.depth(img.ravel()).reshape(img.shape)
            ok = ~_near_fixed_points(img, h)
            bad_h = inside_h[:, None] & (dep < -tol) & ok
            bad_g = (~inside_h)[:, None] & (dep > tol) & ok
            bad = bad_h | bad_g
            if bad.any():
                i, j = np.argwhere(bad)[0]
                word = orbits.decode(codes[start + i].tolist(), G.labels)
                reason = "in the subgroup moves B off itself" if bad_h[i, j] else "outside the subgroup meets B"
                return Witness(word, complex(pts[j]), complex(img[i, j]), reason)
    return None


def check_pairwise(
    B1: Region,
    B2: Region,
    G: GroupSpec,
    depth: int = DEFAULT_DEPTH,
    samples: int = DEFAULT_SAMPLES,
    tol: float = TAU_REGION,
) -> Optional[Witness]:
    """Sampled test that g(B1) and B2 are disjoint for every g in G
    (identity included)."""
    pts = np.concatenate([B1.boundary_samples(samples), B1.interior_samples(samples)])
    pts = pts[np.isfinite(pts)]
    if not G.generators:
        levels = [(np.zeros((1, 0), dtype=np.int16), np.eye(2, dtype=complex)[None])]
    else:
        levels = orbits.matrix_levels(G.letter_matrices(), depth)
    for codes, mats in levels:
        img = orbits.apply_matrices(mats, pts)
        dep = B2.depth(img.ravel()).reshape(img.shape)
        bad = dep > tol
        if bad.any():
            i, j = np.argwhere(bad)[0]
            word = orbits.decode(codes[i].tolist(), G.labels)
            return Witness(word, complex(pts[j]), complex(img[i, j]), "carries B1 into B2")
    return None


# -- base constructions ------------------------------------------------------------

def fuchsian_schottky(g: int, n: int, radius: float = 1.0, gap: float = 1.0) -> GroupSpec:
    """Fuchsian Schottky group uniformizing the genus-g surface with n >= 1
    boundary components, from 4g + 2(n - 1) identical circles centred on the
    real axis, consecutive centres 2 radius + gap apart.

    Handle j pairs C(4j) with C(4j+2) and C(4j+1) with C(4j+3) (interleaved),
    each further boundary component pairs two adjacent circles. Every
    generator is hyperbolic and preserves the real line.
    """
    for name, v in (("g", g), ("n", n)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise BadParameter(f"{name} must be a non-negative integer")
    if n == 0:
        raise BadParameter("closed surfaces (n = 0) have no Schottky uniformization; need n >= 1")
    if not radius > 0:
        raise BadParameter("radius must be positive")
    if gap <= 0:
        raise OverlappingCircles(f"gap {gap} <= 0 makes neighbouring circles touch or overlap")
    count = 4 * g + 2 * (n - 1)
    ngen = 2 * g + n - 1
    if ngen > len(orbits.DEFAULT_LABELS):
        raise BadParameter("too many generators for single-letter labels")
    step = 2 * radius + gap
    centres = [(i - (count - 1) / 2) * step for i in range(count)]
    circles = [Circle(c, radius) for c in centres]
    pairs = []
    for j in range(g):
        b = 4 * j
        pairs += [(b, b + 2), (b + 1, b + 3)]
    for j in range(n - 1):
        b = 4 * g + 2 * j
        pairs.append((b, b + 1))
    gens = []
    for lab, (i, k) in zip(orbits.DEFAULT_LABELS, pairs):
        gens.append((lab, pair_circles(circles[i], circles[k])))
    what = "trivial group (disk)" if ngen == 0 else f"{ngen} generator(s) from {count} circles"
    return GroupSpec(tuple(gens), (f"fuchsian_schottky(g={g}, n={n}): {what}",))


def cyclic(lam: float, label: str = "a") -> GroupSpec:
    """<z -> lam z>."""
    return GroupSpec(((label, scaling(lam)),), (f"cyclic group generated by z -> {lam:g} z",))


def adjoin_extension(G0: GroupSpec, g: MoebiusTransform, label: Optional[str] = None,
                     depth: int = D_EXT) -> GroupSpec:
    """Adjoin g with g G0 g^-1 = G0 and g^2 in G0 (extended Fuchsian group).

    g must fix 0 and infinity. Checks, over reduced words of G0 up to
    `depth`: whether g^2 is such a word, and whether every g x g^-1 (x a
    generator) is. ExtensionCheckFailed when neither holds.
    """
    if g.is_identity():
        raise IdentityGenerator("the adjoined element is the identity")
    scale = max(abs(g.a), abs(g.d))
    if abs(g.b) > TAU_FIX * scale or abs(g.c) > TAU_FIX * scale:
        raise ExtensionCheckFailed("the adjoined element must fix 0 and infinity; renormalize first")
    label = label or G0.free_label(("g", "s", "t", "u"))
    targets = [compose(g, g)] + [conjugate(t, g) for t in G0.transforms]
    found = [None] * len(targets)
    if G0.generators:
        for codes, mats in orbits.matrix_levels(G0.letter_matrices(), depth):
            for k, tgt in enumerate(targets):
                if found[k] is None:
                    hit = np.flatnonzero(_membership(mats, tgt.matrix[None], 1e-8))
                    if hit.size:
                        found[k] = orbits.decode(codes[hit[0]].tolist(), G0.labels)
    square_ok = found[0] is not None and len(found[0]) > 0
    stable_ok = all(f is not None for f in found[1:])
    if not (square_ok or stable_ok):
        raise ExtensionCheckFailed(
            f"neither {label}^2 nor the conjugates of the generators were found among words of length <= {depth}"
        )
    notes = []
    if square_ok:
        notes.append(f"{label}^2 = {format_word(found[0])}")
    if stable_ok:
        notes.append(f"{label} normalises the group")
    step = (f"adjoin_extension: {'; '.join(notes)} (extended Fuchsian group; "
            f"quotient is an I-bundle of type (ii))")
    return G0.with_generator(label, g, step)


# -- combination theorems ------------------------------------------------------------

def _merge(G1: GroupSpec, G2: GroupSpec, shared: Optional[str]) -> Tuple[Tuple[str, MoebiusTransform], ...]:
    gens = list(G1.generators)
    for lab, t in G2.generators:
        if lab == shared:
            continue
        if lab in G1.labels:
            raise LabelError(f"label {lab!r} occurs in both groups; relabel one of them")
        gens.append((lab, t))
    return tuple(gens)


def first_combination(
    G1: GroupSpec,
    G2: GroupSpec,
    H_label: Optional[str],
    C,
    B1: Region,
    B2: Region,
    depth: int = DEFAULT_DEPTH,
    samples: int = DEFAULT_SAMPLES,
) -> GroupSpec:
    """Amalgamated free product G1 *_H G2, H = <H_label> (trivial for None).

    C separates the sphere into B1 and B2; B1 must be precisely invariant
    under H in G1 and B2 precisely invariant under H in G2.
    """
    if H_label is not None:
        if H_label not in G1 or H_label not in G2:
            raise SharedGeneratorMismatch(f"both groups must contain generator {H_label!r}")
        if not transforms_close(G1[H_label], G2[H_label]):
            raise SharedGeneratorMismatch(f"generator {H_label!r} differs between the groups")
    _check_sides(C, B1, B2, samples)
    w = check_precisely_invariant(B1, H_label, G1, depth, samples)
    if w is not None:
        raise PreciseInvarianceFailed(w, "B1 is not precisely invariant in G1")
    w = check_precisely_invariant(B2, H_label, G2, depth, samples)
    if w is not None:
        raise PreciseInvarianceFailed(w, "B2 is not precisely invariant in G2")
    gens = _merge(G1, G2, H_label)
    sub = f"<{H_label}>" if H_label else "the trivial group"
    step = f"first_combination: free product amalgamated over {sub}, separated by {_describe(C)}"
    return GroupSpec(gens, G1.provenance + G2.provenance + (step,))


def _describe(C) -> str:
    if isinstance(C, Line):
        ang = math.degrees(cmath.phase(C.direction))
        return f"the line through {_fmt_point(C.point)} at {ang:.6g} deg"
    if isinstance(C, Circle):
        return f"the circle |z - ({_fmt_point(C.center)})| = {C.radius:g}"
    return str(C)


def _check_sides(C, B1: Region, B2: Region, samples: int) -> None:
    """Sampled check that B1 and B2 are disjoint and both bounded by C."""
    if C is None:
        return
    bd = C.sample(samples)
    for name, B in (("B1", B1), ("B2", B2)):
        d = B.depth(bd)
        if np.any(np.abs(d[np.isfinite(d)]) > 1e-6):
            raise BadParameter(f"{name} is not bounded by the separating curve")
    for X, Y, name in ((B1, B2, "B1"), (B2, B1, "B2")):
        pts = X.interior_samples(samples)
        if np.any(Y.depth(pts) > TAU_REGION):
            raise BadParameter(f"{name} overlaps the other side of the separating curve")


def second_combination(
    G: GroupSpec,
    H1,
    H2,
    f: MoebiusTransform,
    B1: Region,
    B2: Region,
    label: Optional[str] = None,
    depth: int = DEFAULT_DEPTH,
    samples: int = DEFAULT_SAMPLES,
) -> GroupSpec:
    """HNN extension: adjoin f with f H1 f^-1 = H2.

    H1, H2 are generator labels or words in G. Requires (B1, B2) pairwise
    precisely invariant under (H1, H2) in G and f(interior B1) = exterior B2.
    """
    h1 = _subgroup_generator(G, H1)
    h2 = _subgroup_generator(G, H2)
    fhf = conjugate(h1, f)
    if not (transforms_close(fhf, h2, 1e-8) or transforms_close(fhf, inverse(h2), 1e-8)):
        raise ConjugationFailed(f"f {H1} f^-1 is neither {H2} nor its inverse")
    for B, h, name in ((B1, H1, "B1"), (B2, H2, "B2")):
        w = check_precisely_invariant(B, h, G, depth, samples)
        if w is not None:
            raise PreciseInvarianceFailed(w, f"{name} is not precisely invariant under <{h}>")
    w = check_pairwise(B1, B2, G, depth, samples)
    if w is not None:
        raise PreciseInvarianceFailed(w, "B1 and B2 are not pairwise precisely invariant")
    bd = _apply_array(f, B1.boundary_samples(samples))
    dep = B2.depth(bd)
    if np.any(np.abs(dep[np.isfinite(dep)]) > 1e-6):
        raise RegionMapFailed("f does not carry the boundary of B1 onto the boundary of B2")
    inner = _apply_array(f, B1.interior_samples(samples))
    if np.any(B2.depth(inner) > -TAU_REGION):
        raise RegionMapFailed("f does not carry the interior of B1 into the exterior of B2")
    label = label or G.free_label()
    h1t = H1 if isinstance(H1, str) else "h1"
    h2t = H2 if isinstance(H2, str) else "h2"
    step = (f"second_combination: {label} ({h1t}) {label}^-1 = ({h2t}); round-handle step "
            f"gluing the half-cylinders along the medians of the two boundary cylinders")
    return G.with_generator(label, f, step)


# -- complex twists -------------------------------------------------------------------

def complex_twist(G: GroupSpec, a_label: str, p: int, q: int, lam: float,
                  label: Optional[str] = None) -> GroupSpec:
    """Adjoin a0, the q-th root of a that rotates by 2 pi p/q about a's axis:
    a0 = F (z -> lam^(1/q) e^(2 pi i p/q) z) F^-1 with F the normalizing
    frame of a. Requires a conjugate to z -> lam z."""
    for name, v in (("p", p), ("q", q)):
        if isinstance(v, bool) or not isinstance(v, int):
            raise BadParameter(f"{name} must be an integer")
    if q < 1:
        raise BadParameter("q must be >= 1")
    if not lam > 1:
        raise BadParameter("lambda must be > 1")
    if math.gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) = {math.gcd(p, q)} != 1")
    a = G[a_label]
    if q == 1:
        return GroupSpec(G.generators, G.provenance + (f"{p}/1-complex twist of {a_label}: no-op",))
    frame = normalizing_frame(a)
    local = compose(scaling(lam ** (1.0 / q)), rotation(p, q))
    a0 = conjugate(local, frame)
    if not transforms_close(power(a0, q), a):
        raise PowerCheckFailed(f"the twist root does not satisfy a0^{q} = {a_label}; is the multiplier {lam}?")
    label = label or _twist_label(G, a_label)
    step = f"{p}/{q}-complex twist of {a_label}: {label}^{q} = {a_label}"
    return G.with_generator(label, a0, step)


def _twist_label(G: GroupSpec, a_label: str) -> str:
    for k in range(10):
        cand = f"{a_label}{k}" if a_label[-1:].isalpha() else f"{a_label[0]}{k}"
        if cand not in G.labels:
            return cand
    return G.free_label()


# -- serialization ------------------------------------------------------------------

def _c(z) -> list:
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]


def _z(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if not (isinstance(v, list) and len(v) == 2):
        raise GroupError(f"expected [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def transform_to_json(t: MoebiusTransform) -> dict:
    return {"a": _c(t.a), "b": _c(t.b), "c": _c(t.c), "d": _c(t.d)}


def transform_from_json(obj) -> MoebiusTransform:
    if not isinstance(obj, dict):
        raise GroupError(f"transform JSON must be an object, got {obj!r}")
    try:
        return MoebiusTransform(_z(obj["a"]), _z(obj["b"]), _z(obj["c"]), _z(obj["d"]))
    except KeyError as exc:
        raise GroupError(f"transform JSON misses entry {exc}") from None


def circle_from_json(obj):
    """{"circle": {"center", "radius"}}, {"line": {"point", "direction"}},
    or a bare {"center", "radius"} object."""
    if not isinstance(obj, dict):
        raise GroupError(f"expected a circle or line object, got {obj!r}")
    try:
        if "circle" in obj or "center" in obj:
            c = obj.get("circle", obj)
            return Circle(_z(c["center"]), float(c["radius"]))
        if "line" in obj:
            ln = obj["line"]
            return Line(_z(ln["point"]), _z(ln["direction"]))
    except (KeyError, TypeError) as exc:
        raise GroupError(f"malformed circle/line object {obj!r}: {exc}") from None
    raise GroupError("expected a 'circle' or 'line' object")


def circle_to_json(C) -> dict:
    if isinstance(C, Circle):
        return {"circle": {"center": _c(C.center), "radius": C.radius}}
    return {"line": {"point": _c(C.point), "direction": _c(C.direction)}}


def region_from_json(obj) -> Region:
    if "disk" in obj:
        d = obj["disk"]
        return Disk(Circle(_z(d["center"]), float(d["radius"])), d.get("side", "inside") == "inside")
    if "halfplane" in obj:
        h = obj["halfplane"]
        return HalfPlane(Line(_z(h["point"]), _z(h["direction"])), h.get("side", "left") == "left")
    if "sector" in obj:
        s = obj["sector"]
        return Sector(float(s["theta0"]), float(s["phi"]), float(s.get("rmin", 0.0)),
                      float(s.get("rmax", math.inf)))
    if "image" in obj:
        i = obj["image"]
        return MoebiusImage(region_from_json(i["base"]), transform_from_json(i["transform"]))
    raise GroupError("unknown region kind")


def group_to_json(G: GroupSpec) -> dict:
    return {
        "generators": [{"label": lab, "matrix": transform_to_json(t)} for lab, t in G.generators],
        "provenance": list(G.provenance),
    }


def group_from_json(obj) -> GroupSpec:
    if not isinstance(obj, dict) or "generators" not in obj:
        raise GroupError("group spec must be an object with a 'generators' list")
    if not isinstance(obj["generators"], list):
        raise GroupError("'generators' must be a list")
    gens = []
    for g in obj["generators"]:
        if not isinstance(g, dict):
            raise GroupError(f"generator entries must be objects, got {g!r}")
        lab = g.get("label")
        if "matrix" in g:
            t = transform_from_json(g["matrix"])
        elif "pair" in g:
            pair = g["pair"]
            if not isinstance(pair, dict) or "c1" not in pair or "c2" not in pair:
                raise GroupError(f"generator {lab!r}: 'pair' needs 'c1' and 'c2'")
            t = pair_circles(circle_from_json(pair["c1"]), circle_from_json(pair["c2"]))
        else:
            raise GroupError(f"generator {lab!r} needs 'matrix' or 'pair'")
        gens.append((lab, t))
    prov = obj.get("provenance", [])
    if not all(isinstance(p, str) for p in prov):
        raise GroupError("provenance entries must be strings")
    return GroupSpec(tuple(gens), tuple(prov))


_FLAT_LIST = re.compile(r"\[\s*([^\[\]{}\"]*?)\s*\]")


def dumps(obj) -> str:
    """Indented JSON with lists of numbers kept on one line."""
    text = json.dumps(obj, indent=2)
    return _FLAT_LIST.sub(lambda m: "[" + re.sub(r",\s+", ", ", m.group(1)) + "]", text) + "\n"
