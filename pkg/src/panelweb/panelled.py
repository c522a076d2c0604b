"""Concrete panelled-web groups over the twice-punctured torus.

Everything is laid out in the dilation frame of the shared generator
a : z -> kappa z, so that the annulus 1 < |z| < kappa is a fundamental
domain for <a> and every other circle sits inside it.

* ``sigma12_fuchsian``: a, plus two interleaved circle pairings x, y on
  the positive real axis; a Fuchsian group uniformizing the genus-1
  surface with two boundary components.
* ``extended_piece``: the pants group <a, b> with b pairing circles at c
  and c sqrt(kappa), so b and a b^-1 have equal multipliers, extended by t
  with t b t^-1 = a b^-1 (second combination). t preserves the real line
  but swaps its sides: the quotient is a twisted I-bundle.
* ``panelled_sigma12``: the extended piece rotated by 2 pi/3 and
  amalgamated with the Fuchsian group over <a> along the line at angle
  pi/3 (first combination).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .kleinian import (
    Disk,
    GroupSpec,
    HalfPlane,
    MoebiusImage,
    Sector,
    conjugate_group,
    first_combination,
    second_combination,
)
from .moebius import (
    BadParameter,
    Circle,
    MoebiusTransform,
    circle_through_line,
    compose,
    conjugate,
    fixed_points,
    inverse,
    normalizing_frame,
    pair_circles,
    rotation,
    scaling,
)


@dataclass(frozen=True)
class PanelledLayout:
    """kappa: multiplier of a. fuchsian_ratio: radius/centre of the four
    genus circles. c, piece_ratio: centre and radius/centre of the circle
    paired by b (its partner sits at c sqrt(kappa)). t_scale: where t
    lands along the axis of a b^-1, in that axis' normalizing frame."""

    kappa: float = 64.0
    fuchsian_ratio: float = 0.25
    c: float = 4.0
    piece_ratio: float = 0.65
    t_scale: float = 1.0

    def __post_init__(self):
        if not self.kappa > 1:
            raise BadParameter("kappa must exceed 1")
        if not 0 < self.fuchsian_ratio < 1 or not 0 < self.piece_ratio < 1:
            raise BadParameter("radius ratios must lie in (0, 1)")
        if not self.t_scale > 0:
            raise BadParameter("t_scale must be positive")


DEFAULT_LAYOUT = PanelledLayout()


def dilation(kappa: float) -> MoebiusTransform:
    """z -> kappa z, as the pairing of |z| = 1 with |z| = kappa."""
    return pair_circles(Circle(0, 1), Circle(0, kappa))


def sigma12_fuchsian(layout: PanelledLayout = DEFAULT_LAYOUT) -> GroupSpec:
    k, s = layout.kappa, layout.fuchsian_ratio
    centres = [k ** ((2 * i + 1) / 8) for i in range(4)]
    circles = [Circle(t, s * t) for t in centres]
    gens = (
        ("a", dilation(k)),
        ("x", pair_circles(circles[0], circles[2])),
        ("y", pair_circles(circles[1], circles[3])),
    )
    return GroupSpec(gens, (f"Fuchsian group of the genus-1 surface with 2 boundary components (kappa={k:g})",))


def pants_group(layout: PanelledLayout = DEFAULT_LAYOUT) -> GroupSpec:
    k, c, u = layout.kappa, layout.c, layout.piece_ratio
    cp = c * math.sqrt(k)
    b = pair_circles(Circle(c, u * c), Circle(cp, u * cp))
    return GroupSpec((("a", dilation(k)), ("b", b)),
                     (f"pants group <a, b>; b pairs circles at {c:g} and {cp:g}",))


def axis_disk(m: MoebiusTransform) -> Disk:
    """The disk whose diameter joins the two (real) fixed points of m."""
    att, rep = fixed_points(m)
    return Disk(Circle((att + rep) / 2, abs(att - rep) / 2))


def extended_piece(layout: PanelledLayout = DEFAULT_LAYOUT, depth: int = 5) -> GroupSpec:
    P = pants_group(layout)
    b = P["b"]
    h = P.word_transform("a B")
    # t = F_h o (w -> -s w) o F_b^-1 conjugates b to a b^-1 and swaps the
    # half-planes of the real line
    t = compose(compose(normalizing_frame(h), MoebiusTransform(-layout.t_scale, 0, 0, 1)),
                inverse(normalizing_frame(b)))
    return second_combination(P, "b", "a B", t, axis_disk(b), axis_disk(h), label="t", depth=depth)


def panelled_sigma12(layout: PanelledLayout = DEFAULT_LAYOUT, depth: int = 5) -> GroupSpec:
    """Generators a, x, y, b, t."""
    G1 = sigma12_fuchsian(layout)
    G2 = conjugate_group(extended_piece(layout, depth), rotation(1, 3),
                         "rotated by exp(2 pi i/3)")
    C = circle_through_line(math.pi / 3)
    return first_combination(G1, G2, "a", C, HalfPlane(C, True), HalfPlane(C, False), depth=depth)


def lens_sector(phi: float) -> Sector:
    """The sector |arg z - 4 pi/3| < phi, between the two panels."""
    return Sector(4 * math.pi / 3, phi)


# -- an HNN example: two dilations conjugated by a sector-swapping map ---------------

@dataclass(frozen=True)
class SectorPair:
    group: GroupSpec
    f: MoebiusTransform
    B1: Sector
    B2: MoebiusImage


def sector_pair(phi: float = math.pi / 4, kappa: float = 25.0, p: float = 4.0, q: float = 6.0,
                k: float = 5.0) -> SectorPair:
    """G = <a, b> with a = (z -> kappa z) and b = M a M^-1 for
    M(z) = (q z + p k)/(z + k), so b has repelling point p, attracting
    point q and the same multiplier as a. B1 is the sector
    |arg z - 4 pi/3| < phi; B2 is the bigon M(sector |arg z| < pi - phi)
    between p and q; f = M o (z -> e^(-i pi/3) z) carries B1 onto the
    complement of B2 and conjugates a to b."""
    if not 0 < phi < math.pi:
        raise BadParameter("phi must lie in (0, pi)")
    a = scaling(kappa)
    M = MoebiusTransform(q, p * k, 1, k)
    G = GroupSpec((("a", a), ("b", conjugate(a, M))),
                  (f"<a, b>: b is a conjugated to fixed points {p:g}, {q:g}",))
    R = MoebiusTransform(cmath.exp(-1j * math.pi / 6), 0, 0, cmath.exp(1j * math.pi / 6))
    return SectorPair(G, compose(M, R), lens_sector(phi), MoebiusImage(Sector(0.0, math.pi - phi), M))
