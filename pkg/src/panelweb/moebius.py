"""Möbius transformations of the extended complex plane, circle pairings and
the conformal embedding of H^3 x S^1 into R^4.

Transforms are stored as 2x2 complex matrices normalised to determinant 1,
with a sign convention that makes the PSL(2, C) class canonical.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

TAU_DET = 1e-9
TAU_FIX = 1e-9
TAU_POLE = 1e-12


class Infinity:
    """The point at infinity of the Riemann sphere (a singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()

Point = Union[complex, Infinity]


class MoebiusError(ValueError):
    pass


class IdentityTransform(MoebiusError):
    pass


class NotLoxodromic(MoebiusError):
    pass


class IntersectingCircles(MoebiusError):
    pass


class DegenerateRadius(MoebiusError):
    pass


class BadParameter(MoebiusError):
    pass


class NonpositiveT(MoebiusError):
    pass


def is_inf(p) -> bool:
    return p is INF


def as_point(p) -> Point:
    if p is INF:
        return INF
    z = complex(p)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return INF
    return z


def points_close(p: Point, q: Point, tol: float = TAU_FIX) -> bool:
    """Relative closeness on the sphere; infinity is only close to itself
    or to points of very large modulus."""
    if p is INF and q is INF:
        return True
    if p is INF or q is INF:
        z = q if p is INF else p
        return abs(z) > 1.0 / tol
    return abs(p - q) <= tol * max(1.0, abs(p), abs(q))


def _canonical_sign(m: np.ndarray) -> np.ndarray:
    # first entry that is not negligible gets positive real part
    # (positive imaginary part when purely imaginary)
    scale = np.abs(m).max()
    for v in m.flat:
        if abs(v) > 1e-12 * scale:
            if v.real < -1e-14 * abs(v) or (abs(v.real) <= 1e-14 * abs(v) and v.imag < 0):
                return -m
            return m
    return m


def _normalise(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0 or not cmath.isfinite(det):
        raise MoebiusError("singular matrix: ad - bc = 0")
    if abs(det - 1) > TAU_DET:
        m = m / cmath.sqrt(det)
    return _canonical_sign(m)


@dataclass(frozen=True, eq=False)
class MoebiusTransform:
    """z -> (a z + b) / (c z + d), normalised so that ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        m = _normalise(np.array([[self.a, self.b], [self.c, self.d]], dtype=complex))
        object.__setattr__(self, "a", complex(m[0, 0]))
        object.__setattr__(self, "b", complex(m[0, 1]))
        object.__setattr__(self, "c", complex(m[1, 0]))
        object.__setattr__(self, "d", complex(m[1, 1]))

    @classmethod
    def from_matrix(cls, m) -> "MoebiusTransform":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def trace(self) -> complex:
        return self.a + self.d

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "MoebiusTransform") -> "MoebiusTransform":
        return compose(self, other)

    def __call__(self, p: Point) -> Point:
        return apply(self, p)

    def __pow__(self, k: int) -> "MoebiusTransform":
        return power(self, k)

    def inverse(self) -> "MoebiusTransform":
        return inverse(self)

    def isclose(self, other: "MoebiusTransform", tol: float = TAU_FIX) -> bool:
        return transforms_close(self, other, tol)

    def is_identity(self, tol: float = TAU_FIX) -> bool:
        return transforms_close(self, IDENTITY, tol)

    def __repr__(self):
        def f(z):
            return f"{z.real:.6g}{z.imag:+.6g}j"

        return f"MoebiusTransform([[{f(self.a)}, {f(self.b)}], [{f(self.c)}, {f(self.d)}]])"


IDENTITY = MoebiusTransform(1, 0, 0, 1)


def normalize(m: MoebiusTransform) -> MoebiusTransform:
    return MoebiusTransform.from_matrix(m.matrix)


def transforms_close(m: MoebiusTransform, n: MoebiusTransform, tol: float = TAU_FIX) -> bool:
    """Equality in PSL(2, C): matrices agree up to overall sign."""
    x, y = m.matrix, n.matrix
    scale = max(1.0, np.abs(x).max(), np.abs(y).max())
    return bool(min(np.abs(x - y).max(), np.abs(x + y).max()) <= tol * scale)


def compose(m: MoebiusTransform, n: MoebiusTransform) -> MoebiusTransform:
    """(m o n)(z) = m(n(z))."""
    return MoebiusTransform.from_matrix(m.matrix @ n.matrix)


def inverse(m: MoebiusTransform) -> MoebiusTransform:
    return MoebiusTransform(m.d, -m.b, -m.c, m.a)


def power(m: MoebiusTransform, k: int) -> MoebiusTransform:
    if k < 0:
        m, k = inverse(m), -k
    out = IDENTITY
    base = m
    while k:
        if k & 1:
            out = compose(out, base)
        k >>= 1
        if k:
            base = compose(base, base)
    return out


def conjugate(m: MoebiusTransform, by: MoebiusTransform) -> MoebiusTransform:
    """by o m o by^-1."""
    return compose(compose(by, m), inverse(by))


def apply(m: MoebiusTransform, p: Point) -> Point:
    if p is INF:
        if abs(m.c) <= TAU_POLE * max(abs(m.a), 1.0):
            return INF
        return m.a / m.c
    z = complex(p)
    num = m.a * z + m.b
    den = m.c * z + m.d
    if abs(den) <= TAU_POLE * max(1.0, abs(m.c * z), abs(m.d)):
        return INF
    return num / den


def apply_array(m: MoebiusTransform, z: np.ndarray) -> np.ndarray:
    """Vectorised action on finite points; poles come back as complex inf."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        num = m.a * z + m.b
        den = m.c * z + m.d
        out = num / den
        pole = np.abs(den) <= TAU_POLE * np.maximum(1.0, np.maximum(np.abs(m.c * z), abs(m.d)))
        out = np.where(pole, complex(np.inf, np.inf), out)
        big = ~np.isfinite(z)
        if big.any():
            at_inf = complex(np.inf, np.inf) if abs(m.c) <= TAU_POLE * max(abs(m.a), 1.0) else m.a / m.c
            out = np.where(big, at_inf, out)
    return out


# -- classification ---------------------------------------------------------

PARABOLIC = "parabolic"
ELLIPTIC = "elliptic"
LOXODROMIC = "loxodromic"


@dataclass(frozen=True)
class TransformClass:
    kind: str
    hyperbolic: bool = False

    def __str__(self):
        return "loxodromic(hyperbolic)" if self.hyperbolic else self.kind


def _check_not_identity(m: MoebiusTransform):
    if m.is_identity():
        raise IdentityTransform("the identity has no class or fixed points")


def classify(m: MoebiusTransform, tol: float = TAU_FIX) -> TransformClass:
    _check_not_identity(m)
    t = m.trace
    t2 = t * t
    if abs(t2.imag) <= tol * max(1.0, abs(t2)):
        if abs(t2.real - 4) <= tol * 4:
            return TransformClass(PARABOLIC)
        if 0 <= t2.real < 4 or abs(t2.real) <= tol:
            return TransformClass(ELLIPTIC)
    hyper = abs(t.imag) <= tol * max(1.0, abs(t)) and abs(t.real) > 2
    return TransformClass(LOXODROMIC, hyperbolic=hyper)


def fixed_points(m: MoebiusTransform, tol: float = TAU_FIX) -> tuple:
    """Fixed points of a non-identity transform.

    Loxodromic transforms return (attracting, repelling); elliptic ones
    return their two fixed points; parabolic ones a single point.
    """
    _check_not_identity(m)
    a, b, c, d = m.a, m.b, m.c, m.d
    scale = max(abs(a), abs(b), abs(c), abs(d))
    parabolic = classify(m, tol).kind == PARABOLIC
    if abs(c) <= TAU_POLE * scale:
        if parabolic or abs(d - a) <= tol * scale:
            return (INF,)
        z = b / (d - a)
        pts = (z, INF)
    else:
        disc = cmath.sqrt((a + d) ** 2 - 4)
        if parabolic:
            return ((a - d) / (2 * c),)
        z1 = ((a - d) + disc) / (2 * c)
        z2 = ((a - d) - disc) / (2 * c)
        pts = (z1, z2)
    # order attracting first: derivative at an attracting point has modulus < 1
    return tuple(sorted(pts, key=lambda p: _derivative_modulus(m, p)))


def _derivative_modulus(m: MoebiusTransform, p: Point) -> float:
    if p is INF:
        # in the chart w = 1/z the derivative at w = 0 is 1/a^2 when c = 0
        return 1.0 / abs(m.a) ** 2 if m.a != 0 else math.inf
    den = m.c * p + m.d
    return 1.0 / abs(den) ** 2 if den != 0 else math.inf


def multiplier(m: MoebiusTransform) -> complex:
    """The k with |k| > 1 such that m is conjugate to z -> k z."""
    if classify(m).kind != LOXODROMIC:
        raise NotLoxodromic("multiplier is defined for loxodromic transforms only")
    t = m.trace
    disc = cmath.sqrt(t * t - 4)
    mu = (t + disc) / 2
    k = mu * mu
    return k if abs(k) > 1 else 1 / k


def normalizing_frame(m: MoebiusTransform) -> MoebiusTransform:
    """A transform F with F^-1 o m o F = (z -> k z), k = multiplier(m).

    F sends 0 to the repelling and infinity to the attracting fixed point.
    """
    att, rep = fixed_points(m)
    return _frame(rep, att)


def _frame(zero_to: Point, inf_to: Point) -> MoebiusTransform:
    # F(0) = zero_to, F(inf) = inf_to
    if inf_to is INF:
        return MoebiusTransform(1, zero_to, 0, 1)
    if zero_to is INF:
        return MoebiusTransform(inf_to, 1, 1, 0)
    return MoebiusTransform(inf_to, zero_to, 1, 1)


# -- elementary constructors ------------------------------------------------

def scaling(lam: float) -> MoebiusTransform:
    """z -> lam z for real lam > 0."""
    lam = float(lam)
    if not lam > 0 or not math.isfinite(lam):
        raise BadParameter(f"scaling needs real lambda > 0, got {lam}")
    s = math.sqrt(lam)
    return MoebiusTransform(s, 0, 0, 1 / s)


def rotation(p: int, q: int) -> MoebiusTransform:
    """z -> exp(2 pi i p / q) z."""
    if q == 0:
        raise BadParameter("rotation needs q != 0")
    w = cmath.exp(1j * math.pi * p / q)
    return MoebiusTransform(w, 0, 0, 1 / w)


def translation(t: complex) -> MoebiusTransform:
    return MoebiusTransform(1, complex(t), 0, 1)


def elementary(kind: str, *params) -> MoebiusTransform:
    builders = {"scaling": scaling, "rotation": rotation, "translation": translation}
    try:
        build = builders[kind]
    except KeyError:
        raise BadParameter(f"unknown elementary transform {kind!r}") from None
    try:
        return build(*params)
    except TypeError as exc:
        raise BadParameter(str(exc)) from None


# -- circles ----------------------------------------------------------------

@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DegenerateRadius(f"circle radius must be positive, got {self.radius}")

    def sample(self, n: int = 64) -> np.ndarray:
        t = np.linspace(0, 2 * np.pi, n, endpoint=False)
        return self.center + self.radius * np.exp(1j * t)

    def contains(self, z) -> bool:
        return abs(complex(z) - self.center) < self.radius


@dataclass(frozen=True)
class Line:
    point: complex
    direction: complex

    def __post_init__(self):
        d = complex(self.direction)
        if d == 0:
            raise BadParameter("line direction must be nonzero")
        object.__setattr__(self, "point", complex(self.point))
        object.__setattr__(self, "direction", d / abs(d))

    def sample(self, n: int = 64, span: float = 1e3) -> np.ndarray:
        # points spread geometrically in both directions so large scales are seen
        t = np.geomspace(1e-3, span, n // 2)
        t = np.concatenate([-t[::-1], t])
        return self.point + self.direction * t

    def side(self, z) -> float:
        """Positive on the left of the direction of travel."""
        w = (complex(z) - self.point) * self.direction.conjugate()
        return w.imag


GeneralizedCircle = Union[Circle, Line]


def circle_through_line(angle: float) -> Line:
    """The line through the origin at the given angle."""
    return Line(0, cmath.exp(1j * angle))


def pair_circles(c1: Circle, c2: Circle) -> MoebiusTransform:
    """Orientation-preserving map carrying c1 onto c2 and the exterior of c1
    onto the interior of c2.

    For disjoint circles this is the inversion in c1 followed by the
    reflection in the perpendicular bisector of the centres, rescaled when
    the radii differ. Nested circles get the similarity
    z -> c2 + (r2/r1)(z - c1); the removed disks are then the inside of the
    smaller circle and the outside of the larger one, and "exterior" and
    "interior" are read on the Riemann sphere accordingly.
    """
    if isinstance(c1, Line) or isinstance(c2, Line):
        raise BadParameter("pair_circles needs two circles")
    c, r = c1.center, c1.radius
    cp, rp = c2.center, c2.radius
    dist = abs(cp - c)
    if dist >= r + rp:
        u = (cp - c) / dist
        return MoebiusTransform(cp, -c * cp - u * u * r * rp, 1, -c)
    if dist <= abs(r - rp) and r != rp:
        k = rp / r
        return MoebiusTransform(k, cp - k * c, 0, 1)
    raise IntersectingCircles(f"circles {c1} and {c2} intersect")


# -- H^3 x S^1 -> R^4 ---------------------------------------------------------

def embed_h3s1(x: float, y: float, t: float, theta: float) -> tuple:
    """(x, y, t, theta) -> (x, y, t cos theta, t sin theta)."""
    if not t > 0:
        raise NonpositiveT(f"height t must be positive, got {t}")
    return (float(x), float(y), t * math.cos(theta), t * math.sin(theta))
