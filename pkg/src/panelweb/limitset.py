"""Limit-set sampling, box-counting dimension and the scalar-curvature sign.

Limit-set samples are orbit points of seeds (by default the generators'
fixed points, which lie in the limit set) under all reduced words up to a
given length. Duplicates are merged on the Riemann sphere with the chordal
metric, and the result is sorted canonically so that output is
reproducible byte for byte.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from . import orbits
from .moebius import INF, TAU_FIX, BadParameter, classify, fixed_points, is_inf

TAU_DEDUP = 1e-9
TAU_SIGN = 1e-6
MAX_POINTS = 60_000_000


class ElementaryGroup(UserWarning):
    """The group has at most two limit points; the sample is degenerate."""


class TooFewPoints(ValueError):
    pass


class DegenerateScales(ValueError):
    pass


class BadDimension(ValueError):
    pass


# -- sphere geometry ------------------------------------------------------------

def to_sphere(z: np.ndarray) -> np.ndarray:
    """Stereographic image on the unit sphere; infinity goes to (0, 0, 1).
    Stable for very large |z|."""
    z = np.asarray(z, dtype=complex)
    fin = np.isfinite(z)
    zf = np.where(fin, z, 0)
    r = np.abs(zf)
    out = np.empty(z.shape + (3,))
    small = r <= 1
    with np.errstate(divide="ignore", invalid="ignore"):
        # |z| <= 1: direct formulas; |z| > 1: divide through by |z|
        den = np.where(small, 1 + r * r, r + 1 / np.where(small, 1, r))
        scale = np.where(small, 2.0, 2 / np.where(small, 1, r))
        out[..., 0] = np.where(small, 2 * zf.real / den, zf.real * scale / den)
        out[..., 1] = np.where(small, 2 * zf.imag / den, zf.imag * scale / den)
        out[..., 2] = np.where(small, (r * r - 1) / den, (r - 1 / np.where(small, 1, r)) / den)
    out[~fin] = (0.0, 0.0, 1.0)
    return out


def canonical_order(z: np.ndarray) -> np.ndarray:
    """Indices sorting by (re, im) with infinity last."""
    fin = np.isfinite(z)
    re = np.where(fin, z.real, np.inf)
    im = np.where(fin, z.imag, np.inf)
    return np.lexsort((im, re))


def dedup(z: np.ndarray, tol: float = TAU_DEDUP) -> np.ndarray:
    """Canonically sorted points with chordal near-duplicates removed
    (the first point in canonical order is kept)."""
    z = np.asarray(z, dtype=complex).ravel()
    # one encoding for infinity
    z = np.where(np.isfinite(z), z, complex(np.inf, np.inf))
    if z.size == 0:
        return z
    z = z[canonical_order(z)]
    xyz = to_sphere(z)
    keys = np.ascontiguousarray(np.floor(xyz / tol).astype(np.int64))
    _, first = np.unique(keys.view(np.dtype((np.void, 24))).ravel(), return_index=True)
    first.sort()
    z, xyz = z[first], xyz[first]
    if len(z) < 2:
        return z
    # only points with a neighbour closer than tol can be duplicates
    d, _ = cKDTree(xyz).query(xyz, k=2)
    cand = np.flatnonzero(d[:, 1] < tol)
    if len(cand):
        pairs = cKDTree(xyz[cand]).query_pairs(tol, output_type="ndarray")
        pairs = cand[pairs]
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        drop = np.zeros(len(z), dtype=bool)
        for i, j in pairs.tolist():
            if not drop[i]:
                drop[j] = True
        z = z[~drop]
    return z


# -- samples ----------------------------------------------------------------------

@dataclass(frozen=True)
class LimitSetSample:
    points: np.ndarray  # finite points, canonically sorted
    has_infinity: bool
    depth: int
    seed_points: Tuple = ()
    generator_count: int = 0
    elementary: bool = False

    def __len__(self):
        return len(self.points) + int(self.has_infinity)

    def all_points(self) -> list:
        pts = [complex(z) for z in self.points]
        return pts + ([INF] if self.has_infinity else [])

    def as_array(self) -> np.ndarray:
        """Finite points followed by complex(inf, inf) when infinity is present."""
        if self.has_infinity:
            return np.concatenate([self.points, [complex(np.inf, np.inf)]])
        return self.points.copy()


def default_seeds(G) -> list:
    seeds = []
    for t in G.transforms:
        if classify(t).kind == "elliptic":
            continue
        seeds.extend(fixed_points(t))
    return seeds


def _encode(points) -> np.ndarray:
    return np.array([complex(np.inf, np.inf) if is_inf(p) else complex(p) for p in points], dtype=complex)


def limit_set_sample(G, depth: int, seeds: Optional[Sequence] = None, tol: float = TAU_DEDUP,
                     max_points: int = MAX_POINTS) -> LimitSetSample:
    """Images of the seeds under all reduced words of length <= depth."""
    if isinstance(depth, bool) or not isinstance(depth, int) or depth < 0:
        raise BadParameter("depth must be a non-negative integer")
    seeds = list(default_seeds(G) if seeds is None else seeds)
    elementary = G.is_elementary()
    if elementary:
        warnings.warn(
            "the group is elementary (at most two limit points); the sample is degenerate",
            ElementaryGroup,
            stacklevel=2,
        )
    k = len(G.generators)
    z = _encode(seeds)
    if k and depth and len(z):
        expected = len(z) * orbits.word_count(k, depth)
        if expected > max_points:
            raise BadParameter(f"depth {depth} would produce {expected} orbit points (limit {max_points})")
        levels = list(orbits.orbit_levels(G.letter_matrices(), z, depth))
        z = np.concatenate(levels)
    pts = dedup(z, tol)
    fin = np.isfinite(pts)
    return LimitSetSample(
        points=pts[fin],
        has_infinity=bool((~fin).any()),
        depth=depth,
        seed_points=tuple(INF if is_inf(s) else complex(s) for s in seeds),
        generator_count=k,
        elementary=elementary,
    )


def sample_from_points(points, depth: int = 0, tol: float = TAU_DEDUP) -> LimitSetSample:
    pts = dedup(_encode(points) if not isinstance(points, np.ndarray) else points, tol)
    fin = np.isfinite(pts)
    return LimitSetSample(pts[fin], bool((~fin).any()), depth)


def forward_invariance_defect(G, sample: LimitSetSample, superset: LimitSetSample) -> float:
    """Largest chordal distance from g(p) (g a generator or inverse, p in
    the sample) to the superset."""
    tree = cKDTree(to_sphere(superset.as_array()))
    worst = 0.0
    pts = sample.as_array()
    for m in G.letter_matrices():
        img = orbits.apply_matrix(m, pts)
        d, _ = tree.query(to_sphere(img))
        worst = max(worst, float(d.max()))
    return worst


# -- CSV ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x) + 0.0)  # + 0.0 folds -0.0 into 0.0


def sample_to_csv(sample: LimitSetSample) -> str:
    out = io.StringIO()
    out.write("re,im\n")
    for z in sample.points:
        out.write(f"{_fmt(z.real)},{_fmt(z.imag)}\n")
    if sample.has_infinity:
        out.write("inf,inf\n")
    return out.getvalue()


def read_points_csv(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "re,im":
        raise ValueError("points CSV must start with the header 're,im'")
    pts = []
    for n, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 2:
            raise ValueError(f"line {n}: expected two fields")
        try:
            re_, im_ = float(parts[0]), float(parts[1])
        except ValueError:
            raise ValueError(f"line {n}: not a number") from None
        if math.isinf(re_) or math.isinf(im_):
            pts.append(complex(np.inf, np.inf))
        elif math.isnan(re_) or math.isnan(im_):
            raise ValueError(f"line {n}: NaN coordinate")
        else:
            pts.append(complex(re_, im_))
    return np.array(pts, dtype=complex)


# -- dimension -------------------------------------------------------------------------

MIN_POINTS = 100


@dataclass(frozen=True)
class DimensionEstimate:
    d: float
    fit_r2: float
    scales_used: Tuple[float, ...]
    point_count: int
    counts: Tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {"d": self.d, "fit_r2": self.fit_r2, "scales": list(self.scales_used),
                "points": self.point_count}


def _diameter(xy: np.ndarray, directions: int = 64) -> float:
    ang = np.pi * np.arange(directions) / directions
    proj = xy @ np.stack([np.cos(ang), np.sin(ang)])
    return float((proj.max(axis=0) - proj.min(axis=0)).max())


def chart_point(z: np.ndarray) -> complex:
    """A point well away from the sample, chosen from a fixed grid around
    its bounding box (the farthest grid point from the sample wins)."""
    lo = np.array([z.real.min(), z.imag.min()])
    hi = np.array([z.real.max(), z.imag.max()])
    span = np.maximum(hi - lo, 1e-12)
    t = np.linspace(-0.25, 1.25, 7)
    cand = np.array([(lo[0] + a * span[0]) + 1j * (lo[1] + b * span[1]) for a in t for b in t])
    tree = cKDTree(np.column_stack([z.real, z.imag]))
    d, _ = tree.query(np.column_stack([cand.real, cand.imag]))
    return complex(cand[int(np.argmax(d))])


def prepare_planar(sample) -> np.ndarray:
    """Finite planar points for box counting; if infinity is present, move
    everything by w = 1/(z - z0)."""
    if isinstance(sample, LimitSetSample):
        z = sample.as_array()
    else:
        z = np.asarray(sample, dtype=complex).ravel()
    fin = np.isfinite(z)
    if fin.all():
        return z
    zf = z[fin]
    if zf.size == 0:
        return np.zeros(1, dtype=complex)
    z0 = chart_point(zf)
    return np.concatenate([1 / (zf - z0), [0j]])


def scale_ladder(diameter: float, n_scales: int = 8, ratio: float = 0.5) -> Tuple[float, ...]:
    if not diameter > 0 or not math.isfinite(diameter):
        raise DegenerateScales("the sample has zero diameter")
    if n_scales < 2 or not 0 < ratio < 1:
        raise DegenerateScales("need at least 2 scales and a ratio in (0, 1)")
    top = diameter / 4
    return tuple(top * ratio ** k for k in range(n_scales))


def box_counting_dimension(sample, scales: Optional[Sequence[float]] = None, n_scales: int = 8,
                           ratio: float = 0.5) -> DimensionEstimate:
    """Least-squares slope of log N(eps) against log(1/eps), clamped to
    [0, 2]. N(eps) counts occupied cells of a grid of side eps anchored at
    the lower-left corner of the bounding box."""
    z = prepare_planar(sample)
    if z.size < MIN_POINTS:
        raise TooFewPoints(f"box counting needs at least {MIN_POINTS} finite points, got {z.size}")
    xy = np.column_stack([z.real, z.imag])
    if scales is None:
        scales = scale_ladder(_diameter(xy), n_scales, ratio)
    scales = tuple(float(s) for s in scales)
    if len(scales) < 2 or any(not (s > 0 and math.isfinite(s)) for s in scales) or len(set(scales)) < 2:
        raise DegenerateScales("scales must be at least two distinct positive numbers")
    origin = xy.min(axis=0)
    counts = []
    for eps in scales:
        cells = np.floor((xy - origin) / eps).astype(np.int64)
        counts.append(len(np.unique(cells, axis=0)))
    x = np.log(1 / np.array(scales))
    y = np.log(np.array(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1 - float((resid ** 2).sum()) / ss_tot))
    d = float(min(2.0, max(0.0, slope)))
    return DimensionEstimate(d, r2, scales, int(z.size), tuple(counts))


# -- curvature sign ------------------------------------------------------------------------

NEGATIVE, ZERO, POSITIVE = "negative", "zero", "positive"


@dataclass(frozen=True)
class ScalarSign:
    sign: str
    quantity: float

    def __post_init__(self):
        expect = POSITIVE if self.quantity > TAU_SIGN else NEGATIVE if self.quantity < -TAU_SIGN else ZERO
        if self.sign != expect:
            raise ValueError(f"sign {self.sign!r} does not match quantity {self.quantity}")

    def __str__(self):
        return self.sign

    def to_json(self) -> dict:
        return {"sign": self.sign, "quantity": self.quantity}


def scalar_sign(d: float, n: int = 4) -> ScalarSign:
    """Sign of n/2 - 1 - d: the sign of the scalar curvature of a conformally
    flat n-manifold uniformized by a group whose limit set has dimension d."""
    if isinstance(n, bool) or int(n) != n or n < 3:
        raise BadDimension(f"manifold dimension must be an integer >= 3, got {n}")
    d = float(d)
    if not math.isfinite(d) or d < 0:
        raise BadDimension(f"limit-set dimension must be finite and >= 0, got {d}")
    q = n / 2 - 1 - d
    sign = POSITIVE if q > TAU_SIGN else NEGATIVE if q < -TAU_SIGN else ZERO
    return ScalarSign(sign, q)


HANDLEBODY_RANGE = "handlebody-or-I-bundle-range"
BOUNDARY = "boundary"
PANELLED_WEB_CONSISTENT = "panelled-web-consistent"


def dimension_threshold_check(d: float) -> str:
    """Diagnostic label only: d < 1 is the handlebody / I-bundle range,
    d > 1 is what panelled webs are expected to show."""
    if d < 1 - TAU_SIGN:
        return HANDLEBODY_RANGE
    if d > 1 + TAU_SIGN:
        return PANELLED_WEB_CONSISTENT
    return BOUNDARY
