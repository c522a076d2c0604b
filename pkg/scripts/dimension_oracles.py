"""Run the box-counting estimator on its oracles (Cantor set, segment) and on a
well-separated rank-2 Schottky group, then report the scalar-curvature sign."""
from __future__ import annotations

import argparse
import math
import time
from dataclasses import dataclass

import numpy as np

from panelweb.kleinian import GroupSpec
from panelweb.limitset import box_counting_dimension, limit_set_sample, scalar_sign
from panelweb.moebius import Circle, pair_circles


@dataclass(frozen=True)
class Config:
    cantor_level: int = 12
    segment_points: int = 10_000
    schottky_radius: float = 1.0
    depth: int = 8
    n: int = 4


def cantor(level: int) -> np.ndarray:
    pts = np.array([0.0])
    for k in range(1, level + 1):
        pts = np.concatenate([pts, pts + 2 / 3 ** k])
    return pts


def main(cfg: Config) -> None:
    est = box_counting_dimension(cantor(cfg.cantor_level).astype(complex))
    print(f"Cantor level {cfg.cantor_level}: d = {est.d:.4f} (exact {math.log(2) / math.log(3):.4f}), r2 = {est.fit_r2:.3f}")
    est = box_counting_dimension(np.linspace(0, 1, cfg.segment_points).astype(complex))
    print(f"segment, {cfg.segment_points} points: d = {est.d:.4f}, r2 = {est.fit_r2:.3f}")
    r = cfg.schottky_radius
    G = GroupSpec((("a", pair_circles(Circle(-2, r), Circle(2, r))),
                   ("b", pair_circles(Circle(-2j, r), Circle(2j, r)))), ("rank-2 Schottky",))
    t0 = time.perf_counter()
    s = limit_set_sample(G, cfg.depth)
    est = box_counting_dimension(s)
    sign = scalar_sign(est.d, cfg.n)
    print(f"Schottky r={r}, depth {cfg.depth}: {len(s)} points, d = {est.d:.4f}, r2 = {est.fit_r2:.3f}, "
          f"sign {sign.sign} (n/2 - 1 - d = {sign.quantity:.4f}) in {time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=Config.depth)
    ap.add_argument("--radius", type=float, default=Config.schottky_radius)
    a = ap.parse_args()
    main(Config(depth=a.depth, schottky_radius=a.radius))
