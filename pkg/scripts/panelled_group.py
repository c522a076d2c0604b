"""Build the panelled group, check lens sectors for precise invariance and report the witness
that appears once the sector is opened too wide."""
from __future__ import annotations

import argparse
import math
import time
from dataclasses import dataclass

from panelweb.kleinian import check_precisely_invariant, dumps, group_to_json
from panelweb.panelled import lens_sector, panelled_sigma12


@dataclass(frozen=True)
class Config:
    depth: int = 5
    angles: tuple = (math.pi / 6, math.pi / 4, math.pi / 3 - 0.02, math.pi / 2)
    dump: bool = False


def main(cfg: Config) -> None:
    t0 = time.perf_counter()
    G = panelled_sigma12(depth=cfg.depth)
    print(f"built {len(G)} generators {G.labels} in {time.perf_counter() - t0:.2f} s")
    for line in G.provenance:
        print("  provenance:", line)
    for phi in cfg.angles:
        w = check_precisely_invariant(lens_sector(phi), "a", G, depth=cfg.depth)
        if w is None:
            print(f"phi = {phi:.4f}: precisely invariant under <a> (depth {cfg.depth})")
        else:
            print(f"phi = {phi:.4f}: witness word={' '.join(l if e > 0 else l.upper() for l, e in w.word)} "
                  f"point={w.point:.6g} image={w.image:.6g} ({w.reason})")
    if cfg.dump:
        print(dumps(group_to_json(G)))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=Config.depth)
    ap.add_argument("--dump", action="store_true", help="print the group JSON")
    a = ap.parse_args()
    main(Config(depth=a.depth, dump=a.dump))
