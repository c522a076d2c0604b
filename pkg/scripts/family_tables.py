"""Print the invariant tables of every manifold family and their monotonicity verdicts."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from panelweb.families import family_table


@dataclass(frozen=True)
class Config:
    max_g: int = 10
    max_n: int = 10


def ranges_for(name: str, cfg: Config):
    g, n = range(1, cfg.max_g + 1), range(1, cfg.max_n + 1)
    return {"m1g": {"g": g}, "m1gn": {"g": g, "n": n}, "m3gn": {"g": g, "n": n}, "m4n": {"n": n}}[name]


def main(cfg: Config) -> None:
    for name in ("m1g", "m1gn", "m3gn", "m4n"):
        rows, verdicts = family_table(name, ranges_for(name, cfg))
        print(f"== {name} ({len(rows)} rows)")
        print(f"{'params':<12}{'b1':>5}{'b2':>5}{'chi':>6}  obstructed")
        for r in rows:
            params = ",".join(f"{k}={v}" for k, v in r.params)
            print(f"{params:<12}{r.b1:>5}{r.b2:>5}{r.chi:>6}  {r.einstein_obstructed}")
        for v in verdicts:
            print(f"# along {v.parameter}: chi decreasing {v.chi_strictly_decreasing}, "
                  f"b1 increasing {v.b1_strictly_increasing}, obstructed when chi<0 {v.obstructed_when_chi_negative}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-g", type=int, default=Config.max_g)
    ap.add_argument("--max-n", type=int, default=Config.max_n)
    a = ap.parse_args()
    main(Config(a.max_g, a.max_n))
