"""Probability mass captured by bounded enumeration on G0, as the bound grows.

    python3 scripts/normalization.py --max-uses 10
"""
import argparse
import time
from dataclasses import dataclass

from slg import fixtures
from slg.search import SearchBounds, enumerate_derivations, total_mass


@dataclass
class Config:
    max_uses: int = 10
    max_adj: int = None


def run(cfg: Config):
    g, p = fixtures.g0(), fixtures.g0_params()
    rows = []
    for n in range(1, cfg.max_uses + 1):
        t0 = time.perf_counter()
        b = SearchBounds(n, cfg.max_adj)
        count = sum(1 for _ in enumerate_derivations(g, b))
        rows.append((n, count, total_mass(p, g, b), time.perf_counter() - t0))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-uses", type=int, default=Config.max_uses)
    ap.add_argument("--max-adj", type=int)
    args = ap.parse_args()
    cfg = Config(args.max_uses, args.max_adj)
    print("%-9s %12s %14s %9s" % ("max_uses", "derivations", "mass", "seconds"))
    for n, count, mass, secs in run(cfg):
        print("%-9d %12d %14.9f %9.3f" % (n, count, mass, secs))


if __name__ == "__main__":
    main()
