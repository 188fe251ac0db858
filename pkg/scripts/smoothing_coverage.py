"""Held-out log-likelihood of unsmoothed vs smoothed models on G0, by training size.

    python3 scripts/smoothing_coverage.py --sizes 10 40 160
"""
import argparse
import math
from dataclasses import dataclass, field

from slg import fixtures
from slg.estimation import estimate, sample_corpus
from slg.models import MissingContextError, score_derivation
from slg.smoothing import BackoffConfig, build_smoothed


@dataclass
class Config:
    sizes: list = field(default_factory=lambda: [10, 40, 160])
    test_size: int = 200
    seed: int = 3
    backoff: BackoffConfig = field(default_factory=BackoffConfig)


def _score(p, g, d):
    try:
        return score_derivation(p, g, d)
    except MissingContextError:
        return -math.inf


def run(cfg: Config):
    g, truth = fixtures.g0(), fixtures.g0_level2_params()
    test = sample_corpus(truth, g, cfg.test_size, cfg.seed + 1)
    rows = []
    for n in cfg.sizes:
        train = sample_corpus(truth, g, n, cfg.seed)
        for level in (1, 2, 3):
            raw = estimate(g, train, level)
            smooth = build_smoothed(raw, train, g, cfg.backoff)
            raw_scores = [_score(raw, g, d) for d in test]
            covered = [s for s in raw_scores if s > -math.inf]
            rows.append((n, level, len(covered) / len(test),
                         math.fsum(score_derivation(smooth, g, d) for d in test) / len(test)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 40, 160])
    ap.add_argument("--config", help="backoff config file (key = value)")
    args = ap.parse_args()
    backoff = BackoffConfig.parse(open(args.config).read()) if args.config else BackoffConfig()
    print("%6s %6s %18s %22s" % ("train", "level", "unsmoothed cover", "smoothed mean loglik"))
    for n, level, cover, ll in run(Config(sizes=args.sizes, backoff=backoff)):
        print("%6d %6d %18.3f %22.4f" % (n, level, cover, ll))


if __name__ == "__main__":
    main()
