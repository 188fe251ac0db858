"""Subject/object coupling: level-2 vs level-3 held-out likelihood and chi-square.

Samples a corpus from the coupled level-3 fixture, fits level-2 and level-3
models on a training split and compares held-out log-likelihood; then runs
the dependency test on the coupled corpus and on many corpora drawn from the
independent level-2 fixture to estimate the false-positive rate.

    python3 scripts/discriminability.py --null-seeds 1000
"""
import argparse
import math
from dataclasses import dataclass

from slg import fixtures
from slg.estimation import estimate, sample_corpus
from slg.models import score_derivation
from slg.stats import Selector, chi_square, dependency_table


@dataclass
class Config:
    n: int = 400
    seed: int = 7
    held_out: float = 0.2
    strength: float = 0.8
    null_n: int = 200
    null_seeds: int = 100
    null_start: int = 0
    alpha: float = 0.05


def run(cfg: Config) -> dict:
    g = fixtures.coupling_grammar()
    subj, obj = Selector.parse("tree:tv@1"), Selector.parse("tree:tv@2.2")
    corpus = sample_corpus(fixtures.coupled_params(cfg.strength), g, cfg.n, cfg.seed)
    split = int(round(cfg.n * (1 - cfg.held_out)))
    train, held = corpus[:split], corpus[split:]
    ll = {level: math.fsum(score_derivation(estimate(g, train, level), g, d) for d in held)
          for level in (2, 3)}
    table = dependency_table(g, corpus, subj, obj)
    indep = fixtures.independent_params()
    pvals = [chi_square(dependency_table(g, sample_corpus(indep, g, cfg.null_n, s), subj, obj)).p_value
             for s in range(cfg.null_start, cfg.null_start + cfg.null_seeds)]
    return {"loglik": ll, "table": table, "chi": chi_square(table),
            "null_rate": sum(p < cfg.alpha for p in pvals) / len(pvals)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--strength", type=float, default=Config.strength)
    ap.add_argument("--null-seeds", type=int, default=Config.null_seeds)
    ap.add_argument("--null-start", type=int, default=Config.null_start)
    args = ap.parse_args()
    cfg = Config(n=args.n, seed=args.seed, strength=args.strength,
                 null_seeds=args.null_seeds, null_start=args.null_start)
    r = run(cfg)
    print("held-out log-likelihood  level 2: %.3f  level 3: %.3f" % (r["loglik"][2], r["loglik"][3]))
    print(r["table"].render())
    print("chi2 = %.4g, df = %d, p = %.3g" % r["chi"])
    print("independent corpora with p < %.2f: %.3f (%d seeds from %d)"
          % (cfg.alpha, r["null_rate"], cfg.null_seeds, cfg.null_start))


if __name__ == "__main__":
    main()
