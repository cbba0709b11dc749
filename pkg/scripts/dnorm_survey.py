"""Survey the decomposition norm over a random corpus.

Runs the closed-form stage iteration and the LP oracle side by side on
every generated function, insists on exact agreement, and prints a small
distribution table: how many functions land on each index, how the norms
spread, and how long each route took.

    python3 scripts/dnorm_survey.py --seed 7041982 --functions 200
"""

import argparse
import sys
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

try:
    import oscal
except ImportError:
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from oscal.oracle import oracle_dnorm
from oscal.sampling import DEFAULT_SEED, build_corpus
from oscal.transfinite import d_index, d_norm


@dataclass(frozen=True)
class SurveyConfig:
    seed: int = DEFAULT_SEED
    functions: int = 200
    show_worst: int = 5


def parse_args(argv=None) -> SurveyConfig:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--functions", type=int, default=200)
    ap.add_argument("--show-worst", type=int, default=5)
    ns = ap.parse_args(argv)
    return SurveyConfig(ns.seed, ns.functions, ns.show_worst)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    corpus = build_corpus(cfg.seed, n_functions=cfg.functions)
    fns = [f for f in corpus.functions if not f.is_complex()]
    print(
        "corpus: %d functions on %d spaces (seed %d)"
        % (len(fns), len(corpus.spaces), cfg.seed)
    )

    indices = Counter()
    norms = []
    slowest = []

    t0 = time.monotonic()
    for f in fns:
        indices[d_index(f)] += 1
    formula_time = time.monotonic() - t0

    t0 = time.monotonic()
    for f in fns:
        val = d_norm(f)
        check = oracle_dnorm(f).optimum
        if val != check:
            print("DISAGREEMENT on a %d-node space: %s vs %s"
                  % (len(f.space.nodes), val, check))
            return 1
        norms.append(val)
        slowest.append((len(f.space.nodes), val))
    both_time = time.monotonic() - t0

    print("\nindex histogram:")
    for idx in sorted(indices):
        print("  i_D = %s: %4d functions" % (idx, indices[idx]))

    norms.sort()
    print("\nnorm spread (all exact rationals):")
    print("  min    %s" % norms[0])
    print("  median %s" % norms[len(norms) // 2])
    print("  max    %s" % norms[-1])
    mean = sum(norms, Fraction(0)) / len(norms)
    print("  mean   %s (~%.3f)" % (mean, float(mean)))

    slowest.sort(reverse=True)
    print("\nlargest instances:")
    for size, val in slowest[: cfg.show_worst]:
        print("  %3d nodes, norm %s" % (size, val))

    print("\nstage iteration alone: %.2fs" % formula_time)
    print("iteration + oracle:    %.2fs" % both_time)
    print("formula == oracle on every instance")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
