"""Success rate of the full pipeline on random 1-factorizations, one CSV row per n.

    python scripts/success_rates.py --sizes 8 10 12 14 --count 50 --seed 0 --out rates.csv

n <= 8 draws exactly uniform samples; larger n uses the switching walk.
Odd n runs the all-colour cycle search on optimal colourings.
"""
import argparse
import csv
import random
import sys
import time
from collections import Counter

from rainbowfact import factorgen
from rainbowfact.pipeline import PipelineOptions, full_pipeline
from rainbowfact.switching import jm_square_walk


def sample(n: int, rng: random.Random, steps: int):
    if n % 2:
        even = jm_square_walk(factorgen.odd_to_even(factorgen.canonical_odd_colouring(n)), steps, rng).graph
        return factorgen.even_to_odd(even)
    if n <= factorgen.MAX_ENUM_N:
        return factorgen.uniform_sample_small(n, rng)
    g = factorgen.random_relabelled(factorgen.canonical_one_factorization(n), rng)
    return jm_square_walk(g, steps, rng).graph


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 10, 12])
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--steps", type=int, default=500)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--exact-max-n", type=int, default=16)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    opts = PipelineOptions(exact_max_n=args.exact_max_n)
    rows = []
    for n in args.sizes:
        rng = random.Random(args.seed * 1_000_003 + n)
        methods, ok, t0 = Counter(), 0, time.perf_counter()
        for i in range(args.count):
            rep = full_pipeline(sample(n, rng, args.steps), seed=args.seed + i, opts=opts)
            ok += rep.success
            methods[rep.method or "none"] += 1
        rows.append({"n": n, "count": args.count, "success": ok, "rate": f"{ok / args.count:.3f}",
                     "absorber": methods["absorber"], "exact": methods["exact"],
                     "heuristic": methods["heuristic"], "none": methods["none"],
                     "seconds": f"{time.perf_counter() - t0:.1f}"})
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(out, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
