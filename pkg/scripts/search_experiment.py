#!/usr/bin/env python3
"""Cold-start searches for better test functions at a given penalty.

Runs the knot-vector search for the upper family and the coefficient search
for the lower family, writes JSON-lines transcripts, and certifies the
incumbents at full precision.

Usage:
    python scripts/search_experiment.py --A 1 [--seed 0] [--budget 30000] [--N 8]
"""

import argparse
import time

import mpmath as mp

from fel.precision import PrecisionContext
from fel.search import SearchConfig, optimize_lower, optimize_upper


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--A", default="1")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=30_000)
    ap.add_argument("--N", type=int, default=8)
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--digits", type=int, default=40)
    args = ap.parse_args()

    ctx = PrecisionContext.make(args.digits)
    cfg = SearchConfig(seed=args.seed, n_max=args.N, restarts=args.restarts, budget=args.budget)

    t0 = time.time()
    up, ub = optimize_upper(args.A, cfg, ctx, transcript_path="search_upper.jsonl")
    print(f"upper search ({time.time()-t0:.0f}s): certified {mp.nstr(ub.value, 12)} "
          f"with {len(up.knots)} knots")
    print("  knots:", ", ".join(str(k) for k in up.knots))

    t0 = time.time()
    lp, lb = optimize_lower(args.A, args.N, cfg, ctx, transcript_path="search_lower.jsonl")
    print(f"lower search ({time.time()-t0:.0f}s): certified {mp.nstr(lb.value, 12)}")
    print("  params:", lp.dumps())


if __name__ == "__main__":
    main()
