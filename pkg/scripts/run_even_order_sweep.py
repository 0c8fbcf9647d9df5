"""Check every finite B^{n+2}, n >= 3, is trivial or has an element of even order.

Also compares the case-analysis witness against the brute-force group on each sequence.

    python3 scripts/run_even_order_sweep.py --n 3 --max-rank 2 --max-mid 4 --max-pi 64
"""

import argparse
import sys
import time

from gammaseq.search import CampaignSpec, describe, run_even_order_sweep


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--max-rank", type=int, default=2)
    ap.add_argument("--max-mid", type=int, default=4)
    ap.add_argument("--max-pi", type=int, default=64)
    ap.add_argument("--with-top", action="store_true", help="also allow H_top = Z")
    ap.add_argument("--out")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    tops = ("0", "free^1") if args.with_top else ("0",)
    spec = CampaignSpec.elementary(args.n, args.max_rank, tops=tops, max_mid=args.max_mid, max_pi=args.max_pi)
    print(describe(spec))
    t0 = time.perf_counter()
    rep = run_even_order_sweep(spec, out=args.out, workers=args.workers)
    s = rep.summary
    steps: dict[str, int] = {}
    for r in rep.records:
        w = r.get("witness")
        if w:
            steps[w["step"]] = steps.get(w["step"], 0) + 1
    print(f"{s['sequences']} classes from {s['candidates_examined']} candidates in {time.perf_counter() - t0:.1f}s")
    print("B orders:", s["b_orders"])
    print("witness steps:", dict(sorted(steps.items())))
    print("violations:", s["violations"])
    return 2 if s["violations"] else 0


if __name__ == "__main__":
    sys.exit(main())
