"""Search for a nontrivial finite B^4 of odd order within configurable bounds.

    python3 scripts/run_odd_order_campaign.py --max-rank 2 --max-mid 8 --max-pi 64 --out odd.jsonl
"""

import argparse
import sys
import time

from gammaseq.search import CampaignSpec, describe, run_odd_order_campaign


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-rank", type=int, default=2, help="H_bot = (Z_2)^r for r up to this")
    ap.add_argument("--max-mid", type=int, default=8)
    ap.add_argument("--max-pi", type=int, default=64)
    ap.add_argument("--all-groups", action="store_true", help="allow H_mid that are not 2-groups")
    ap.add_argument("--out")
    ap.add_argument("--resume", action="store_true")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    spec = CampaignSpec.elementary(
        2, args.max_rank, tops=("0", "free^1"), max_mid=args.max_mid, max_pi=args.max_pi,
        two_groups=not args.all_groups,
    )
    print(describe(spec))
    t0 = time.perf_counter()
    rep = run_odd_order_campaign(spec, out=args.out, resume=args.resume, workers=args.workers)
    s = rep.summary
    print(f"{s['sequences']} classes from {s['candidates_examined']} candidates in {time.perf_counter() - t0:.1f}s")
    print(f"skipped {s['skipped']}, infinite {s['infinite']}")
    print("B orders:", s["b_orders"])
    print("odd-order hits:", s["odd_order_hits"] or "none")
    print("violations:", s["violations"])
    # a hit passing every necessary condition is a counterexample candidate
    return 2 if s["violations"] or s["odd_order_hits"] else 0


if __name__ == "__main__":
    sys.exit(main())
