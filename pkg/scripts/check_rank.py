"""Verify every canonical class at the given ranks and report timings.

    python3 scripts/check_rank.py 3 4 5 --mode symbolic
"""

import argparse
import time

from reflectk import families as F
from reflectk.verify import check, check_YBE


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("ranks", type=int, nargs="+")
    ap.add_argument("--mode", choices=("symbolic", "sampled"), default="symbolic")
    ap.add_argument("--samples", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    bad = 0
    for N in args.ranks:
        t0 = time.perf_counter()
        ok = check_YBE(N, args.mode, args.samples, args.seed).passed
        print(f"N={N} ybe {'ok' if ok else 'FAIL'} {time.perf_counter() - t0:.2f}s")
        bad += not ok
        for fam, labels in F.enumerate_all(N).items():
            eq = "ctre" if fam == "twisted" else "re"
            t0 = time.perf_counter()
            fails = [lab for lab in labels if not check(F.build(lab), eq, args.mode, args.samples, args.seed).passed]
            dt = time.perf_counter() - t0
            print(f"N={N} {fam:8s} {len(labels) - len(fails)}/{len(labels)} pass {dt:.2f}s")
            for lab in fails:
                print("   failed:", lab.to_json())
            bad += len(fails)
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
