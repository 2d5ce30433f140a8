"""Print class counts per rank, plus the number of admissible (m, sigma) pairs before the quotient.

    python3 scripts/count_classes.py --max-n 7
"""

import argparse
import itertools
import time

from reflectk import families as F


def brute_tri_pairs(N):
    """Admissible (m, sigma) pairs over all involutions, before the related-pair quotient."""
    out = set()
    for sg in itertools.permutations(range(1, N + 1)):
        if any(sg[sg[i] - 1] != i + 1 for i in range(N)):
            continue
        for m in range((N + 1) // 2, N + 1):
            if F.tri_sigma_violation(N, m, sg) is None:
                out.add((m, sg))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=7)
    args = ap.parse_args()
    print(f"{'N':>3} {'sym':>5} {'tri':>6} {'twisted':>8} {'(m,sigma)':>10} {'secs':>6}")
    for N in range(2, args.max_n + 1):
        t0 = time.perf_counter()
        classes = F.enumerate_all(N)
        pairs = brute_tri_pairs(N) if N <= 8 else None
        dt = time.perf_counter() - t0
        print(f"{N:>3} {len(classes['sym']):>5} {len(classes['tri']):>6} {len(classes['twisted']):>8} "
              f"{len(pairs) if pairs is not None else '-':>10} {dt:>6.2f}")


if __name__ == "__main__":
    main()
