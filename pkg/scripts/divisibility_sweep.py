"""Run the [p^a]_q divisibility check over a grid of primes, exponents and precisions."""

import argparse
import time

from qhodge import qpd
from qhodge.qring import parse_context


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", default="2:1,3:1,2:2,5:1", help="comma-separated p:alpha pairs")
    ap.add_argument("--deg", type=int, default=6)
    ap.add_argument("--qprec", type=int, default=6)
    ap.add_argument("--pprec", type=int, nargs="+", default=[3, 5])
    a = ap.parse_args()
    for case in a.cases.split(","):
        p, alpha = map(int, case.split(":"))
        for K in a.pprec:
            t = time.perf_counter()
            res = qpd.check_p_power_divisibility(p, alpha, parse_context(f"Zp({p},{K});(q-1)^{a.qprec}"),
                                                 max(a.deg, p ** alpha))
            n = len(res.witness or [])
            print(f"p={p} alpha={alpha} K={K}: {'pass' if res.ok else 'fail'} "
                  f"({n} witness terms, {time.perf_counter() - t:.2f}s)")


if __name__ == "__main__":
    main()
