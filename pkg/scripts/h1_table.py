"""Tabulate H^1 of the q-de Rham complex of Z[x] per weight, before and after setting q = 1."""

import argparse

from qhodge import polyqdr
from qhodge.qring import parse_context


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qprec", type=int, default=6)
    ap.add_argument("--max-weight", type=int, default=12)
    a = ap.parse_args()
    cx = polyqdr.build_qdr(1, parse_context(f"Z;(q-1)^{a.qprec}"), a.max_weight, 1)
    H = polyqdr.cohomology(cx)
    Hred = polyqdr.cohomology(polyqdr.reduce_mod_q1(cx))
    print(f"{'weight':>6}  {'H^1 invariant factors':<40}  at q=1")
    for w in range(1, a.max_weight + 1):
        print(f"{w:>6}  {str(H[(1, w)]):<40}  {Hred[(1, w)]}")


if __name__ == "__main__":
    main()
