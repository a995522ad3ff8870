"""Compare the fracture-square pullback with the closed-form geometric presentation for several m."""

import argparse

from qhodge import kufix


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6, 8, 9, 10, 12])
    ap.add_argument("--max-deg", type=int, default=6)
    ap.add_argument("--pprec", type=int, default=5)
    ap.add_argument("--denominator-exponent", type=int, default=6)
    a = ap.parse_args()
    print(f"{'m':>3}  {'inverted':<10}  {'ranks':<6}  {'lattices':<8}  {'surjective':<10}  stable")
    for m in a.m:
        rep = kufix.fracture_assemble(m, a.max_deg, a.pprec, a.denominator_exponent)
        degs = rep["degrees"]
        print(f"{m:>3}  {str(rep['inverted_primes']):<10}  {str(all(d['rank_match'] for d in degs)):<6}  "
              f"{str(all(d['lattice_match'] for d in degs)):<8}  "
              f"{str(all(d['jointly_surjective'] for d in degs)):<10}  "
              f"{all(d['status'] == 'ok' for d in degs)}")


if __name__ == "__main__":
    main()
