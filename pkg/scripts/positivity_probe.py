"""Signs of <xi, xi> on monomial forms at a numeric q.

Nothing is asserted: positivity of the inner product is left open, and this
script only tabulates what the monomials do for one choice of constants.

    python scripts/positivity_probe.py --q 1/2 --K i --L i --bound 2
"""

import argparse
from collections import Counter
from fractions import Fraction

from qdeform.hodge import positivity_probe, solve_constants


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=Fraction, default=Fraction(1, 2))
    ap.add_argument("--K", default="i")
    ap.add_argument("--L", default="i")
    ap.add_argument("--bound", type=int, default=2)
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args()
    c = solve_constants(args.K, args.L)
    rows = positivity_probe(c, args.bound, args.q)
    tally = Counter()
    for k, form, re, im in rows:
        if re is None:
            sign = "singular"
        elif abs(im) > 1e-12:
            sign = "complex"
        else:
            sign = "positive" if re > 0 else "negative" if re < 0 else "zero"
        tally[(k, sign)] += 1
        if args.verbose:
            print(f"{k}  {form:40s} {sign:9s} {re!r} {im!r}")
    for (k, sign), count in sorted(tally.items()):
        print(f"degree {k}: {count:4d} {sign}")


if __name__ == "__main__":
    main()
