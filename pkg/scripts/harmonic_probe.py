"""Dimension of ker(Laplacian) on monomial forms, for growing exponent bounds.

With --degenerate the metric sits on beta = -alpha q^-2, where the spectral
factor vanishes and every form becomes harmonic.

    python scripts/harmonic_probe.py --max-bound 4
"""

import argparse
import time

from qdeform.laplace import MetricParams, harmonic_kernel
from qdeform.qcoeff import qpow, sym
from qdeform.qforms import monomial_forms


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-bound", type=int, default=4)
    ap.add_argument("--degenerate", action="store_true")
    args = ap.parse_args()
    alpha = sym("alpha")
    P = MetricParams.hodge_values(alpha, -alpha * qpow(-2)) if args.degenerate else MetricParams.hodge_values()
    for bound in range(1, args.max_bound + 1):
        for deg in (0, 1, 2):
            t0 = time.perf_counter()
            ker = harmonic_kernel(deg, bound, P)
            size = len(monomial_forms(deg, bound))
            shown = ", ".join(str(k) for k in ker[:3]) + (" ..." if len(ker) > 3 else "")
            print(f"bound {bound} degree {deg}: {len(ker):3d} / {size:3d}  [{time.perf_counter() - t0:.2f}s]  {shown}")


if __name__ == "__main__":
    main()
