"""Displayed against observed eigenvalues for every eigenform family.

    python scripts/eigen_table.py --bound 3
"""

import argparse

from qdeform.laplace import Family, MetricParams, eigen_instances, eigenform, observed_eigenvalue, verify_eigen
from qdeform.qcoeff import render_scalar


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bound", type=int, default=2)
    args = ap.parse_args()
    H = MetricParams.hodge_values()
    s = H.spectral_factor
    print(f"{'family':12s} {'n':>2s} {'p':>2s}  ok     displayed / s  |  observed / s")
    for fam in Family:
        for n, p in eigen_instances(fam, args.bound):
            ef = eigenform(fam, n, p, H)
            ok, _ = verify_eigen(ef, H)
            obs = observed_eigenvalue(ef.form, H)
            shown = render_scalar(ef.eigenvalue / s)
            seen = "not an eigenform" if obs is None else render_scalar(obs / s)
            print(f"{fam.value:12s} {n:2d} {p:2d}  {'yes' if ok else 'NO ':5s}  {shown}  |  {seen}")


if __name__ == "__main__":
    main()
