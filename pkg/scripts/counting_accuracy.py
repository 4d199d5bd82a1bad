"""Exact counting accuracy versus counting-register size for one (N, M).

For each t: most-probable estimate, error bound, exact probability of landing
within the bound, and expected absolute error under the outcome distribution.
"""

import argparse

from qpdf.counting import counting_error_bound, subspace_count_distribution


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=2**15)
    ap.add_argument("--M", type=int, default=1416)
    ap.add_argument("--t-min", type=int, default=4)
    ap.add_argument("--t-max", type=int, default=20)
    args = ap.parse_args()

    print("t,M_hat,bound,coverage,expected_abs_error")
    for t in range(args.t_min, args.t_max + 1):
        out = subspace_count_distribution(args.N, args.M, t)
        print(f"{t},{out.point_estimate:.4f},{counting_error_bound(args.M, args.N, t):.4f},"
              f"{out.coverage(args.M):.4f},{out.expected_abs_error(args.M):.4f}")


if __name__ == "__main__":
    main()
