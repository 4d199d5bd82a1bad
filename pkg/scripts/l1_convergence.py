"""L1 distance of the count-ratio pdf to exact Gaussian bin masses versus n."""

import argparse

from qpdf import CountingConfig, SystemModel, estimate_pdf, l1_distance
from qpdf.estimator import gaussian_reference


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sigma", type=float, default=0.9)
    ap.add_argument("--bin-width", type=float, default=0.1)
    ap.add_argument("--n", type=int, nargs="+", default=[6, 8, 10, 12, 14, 16, 18])
    ap.add_argument("--backend", default="classical")
    args = ap.parse_args()

    print("n,N,bins,l1")
    for n in args.n:
        model = SystemModel.build(n=n, sigma=args.sigma, bin_width=args.bin_width, alphabet=[0.0])
        grid = model.quantizer.centers_between(-4.0, 4.0)
        pdf = estimate_pdf(model, 0.0, grid, CountingConfig(n, backend=args.backend))
        print(f"{n},{model.N},{len(grid)},{l1_distance(pdf, gaussian_reference(model, 0.0, grid)):.6g}")


if __name__ == "__main__":
    main()
