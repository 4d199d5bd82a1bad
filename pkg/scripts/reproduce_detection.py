"""Single-point ML decision at r = -0.8 on the 15-qubit database.

Prints matching-entry counts for each source symbol under the classical
brute-force counter and under simulated quantum counting, then the decision.
"""

import sys

from qpdf import CountingConfig, SystemModel, ml_decide
from qpdf.counting import counting_error_bound


def main(r=-0.8):
    model = SystemModel.build()
    print(f"N = {model.N}, sigma = {model.noise_sigma}, bin width = {model.bin_width}, r = {r}")
    for backend in ("classical", "subspace"):
        cfg = CountingConfig(model.database_qubits, backend=backend)
        d = ml_decide(model, r, cfg)
        print(f"\n[{backend}] t = {cfg.t}")
        for p in d.per_symbol:
            M = model.classical_count(r, p.s)
            bound = counting_error_bound(M, model.N, cfg.t)
            print(f"  s = {p.s:+.0f}: count {p.count:9.3f}  (true {M}, bound {bound:.3f})  mass {p.mass:.5f}")
        print(f"  chosen s = {d.chosen:+.0f}, margin {d.margin:.2f}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else -0.8)
