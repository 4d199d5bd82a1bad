"""Per-symbol matching counts over a sweep of received values (CSV).

The two columns trace the conditional pdfs of r given s = -1 and s = +1 as
seen by the detector; pipe into any plotting tool.
"""

import sys

from qpdf import CountingConfig, SystemModel
from qpdf.detector import detect_sweep


def main(backend="subspace"):
    model = SystemModel.build()
    grid = model.quantizer.centers_between(-4.6, 4.6)
    cfg = CountingConfig(model.database_qubits, backend=backend)
    print("r,count_minus1,count_plus1,chosen")
    for r, d in zip(grid, detect_sweep(model, grid, cfg)):
        if d is None:
            print(f"{r:g},0,0,")
            continue
        c = [p.count for p in d.per_symbol]
        print(f"{r:g},{c[0]:.3f},{c[1]:.3f},{d.chosen:g}")


if __name__ == "__main__":
    main(*sys.argv[1:])
