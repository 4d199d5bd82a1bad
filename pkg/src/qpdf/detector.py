"""Maximum-likelihood symbol decision from estimated bin masses."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .counting import CountingConfig
from .estimator import PointEstimate, count_point, default_config
from .vdb import SystemModel


class OutsideSupportError(ValueError):
    pass


@dataclass(frozen=True)
class Decision:
    received: float
    per_symbol: Tuple[PointEstimate, ...]
    chosen: float
    margin: float
    tie: bool = False

    @property
    def one_sided(self) -> bool:
        """Only one symbol had non-zero mass; margin is reported as inf."""
        return math.isinf(self.margin)

    def masses(self) -> List[float]:
        return [p.mass for p in self.per_symbol]

    def as_dict(self) -> dict:
        return {
            "r": self.received,
            "chosen": self.chosen,
            "margin": None if self.one_sided else self.margin,
            "one_sided": self.one_sided,
            "tie": self.tie,
            "per_symbol": [
                {"s": p.s, "count_estimate": p.count, "mass": p.mass, "count_bound": p.bound}
                for p in self.per_symbol
            ],
        }


def decide(received: float, estimates: Sequence[PointEstimate]) -> Decision:
    """Comparator: pick the largest mass; ties go to the smallest symbol."""
    ranked = sorted(estimates, key=lambda e: (-e.mass, e.s))
    best = ranked[0]
    if best.mass <= 0:
        raise OutsideSupportError(f"all masses are zero at r={received}")
    tie = len(ranked) > 1 and ranked[1].mass == best.mass
    runner_up = ranked[1].mass if len(ranked) > 1 else 0.0
    margin = math.inf if runner_up <= 0 else best.mass / runner_up
    return Decision(float(received), tuple(estimates), best.s, margin, tie)


def ml_decide(model: SystemModel, r: float, config: Optional[CountingConfig] = None) -> Decision:
    if config is None:
        config = default_config(model)
    estimates = [count_point(model, r, s, config) for s in model.source_alphabet]
    try:
        return decide(r, estimates)
    except OutsideSupportError:
        q = model.quantizer
        raise OutsideSupportError(
            f"r={r} outside modeled support: bin {q.bin_index(r)} "
            f"(center {q.quantize(r):g}) has zero mass for every symbol"
        ) from None


def detect_sweep(model: SystemModel, grid: Sequence[float],
                 config: Optional[CountingConfig] = None) -> List[Optional[Decision]]:
    """Decisions over a grid of received values; None where nothing matches."""
    out = []
    for r in grid:
        try:
            out.append(ml_decide(model, r, config))
        except OutsideSupportError:
            out.append(None)
    return out
