"""Count-ratio pdf estimator, whole-pdf sweeps, L1 distance and KL divergence.

The estimate at an observed value r for source symbol s is the fraction of
virtual-database entries landing in r's bin. That fraction is a bin *mass*;
``density = mass / bin_width`` approximates the conditional density.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .counting import Backend, CountingConfig, counting_error_bound, quantum_count
from .grover import Oracle
from .vdb import SystemModel

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PointEstimate:
    r: float
    s: float
    count: float
    N: int
    bound: float
    backend: Backend

    @property
    def mass(self) -> float:
        return self.count / self.N


@dataclass
class PdfEstimate:
    grid: np.ndarray
    mass: np.ndarray
    bin_width: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.mass = np.asarray(self.mass, dtype=float)
        if self.grid.shape != self.mass.shape:
            raise ValueError("grid and mass must be aligned")

    @property
    def density(self) -> np.ndarray:
        return self.mass / self.bin_width

    def __len__(self) -> int:
        return len(self.grid)


def default_config(model: SystemModel, **kwargs) -> CountingConfig:
    return CountingConfig(model.database_qubits, **kwargs)


def _check_config(model: SystemModel, config: CountingConfig) -> None:
    if config.database_qubits != model.database_qubits:
        raise ValueError(
            f"counting config addresses {config.database_qubits} database qubits, "
            f"model has {model.database_qubits}"
        )


def count_point(model: SystemModel, r: float, s: float, config: CountingConfig) -> PointEstimate:
    """Matching-entry count for (r, s) with its error bound."""
    _check_config(model, config)
    if config.backend is Backend.CLASSICAL:
        M = model.classical_count(r, s)
        return PointEstimate(float(r), float(s), float(M), model.N, 0.0, config.backend)
    oracle = Oracle(model.database_qubits, model.match_predicate(r, s))
    outcome = quantum_count(oracle, config)
    M_hat = outcome.point_estimate
    # M is unknown on the quantum path; the bound is evaluated at the estimate
    bound = counting_error_bound(min(max(M_hat, 0.0), model.N), model.N, config.t)
    return PointEstimate(float(r), float(s), M_hat, model.N, bound, config.backend)


def estimate_point(model: SystemModel, r: float, s: float, config: CountingConfig) -> float:
    return count_point(model, r, s, config).mass


def snap_to_grid(model: SystemModel, grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    snapped = model.quantizer.quantize(grid)
    snapped = np.atleast_1d(snapped)
    if not np.allclose(snapped, grid, rtol=0, atol=1e-9 * model.bin_width):
        log.warning("estimate_pdf: grid values off bin centers were quantized")
    return snapped


def estimate_pdf(model: SystemModel, s: float, grid: Optional[Sequence[float]] = None,
                 config: Optional[CountingConfig] = None) -> PdfEstimate:
    if config is None:
        config = default_config(model)
    _check_config(model, config)
    s = model.check_symbol(s)
    grid = model.default_grid(s) if grid is None else snap_to_grid(model, grid)
    if config.backend is Backend.CLASSICAL:
        # one sweep serves every grid point
        k, counts = model.bin_counts(s)
        lookup = dict(zip(k.tolist(), counts.tolist()))
        bins = model.quantizer.bin_index(grid)
        mass = np.array([lookup.get(int(b), 0) for b in np.atleast_1d(bins)], dtype=float) / model.N
    else:
        mass = np.array([estimate_point(model, r, s, config) for r in grid])
    meta = {
        "N": model.N,
        "t": config.t,
        "sigma": model.noise_sigma,
        "bin_width": model.bin_width,
        "s": s,
        "backend": str(config.backend),
    }
    return PdfEstimate(grid, mass, model.bin_width, meta)


def gaussian_reference(model: SystemModel, s: float, grid: Optional[Sequence[float]] = None) -> PdfEstimate:
    """Exact Gaussian bin masses on the same grid as ``estimate_pdf``."""
    grid = model.default_grid(s) if grid is None else np.asarray(grid, dtype=float)
    return PdfEstimate(grid, model.analytic_bin_mass(s, grid), model.bin_width,
                       {"reference": "gaussian", "sigma": model.noise_sigma, "s": float(s)})


def _same_grid(a: PdfEstimate, b: PdfEstimate) -> None:
    if a.grid.shape != b.grid.shape or not np.allclose(a.grid, b.grid, rtol=0, atol=1e-9):
        raise ValueError("pdf estimates are on different grids")
    if not math.isclose(a.bin_width, b.bin_width):
        raise ValueError("pdf estimates have different bin widths")


def l1_distance(a: PdfEstimate, b: PdfEstimate) -> float:
    """Riemann sum of |density_a - density_b| * bin_width."""
    _same_grid(a, b)
    return float(np.sum(np.abs(a.density - b.density)) * a.bin_width)


MassLike = Union[PdfEstimate, Sequence[float], np.ndarray]


def _masses(p: MassLike) -> np.ndarray:
    return p.mass if isinstance(p, PdfEstimate) else np.asarray(p, dtype=float)


def kl_divergence(p: MassLike, q: MassLike) -> float:
    """sum p log(p/q) in nats over bins with p > 0.

    Returns +inf (and logs a warning) when q vanishes somewhere p does not.
    """
    if isinstance(p, PdfEstimate) and isinstance(q, PdfEstimate):
        _same_grid(p, q)
    pm, qm = _masses(p), _masses(q)
    if pm.shape != qm.shape:
        raise ValueError("distributions have different lengths")
    support = pm > 0
    if np.any(qm[support] <= 0):
        log.warning("kl_divergence: q vanishes where p > 0; returning +inf")
        return math.inf
    ps, qs = pm[support], qm[support]
    return float(np.sum(ps * (np.log(ps) - np.log(qs))))
