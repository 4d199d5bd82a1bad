"""Virtual database for the AWGN system model.

An entry is ``g(s, x) = quantize(s + noise_table[x])`` where the noise table
is the deterministic inverse-CDF stratification of N(0, sigma^2):

    noise_table[x] = sigma * Phi^-1((x + 0.5) / N),   x = 0 .. N-1

Entries are produced on demand from the index; the full table is never a
prerequisite for evaluating ``g`` or a match predicate.

Bins are identified by integer index ``k = round((v - range_min) / bin_width)``
(round-half-up), with center ``range_min + k * bin_width``. Matching compares
bin indices, never floating-point centers. Bins are not clipped to
``[range_min, range_max]``; the range only fixes the bin origin and the extent
of full-range grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np
from scipy.special import ndtr, ndtri


@dataclass(frozen=True)
class Quantizer:
    bin_width: float = 0.1
    range_min: float = -6.0
    range_max: float = 6.0

    def __post_init__(self):
        if not self.bin_width > 0:
            raise ValueError(f"bin_width must be positive, got {self.bin_width}")
        if not self.range_max > self.range_min:
            raise ValueError("range_max must exceed range_min")

    def bin_index(self, v):
        k = np.floor((np.asarray(v, dtype=float) - self.range_min) / self.bin_width + 0.5)
        k = k.astype(np.int64)
        return int(k) if k.ndim == 0 else k

    def center(self, k):
        c = self.range_min + np.asarray(k, dtype=float) * self.bin_width
        # cosmetic: -2.5999999999999996 -> -2.6; identity is the integer index
        c = np.round(c, 12)
        return float(c) if c.ndim == 0 else c

    def quantize(self, v):
        return self.center(self.bin_index(v))

    @property
    def num_bins(self) -> int:
        return self.bin_index(self.range_max) + 1

    def centers(self) -> np.ndarray:
        """Every bin center in [range_min, range_max]."""
        return self.center(np.arange(self.num_bins))

    def centers_between(self, lo: float, hi: float) -> np.ndarray:
        k_lo = max(self.bin_index(lo), 0)
        k_hi = min(self.bin_index(hi), self.num_bins - 1)
        return self.center(np.arange(k_lo, k_hi + 1))

    def on_center(self, v: float, tol: float = 1e-9) -> bool:
        return abs(v - self.quantize(v)) <= tol * self.bin_width


def normal_quantile(p):
    """Standard normal inverse CDF (Cephes ndtri, accurate to ~1e-15)."""
    return ndtri(p)


@dataclass(frozen=True)
class SystemModel:
    """Bernoulli/antipodal source over an AWGN channel, as a virtual database."""

    database_qubits: int = 15
    source_alphabet: Tuple[float, ...] = (-1.0, 1.0)
    noise_sigma: float = 0.9
    quantizer: Quantizer = field(default_factory=Quantizer)

    def __post_init__(self):
        object.__setattr__(self, "source_alphabet", tuple(float(s) for s in self.source_alphabet))
        if self.database_qubits < 1:
            raise ValueError("database_qubits must be >= 1")
        if not self.noise_sigma > 0:
            raise ValueError(f"noise_sigma must be positive, got {self.noise_sigma}")
        if not self.source_alphabet:
            raise ValueError("source alphabet is empty")

    @classmethod
    def build(cls, n: int = 15, sigma: float = 0.9, bin_width: float = 0.1,
              range_min: float = -6.0, range_max: float = 6.0,
              alphabet: Sequence[float] = (-1.0, 1.0)) -> "SystemModel":
        return cls(n, tuple(alphabet), sigma, Quantizer(bin_width, range_min, range_max))

    @property
    def N(self) -> int:
        return 2**self.database_qubits

    @property
    def bin_width(self) -> float:
        return self.quantizer.bin_width

    def noise(self, x):
        """Noise value(s) for index(es) ``x``, computed without the table."""
        x = np.asarray(x, dtype=np.int64)
        if np.any((x < 0) | (x >= self.N)):
            raise ValueError(f"index out of range 0..{self.N - 1}")
        out = self.noise_sigma * normal_quantile((x + 0.5) / self.N)
        return float(out) if out.ndim == 0 else out

    @cached_property
    def noise_table(self) -> np.ndarray:
        table = self.noise(np.arange(self.N))
        table.flags.writeable = False
        return table

    def check_symbol(self, s: float) -> float:
        s = float(s)
        if s not in self.source_alphabet:
            raise ValueError(f"symbol {s} not in source alphabet {self.source_alphabet}")
        return s

    def g(self, s: float, x):
        """Database entry for symbol ``s`` at index ``x`` (a bin center)."""
        s = self.check_symbol(s)
        return self.quantizer.quantize(s + self.noise(x))

    def entry_bins(self, s: float, x) -> np.ndarray:
        return self.quantizer.bin_index(self.check_symbol(s) + self.noise(x))

    def match_predicate(self, r: float, s: float):
        """Vectorised predicate: index x matches iff g(s, x) falls in r's bin."""
        s = self.check_symbol(s)
        target = self.quantizer.bin_index(r)
        quantizer = self.quantizer

        def predicate(x):
            return quantizer.bin_index(s + self.noise(x)) == target

        return predicate

    def classical_count(self, r: float, s: float) -> int:
        """Brute-force popcount of the match predicate, O(N)."""
        s = self.check_symbol(s)
        bins = self.quantizer.bin_index(s + self.noise_table)
        return int(np.count_nonzero(bins == self.quantizer.bin_index(r)))

    def bin_counts(self, s: float) -> Tuple[np.ndarray, np.ndarray]:
        """(bin indices, counts) for every occupied bin of symbol ``s``."""
        bins = self.quantizer.bin_index(self.check_symbol(s) + self.noise_table)
        k, counts = np.unique(bins, return_counts=True)
        return k, counts

    def default_grid(self, s: float, width: float = 4.0) -> np.ndarray:
        """Bin centers within +-width*sigma of ``s``."""
        s = self.check_symbol(s)
        return self.quantizer.centers_between(s - width * self.noise_sigma,
                                              s + width * self.noise_sigma)

    def analytic_bin_mass(self, s: float, grid) -> np.ndarray:
        """Exact Gaussian probability of each bin in ``grid`` for symbol ``s``."""
        c = np.asarray(grid, dtype=float)
        half = self.bin_width / 2
        z_hi = (c + half - s) / self.noise_sigma
        z_lo = (c - half - s) / self.noise_sigma
        return ndtr(z_hi) - ndtr(z_lo)

    def params(self) -> dict:
        q = self.quantizer
        return {
            "n": self.database_qubits,
            "sigma": self.noise_sigma,
            "bin_width": q.bin_width,
            "range_min": q.range_min,
            "range_max": q.range_max,
            "alphabet": list(self.source_alphabet),
        }


def information_size(model: SystemModel) -> int:
    """Number of g evaluations covering every (symbol, index) pair."""
    return len(model.source_alphabet) * model.N


def expected_bin_count(model: SystemModel, r: float, s: float) -> float:
    """N times the Gaussian mass of r's bin; the calibration target for counts."""
    c = model.quantizer.quantize(r)
    return model.N * float(model.analytic_bin_mass(s, [c])[0])

