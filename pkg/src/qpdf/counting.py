"""Quantum counting: phase estimation of the Grover iterate.

Two exact backends produce the outcome distribution of the t-qubit counting
register:

``statevector``
    Simulates the whole (n + t)-qubit register: Hadamards, controlled powers
    of the Grover iterate, inverse QFT on the counting qubits.
``subspace``
    Uses the fact that the Grover iterate only rotates the uniform state
    inside span{unmarked uniform, marked uniform}. The simulation keeps the
    counting register tensored with that 2-dimensional space, so its cost is
    O(t * 2**t) independent of n. Building the rotation needs the true M,
    which this backend gets by one classical pass of the predicate over all
    N indices. That is a simulation shortcut and says nothing about speedup.

Counting register qubits sit above the database qubits, i.e. the full
register is ``database = (0, n)``, ``counting = (n, n + t)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grover import Oracle, rotation_angle
from .statevector import (
    MAX_QUBITS,
    MeasurementDistribution,
    QuantumState,
    apply_controlled_unitary,
    apply_qft_inverse,
    check_register_size,
    grover_op,
    measure_distribution,
    new_uniform,
)


class Backend(str, enum.Enum):
    STATEVECTOR = "statevector"
    SUBSPACE = "subspace"
    CLASSICAL = "classical"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CountingConfig:
    database_qubits: int
    counting_qubits: Optional[int] = None
    backend: Backend = Backend.SUBSPACE
    samples: Optional[int] = None
    seed: int = 0
    cap: int = MAX_QUBITS

    def __post_init__(self):
        object.__setattr__(self, "backend", Backend(self.backend))
        if self.counting_qubits is None:
            object.__setattr__(self, "counting_qubits", self.database_qubits + 4)
        if self.database_qubits < 1:
            raise ValueError("database_qubits must be >= 1")
        if self.counting_qubits < 1:
            raise ValueError("counting_qubits must be >= 1")
        if self.samples is not None and self.samples < 1:
            raise ValueError("samples must be >= 1 when given")

    @property
    def t(self) -> int:
        return self.counting_qubits

    @property
    def N(self) -> int:
        return 2**self.database_qubits

    def check_resources(self) -> None:
        if self.backend is Backend.STATEVECTOR:
            check_register_size(self.database_qubits + self.counting_qubits, self.cap)


def phase_to_count(m, t: int, N: int):
    """Count estimate N sin^2(pi m / 2^t) for counting outcome ``m``."""
    return N * np.sin(np.pi * np.asarray(m, dtype=float) / 2**t) ** 2


def counting_error_bound(M: float, N: int, t: int) -> float:
    """|M_hat - M| stays below this with probability at least 8/pi^2."""
    T = 2**t
    return 2 * math.pi * math.sqrt(M * (N - M)) / T + math.pi**2 * N / T**2


@dataclass(frozen=True)
class CountingOutcome:
    N: int
    t: int
    outcome_distribution: MeasurementDistribution
    most_probable_outcome: int
    point_estimate: float
    marked_count: Optional[int] = None
    sampled_outcomes: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def count_estimates(self) -> np.ndarray:
        return phase_to_count(np.arange(2**self.t), self.t, self.N)

    def count_estimate(self, m: int) -> float:
        return float(phase_to_count(m, self.t, self.N))

    def rounded_estimate(self) -> int:
        return int(round(self.point_estimate))

    def coverage(self, M: int) -> float:
        """Exact probability that M_hat lands within the error bound of M."""
        bound = counting_error_bound(M, self.N, self.t)
        hit = np.abs(self.count_estimates - M) <= bound
        return float(self.outcome_distribution.probabilities[hit].sum())

    def expected_abs_error(self, M: int) -> float:
        p = self.outcome_distribution.probabilities
        return float(np.dot(p, np.abs(self.count_estimates - M)))


def _subspace_probabilities(N: int, M: int, t: int) -> np.ndarray:
    theta = rotation_angle(N, M)
    T = 2**t
    m = np.arange(T, dtype=float)
    # G^m |u> = cos((2m+1)theta)|unmarked> + sin((2m+1)theta)|marked>
    angle = (2 * m + 1) * theta
    amps = np.stack([np.cos(angle), np.sin(angle)], axis=1).astype(np.complex128) / math.sqrt(T)
    amps = np.fft.fft(amps, axis=0, norm="ortho")
    return (np.abs(amps) ** 2).sum(axis=1)


def _statevector_probabilities(mask: np.ndarray, n: int, t: int, cap: int) -> np.ndarray:
    check_register_size(n + t, cap)
    state: QuantumState = new_uniform(n + t, cap)
    op = grover_op(mask)
    for j in range(t):
        state = apply_controlled_unitary(state, n + j, op, power=2**j, target=(0, n))
    state = apply_qft_inverse(state, (n, n + t))
    return measure_distribution(state, (n, n + t)).probabilities


def _outcome(N: int, t: int, probs: np.ndarray, samples: Optional[int], seed: int,
             marked_count: Optional[int] = None) -> CountingOutcome:
    dist = MeasurementDistribution(probs)
    sampled = None
    if samples:
        sampled = dist.sample(samples, seed)
        best = int(np.argmax(np.bincount(sampled, minlength=2**t)))
    else:
        best = dist.most_probable()
    return CountingOutcome(
        N=N,
        t=t,
        outcome_distribution=dist,
        most_probable_outcome=best,
        point_estimate=float(phase_to_count(best, t, N)),
        marked_count=marked_count,
        sampled_outcomes=sampled,
    )


def subspace_count_distribution(N: int, M: int, t: int, samples: Optional[int] = None,
                                seed: int = 0) -> CountingOutcome:
    if not 0 <= M <= N:
        raise ValueError(f"need 0 <= M <= N, got M={M}, N={N}")
    if t < 1:
        raise ValueError("t must be >= 1")
    return _outcome(N, t, _subspace_probabilities(N, M, t), samples, seed, marked_count=M)


def quantum_count(oracle: Oracle, config: CountingConfig) -> CountingOutcome:
    if oracle.database_qubits != config.database_qubits:
        raise ValueError("oracle and config disagree on the database size")
    config.check_resources()
    n, t, N = config.database_qubits, config.t, config.N
    mask = oracle.mask()
    if config.backend is Backend.SUBSPACE:
        # classical O(N) sweep of the predicate to get the rotation angle
        M = int(np.count_nonzero(mask))
        return subspace_count_distribution(N, M, t, config.samples, config.seed)
    if config.backend is Backend.STATEVECTOR:
        probs = _statevector_probabilities(mask, n, t, config.cap)
        return _outcome(N, t, probs, config.samples, config.seed)
    raise ValueError(f"backend {config.backend} does not run quantum counting")
