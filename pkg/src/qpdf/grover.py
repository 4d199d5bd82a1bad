"""Grover search: oracle, iterate, iteration policy and success accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .statevector import (
    MAX_QUBITS,
    IndexPredicate,
    Marked,
    MeasurementDistribution,
    QuantumState,
    apply_register_op,
    grover_op,
    marked_mask,
    measure_distribution,
    new_uniform,
)


@dataclass(frozen=True)
class Oracle:
    """Marks database indices 0..2**database_qubits - 1.

    ``marked_count`` is for verification code only; nothing on the simulated
    quantum path reads it.
    """

    database_qubits: int
    marked: Marked
    marked_count: Optional[int] = None

    @property
    def size(self) -> int:
        return 2**self.database_qubits

    def mask(self) -> np.ndarray:
        return marked_mask(self.marked, self.database_qubits)

    def brute_force_count(self) -> int:
        return int(np.count_nonzero(self.mask()))

    def verify(self) -> None:
        if self.marked_count is not None and self.marked_count != self.brute_force_count():
            raise ValueError(
                f"marked_count={self.marked_count} disagrees with predicate popcount "
                f"{self.brute_force_count()}"
            )

    @classmethod
    def from_predicate(cls, database_qubits: int, predicate: IndexPredicate,
                       with_count: bool = False) -> "Oracle":
        oracle = cls(database_qubits, predicate)
        if with_count:
            oracle = cls(database_qubits, predicate, oracle.brute_force_count())
        return oracle


@dataclass(frozen=True)
class GroverTrace:
    iterations: int
    success_probability: float
    theta: float


def rotation_angle(N: int, M: int) -> float:
    """theta with sin^2(theta) = M/N."""
    if not 0 <= M <= N:
        raise ValueError(f"need 0 <= M <= N, got M={M}, N={N}")
    return math.asin(math.sqrt(M / N))


def success_probability(N: int, M: int, k: int) -> float:
    return math.sin((2 * k + 1) * rotation_angle(N, M)) ** 2


def trace(N: int, M: int, k: int) -> GroverTrace:
    return GroverTrace(k, success_probability(N, M, k), rotation_angle(N, M))


def grover_iterate(state: QuantumState, oracle: Oracle) -> QuantumState:
    """One Grover step: phase-flip marked entries, then invert about the mean."""
    if state.num_qubits != oracle.database_qubits:
        raise ValueError(
            f"state has {state.num_qubits} qubits but the oracle addresses "
            f"{oracle.database_qubits}"
        )
    return apply_register_op(state, grover_op(oracle.mask()))


def optimal_iterations(N: int, M: int) -> int:
    if M == 0:
        raise ValueError("no marked items: search undefined, use counting")
    if not 1 <= M <= N:
        raise ValueError(f"need 1 <= M <= N, got M={M}, N={N}")
    return max(0, math.floor(math.pi / 4 * math.sqrt(N / M)))


def search(oracle: Oracle, iterations: int, cap: int = MAX_QUBITS) -> MeasurementDistribution:
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    state = new_uniform(oracle.database_qubits, cap)
    op = grover_op(oracle.mask())
    for _ in range(iterations):
        state = apply_register_op(state, op)
    return measure_distribution(state)
