"""Dense statevector simulation core.

Basis-state integers use little-endian qubit order: qubit 0 is the
least-significant bit of the index. A qubit range ``(lo, hi)`` names the
contiguous sub-register of qubits ``lo, lo+1, ..., hi-1``; its value for the
basis state ``x`` is ``(x >> lo) & (2**(hi-lo) - 1)``.

Register operations (oracle, diffusion, QFT, Grover iterate) are written as
functions acting on an amplitude block of shape ``(outer, 2**w, inner)``
where axis 1 runs over the sub-register value. That makes every gate a
vectorised numpy expression and lets ``apply_controlled_unitary`` reuse them
on the control-1 half of the register.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

MAX_QUBITS = 26

QubitRange = Tuple[int, int]
RegisterOp = Callable[[np.ndarray], np.ndarray]
# A predicate maps an int64 array of indices to a bool array of equal shape.
IndexPredicate = Callable[[np.ndarray], np.ndarray]
Marked = Union[IndexPredicate, np.ndarray, Sequence[int]]


class ResourceError(MemoryError):
    """Raised when a requested register would exceed the simulation cap."""


def check_register_size(num_qubits: int, cap: int = MAX_QUBITS) -> None:
    if num_qubits < 1:
        raise ValueError(f"num_qubits must be >= 1, got {num_qubits}")
    if num_qubits > cap:
        nbytes = 16 * 2**num_qubits
        raise ResourceError(
            f"{num_qubits} qubits needs a 2^{num_qubits} = {2**num_qubits} amplitude "
            f"vector ({nbytes / 2**30:.1f} GiB); the cap is {cap} qubits. "
            "Use the subspace counting backend for large databases."
        )


@dataclass
class QuantumState:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (2**self.num_qubits,):
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes for {self.num_qubits} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    @property
    def dim(self) -> int:
        return 2**self.num_qubits

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def copy(self) -> "QuantumState":
        return QuantumState(self.num_qubits, self.amplitudes.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class MeasurementDistribution:
    """Exact outcome probabilities of an ``num_qubits``-qubit sub-register."""

    probabilities: np.ndarray

    @property
    def num_qubits(self) -> int:
        return int(np.log2(len(self.probabilities)))

    def __len__(self) -> int:
        return len(self.probabilities)

    def __getitem__(self, m):
        return self.probabilities[m]

    def most_probable(self) -> int:
        # argmax returns the first maximum, so ties resolve to the smallest outcome
        return int(np.argmax(self.probabilities))

    def mass(self, outcomes) -> float:
        return float(np.sum(self.probabilities[np.asarray(outcomes, dtype=np.int64)]))

    def sample(self, shots: int, seed: int) -> np.ndarray:
        """Draw ``shots`` outcomes with a generator seeded from ``seed``."""
        rng = np.random.default_rng(seed)
        p = self.probabilities / self.probabilities.sum()
        return rng.choice(len(p), size=shots, p=p)


def new_uniform(num_qubits: int, cap: int = MAX_QUBITS) -> QuantumState:
    """Hadamard on every qubit of |0...0>: the equal-weight database register."""
    check_register_size(num_qubits, cap)
    dim = 2**num_qubits
    return QuantumState(num_qubits, np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128))


def basis_state(num_qubits: int, index: int, cap: int = MAX_QUBITS) -> QuantumState:
    check_register_size(num_qubits, cap)
    amps = np.zeros(2**num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return QuantumState(num_qubits, amps)


def marked_mask(marked: Marked, num_qubits: int) -> np.ndarray:
    """Evaluate a marking (predicate, bool mask or index list) on every index."""
    dim = 2**num_qubits
    if callable(marked):
        mask = np.asarray(marked(np.arange(dim, dtype=np.int64)), dtype=bool)
        if mask.shape != (dim,):
            raise ValueError("predicate must return one bool per index")
        return mask
    arr = np.asarray(marked)
    if arr.dtype == bool:
        if arr.shape != (dim,):
            raise ValueError(f"mask length {arr.shape} does not match {dim} indices")
        return arr
    mask = np.zeros(dim, dtype=bool)
    if arr.size:
        idx = arr.astype(np.int64).ravel()
        if idx.min() < 0 or idx.max() >= dim:
            raise ValueError(f"marked index out of range 0..{dim - 1}")
        mask[idx] = True
    return mask


def _check_range(num_qubits: int, qubits: Optional[QubitRange]) -> QubitRange:
    if qubits is None:
        return 0, num_qubits
    lo, hi = qubits
    if not (0 <= lo < hi <= num_qubits):
        raise ValueError(f"invalid qubit range {qubits} for a {num_qubits}-qubit register")
    return int(lo), int(hi)


def _blocks(amps: np.ndarray, num_qubits: int, qubits: QubitRange) -> np.ndarray:
    lo, hi = qubits
    return amps.reshape(2 ** (num_qubits - hi), 2 ** (hi - lo), 2**lo)


def apply_register_op(state: QuantumState, op: RegisterOp,
                      qubits: Optional[QubitRange] = None) -> QuantumState:
    """Apply a block operation along the sub-register ``qubits``."""
    rng = _check_range(state.num_qubits, qubits)
    blocks = _blocks(state.amplitudes, state.num_qubits, rng)
    out = op(blocks)
    return QuantumState(state.num_qubits, np.ascontiguousarray(out).reshape(-1))


# -- register operations ---------------------------------------------------

def phase_flip_op(mask: np.ndarray) -> RegisterOp:
    signs = np.where(np.asarray(mask, dtype=bool), -1.0, 1.0)[None, :, None]

    def op(block):
        return block * signs

    return op


def diffusion_op(block: np.ndarray) -> np.ndarray:
    """Inversion about the mean: a -> 2*mean(a) - a along the register axis."""
    return 2.0 * block.mean(axis=1, keepdims=True) - block


def qft_op(block: np.ndarray) -> np.ndarray:
    # |j> -> 2^(-w/2) sum_k exp(+2 pi i jk / 2^w) |k>
    return np.fft.ifft(block, axis=1, norm="ortho")


def qft_inverse_op(block: np.ndarray) -> np.ndarray:
    return np.fft.fft(block, axis=1, norm="ortho")


def grover_op(mask: np.ndarray) -> RegisterOp:
    flip = phase_flip_op(mask)

    def op(block):
        return diffusion_op(flip(block))

    return op


# -- state-level API -------------------------------------------------------

def apply_phase_oracle(state: QuantumState, marked: Marked,
                       qubits: Optional[QubitRange] = None) -> QuantumState:
    lo, hi = _check_range(state.num_qubits, qubits)
    mask = marked_mask(marked, hi - lo)
    return apply_register_op(state, phase_flip_op(mask), (lo, hi))


def apply_diffusion(state: QuantumState, over_qubits: Optional[QubitRange] = None) -> QuantumState:
    return apply_register_op(state, diffusion_op, over_qubits)


def apply_qft(state: QuantumState, over_qubits: Optional[QubitRange] = None) -> QuantumState:
    return apply_register_op(state, qft_op, over_qubits)


def apply_qft_inverse(state: QuantumState, over_qubits: Optional[QubitRange] = None) -> QuantumState:
    return apply_register_op(state, qft_inverse_op, over_qubits)


def apply_controlled_unitary(state: QuantumState, control: int, action: RegisterOp,
                             power: int = 1,
                             target: Optional[QubitRange] = None) -> QuantumState:
    """Apply ``action`` ``power`` times to ``target`` where qubit ``control`` is 1.

    ``target`` defaults to every qubit below ``control``.
    """
    q = state.num_qubits
    if power < 0:
        raise ValueError("power must be >= 0")
    if not 0 <= control < q:
        raise ValueError(f"control qubit {control} outside 0..{q - 1}")
    lo, hi = _check_range(q, target if target is not None else (0, control))
    if lo <= control < hi:
        raise ValueError(f"control qubit {control} lies inside target range {(lo, hi)}")

    amps = state.amplitudes.copy()
    if power == 0:
        return QuantumState(q, amps)
    halves = amps.reshape(2 ** (q - control - 1), 2, 2**control)
    sub = halves[:, 1, :].reshape(-1)
    # Removing the control bit shifts target qubits above it down by one.
    if lo > control:
        lo, hi = lo - 1, hi - 1
    blocks = _blocks(sub, q - 1, (lo, hi))
    for _ in range(power):
        blocks = action(blocks)
    halves[:, 1, :] = blocks.reshape(halves[:, 1, :].shape)
    return QuantumState(q, halves.reshape(-1))


def measure_distribution(state: QuantumState,
                         over_qubits: Optional[QubitRange] = None) -> MeasurementDistribution:
    rng = _check_range(state.num_qubits, over_qubits)
    probs = _blocks(state.probabilities(), state.num_qubits, rng)
    return MeasurementDistribution(probs.sum(axis=(0, 2)))


def sample_measurement(state: QuantumState, shots: int, seed: int,
                       over_qubits: Optional[QubitRange] = None) -> np.ndarray:
    return measure_distribution(state, over_qubits).sample(shots, seed)
