"""Simulated quantum-counting estimation of conditional pdfs and ML detection."""

__version__ = "0.1.0"

from .counting import (
    Backend,
    CountingConfig,
    CountingOutcome,
    counting_error_bound,
    phase_to_count,
    quantum_count,
    subspace_count_distribution,
)
from .detector import Decision, ml_decide
from .estimator import PdfEstimate, estimate_pdf, estimate_point, kl_divergence, l1_distance
from .grover import Oracle, grover_iterate, optimal_iterations, search
from .statevector import MeasurementDistribution, QuantumState, ResourceError, new_uniform
from .vdb import Quantizer, SystemModel
