"""Hadamard-classical circuits: simulation, path sums, postselection, marginals and PDD-Max."""

__version__ = "0.1.0"

from .circuit import (CCZ, CH, CNOT, CZ, FAMILIES, H, NCX, RZ, TOFFOLI, X, Z, BitString,
                      CircuitModel, Gate, ReversibleCircuit, all_bitstrings, apply_classical,
                      apply_inverse, general, hc1q, hcmq, iqp, parse_circuit, read_circuit,
                      serialize_circuit, write_circuit)
from .errors import CircuitError, ResourceLimitError, ZeroProbabilityError
from .pathsum import ChernoffPlan, ProbEstimate, chernoff_T, prob_estimate, prob_exact, protocol_plan
from .statevector import StateVector, output_probability, simulate

__all__ = [
    "__version__", "BitString", "Gate", "CircuitModel", "ReversibleCircuit", "FAMILIES",
    "X", "CNOT", "TOFFOLI", "NCX", "Z", "CZ", "CCZ", "RZ", "H", "CH",
    "hc1q", "hcmq", "iqp", "general", "apply_classical", "apply_inverse", "all_bitstrings",
    "parse_circuit", "serialize_circuit", "read_circuit", "write_circuit",
    "CircuitError", "ResourceLimitError", "ZeroProbabilityError",
    "ChernoffPlan", "ProbEstimate", "chernoff_T", "protocol_plan", "prob_exact", "prob_estimate",
    "StateVector", "simulate", "output_probability",
]
