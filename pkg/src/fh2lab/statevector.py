"""Dense statevector simulation for small circuits.

This is the brute-force ground truth the path-sum, compiler and sampler code
is checked against.  Amplitudes are stored in C order with qubit 1 as the most
significant index bit, so reshaping to ``(2,) * N`` puts qubit ``p`` on axis
``p - 1``.  Gates are applied in place on strided views of that tensor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import rng as _rng
from .circuit import BitString, CircuitModel, Gate, as_bitstring
from .errors import CircuitError, ResourceLimitError, ZeroProbabilityError

DEFAULT_MAX_WIDTH = 22
ZERO_PROBABILITY = 1e-14
_SQRT1_2 = 1 / math.sqrt(2)


@dataclass(frozen=True, eq=False)
class StateVector:
    width: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 1 << self.width:
            raise ValueError(f"{amps.size} amplitudes for {self.width} qubits")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, z, width: int | None = None) -> "StateVector":
        z = as_bitstring(z, width)
        amps = np.zeros(1 << z.width, dtype=np.complex128)
        amps[z.to_int()] = 1.0
        return cls(z.width, amps)

    def amplitude(self, z) -> complex:
        return complex(self.amplitudes[as_bitstring(z, self.width).to_int()])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


# --------------------------------------------------------------------------
# gate kernels on an (2,)*N tensor

def _index(width: int, fixed: Mapping[int, int]):
    idx = [slice(None)] * width
    for q, v in fixed.items():
        idx[q - 1] = v
    return tuple(idx) + (Ellipsis,)


def _reduced_axis(q: int, fixed: Mapping[int, int]) -> int:
    return q - 1 - sum(1 for p in fixed if p < q)


def _flip(psi: np.ndarray, width: int, controls: Mapping[int, int], target: int):
    view = psi[_index(width, controls)]
    axis = _reduced_axis(target, controls)
    view[...] = np.flip(view, axis=axis).copy()


def _hadamard(psi: np.ndarray, width: int, controls: Mapping[int, int], target: int):
    c0 = dict(controls)
    c0[target] = 0
    c1 = dict(controls)
    c1[target] = 1
    a = psi[_index(width, c0)]
    b = psi[_index(width, c1)]
    s, d = (a + b) * _SQRT1_2, (a - b) * _SQRT1_2
    a[...] = s
    b[...] = d


def _phase(psi: np.ndarray, width: int, ones: tuple[int, ...], factor: complex):
    psi[_index(width, {q: 1 for q in ones})] *= factor


def _apply(g: Gate, psi: np.ndarray, width: int):
    k = g.kind
    if k in ("x", "cnot", "toffoli", "ncx"):
        _flip(psi, width, dict(g.control_values()), g.target)
    elif k == "h":
        _hadamard(psi, width, {}, g.target)
    elif k == "ch":
        _hadamard(psi, width, {g.qubits[0]: 1}, g.target)
    elif k in ("z", "cz", "ccz"):
        _phase(psi, width, g.qubits, -1.0)
    elif k == "rz":
        q = g.qubits[0]
        psi[_index(width, {q: 0})] *= np.exp(1j * g.theta)
        psi[_index(width, {q: 1})] *= np.exp(-1j * g.theta)
    else:
        raise CircuitError(f"cannot simulate {k}")


def _check_width(width: int, max_width: int):
    if width > max_width:
        raise ResourceLimitError(f"{width} qubits exceeds the statevector cap of {max_width}")


def simulate(c: CircuitModel, initial: StateVector | None = None,
             max_width: int = DEFAULT_MAX_WIDTH) -> StateVector:
    """Final state of ``c`` applied to ``|0^N>`` (or to ``initial``)."""
    _check_width(c.width, max_width)
    g = c.to_general()
    if initial is None:
        psi = np.zeros(1 << c.width, dtype=np.complex128)
        psi[0] = 1.0
    else:
        if initial.width != c.width:
            raise ValueError("initial state width does not match circuit")
        psi = initial.amplitudes.copy()
    tensor = psi.reshape((2,) * c.width)
    for gate in g.gates:
        _apply(gate, tensor, c.width)
    return StateVector(c.width, psi)


def output_probability(psi: StateVector, z) -> float:
    """``|<z|psi>|^2``."""
    return float(abs(psi.amplitude(z)) ** 2)


def postselect(psi: StateVector, pattern: Mapping[int, int]) -> tuple[StateVector, float]:
    """Project the qubits in ``pattern`` onto the given bits and renormalize.

    Returns the renormalized full-width state and the success probability.
    Raises :class:`ZeroProbabilityError` below ``1e-14``.
    """
    for q, v in pattern.items():
        if not 1 <= q <= psi.width or v not in (0, 1):
            raise ValueError(f"bad postselection entry {q}->{v}")
    mask = np.zeros((2,) * psi.width, dtype=bool)
    mask[_index(psi.width, dict(pattern))] = True
    projected = np.where(mask.reshape(-1), psi.amplitudes, 0)
    prob = float(np.vdot(projected, projected).real)
    if prob <= ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"postselection probability {prob:.3e} is zero")
    return StateVector(psi.width, projected / math.sqrt(prob)), prob


def restrict(psi: StateVector, pattern: Mapping[int, int], keep) -> StateVector:
    """Sub-state on the ``keep`` positions (in the given order) of a state in
    which every other qubit is pinned by ``pattern``; unnormalized."""
    keep = list(keep)
    if sorted(set(pattern) | set(keep)) != list(range(1, psi.width + 1)) or set(pattern) & set(keep):
        raise ValueError("pattern and kept positions must partition the qubits")
    tensor = psi.amplitudes.reshape((2,) * psi.width)
    sub = tensor[_index(psi.width, dict(pattern))]
    remaining = sorted(keep)
    sub = np.transpose(sub, [remaining.index(q) for q in keep])
    return StateVector(len(keep), sub.reshape(-1))


def fidelity(psi: StateVector, phi: StateVector) -> float:
    """``|<psi|phi>|^2``; insensitive to global phase."""
    if psi.width != phi.width:
        raise ValueError("widths differ")
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2)


def sample_measurements(psi: StateVector, shots: int, seed: int, label: str = "measure") -> np.ndarray:
    """``shots`` computational-basis outcomes as integer indices."""
    p = psi.probabilities()
    cdf = np.cumsum(p)
    u = _rng.stream(seed, label).random(shots) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), p.size - 1)


def sample_measurement(psi: StateVector, seed: int) -> BitString:
    """One computational-basis measurement of every qubit."""
    idx = int(sample_measurements(psi, 1, seed)[0])
    return BitString.from_int(idx, psi.width)


def distribution(c: CircuitModel, max_width: int = DEFAULT_MAX_WIDTH) -> np.ndarray:
    """Exact output distribution of ``c`` indexed by outcome integer."""
    return simulate(c, max_width=max_width).probabilities()


def marginal(probs: np.ndarray, width: int, positions) -> np.ndarray:
    """Marginal of a full distribution on ``positions`` (in the given order),
    indexed by the integer of the measured bits."""
    positions = list(positions)
    t = probs.reshape((2,) * width)
    others = tuple(q - 1 for q in range(1, width + 1) if q not in positions)
    m = t.sum(axis=others) if others else t
    remaining = sorted(positions)
    m = np.transpose(m, [remaining.index(q) for q in positions])
    return m.reshape(-1)
