"""Compile Hadamard + classical circuits into HC1Q circuits with postselection.

Given U on n qubits, U' is U followed by one H on every qubit, and h is the
number of Hadamards in U'.  Reading each Hadamard as a nondeterministic
branch gives a classical trace ``(s, z)`` per path ``y`` in {0,1}^h, and

    U'|0^n> = 2^(-h/2) * sum_y (-1)^s(y) |z(y)>.

:func:`compile` turns that trace into a classical circuit W sandwiched by
Hadamard layers.  Physical layout (width h + n + 2)::

    [ y_1 .. y_h | s | z_1 .. z_n | flag ]

An NCX first sets ``flag`` on the branch where s and z start at zero.  The
gates of U' are then streamed through a wire map: a classical gate acts on
the current positions of its wires; the l-th Hadamard, on wire j, becomes
``TOFFOLI(wire j, y_l -> s)`` (the sign update s ^= z_j * y_l) and wire j
moves onto the y_l qubit.  Every abandoned qubit holds a classical function
of y, so projecting it through the final H onto <0| only contributes a
constant 1/sqrt(2).  Postselecting ``flag = 1``, ``s = 1`` and every
abandoned qubit to 0 leaves U|0^n> on the final wire positions, with success
probability 2^-(h + n + 2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bitslice as bs
from .circuit import (BitString, CircuitModel, NCX, TOFFOLI, H, as_bitstring,
                      general, hc1q)
from .errors import CircuitError, ResourceLimitError
from .statevector import (DEFAULT_MAX_WIDTH, StateVector, postselect, restrict,
                          simulate)

DEFAULT_MAX_PATHS_EXP = 20


@dataclass(frozen=True)
class PathOutcome:
    y: BitString
    s: int
    z: BitString


@dataclass(frozen=True)
class Compilation:
    circuit: CircuitModel
    postselect: dict
    outputs: tuple[int, ...]
    h: int
    n: int

    @property
    def width(self) -> int:
        return self.circuit.width

    @property
    def flag(self) -> int:
        return self.circuit.width

    @property
    def sign_position(self) -> int:
        return self.h + 1


def _check_hadamard_classical(u: CircuitModel):
    if u.family != "general":
        raise CircuitError(f"expected a general circuit, got {u.family}")
    for g in u.gates:
        if not (g.is_classical or g.kind == "h"):
            raise CircuitError(f"{g.kind} gate: only H and classical gates are supported")


def append_hadamard_layer(u: CircuitModel) -> CircuitModel:
    """U' = U followed by H on qubits 1..n."""
    _check_hadamard_classical(u)
    return general(u.width, u.gates + tuple(H(q) for q in range(1, u.width + 1)))


def enumerate_path(uprime: CircuitModel, y) -> PathOutcome:
    """Run the nondeterministic trace of ``uprime`` along path ``y``."""
    _check_hadamard_classical(uprime)
    h = uprime.hadamard_count()
    y = as_bitstring(y)
    if y.width != h:
        raise ValueError(f"path has {y.width} bits but the circuit has {h} Hadamards")
    s, z, ell = 0, [0] * uprime.width, 0
    for g in uprime.gates:
        if g.kind == "h":
            j = g.target - 1
            if y[ell]:
                s ^= z[j]
                z[j] = 1
            else:
                z[j] = 0
            ell += 1
        elif g.kind == "x" or all(z[q - 1] == v for q, v in g.control_values()):
            z[g.target - 1] ^= 1
    return PathOutcome(y, s, BitString(tuple(z)))


def _all_paths(uprime: CircuitModel, max_paths_exp: int):
    """Bit-sliced trace of every path: (s plane, z planes, path count)."""
    _check_hadamard_classical(uprime)
    h = uprime.hadamard_count()
    if h > max_paths_exp:
        raise ResourceLimitError(f"2^{h} paths exceeds the cap 2^{max_paths_exp}")
    count = 1 << h
    ys = bs.enumeration(h, 0, count) if h else np.zeros((0, 1), dtype=np.uint64)
    n = uprime.width
    # row 0 is s, rows 1..n are the register
    regs = np.zeros((n + 1, bs.n_words(count)), dtype=np.uint64)
    ell = 0
    for g in uprime.gates:
        if g.kind == "h":
            row = g.target
            regs[0] ^= regs[row] & ys[ell]
            regs[row] = ys[ell]
            ell += 1
        else:
            bs.apply_gate(g, regs, offset=1)
    return regs, count


def reconstruct_state(uprime: CircuitModel, max_paths_exp: int = DEFAULT_MAX_PATHS_EXP) -> StateVector:
    """``2^(-h/2) sum_y (-1)^s(y) |z(y)>`` accumulated over all paths."""
    regs, count = _all_paths(uprime, max_paths_exp)
    n = uprime.width
    bits = bs.unpack(regs, count).astype(np.int64)
    weights = 1 - 2 * bits[:, 0]
    index = bits[:, 1:] @ (1 << np.arange(n - 1, -1, -1, dtype=np.int64))
    acc = np.zeros(1 << n, dtype=np.int64)
    np.add.at(acc, index, weights)
    return StateVector(n, acc / math.sqrt(count))


def path_outcomes(uprime: CircuitModel, max_paths_exp: int = DEFAULT_MAX_PATHS_EXP) -> list[PathOutcome]:
    regs, count = _all_paths(uprime, max_paths_exp)
    h = uprime.hadamard_count()
    bits = bs.unpack(regs, count)
    return [PathOutcome(BitString.from_int(i, h), int(bits[i, 0]), BitString(tuple(bits[i, 1:])))
            for i in range(count)]


def compile(u: CircuitModel) -> Compilation:  # noqa: A001 - mirrors the operation name
    """HC1Q circuit plus postselection whose postselected output is U|0^n>."""
    uprime = append_hadamard_layer(u)
    n, h = u.width, uprime.hadamard_count()
    s_pos, flag = h + 1, h + n + 2
    wire = {j: h + 1 + j for j in range(1, n + 1)}
    gates = [NCX([-s_pos] + [-wire[j] for j in range(1, n + 1)], flag)]
    ell = 0
    for g in uprime.gates:
        if g.kind == "h":
            ell += 1
            gates.append(TOFFOLI(wire[g.target], ell, s_pos))
            wire[g.target] = ell
        else:
            gates.append(g.relabel(wire))
    outputs = tuple(wire[j] for j in range(1, n + 1))
    pattern = {q: 0 for q in range(1, h + n + 2) if q not in outputs and q != s_pos}
    pattern[s_pos] = 1
    pattern[flag] = 1
    return Compilation(hc1q(h + n + 2, gates), dict(sorted(pattern.items())), outputs, h, n)


def analytic_postselection_probability(comp: Compilation) -> float:
    return 2.0 ** -(comp.h + comp.n + 2)


def postselection_probability(comp: Compilation, verify: bool = True,
                              max_width: int = DEFAULT_MAX_WIDTH) -> float:
    """``2^-(h+n+2)``; checked against the statevector when the width allows."""
    p = analytic_postselection_probability(comp)
    if verify and comp.width <= max_width:
        _, measured = postselect(simulate(comp.circuit, max_width=max_width), comp.postselect)
        if abs(measured - p) > 1e-12:
            raise AssertionError(f"simulated postselection probability {measured!r} != {p!r}")
    return p


def postselected_output(comp: Compilation, max_width: int = DEFAULT_MAX_WIDTH) -> tuple[StateVector, float]:
    """The n-qubit state left on the output wires after postselection, and the
    success probability, by dense simulation."""
    post, prob = postselect(simulate(comp.circuit, max_width=max_width), comp.postselect)
    return restrict(post, comp.postselect, comp.outputs), prob


# --------------------------------------------------------------------------
# sidecar descriptor

def serialize_sidecar(comp: Compilation) -> str:
    lines = [f"post {q} {v}" for q, v in sorted(comp.postselect.items())]
    lines += [f"out {q}" for q in comp.outputs]
    return "\n".join(lines) + "\n"


def parse_sidecar(text: str) -> tuple[dict, tuple[int, ...]]:
    pattern, outputs = {}, []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "post" and len(tok) == 3 and tok[2] in ("0", "1"):
                pattern[int(tok[1])] = int(tok[2])
            elif tok[0] == "out" and len(tok) == 2:
                outputs.append(int(tok[1]))
            else:
                raise ValueError
        except ValueError:
            raise CircuitError(f"bad sidecar line {raw!r}", lineno) from None
    return pattern, tuple(outputs)
