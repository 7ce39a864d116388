"""Bit-sliced batch evaluation of classical reversible circuits.

A batch of T bit strings of width N is stored as an ``(N, W)`` array of
``uint64`` words, ``W = ceil(T / 64)``: row ``p - 1`` holds bit position ``p``
of 64 different strings per word.  One gate application is then one or two
word-wise boolean operations over a row, for every string in the batch at
once.  Padding bits in the last word carry garbage and must be masked with
:func:`tail_mask` before counting.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .circuit import Gate

ALL_ONES = np.uint64(0xFFFF_FFFF_FFFF_FFFF)


def n_words(count: int) -> int:
    return (count + 63) // 64


def tail_mask(count: int) -> np.ndarray:
    """Per-word mask selecting the first ``count`` strings of a batch."""
    mask = np.full(n_words(count), ALL_ONES, dtype=np.uint64)
    rem = count % 64
    if rem:
        mask[-1] = np.uint64((1 << rem) - 1)
    return mask


def pack(bits) -> np.ndarray:
    """``(T, N)`` array of 0/1 -> ``(N, W)`` bit planes."""
    bits = np.asarray(bits, dtype=np.uint8)
    t, n = bits.shape
    w = n_words(t)
    packed = np.packbits(bits.T, axis=1, bitorder="little")
    out = np.zeros((n, w * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8").astype(np.uint64, copy=False)


def unpack(planes: np.ndarray, count: int) -> np.ndarray:
    """Inverse of :func:`pack`: ``(N, W)`` planes -> ``(count, N)`` uint8 bits."""
    raw = np.ascontiguousarray(planes, dtype="<u8").view(np.uint8)
    bits = np.unpackbits(raw, axis=1, bitorder="little", count=count)
    return bits.T


def enumeration(nbits: int, start: int, count: int) -> np.ndarray:
    """Planes for the integers ``start .. start+count-1`` written on ``nbits``
    bits, most significant bit at position 1."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    shifts = np.arange(nbits - 1, -1, -1, dtype=np.uint64)
    bits = ((idx[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)
    return pack(bits)


def popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum(dtype=np.int64))


def control_mask(g: Gate, planes: np.ndarray, offset: int = 0) -> np.ndarray | None:
    """Words whose bits are set where every control of ``g`` is satisfied;
    ``None`` for an uncontrolled gate."""
    mask = None
    for q, v in g.control_values():
        row = planes[q - 1 + offset]
        term = row if v else ~row
        mask = term.copy() if mask is None else (mask & term)
    return mask


def apply_gate(g: Gate, planes: np.ndarray, offset: int = 0):
    """Apply one classical gate in place.  Position ``p`` lives in row
    ``p - 1 + offset``."""
    t = g.target - 1 + offset
    if g.kind == "x":
        planes[t] ^= ALL_ONES
    elif g.kind == "cnot":
        planes[t] ^= planes[g.qubits[0] - 1 + offset]
    elif g.kind == "toffoli":
        planes[t] ^= planes[g.qubits[0] - 1 + offset] & planes[g.qubits[1] - 1 + offset]
    elif g.kind == "ncx":
        mask = control_mask(g, planes, offset)
        if mask is None:
            planes[t] ^= ALL_ONES
        else:
            planes[t] ^= mask
    else:
        raise ValueError(f"{g.kind} is not a classical gate")


def apply_gates(gates: Iterable[Gate], planes: np.ndarray, offset: int = 0) -> np.ndarray:
    for g in gates:
        apply_gate(g, planes, offset)
    return planes


def evaluate(gates, planes: np.ndarray) -> np.ndarray:
    """Copy of ``planes`` with the gate sequence applied."""
    return apply_gates(gates, planes.copy())


def evaluate_inverse(gates, planes: np.ndarray) -> np.ndarray:
    return apply_gates(tuple(gates)[::-1], planes.copy())


def parity(planes: np.ndarray, rows: Iterable[int]) -> np.ndarray:
    """XOR of the selected rows (zeros if none selected)."""
    out = np.zeros(planes.shape[1], dtype=np.uint64)
    for r in rows:
        out ^= planes[r]
    return out


def equals_pattern(planes: np.ndarray, rows: Iterable[int], values: Iterable[int]) -> np.ndarray:
    """Words whose bits are set where ``planes[row] == value`` for every pair."""
    out = np.full(planes.shape[1], ALL_ONES, dtype=np.uint64)
    for r, v in zip(rows, values):
        out &= planes[r] if v else ~planes[r]
    return out
