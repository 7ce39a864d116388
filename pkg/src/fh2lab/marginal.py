"""Classical sampling of few-qubit marginals of HC1Q and HCmQ circuits.

The probability of reading ``z`` on k measured Hadamard qubits is the mean of

    f(x) = 2^-k * sum_{y in S(x)} (-1)^(z.C_P(x0) + z.C_P(y0))

over uniform x, where ``S(x)`` is the set of inputs whose image agrees with
C(x0) everywhere outside the measured positions P.  S(x) has at most 2^k
members and is found by inverting C on each of the 2^k completions, so f is
cheap to evaluate.  Averaging f over T random inputs gives every entry of the
marginal to within eps = 1/(5 * 4^k * r); normalizing the absolute values
then yields a distribution within L1 distance 1/r of the true marginal.

Normalized tables hold exact ``Fraction`` values, so they sum to exactly 1
and the binary-expansion sampler compares exact rationals.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import bitslice as bs
from . import rng as _rng
from .circuit import (BitString, CircuitModel, all_bitstrings, apply_classical,
                      apply_inverse, as_bitstring)
from .errors import CircuitError, ResourceLimitError
from .pathsum import _ENUM_CHUNK, _chunk_sizes, _map_chunks, chernoff_T

DEFAULT_K_CAP = 16
DEFAULT_BUDGET = 1 << 33  # T * 2^k circuit inversions
DEFAULT_DELTA = 0.05
DEFAULT_PRECISION = 64


@dataclass(frozen=True)
class MarginalEstimate:
    k: int
    positions: tuple[int, ...]
    table: dict
    epsilon: float
    r: int
    T: int
    delta: float
    seed: int


@dataclass(frozen=True)
class NormalizedMarginal:
    positions: tuple[int, ...]
    table: dict  # z string -> Fraction

    def as_floats(self) -> dict:
        return {z: float(q) for z, q in self.table.items()}

    def vector(self) -> np.ndarray:
        return np.array([float(q) for q in self.table.values()])


def _positions(c: CircuitModel, k: int | None, positions: Sequence[int] | None,
               cap: int = DEFAULT_K_CAP) -> tuple[int, ...]:
    if c.family not in ("hc1q", "hcmq"):
        raise CircuitError(f"marginal sampling needs an hc1q/hcmq circuit, got {c.family}")
    if positions is None:
        if k is None:
            raise ValueError("give k or explicit positions")
        positions = tuple(range(1, k + 1))
    positions = tuple(int(p) for p in positions)
    if k is not None and len(positions) != k:
        raise ValueError(f"{len(positions)} positions given for k={k}")
    if len(set(positions)) != len(positions) or not positions:
        raise ValueError("measured positions must be distinct and non-empty")
    if not all(1 <= p <= c.hadamard_qubits for p in positions):
        raise CircuitError(
            f"measured positions must lie on the Hadamard qubits 1..{c.hadamard_qubits}")
    if len(positions) > cap:
        raise ResourceLimitError(f"k={len(positions)} exceeds the cap {cap}")
    return positions


def _padded(c: CircuitModel, x) -> BitString:
    return as_bitstring(x, c.hadamard_qubits) + BitString.zeros(c.fixed)


def build_matching_set(c: CircuitModel, x, k: int | None = None,
                       positions: Sequence[int] | None = None,
                       cap: int = DEFAULT_K_CAP) -> set[BitString]:
    """All y with ``C(y0)`` equal to ``C(x0)`` outside the measured positions."""
    positions = _positions(c, k, positions, cap)
    image = list(apply_classical(c, _padded(c, x)).bits)
    h = c.hadamard_qubits
    found = set()
    for alpha in all_bitstrings(len(positions)):
        for p, a in zip(positions, alpha):
            image[p - 1] = a
        pre = apply_inverse(c, BitString(tuple(image)))
        if not any(pre[h:]):
            found.add(pre[:h])
    return found


def marginal_f(c: CircuitModel, x, z, k: int | None = None,
               positions: Sequence[int] | None = None,
               cap: int = DEFAULT_K_CAP) -> float:
    """The bounded summand f(x) whose mean over x is the marginal ``p_z``."""
    positions = _positions(c, k, positions, cap)
    z = as_bitstring(z, len(positions))

    def phase(w):
        out = apply_classical(c, _padded(c, w))
        return sum(z[i] & out.bit(p) for i, p in enumerate(positions)) & 1

    base = phase(x)
    total = sum(-1 if base ^ phase(y) else 1 for y in build_matching_set(c, x, positions=positions))
    return total / (1 << len(positions))


def _batch_sums(c: CircuitModel, rows: list[int], x_planes: np.ndarray, count: int) -> np.ndarray:
    """``sum_x 2^k f_z(x)`` over one bit-sliced batch of x, for every z."""
    k, h = len(rows), c.hadamard_qubits
    fixed_rows = list(range(h, c.width))
    planes = np.zeros((c.width, x_planes.shape[1]), dtype=np.uint64)
    planes[:h] = x_planes
    image = bs.evaluate(c.gates, planes)
    mask = bs.tail_mask(count)
    valid = []
    for alpha in range(1 << k):
        v = image.copy()
        for j, r in enumerate(rows):
            v[r] = bs.ALL_ONES if (alpha >> (k - 1 - j)) & 1 else 0
        pre = bs.evaluate_inverse(c.gates, v)
        valid.append(bs.equals_pattern(pre, fixed_rows, [0] * len(fixed_rows)) & mask)
    sums = np.zeros(1 << k, dtype=np.int64)
    for z in range(1 << k):
        par = bs.parity(image, [r for j, r in enumerate(rows) if (z >> (k - 1 - j)) & 1])
        acc = 0
        for alpha in range(1 << k):
            diff = bs.popcount(valid[alpha] & ~par) - bs.popcount(valid[alpha] & par)
            acc += -diff if (bin(z & alpha).count("1") & 1) else diff
        sums[z] = acc
    return sums


def _f_sums(c: CircuitModel, positions: tuple[int, ...], T: int, seed: int,
            threads: int | None) -> np.ndarray:
    """Sums over T uniform x, as exact integers."""
    rows = [p - 1 for p in positions]
    sizes = _chunk_sizes(T)

    def run(i):
        shape = (c.hadamard_qubits, bs.n_words(sizes[i]))
        return _batch_sums(c, rows, _rng.random_words(seed, "marginal/x", i, shape), sizes[i])

    return np.sum(_map_chunks(run, len(sizes), threads), axis=0)


def exact_marginals(c: CircuitModel, k: int | None = None, *,
                    positions: Sequence[int] | None = None, cap: int = DEFAULT_K_CAP,
                    max_inputs_exp: int = 24) -> dict:
    """Mean of f over every x; equals the true marginal for each z."""
    positions = _positions(c, k, positions, cap)
    h = c.hadamard_qubits
    if h > max_inputs_exp:
        raise ResourceLimitError(f"2^{h} inputs exceeds the cap 2^{max_inputs_exp}")
    rows = [p - 1 for p in positions]
    total = np.zeros(1 << len(positions), dtype=np.int64)
    for start in range(0, 1 << h, _ENUM_CHUNK):
        count = min(_ENUM_CHUNK, (1 << h) - start)
        total += _batch_sums(c, rows, bs.enumeration(h, start, count), count)
    scale = 1 << (h + len(positions))
    return {str(z): float(Fraction(int(total[z.to_int()]), scale)) for z in all_bitstrings(len(positions))}


def marginal_epsilon(k: int, r: int) -> float:
    return 1.0 / (5 * 4**k * r)


def estimate_marginals(c: CircuitModel, k: int | None, r: int, seed: int = 0, *,
                       positions: Sequence[int] | None = None, delta: float = DEFAULT_DELTA,
                       budget: int = DEFAULT_BUDGET, cap: int = DEFAULT_K_CAP,
                       threads: int | None = None) -> MarginalEstimate:
    """Estimate every entry of the k-qubit marginal to within 1/(5 4^k r).

    ``delta`` is the failure probability for the whole table; each of the 2^k
    entries gets ``delta / 2^k``.
    """
    positions = _positions(c, k, positions, cap)
    k = len(positions)
    if r < 1:
        raise ValueError("r must be a positive integer")
    eps = marginal_epsilon(k, r)
    plan = chernoff_T(eps, delta / (1 << k))
    need = plan.T * (1 << k)
    if need > budget:
        raise ResourceLimitError(
            f"k={k}, r={r} needs T={plan.T} samples x 2^{k} inversions = {need} > budget {budget}")
    sums = _f_sums(c, positions, plan.T, seed, threads)
    scale = plan.T * (1 << k)
    table = {str(z): float(sums[z.to_int()]) / scale for z in all_bitstrings(k)}
    return MarginalEstimate(k, positions, table, eps, r, plan.T, delta, seed)


def normalize(est: MarginalEstimate) -> NormalizedMarginal:
    """``q_z = |p_z| / sum |p_z|`` in exact rational arithmetic."""
    mags = {z: abs(Fraction(v)) for z, v in est.table.items()}
    total = sum(mags.values())
    if total == 0:
        raise ValueError("all marginal estimates are zero; estimation failed")
    return NormalizedMarginal(est.positions, {z: m / total for z, m in mags.items()})


def _thresholds(q: NormalizedMarginal, m: int) -> tuple[list[str], list[int]]:
    keys, cuts, cum = [], [], Fraction(0)
    scale = 1 << m
    for z, p in q.table.items():
        cum += p
        keys.append(z)
        cuts.append(math.ceil(cum * scale))
    return keys, cuts


def _last_supported(q: NormalizedMarginal) -> str:
    return [z for z, p in q.table.items() if p > 0][-1]


def select_outcome(q: NormalizedMarginal, w) -> BitString:
    """The z whose cumulative interval contains ``0.w_1 w_2 ... w_m``."""
    w = as_bitstring(w)
    keys, cuts = _thresholds(q, w.width)
    i = bisect.bisect_right(cuts, w.to_int())
    return BitString.from_str(keys[i] if i < len(keys) else _last_supported(q))


def _draw_words(seed: int, label: str, count: int, m: int) -> list[int]:
    per = (m + 63) // 64
    raw = _rng.bit_generator(seed, label).random_raw(count * per).tolist()
    out = []
    for i in range(count):
        v = 0
        for word in raw[i * per:(i + 1) * per]:
            v = (v << 64) | word
        out.append(v >> (64 * per - m))
    return out


def sample_many(q: NormalizedMarginal, n: int, m: int = DEFAULT_PRECISION, seed: int = 0) -> list[BitString]:
    """``n`` draws using uniform m-bit binary fractions."""
    if m < 1:
        raise ValueError("precision m must be at least 1")
    keys, cuts = _thresholds(q, m)
    fallback = _last_supported(q)
    out = []
    for w in _draw_words(seed, "marginal/draw", n, m):
        i = bisect.bisect_right(cuts, w)
        out.append(keys[i] if i < len(keys) else fallback)
    return [BitString.from_str(z) for z in out]


def sample_from(q: NormalizedMarginal, m: int = DEFAULT_PRECISION, seed: int = 0) -> BitString:
    return sample_many(q, 1, m, seed)[0]


def sample_marginal(c: CircuitModel, k: int | None, r: int, n_samples: int, seed: int = 0, *,
                    positions: Sequence[int] | None = None, m: int = DEFAULT_PRECISION,
                    delta: float = DEFAULT_DELTA, budget: int = DEFAULT_BUDGET,
                    threads: int | None = None):
    """Estimate, normalize and draw ``n_samples`` outcomes.

    Returns ``(samples, normalized table, raw estimate)``.
    """
    est = estimate_marginals(c, k, r, _rng.derive_seed(seed, "marginal/estimate"),
                             positions=positions, delta=delta, budget=budget, threads=threads)
    q = normalize(est)
    samples = sample_many(q, n_samples, m, _rng.derive_seed(seed, "marginal/sample"))
    return samples, q, est
