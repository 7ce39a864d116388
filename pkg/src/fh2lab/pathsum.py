"""Output probabilities of HC1Q, HCmQ and IQP circuits as sums over paths.

For an HCmQ circuit with classical core C on N qubits (m fixed, ``h = N - m``
Hadamard qubits) and outcome ``(s, t)``::

    <s,t|U|0^N> = 2^-h * sum_x (-1)^(s . C_1..h(x 0^m)) [C_h+1..N(x 0^m) == t]

so the probability is the mean, over independent uniform pairs ``(x, y)``, of
the product of two such terms.  Each term is bounded by 1, so the
Chernoff-Hoeffding bound turns T samples into an additive-error estimate.
IQP circuits get the analogous complex-valued sum.

Exact sums count +1/-1 terms as integers, so they are exact up to the final
division.  Estimators split their T samples into fixed-size chunks, each
drawn from its own ``(seed, label, chunk)`` stream, so the result does not
depend on the number of worker threads.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bitslice as bs
from . import rng as _rng
from .circuit import BitString, CircuitModel, apply_classical, as_bitstring
from .errors import CircuitError, ResourceLimitError

DEFAULT_EXACT_CAP = 24
CHUNK = 1 << 18  # samples per random stream
_ENUM_CHUNK = 1 << 20


@dataclass(frozen=True)
class ChernoffPlan:
    epsilon: float
    delta: float
    T: int


@dataclass(frozen=True)
class ProbEstimate:
    value: float
    epsilon: float
    confidence: float
    T: int
    seed: int
    imag: float = 0.0


def _ceil(x: float) -> int:
    # absorb float noise such as 128*5/0.8**2 == 999.9999999999998
    n = math.ceil(x)
    return n - 1 if n - 1 >= 1 and n - 1 >= x * (1 - 1e-12) else n


def chernoff_T(epsilon: float, delta: float) -> ChernoffPlan:
    """Smallest T with ``2 exp(-T eps^2 / 2) <= delta``."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return ChernoffPlan(epsilon, delta, max(1, _ceil(2 * math.log(2 / delta) / epsilon**2)))


def protocol_plan(a: float, b: float, k: int) -> ChernoffPlan:
    """Plan used by the PDD-Max verifier: eps = (a-b)/8, T = ceil(128 k/(a-b)^2).

    With that T, ``2 exp(-T eps^2/2) <= 2 e^-k``, which is the recorded delta.
    """
    if not 0 <= b < a <= 1:
        raise ValueError(f"need 0 <= b < a <= 1, got a={a}, b={b}")
    if k < 1:
        raise ValueError("k must be a positive integer")
    gap = a - b
    return ChernoffPlan(gap / 8, min(2 * math.exp(-k), 1.0), max(1, _ceil(128 * k / gap**2)))


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("FH2LAB_THREADS", "1") or 1)
    return max(1, int(threads))


def _map_chunks(fn, n_chunks: int, threads: int | None):
    threads = resolve_threads(threads)
    if threads == 1 or n_chunks == 1:
        return [fn(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_chunks)))


def _chunk_sizes(T: int, chunk: int = CHUNK):
    return [min(chunk, T - i) for i in range(0, T, chunk)]


def _split_outcome(c: CircuitModel, z) -> tuple[BitString, BitString]:
    z = as_bitstring(z, c.width)
    h = c.hadamard_qubits
    return z[:h], z[h:]


def _require_family(c: CircuitModel, *families):
    if c.family not in families:
        raise CircuitError(f"expected a {'/'.join(families)} circuit, got {c.family}")


# --------------------------------------------------------------------------
# HC1Q / HCmQ

def _term_planes(c: CircuitModel, x_planes: np.ndarray, s: BitString, t: BitString):
    """Sign and support planes of the single-sum term for a batch of x."""
    h = c.hadamard_qubits
    planes = np.zeros((c.width, x_planes.shape[1]), dtype=np.uint64)
    planes[:h] = x_planes
    bs.apply_gates(c.gates, planes)
    sign = bs.parity(planes, [j for j in range(h) if s[j]])
    support = bs.equals_pattern(planes, range(h, c.width), t.bits)
    return sign, support


def hcmq_amplitude(c: CircuitModel, outcome, cap: int = DEFAULT_EXACT_CAP) -> float:
    """Exact ``<s,t|U|0^N>`` (real) by enumerating all ``2^(N-m)`` inputs."""
    _require_family(c, "hc1q", "hcmq")
    if c.width > cap:
        raise ResourceLimitError(f"exact path sum over {c.width} qubits exceeds cap {cap}")
    s, t = _split_outcome(c, outcome)
    h = c.hadamard_qubits
    total = 1 << h
    acc = 0
    for start in range(0, total, _ENUM_CHUNK):
        count = min(_ENUM_CHUNK, total - start)
        sign, support = _term_planes(c, bs.enumeration(h, start, count), s, t)
        support &= bs.tail_mask(count)
        acc += bs.popcount(support & ~sign) - bs.popcount(support & sign)
    return acc / total


def hcmq_prob_exact(c: CircuitModel, outcome, cap: int = DEFAULT_EXACT_CAP) -> float:
    return hcmq_amplitude(c, outcome, cap) ** 2


def hc1q_prob_exact(c: CircuitModel, z, cap: int = DEFAULT_EXACT_CAP) -> float:
    """Exact ``p_z = |<z|U|0^N>|^2`` for an HC1Q circuit."""
    _require_family(c, "hc1q")
    return hcmq_prob_exact(c, z, cap)


def _pair_sum(c: CircuitModel, s: BitString, t: BitString, T: int, seed: int,
              threads: int | None) -> int:
    h = c.hadamard_qubits
    sizes = _chunk_sizes(T)

    def run(i):
        count = sizes[i]
        w = bs.n_words(count)
        words = _rng.random_words(seed, "pathsum/hcmq", i, (2, h, w))
        sx, ox = _term_planes(c, words[0], s, t)
        sy, oy = _term_planes(c, words[1], s, t)
        valid = ox & oy & bs.tail_mask(count)
        neg = sx ^ sy
        return bs.popcount(valid & ~neg) - bs.popcount(valid & neg)

    return sum(_map_chunks(run, len(sizes), threads))


def hcmq_prob_estimate(c: CircuitModel, outcome, plan: ChernoffPlan, seed: int = 0,
                       threads: int | None = None) -> ProbEstimate:
    """Monte-Carlo ``p_{s,t}``: mean of f(x, y) over ``plan.T`` fresh uniform pairs.

    ``outcome`` is the full N-bit string ``s t``.
    """
    _require_family(c, "hc1q", "hcmq")
    s, t = _split_outcome(c, outcome)
    total = _pair_sum(c, s, t, plan.T, seed, threads)
    return ProbEstimate(total / plan.T, plan.epsilon, 1 - plan.delta, plan.T, seed)


def hc1q_prob_estimate(c: CircuitModel, z, plan: ChernoffPlan, seed: int = 0,
                       threads: int | None = None) -> ProbEstimate:
    """Monte-Carlo ``p_z`` for an HC1Q circuit; ``|value - p_z| <= eps``
    with probability at least ``1 - delta``."""
    _require_family(c, "hc1q")
    return hcmq_prob_estimate(c, z, plan, seed, threads)


def pair_function(c: CircuitModel, z, x, y) -> int:
    """f(x, y) in {-1, 0, 1} for one pair, evaluated without batching."""
    s, t = _split_outcome(c, z)
    h = c.hadamard_qubits
    vals = []
    for v in (x, y):
        out = apply_classical(c, as_bitstring(v, h) + BitString.zeros(c.width - h))
        if out[h:] != t:
            return 0
        vals.append(sum(a & b for a, b in zip(out[:h], s)) & 1)
    return -1 if vals[0] ^ vals[1] else 1


# --------------------------------------------------------------------------
# IQP

def _iqp_parts(c: CircuitModel):
    signs = [g for g in c.gates if g.kind != "rz"]
    rz = [g for g in c.gates if g.kind == "rz"]
    return signs, rz


def _iqp_sign_plane(signs, planes: np.ndarray, z: BitString) -> np.ndarray:
    out = bs.parity(planes, [j for j in range(len(z)) if z[j]])
    for g in signs:
        term = planes[g.qubits[0] - 1].copy()
        for q in g.qubits[1:]:
            term &= planes[q - 1]
        out ^= term
    return out


def _iqp_angles(rz, bits: np.ndarray) -> np.ndarray:
    ang = np.zeros(bits.shape[0], dtype=np.float64)
    for g in rz:
        ang += g.theta * (1.0 - 2.0 * bits[:, g.qubits[0] - 1])
    return ang


def iqp_amplitude(c: CircuitModel, z, cap: int = DEFAULT_EXACT_CAP) -> complex:
    """Exact ``<z|H D H|0^N> = 2^-N sum_x (-1)^(x.z) d(x)``."""
    _require_family(c, "iqp")
    if c.width > cap:
        raise ResourceLimitError(f"exact path sum over {c.width} qubits exceeds cap {cap}")
    z = as_bitstring(z, c.width)
    signs, rz = _iqp_parts(c)
    total = 1 << c.width
    acc_int = 0
    acc = 0j
    for start in range(0, total, _ENUM_CHUNK):
        count = min(_ENUM_CHUNK, total - start)
        planes = bs.enumeration(c.width, start, count)
        sign = _iqp_sign_plane(signs, planes, z)
        if not rz:
            mask = bs.tail_mask(count)
            acc_int += bs.popcount(~sign & mask) - bs.popcount(sign & mask)
            continue
        bits = bs.unpack(planes, count)
        pm = 1.0 - 2.0 * bs.unpack(sign[None, :], count)[:, 0]
        acc += np.sum(pm * np.exp(1j * _iqp_angles(rz, bits)))
    return (acc_int + acc) / total


def iqp_prob_exact(c: CircuitModel, z, cap: int = DEFAULT_EXACT_CAP) -> float:
    return float(abs(iqp_amplitude(c, z, cap)) ** 2)


def iqp_prob_estimate(c: CircuitModel, z, plan: ChernoffPlan, seed: int = 0,
                      threads: int | None = None) -> ProbEstimate:
    """Monte-Carlo ``p_z`` for an IQP circuit.

    f(x, y) = (-1)^((x+y).z) d(x) conj(d(y)) is complex with ``|f| <= 1``.  Its
    real and imaginary means are accumulated over ``2 * plan.T`` pairs; the
    value is the real part and ``imag`` is kept as a diagnostic (its
    expectation is 0).
    """
    _require_family(c, "iqp")
    z = as_bitstring(z, c.width)
    signs, rz = _iqp_parts(c)
    T = 2 * plan.T
    sizes = _chunk_sizes(T)

    def run(i):
        count = sizes[i]
        w = bs.n_words(count)
        words = _rng.random_words(seed, "pathsum/iqp", i, (2, c.width, w))
        neg = _iqp_sign_plane(signs, words[0], z) ^ _iqp_sign_plane(signs, words[1], z)
        mask = bs.tail_mask(count)
        if not rz:
            return float(bs.popcount(~neg & mask) - bs.popcount(neg & mask)), 0.0
        pm = 1.0 - 2.0 * bs.unpack(neg[None, :], count)[:, 0]
        dphi = _iqp_angles(rz, bs.unpack(words[0], count)) - _iqp_angles(rz, bs.unpack(words[1], count))
        return float(np.sum(pm * np.cos(dphi))), float(np.sum(pm * np.sin(dphi)))

    parts = _map_chunks(run, len(sizes), threads)
    re = math.fsum(p[0] for p in parts)
    im = math.fsum(p[1] for p in parts)
    return ProbEstimate(re / T, plan.epsilon, 1 - plan.delta, T, seed, imag=im / T)


# --------------------------------------------------------------------------
# dispatch

def prob_exact(c: CircuitModel, z, cap: int = DEFAULT_EXACT_CAP) -> float:
    if c.family == "iqp":
        return iqp_prob_exact(c, z, cap)
    return hcmq_prob_exact(c, z, cap)


def prob_estimate(c: CircuitModel, z, plan: ChernoffPlan, seed: int = 0,
                  threads: int | None = None) -> ProbEstimate:
    """Route to the estimator matching the circuit family."""
    if c.family == "iqp":
        return iqp_prob_estimate(c, z, plan, seed, threads)
    if c.family in ("hc1q", "hcmq"):
        return hcmq_prob_estimate(c, z, plan, seed, threads)
    raise CircuitError(f"no classical estimator for {c.family} circuits")
