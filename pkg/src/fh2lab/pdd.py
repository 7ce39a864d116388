"""PDD-Max: is some outcome much likelier under one circuit than the other?

YES instances have a z with ``|p_z - q_z| >= a``; NO instances have
``|p_z - q_z| <= b`` for every z.  This module provides

* the Merlin-Arthur protocol, where an honest (simulated) quantum Merlin
  sends one measured outcome z and a classical Arthur estimates p_z and q_z
  from path sums;
* the measurement-based BQP decider, which estimates both probabilities by
  counting shots (shots are drawn from a dense statevector here);
* the reduction from a BQP acceptance problem to a PDD-Max instance.

Both deciders estimate to (a-b)/8 with ``T = ceil(128 k / (a-b)^2)`` and
accept iff ``|p~ - q~| >= a - (a-b)/4``.  Honest completeness is at least
``(a/2)(1 - 2e^-k)^2`` and soundness error at most ``4e^-k - 4e^-2k``.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from . import rng as _rng
from .circuit import (BitString, CNOT, CH, CircuitModel, H, as_bitstring,
                      general, read_circuit)
from .errors import CircuitError
from .pathsum import ProbEstimate, prob_estimate, protocol_plan
from .statevector import (DEFAULT_MAX_WIDTH, StateVector, sample_measurement, sample_measurements,
                          simulate)

ESTIMABLE = ("hc1q", "hcmq", "iqp")


@dataclass(frozen=True)
class PDDMaxInstance:
    u1: CircuitModel
    u2: CircuitModel
    a: float
    b: float

    @property
    def width(self) -> int:
        return self.u1.width

    @property
    def families(self) -> tuple[str, str]:
        return self.u1.family, self.u2.family

    @property
    def threshold(self) -> float:
        return acceptance_threshold(self.a, self.b)


@dataclass
class MAOutcome:
    accepted: bool
    z: str
    p_estimate: ProbEstimate
    q_estimate: ProbEstimate
    threshold: float
    transcript: dict = field(default_factory=dict)

    @property
    def distance(self) -> float:
        return abs(self.p_estimate.value - self.q_estimate.value)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "z": self.z,
            "p_estimate": asdict(self.p_estimate),
            "q_estimate": asdict(self.q_estimate),
            "distance": self.distance,
            "threshold": self.threshold,
            "transcript": self.transcript,
        }


def acceptance_threshold(a: float, b: float) -> float:
    return a - (a - b) / 4


def completeness_bound(a: float, k: float) -> float:
    """alpha = (a/2)(1 - 2e^-k)^2."""
    return a / 2 * (1 - 2 * math.exp(-k)) ** 2


def soundness_bound(k: float) -> float:
    """beta = 4e^-k - 4e^-2k = 1 - (1 - 2e^-k)^2."""
    return 4 * math.exp(-k) - 4 * math.exp(-2 * k)


def make_instance(u1: CircuitModel, u2: CircuitModel, a: float, b: float,
                  min_gap: float = 0.0) -> PDDMaxInstance:
    if u1.width != u2.width:
        raise CircuitError(f"circuit widths differ: {u1.width} vs {u2.width}")
    if not 0 <= b < a <= 1:
        raise ValueError(f"need 0 <= b < a <= 1, got a={a}, b={b}")
    if a - b < min_gap:
        raise ValueError(f"gap a-b={a - b} is below the required {min_gap}")
    return PDDMaxInstance(u1, u2, float(a), float(b))


# --------------------------------------------------------------------------
# Merlin and Arthur

@lru_cache(maxsize=64)
def _state(c: CircuitModel, max_width: int):
    return simulate(c, max_width=max_width)


def honest_merlin_draw(inst: PDDMaxInstance, seed: int,
                       max_width: int = DEFAULT_MAX_WIDTH) -> tuple[int, BitString]:
    """Flip a fair coin s and measure U_{s+1}|0^N>; returns ``(s, z)``."""
    s = int(_rng.stream(seed, "merlin/coin").integers(2))
    circuit = inst.u1 if s == 0 else inst.u2
    z = sample_measurement(_state(circuit, max_width), _rng.derive_seed(seed, "merlin/measure"))
    return s, z


def honest_merlin(inst: PDDMaxInstance, seed: int, max_width: int = DEFAULT_MAX_WIDTH) -> BitString:
    return honest_merlin_draw(inst, seed, max_width)[1]


def arthur_verify(inst: PDDMaxInstance, z, k: int, seed: int = 0,
                  threads: int | None = None) -> MAOutcome:
    """Classical verification of a claimed witness z.

    Only path-sum estimators are used; general circuits are refused.
    """
    for c in (inst.u1, inst.u2):
        if c.family not in ESTIMABLE:
            raise CircuitError(f"Arthur cannot estimate {c.family} circuits classically")
    z = as_bitstring(z, inst.width)
    plan = protocol_plan(inst.a, inst.b, k)
    seeds = {"p": _rng.derive_seed(seed, "arthur/p"), "q": _rng.derive_seed(seed, "arthur/q")}
    p = prob_estimate(inst.u1, z, plan, seeds["p"], threads)
    q = prob_estimate(inst.u2, z, plan, seeds["q"], threads)
    thr = inst.threshold
    return MAOutcome(
        accepted=abs(p.value - q.value) >= thr,
        z=str(z),
        p_estimate=p,
        q_estimate=q,
        threshold=thr,
        transcript={"mode": "merlin-arthur", "k": k, "T": plan.T, "epsilon": plan.epsilon,
                    "seed": seed, "estimator_seeds": seeds,
                    "families": list(inst.families), "a": inst.a, "b": inst.b},
    )


def run_ma(inst: PDDMaxInstance, k: int, seed: int = 0, threads: int | None = None,
           max_width: int = DEFAULT_MAX_WIDTH) -> MAOutcome:
    """Honest Merlin followed by Arthur's check."""
    merlin_seed = _rng.derive_seed(seed, "ma/merlin")
    s, z = honest_merlin_draw(inst, merlin_seed, max_width)
    out = arthur_verify(inst, z, k, _rng.derive_seed(seed, "ma/arthur"), threads)
    out.transcript.update({"seed": seed, "merlin_seed": merlin_seed, "merlin_coin": s})
    return out


def adversarial_witness(inst: PDDMaxInstance, max_width: int = DEFAULT_MAX_WIDTH) -> BitString:
    """The z maximizing the true ``|p_z - q_z|`` (exhaustive, oracle-assisted)."""
    diff = np.abs(_state(inst.u1, max_width).probabilities() - _state(inst.u2, max_width).probabilities())
    return BitString.from_int(int(np.argmax(diff)), inst.width)


# --------------------------------------------------------------------------
# BQP decider

def bqp_decider(inst: PDDMaxInstance, k: int, seed: int = 0,
                max_width: int = DEFAULT_MAX_WIDTH) -> MAOutcome:
    """Candidate z from one measurement of a random circuit, then T shots of
    each circuit; ``X_i = 1`` when a shot reproduces z."""
    plan = protocol_plan(inst.a, inst.b, k)
    s, z = honest_merlin_draw(inst, _rng.derive_seed(seed, "bqp/candidate"), max_width)
    target = z.to_int()
    estimates = []
    for label, c in (("p", inst.u1), ("q", inst.u2)):
        shot_seed = _rng.derive_seed(seed, f"bqp/shots/{label}")
        shots = sample_measurements(_state(c, max_width), plan.T, shot_seed)
        hits = int(np.count_nonzero(shots == target))
        estimates.append(ProbEstimate(hits / plan.T, plan.epsilon, 1 - plan.delta, plan.T, shot_seed))
    p, q = estimates
    thr = inst.threshold
    return MAOutcome(
        accepted=abs(p.value - q.value) >= thr,
        z=str(z), p_estimate=p, q_estimate=q, threshold=thr,
        transcript={"mode": "bqp-decider", "k": k, "T": plan.T, "epsilon": plan.epsilon,
                    "seed": seed, "coin": s, "a": inst.a, "b": inst.b,
                    "sampling": "measurement shots drawn from dense statevector simulation"},
    )


# --------------------------------------------------------------------------
# reduction from BQP

def reduction_thresholds(n: int, m: int, r: int) -> tuple[float, float]:
    total = n + m + 1
    a = (1 - 2.0**-r) ** 2 - 2.0**-total
    b = max(2.0**-m, 2.0**-r) + 2.0**-total
    return a, b


def bqp_reduction(v: CircuitModel, r: int, m: int) -> PDDMaxInstance:
    """PDD-Max instance whose answer is whether v accepts (first qubit reads 0).

    Layout of U1: qubit 1 is the flag, qubits 2..m+1 the ancillas and
    qubits m+2..m+n+1 the register.  U1 runs v on the register, copies the
    register's first qubit onto the flag, applies a flag-controlled H to each
    ancilla and undoes v.  U2 is H on every qubit.
    """
    if m < 1 or r < 1:
        raise ValueError("m and r must be at least 1")
    n = v.width
    a, b = reduction_thresholds(n, m, r)
    if not a > b:
        raise ValueError(f"(n={n}, m={m}, r={r}) gives a={a} <= b={b}")
    vg = v.to_general()
    shift = {q: q + m + 1 for q in range(1, n + 1)}
    forward = [g.relabel(shift) for g in vg.gates]
    backward = [g.relabel(shift) for g in vg.inverse().gates]
    middle = [CNOT(m + 2, 1)] + [CH(1, 1 + j) for j in range(1, m + 1)]
    total = n + m + 1
    u1 = general(total, forward + middle + backward)
    u2 = general(total, [H(q) for q in range(1, total + 1)])
    return make_instance(u1, u2, a, b)


def reduction_branch_state(v: CircuitModel, m: int,
                           max_width: int = DEFAULT_MAX_WIDTH) -> StateVector:
    """``|0>|0^m> V^dag P0 V|0> + |1>|+^m> V^dag P1 V|0>`` by dense simulation,
    where P_b projects the register's first qubit onto b."""
    n = v.width
    psi = simulate(v, max_width=max_width).amplitudes.reshape(2, -1)
    inv = v.inverse()
    parts = []
    for b in (0, 1):
        proj = np.zeros_like(psi)
        proj[b] = psi[b]
        parts.append(simulate(inv, StateVector(n, proj.reshape(-1)), max_width).amplitudes)
    zeros = np.zeros(1 << m)
    zeros[0] = 1.0
    plus = np.full(1 << m, 2.0 ** (-m / 2))
    out = np.concatenate([np.kron(zeros, parts[0]), np.kron(plus, parts[1])])
    return StateVector(n + m + 1, out)


# --------------------------------------------------------------------------
# instance files

def load_instance(path) -> PDDMaxInstance:
    """Read ``{"u1": path, "u2": path, "a": .., "b": ..}``; circuit paths are
    relative to the instance file."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    missing = {"u1", "u2", "a", "b"} - set(doc)
    if missing:
        raise ValueError(f"instance file lacks {sorted(missing)}")
    base = os.path.dirname(os.path.abspath(path))
    u1 = read_circuit(os.path.join(base, doc["u1"]))
    u2 = read_circuit(os.path.join(base, doc["u2"]))
    return make_instance(u1, u2, float(doc["a"]), float(doc["b"]))


def instance_document(u1_path: str, u2_path: str, a: float, b: float) -> dict:
    return {"u1": u1_path, "u2": u2_path, "a": a, "b": b}
