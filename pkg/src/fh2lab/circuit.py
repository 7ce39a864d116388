"""Circuit intermediate representation.

Bit positions are 1-based and position 1 is the leftmost bit everywhere: in
the text format, in ``str(BitString)``, and when a bit string is read as an
integer (position 1 is the most significant bit).

Families
--------
``hc1q``
    H on qubits 1..N-1, a classical reversible circuit C on all N qubits,
    H on qubits 1..N-1 again.  Qubit N starts in |0> and never sees an H.
``hcmq``
    Same, with the last m qubits fixed.
``iqp``
    H on every qubit, a circuit of Z-diagonal gates, H on every qubit.
``general``
    Any mix of classical, Hadamard, controlled-Hadamard and diagonal gates.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import rng as _rng
from .errors import CircuitError

CLASSICAL_KINDS = frozenset({"x", "cnot", "toffoli", "ncx"})
DIAGONAL_KINDS = frozenset({"z", "cz", "ccz", "rz"})
HADAMARD_KINDS = frozenset({"h", "ch"})

_ARITY = {"x": 1, "cnot": 2, "toffoli": 3, "z": 1, "cz": 2, "ccz": 3, "rz": 1, "h": 1, "ch": 2}

FAMILIES = ("hc1q", "hcmq", "iqp", "general")

_ALLOWED = {
    "hc1q": CLASSICAL_KINDS,
    "hcmq": CLASSICAL_KINDS,
    "iqp": DIAGONAL_KINDS,
    "general": CLASSICAL_KINDS | DIAGONAL_KINDS | HADAMARD_KINDS,
}


# --------------------------------------------------------------------------
# bit strings

@dataclass(frozen=True)
class BitString:
    """Fixed-width bit sequence.

    Python indexing (``b[0]``) is 0-based; :meth:`bit` uses the 1-based
    positions of the circuit format.
    """

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        text = text.strip()
        if text and set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitString":
        if not 0 <= value < (1 << width):
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(tuple((value >> (width - 1 - i)) & 1 for i in range(width)))

    @classmethod
    def zeros(cls, width: int) -> "BitString":
        return cls((0,) * width)

    @property
    def width(self) -> int:
        return len(self.bits)

    def bit(self, position: int) -> int:
        if not 1 <= position <= self.width:
            raise IndexError(f"position {position} outside 1..{self.width}")
        return self.bits[position - 1]

    def to_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return BitString(self.bits[item])
        return self.bits[item]

    def __add__(self, other: "BitString") -> "BitString":
        return BitString(self.bits + as_bitstring(other).bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def as_bitstring(value, width: int | None = None) -> BitString:
    """Coerce a ``BitString``, ``"0101"`` string, 0/1 sequence or, when
    ``width`` is given, a non-negative integer."""
    if isinstance(value, BitString):
        b = value
    elif isinstance(value, numbers.Integral) and not isinstance(value, bool):
        if width is None:
            raise ValueError("an integer needs an explicit width")
        if not 0 <= value < 1 << width:
            raise ValueError(f"{value} does not fit in {width} bits")
        b = BitString.from_int(int(value), width)
    elif isinstance(value, str):
        b = BitString.from_str(value)
    else:
        b = BitString(tuple(value))
    if width is not None and b.width != width:
        raise ValueError(f"bit string {b} has width {b.width}, expected {width}")
    return b


def all_bitstrings(width: int) -> Iterator[BitString]:
    """All strings of the given width in dictionary order."""
    for v in range(1 << width):
        yield BitString.from_int(v, width)


# --------------------------------------------------------------------------
# gates

@dataclass(frozen=True)
class Gate:
    """One gate.  For controlled gates ``qubits`` lists the controls first and
    the target last; ``polarity`` (NCX only) marks each control as positive
    (fires on 1) or negative (fires on 0)."""

    kind: str
    qubits: tuple[int, ...]
    polarity: tuple[bool, ...] = ()
    theta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "polarity", tuple(bool(p) for p in self.polarity))
        kind = self.kind
        if kind == "ncx":
            if len(self.qubits) < 1:
                raise CircuitError("ncx needs a target")
            if len(self.polarity) != len(self.qubits) - 1:
                raise CircuitError("ncx needs one polarity per control")
        elif kind in _ARITY:
            if len(self.qubits) != _ARITY[kind]:
                raise CircuitError(f"{kind} acts on {_ARITY[kind]} qubit(s), got {len(self.qubits)}")
            if self.polarity:
                raise CircuitError(f"{kind} takes no polarity")
        else:
            raise CircuitError(f"unknown gate kind {kind!r}")
        if kind == "rz":
            if self.theta is None or not math.isfinite(self.theta):
                raise CircuitError("rz needs a finite angle")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise CircuitError(f"{kind} takes no angle")
        if any(q < 1 for q in self.qubits):
            raise CircuitError(f"positions are 1-based, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{kind} positions must be distinct, got {self.qubits}")

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def controls(self) -> tuple[int, ...]:
        if self.kind in ("cnot", "toffoli", "ncx", "ch"):
            return self.qubits[:-1]
        return ()

    def control_values(self) -> tuple[tuple[int, int], ...]:
        """``(position, required bit)`` for each control."""
        if self.kind == "ncx":
            return tuple((q, int(p)) for q, p in zip(self.qubits[:-1], self.polarity))
        return tuple((q, 1) for q in self.controls)

    @property
    def is_classical(self) -> bool:
        return self.kind in CLASSICAL_KINDS

    @property
    def is_diagonal(self) -> bool:
        return self.kind in DIAGONAL_KINDS

    def inverse(self) -> "Gate":
        if self.kind == "rz":
            return Gate("rz", self.qubits, theta=-self.theta)
        return self

    def relabel(self, mapping) -> "Gate":
        """The same gate with every position ``q`` replaced by ``mapping[q]``."""
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.polarity, self.theta)


def X(q: int) -> Gate:
    return Gate("x", (q,))


def CNOT(c: int, t: int) -> Gate:
    return Gate("cnot", (c, t))


def TOFFOLI(c1: int, c2: int, t: int) -> Gate:
    return Gate("toffoli", (c1, c2, t))


def NCX(controls: Sequence[int], t: int) -> Gate:
    """Multi-controlled X; a negative control ``-c`` fires when bit c is 0."""
    if any(c == 0 for c in controls):
        raise CircuitError("ncx control positions are 1-based")
    return Gate("ncx", tuple(abs(c) for c in controls) + (t,), tuple(c > 0 for c in controls))


def Z(q: int) -> Gate:
    return Gate("z", (q,))


def CZ(a: int, b: int) -> Gate:
    return Gate("cz", (a, b))


def CCZ(a: int, b: int, c: int) -> Gate:
    return Gate("ccz", (a, b, c))


def RZ(theta: float, q: int) -> Gate:
    """``exp(i*theta*Z)`` = diag(e^{i theta}, e^{-i theta})."""
    return Gate("rz", (q,), theta=theta)


def H(q: int) -> Gate:
    return Gate("h", (q,))


def CH(c: int, t: int) -> Gate:
    return Gate("ch", (c, t))


def _check_positions(gates: Iterable[Gate], width: int):
    for g in gates:
        if max(g.qubits) > width:
            raise CircuitError(f"{g.kind} position {max(g.qubits)} outside 1..{width}")


# --------------------------------------------------------------------------
# circuits

@dataclass(frozen=True)
class ReversibleCircuit:
    """A classical reversible circuit: a permutation of {0,1}^width."""

    width: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.width < 1:
            raise CircuitError("width must be positive")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if not g.is_classical:
                raise CircuitError(f"{g.kind} is not a classical reversible gate")
        _check_positions(self.gates, self.width)

    def inverse(self) -> "ReversibleCircuit":
        # every classical gate is self-inverse
        return ReversibleCircuit(self.width, self.gates[::-1])


@dataclass(frozen=True)
class CircuitModel:
    family: str
    width: int
    gates: tuple[Gate, ...] = ()
    fixed: int = field(default=0)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise CircuitError(f"unknown model {self.family!r}")
        if self.width < 1:
            raise CircuitError("width must be positive")
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.family == "hc1q":
            if self.fixed not in (0, 1):
                raise CircuitError("hc1q has exactly one fixed qubit")
            object.__setattr__(self, "fixed", 1)
            if self.width < 2:
                raise CircuitError("hc1q needs at least two qubits")
        elif self.family == "hcmq":
            if not 1 <= self.fixed < self.width:
                raise CircuitError(f"hcmq needs 1 <= m < N, got m={self.fixed}, N={self.width}")
        elif self.fixed:
            raise CircuitError(f"{self.family} has no fixed qubits")
        allowed = _ALLOWED[self.family]
        for g in self.gates:
            if g.kind not in allowed:
                raise CircuitError(f"{g.kind} gate not allowed in {self.family} model")
        _check_positions(self.gates, self.width)

    @property
    def hadamard_qubits(self) -> int:
        """Number of qubits carrying the Hadamard layers (N - m)."""
        return self.width - self.fixed

    def core(self) -> ReversibleCircuit:
        """The classical circuit C of an hc1q/hcmq model."""
        if self.family not in ("hc1q", "hcmq"):
            raise CircuitError(f"{self.family} model has no classical core")
        return ReversibleCircuit(self.width, self.gates)

    def hadamard_count(self) -> int:
        return sum(g.kind in HADAMARD_KINDS for g in self.gates)

    def to_general(self) -> "CircuitModel":
        """Expand the family's Hadamard layers into an explicit gate list."""
        if self.family == "general":
            return self
        layer = tuple(H(q) for q in range(1, self.hadamard_qubits + 1))
        return CircuitModel("general", self.width, layer + self.gates + layer)

    def inverse(self) -> "CircuitModel":
        """Gate-wise inverse of a general circuit."""
        if self.family != "general":
            return self.to_general().inverse()
        return CircuitModel("general", self.width, tuple(g.inverse() for g in reversed(self.gates)))


def hc1q(width: int, gates: Iterable[Gate] = ()) -> CircuitModel:
    return CircuitModel("hc1q", width, tuple(gates), 1)


def hcmq(width: int, m: int, gates: Iterable[Gate] = ()) -> CircuitModel:
    return CircuitModel("hcmq", width, tuple(gates), m)


def iqp(width: int, gates: Iterable[Gate] = ()) -> CircuitModel:
    return CircuitModel("iqp", width, tuple(gates))


def general(width: int, gates: Iterable[Gate] = ()) -> CircuitModel:
    return CircuitModel("general", width, tuple(gates))


# --------------------------------------------------------------------------
# classical evaluation (one bit string at a time; see bitslice for batches)

def _apply_gate_bits(g: Gate, bits: list[int]):
    if g.kind == "x":
        bits[g.target - 1] ^= 1
        return
    if all(bits[q - 1] == v for q, v in g.control_values()):
        bits[g.target - 1] ^= 1


def _as_reversible(c) -> ReversibleCircuit:
    if isinstance(c, ReversibleCircuit):
        return c
    return c.core()


def apply_classical(c, w) -> BitString:
    """C(w) for a reversible circuit (or the core of an hc1q/hcmq model)."""
    c = _as_reversible(c)
    w = as_bitstring(w)
    if w.width != c.width:
        raise ValueError(f"input width {w.width} does not match circuit width {c.width}")
    bits = list(w.bits)
    for g in c.gates:
        _apply_gate_bits(g, bits)
    return BitString(tuple(bits))


def apply_inverse(c, w) -> BitString:
    """C^{-1}(w): the gate list run backwards."""
    return apply_classical(_as_reversible(c).inverse(), w)


# --------------------------------------------------------------------------
# text format

def _render_gate(g: Gate) -> str:
    if g.kind == "ncx":
        ctrls = [("+" if p else "-") + str(q) for q, p in zip(g.qubits[:-1], g.polarity)]
        return " ".join(["ncx", *ctrls, str(g.target)])
    if g.kind == "rz":
        return f"rz {g.theta!r} {g.qubits[0]}"
    return g.kind + " " + " ".join(map(str, g.qubits))


def serialize_circuit(c: CircuitModel) -> str:
    lines = [f"model {c.family}", f"qubits {c.width}"]
    if c.family == "hcmq":
        lines.append(f"fixed {c.fixed}")
    lines.extend(_render_gate(g) for g in c.gates)
    return "\n".join(lines) + "\n"


def _int(token: str, lineno: int) -> int:
    try:
        return int(token, 10)
    except ValueError:
        raise CircuitError(f"expected an integer, got {token!r}", lineno) from None


def _parse_gate(tokens: list[str], lineno: int) -> Gate:
    kind, args = tokens[0].lower(), tokens[1:]
    if kind == "rz":
        if len(args) != 2:
            raise CircuitError("usage: rz <theta> <qubit>", lineno)
        try:
            theta = float(args[0])
        except ValueError:
            raise CircuitError(f"bad angle {args[0]!r}", lineno) from None
        return RZ(theta, _int(args[1], lineno))
    if kind == "ncx":
        if not args:
            raise CircuitError("usage: ncx ±c1 ±c2 ... t", lineno)
        ctrls = []
        for tok in args[:-1]:
            if tok[:1] not in "+-" or len(tok) < 2:
                raise CircuitError(f"ncx control needs a sign, got {tok!r}", lineno)
            ctrls.append(_int(tok, lineno))
        return NCX(ctrls, _int(args[-1], lineno))
    if kind not in _ARITY:
        raise CircuitError(f"unknown gate {tokens[0]!r}", lineno)
    return Gate(kind, tuple(_int(a, lineno) for a in args))


def parse_circuit(text: str) -> CircuitModel:
    """Parse the line-based circuit format.  Raises :class:`CircuitError`."""
    family = width = fixed = None
    gates: list[tuple[Gate, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0].lower()
        if head == "model":
            if family is not None or len(tokens) != 2:
                raise CircuitError("expected a single 'model <family>' header", lineno)
            family = tokens[1].lower()
            if family not in FAMILIES:
                raise CircuitError(f"unknown model {tokens[1]!r}", lineno)
        elif head == "qubits":
            if width is not None or len(tokens) != 2:
                raise CircuitError("expected a single 'qubits <N>' header", lineno)
            width = _int(tokens[1], lineno)
            if width < 1:
                raise CircuitError("qubit count must be positive", lineno)
        elif head == "fixed":
            if fixed is not None or len(tokens) != 2:
                raise CircuitError("expected a single 'fixed <m>' header", lineno)
            fixed = _int(tokens[1], lineno)
        else:
            if family is None or width is None:
                raise CircuitError("gate before 'model' and 'qubits' headers", lineno)
            try:
                g = _parse_gate(tokens, lineno)
            except CircuitError as exc:
                if exc.line is None:
                    raise CircuitError(str(exc), lineno) from None
                raise
            if g.kind not in _ALLOWED[family]:
                raise CircuitError(f"{g.kind} gate not allowed in {family} model", lineno)
            if max(g.qubits) > width:
                raise CircuitError(f"position {max(g.qubits)} outside 1..{width}", lineno)
            gates.append((g, lineno))
    if family is None:
        raise CircuitError("missing 'model' header")
    if width is None:
        raise CircuitError("missing 'qubits' header")
    if fixed is not None and family != "hcmq":
        raise CircuitError(f"'fixed' only applies to hcmq, not {family}")
    if family == "hcmq" and fixed is None:
        raise CircuitError("hcmq model needs a 'fixed <m>' header")
    return CircuitModel(family, width, tuple(g for g, _ in gates), fixed or 0)


def read_circuit(path) -> CircuitModel:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def write_circuit(c: CircuitModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_circuit(c))


# --------------------------------------------------------------------------
# random circuits

def _random_classical_gate(gen, n: int, kinds: Sequence[str]) -> Gate:
    kind = kinds[int(gen.integers(len(kinds)))]
    qs = [int(q) + 1 for q in gen.choice(n, size=_ARITY[kind], replace=False)]
    return Gate(kind, tuple(qs))


def _classical_kinds(n: int) -> list[str]:
    return ["x", "cnot", "toffoli"][: min(n, 3)]


def random_reversible(n: int, g: int, seed: int = 0) -> ReversibleCircuit:
    """``g`` gates drawn uniformly from X/CNOT/TOFFOLI (those that fit in n bits)."""
    if n < 1:
        raise ValueError("width must be at least 1")
    gen = _rng.stream(seed, f"random-reversible/{n}/{g}")
    kinds = _classical_kinds(n)
    return ReversibleCircuit(n, tuple(_random_classical_gate(gen, n, kinds) for _ in range(g)))


def random_hc1q(width: int, g: int, seed: int = 0) -> CircuitModel:
    return hc1q(width, random_reversible(width, g, seed).gates)


def random_hcmq(width: int, m: int, g: int, seed: int = 0) -> CircuitModel:
    return hcmq(width, m, random_reversible(width, g, seed).gates)


def random_hadamard_classical(n: int, n_h: int, n_classical: int, seed: int = 0) -> CircuitModel:
    """A general circuit of ``n_h`` Hadamards and ``n_classical`` classical gates
    in random order."""
    gen = _rng.stream(seed, f"random-hc/{n}/{n_h}/{n_classical}")
    kinds = _classical_kinds(n)
    order = gen.permutation(["h"] * n_h + ["c"] * n_classical)
    gates = []
    for tag in order:
        if tag == "h":
            gates.append(H(int(gen.integers(n)) + 1))
        else:
            gates.append(_random_classical_gate(gen, n, kinds))
    return general(n, gates)


def random_iqp(n: int, g: int, seed: int = 0, with_rz: bool = True) -> CircuitModel:
    gen = _rng.stream(seed, f"random-iqp/{n}/{g}")
    kinds = [k for k in ("z", "cz", "ccz") if _ARITY[k] <= n] + (["rz"] if with_rz else [])
    gates = []
    for _ in range(g):
        kind = kinds[int(gen.integers(len(kinds)))]
        if kind == "rz":
            gates.append(RZ(float(gen.uniform(-math.pi, math.pi)), int(gen.integers(n)) + 1))
        else:
            qs = [int(q) + 1 for q in gen.choice(n, size=_ARITY[kind], replace=False)]
            gates.append(Gate(kind, tuple(qs)))
    return iqp(n, gates)


def random_general(n: int, g: int, seed: int = 0) -> CircuitModel:
    """``g`` gates drawn uniformly from every kind that fits in n qubits."""
    gen = _rng.stream(seed, f"random-general/{n}/{g}")
    kinds = sorted(k for k, a in _ARITY.items() if a <= n)
    gates = []
    for _ in range(g):
        kind = kinds[int(gen.integers(len(kinds)))]
        qs = tuple(int(q) + 1 for q in gen.choice(n, size=_ARITY[kind], replace=False))
        theta = float(gen.uniform(-math.pi, math.pi)) if kind == "rz" else None
        gates.append(Gate(kind, qs, theta=theta))
    return general(n, gates)
