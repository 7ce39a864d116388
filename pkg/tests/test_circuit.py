import math

import pytest
from hypothesis import given, settings, strategies as st

from fh2lab.circuit import (CNOT, H, NCX, RZ, TOFFOLI, X, BitString, Gate, ReversibleCircuit,
                            all_bitstrings, apply_classical, apply_inverse, general, hc1q, hcmq,
                            iqp, parse_circuit, random_hadamard_classical, random_hc1q,
                            random_iqp, random_reversible, serialize_circuit)
from fh2lab.errors import CircuitError


# -- BitString ---------------------------------------------------------------

def test_bitstring_position_one_is_most_significant():
    b = BitString.from_str("100")
    assert b.bit(1) == 1 and b.to_int() == 4
    assert BitString.from_int(4, 3) == b
    assert str(b[1:]) == "00"
    assert str(b + BitString.zeros(2)) == "10000"


def test_all_bitstrings_dictionary_order():
    assert [str(b) for b in all_bitstrings(2)] == ["00", "01", "10", "11"]


def test_bitstring_rejects_bad_chars():
    with pytest.raises(ValueError):
        BitString.from_str("012")


# -- gates -------------------------------------------------------------------

def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("cnot", (1, 1))
    with pytest.raises(CircuitError):
        Gate("toffoli", (1, 2))
    with pytest.raises(CircuitError):
        Gate("rz", (1,))


def test_ncx_polarity():
    g = NCX([-1, 2], 3)
    assert g.control_values() == ((1, 0), (2, 1))
    assert str(apply_classical(ReversibleCircuit(3, [g]), "010")) == "011"
    assert str(apply_classical(ReversibleCircuit(3, [g]), "110")) == "110"


# -- parse / serialize ---------------------------------------------------------

def test_parse_empty_hc1q():
    c = parse_circuit("model hc1q\nqubits 2\n")
    assert c.family == "hc1q" and c.width == 2 and c.gates == () and c.fixed == 1


def test_parse_toffoli():
    c = parse_circuit("model hc1q\nqubits 3\ntoffoli 1 2 3\n")
    assert c.gates == (TOFFOLI(1, 2, 3),)


def test_parse_rejects_h_in_hc1q():
    with pytest.raises(CircuitError, match="line 3"):
        parse_circuit("model hc1q\nqubits 3\nh 1\n")


@pytest.mark.parametrize("text", [
    "model hc1q\nqubits 3\nx 4\n",
    "model hc1q\nqubits 3\ncnot 1\n",
    "model hc1q\nqubits three\n",
    "model foo\nqubits 3\n",
    "model hcmq\nqubits 3\n",
    "model hc1q\nqubits 3\nfixed 1\n",
    "qubits 3\n",
    "model iqp\nqubits 2\nrz nan 1\n",
])
def test_parse_errors(text):
    with pytest.raises(CircuitError):
        parse_circuit(text)


def test_parse_ignores_comments():
    c = parse_circuit("# header\nmodel general\n\nqubits 2  # two\nh 1\nch 1 2\n")
    assert serialize_circuit(c) == "model general\nqubits 2\nh 1\nch 1 2\n"


def test_serialize_identity():
    assert serialize_circuit(hc1q(2)) == "model hc1q\nqubits 2\n"


def test_serialize_rz_decimal():
    text = serialize_circuit(iqp(2, [RZ(math.pi / 4, 2)]))
    assert "rz 0.7853981633974483 2" in text.splitlines()


def test_serialize_hcmq_and_ncx():
    c = hcmq(4, 2, [NCX([-1, 2], 4)])
    assert serialize_circuit(c) == "model hcmq\nqubits 4\nfixed 2\nncx -1 +2 4\n"
    assert parse_circuit(serialize_circuit(c)) == c


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(0, 30), st.integers(0, 2**32))
def test_round_trip_random(n, g, seed):
    for c in (hc1q(n + 1, random_reversible(n + 1, g, seed).gates),
              random_iqp(n, g, seed),
              random_hadamard_classical(n, g // 3, g, seed)):
        assert parse_circuit(serialize_circuit(c)) == c


# -- classical evaluation --------------------------------------------------------

def test_apply_classical_examples():
    ident = ReversibleCircuit(3, [])
    tof = ReversibleCircuit(3, [TOFFOLI(1, 2, 3)])
    assert str(apply_classical(ident, "101")) == "101"
    assert str(apply_classical(tof, "110")) == "111"
    assert str(apply_classical(tof, "100")) == "100"
    assert str(apply_inverse(tof, "111")) == "110"


def test_width_mismatch():
    with pytest.raises(ValueError):
        apply_classical(ReversibleCircuit(3, []), "10")


def test_random_8bit_bijection():
    c = random_reversible(8, 50, seed=7)
    images = {apply_classical(c, w) for w in all_bitstrings(8)}
    assert len(images) == 256
    for w in all_bitstrings(8):
        assert apply_inverse(c, apply_classical(c, w)) == w


def test_random_reversible_determinism():
    assert random_reversible(3, 0, 5).gates == ()
    assert random_reversible(6, 20, 11) == random_reversible(6, 20, 11)
    assert random_reversible(6, 20, 11) != random_reversible(6, 20, 12)
    with pytest.raises(ValueError):
        random_reversible(0, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 25), st.integers(0, 2**32))
def test_bijection_and_inverse_property(n, g, seed):
    c = random_reversible(n, g, seed)
    seen = set()
    for w in all_bitstrings(n):
        out = apply_classical(c, w)
        seen.add(out)
        assert apply_inverse(c, out) == w
    assert len(seen) == 1 << n


@given(st.integers(3, 6), st.integers(0, 2**32), st.data())
def test_gates_square_to_identity(n, seed, data):
    g = random_reversible(n, 1, seed).gates[0]
    w = BitString(tuple(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))))
    assert apply_classical(ReversibleCircuit(n, [g, g]), w) == w


# -- models ---------------------------------------------------------------------

def test_family_invariants():
    with pytest.raises(CircuitError):
        hc1q(1)
    with pytest.raises(CircuitError):
        hcmq(3, 3)
    with pytest.raises(CircuitError):
        iqp(2, [X(1)])
    with pytest.raises(CircuitError):
        general(2, [CNOT(1, 3)])
    assert hcmq(5, 2).hadamard_qubits == 3


def test_to_general_and_inverse():
    c = hc1q(3, [X(1)])
    g = c.to_general()
    assert g.gates == (H(1), H(2), X(1), H(1), H(2))
    r = iqp(1, [RZ(0.3, 1)]).inverse()
    assert r.gates[1] == RZ(-0.3, 1)


def test_random_hc1q_is_valid():
    c = random_hc1q(6, 15, 2)
    assert c.family == "hc1q" and len(c.gates) == 15


def test_as_bitstring_from_int():
    import numpy as np
    from fh2lab.circuit import as_bitstring
    assert str(as_bitstring(5, 4)) == "0101"
    assert str(as_bitstring(np.int64(3), 2)) == "11"
    with pytest.raises(ValueError):
        as_bitstring(5)
    with pytest.raises(ValueError):
        as_bitstring(8, 3)
