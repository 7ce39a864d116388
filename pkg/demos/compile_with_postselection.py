"""Compile an H + classical circuit into an HC1Q circuit plus postselection."""
from fh2lab.circuit import random_hadamard_classical, serialize_circuit
from fh2lab.postselect import compile, postselected_output, serialize_sidecar
from fh2lab.statevector import fidelity, simulate

u = random_hadamard_classical(3, 3, 6, seed=4)
print(serialize_circuit(u))

comp = compile(u)
print(f"h={comp.h}  n={comp.n}  compiled width={comp.width}  outputs={comp.outputs}")
print(serialize_sidecar(comp))

state, p = postselected_output(comp)
print("postselection succeeds with p =", p, "= 2^-%d" % (comp.h + comp.n + 2))
print("fidelity with U|0^n>:", fidelity(state, simulate(u)))
