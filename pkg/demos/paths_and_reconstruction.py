"""Trace every nondeterministic path of a small circuit and rebuild its state."""
import numpy as np

from fh2lab.circuit import X, general
from fh2lab.postselect import append_hadamard_layer, path_outcomes, reconstruct_state
from fh2lab.statevector import simulate

u = general(2, [X(1)])            # X on qubit 1 of two
up = append_hadamard_layer(u)     # then H on both qubits
print("U' gates:", [(g.kind, g.qubits) for g in up.gates])

# one line per path y: the sign bit s(y) and register z(y)
for out in path_outcomes(up):
    print(f"y={out.y}  s={out.s}  z={out.z}")

psi = reconstruct_state(up)
print("reconstructed:", np.round(psi.amplitudes.real, 6))
print("statevector:  ", np.round(simulate(up).amplitudes.real, 6))
