"""Turn a verifier circuit into a PDD-Max instance and inspect the gap."""
import numpy as np

from fh2lab import pdd
from fh2lab.circuit import CNOT, H, RZ, general
from fh2lab.statevector import distribution, fidelity, simulate

m, r = 3, 3
for theta in (0.05, 1.5):
    # qubit 1 accepts (reads 0) with probability cos^2(theta)
    v = general(3, [H(1), RZ(theta, 1), H(1), H(2), CNOT(1, 3)])
    inst = pdd.bqp_reduction(v, r, m)
    diff = np.abs(distribution(inst.u1) - distribution(inst.u2))
    print(f"accept={np.cos(theta) ** 2:.4f}  a={inst.a:.4f}  b={inst.b:.4f}  "
          f"|p-q| at 0={diff[0]:.4f}  max|p-q|={diff.max():.4f}")
    print("  two-branch fidelity:", fidelity(simulate(inst.u1), pdd.reduction_branch_state(v, m)))
