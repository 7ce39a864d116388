"""Exact and sampled output probabilities of HC1Q and IQP circuits."""
import numpy as np

from fh2lab.circuit import TOFFOLI, all_bitstrings, hc1q, random_iqp
from fh2lab.pathsum import chernoff_T, prob_estimate, prob_exact
from fh2lab.statevector import distribution

c = hc1q(3, [TOFFOLI(1, 2, 3)])
for z in all_bitstrings(3):
    print(z, prob_exact(c, z))

plan = chernoff_T(0.02, 0.01)
print("samples per estimate:", plan.T)
values = [prob_estimate(c, "000", plan, seed=s).value for s in range(50)]
print("50 estimates of p_000 = 9/16: mean %.4f, max error %.4f"
      % (np.mean(values), np.max(np.abs(np.array(values) - 9 / 16))))

d = random_iqp(5, 12, seed=1)
exact = distribution(d)
z = int(np.argmax(exact))
est = prob_estimate(d, z, plan, seed=3)
print(f"IQP: largest p_z={exact[z]:.5f}, estimate {est.value:.5f} (imag part {est.imag:+.5f})")
