"""Sample the first k qubits of a 16-qubit HC1Q circuit without simulating it."""
import numpy as np

from fh2lab.circuit import random_hc1q
from fh2lab.marginal import estimate_marginals, normalize, sample_many
from fh2lab.statevector import distribution, marginal

c = random_hc1q(16, 40, seed=19)
k, r = 3, 10

est = estimate_marginals(c, k, r, seed=0)
print(f"eps={est.epsilon:.2e}  T={est.T}")
q = normalize(est)

draws = sample_many(q, 20_000, seed=1)
freq = np.bincount([z.to_int() for z in draws], minlength=1 << k) / len(draws)

# the dense simulator is only here to check the answer
truth = marginal(distribution(c), c.width, range(1, k + 1))
for z, qz, f, t in zip(q.table, q.vector(), freq, truth):
    print(f"{z}: q={qz:.4f}  sampled={f:.4f}  exact={t:.4f}")
print("L1(q, exact) =", np.abs(q.vector() - truth).sum(), "<= 1/r =", 1 / r)
