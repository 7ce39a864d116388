"""Merlin-Arthur verification of PDD-Max with a classical Arthur."""
from fh2lab import pdd
from fh2lab.circuit import X, hc1q, random_hc1q

a, b, k = 0.9, 0.1, 5
print("alpha =", pdd.completeness_bound(a, k), " beta =", pdd.soundness_bound(k))

yes = pdd.make_instance(hc1q(4), hc1q(4, [X(4)]), a, b)
c = random_hc1q(4, 10, seed=2)
no = pdd.make_instance(c, c, a, b)

out = pdd.run_ma(yes, k, seed=0)
print("witness", out.z, "p~", out.p_estimate.value, "q~", out.q_estimate.value,
      "accepted", out.accepted, "T", out.transcript["T"])

for name, inst in (("YES", yes), ("NO", no)):
    ma = sum(pdd.run_ma(inst, k, s).accepted for s in range(200)) / 200
    dec = sum(pdd.bqp_decider(inst, k, s).accepted for s in range(200)) / 200
    print(f"{name}: MA acceptance {ma:.3f}, measurement decider {dec:.3f}")
