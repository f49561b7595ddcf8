"""The 0-1 loss and its closed-form proximal operator.

The prox of u -> lam * step(u) with step size alpha collapses inputs in
(0, sqrt(2*lam*alpha)) to zero, passes everything else through, and is
set-valued exactly at the two boundary points.  The script verifies the
closed form against a brute-force scan of the prox objective.
"""

import numpy as np

from quadsurf import ProxParams, prox_contains, prox_scalar, prox_vector, zero_one_loss

p = ProxParams(alpha=0.5, lam=1.0)
print("threshold sqrt(2*lam*alpha) =", p.threshold)

for z in (-1.0, 0.0, 0.4, 0.999, 1.0, 1.001, 2.0):
    print(f"prox({z:+.3f}) = {prox_scalar(z, p):+.3f}   "
          f"(tie to z: {prox_scalar(z, p, tie_to_zero=False):+.3f})")

# brute-force check: the returned point minimizes lam*step(u) + (u-z)^2/(2a)
rng = np.random.default_rng(0)
worst = 0.0
for z in rng.uniform(-4, 4, size=1000):
    u = prox_scalar(z, p)
    grid = np.linspace(z - 3, z + 3, 60001)
    objective = p.lam * (grid > 0) + (grid - z) ** 2 / (2 * p.alpha)
    mine = p.lam * zero_one_loss(u) + (u - z) ** 2 / (2 * p.alpha)
    worst = max(worst, mine - objective.min())
print("\nworst objective gap vs 60001-point scan:", worst)

# the boundary is genuinely set-valued: both 0 and z are admitted there
print("\nmembership at the boundary:",
      prox_contains(0.0, p.threshold, p), prox_contains(p.threshold, p.threshold, p))
print("interior admits only 0:", prox_contains(0.3, 0.3, p), prox_contains(0.0, 0.3, p))

print("\nvector form:", prox_vector(np.array([0.5, -1.0, 2.0]), p))
