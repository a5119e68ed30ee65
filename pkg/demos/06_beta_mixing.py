"""Temperature controls whether the label-class walk mixes or stalls.

A half-lazy Metropolis chain targets pi(x) ~ exp(-beta * c(x)) where
c(x) counts label bits disagreeing with a target.  At beta = 0 every
proposal is accepted and the chain mixes in O(n log n) steps.  At large
beta a frozen string -- one with no label-preserving neighbour -- pins
the walk: every move is uphill and gets rejected.
"""

import numpy as np

from qmoney import beta_chain_mixing, find_frozen_strings, label, make_label_scheme

rng = np.random.default_rng(17)
scheme = make_label_scheme(n=10, s=4, d=2, seed=0)
target = 0b0110
steps = 4000

diag = beta_chain_mixing(scheme, target, beta=0.0, steps=steps, rng=rng)
print(f"beta = 0:  acceptance {diag.acceptance_rate:.2f}, "
      f"TV distance to uniform {diag.tv_distance:.2e} after {steps} steps, "
      f"autocorrelation time {diag.autocorr_time:.1f}")

frozen = find_frozen_strings(scheme)
start = int(frozen[0])
own = label(scheme, start)
diag = beta_chain_mixing(scheme, own, beta=12.0, steps=steps, rng=rng, start=start)
print(f"beta = 12: acceptance {diag.acceptance_rate:.2f}, "
      f"frozen={diag.frozen} "
      f"(started at one of {len(frozen)} frozen strings; no move is ever taken)")

for beta in (0.5, 2.0, 6.0):
    diag = beta_chain_mixing(scheme, target, beta=beta, steps=steps, rng=rng)
    tv = "n/a" if diag.tv_distance is None else f"{diag.tv_distance:.3f}"
    print(f"beta = {beta:>4}: acceptance {diag.acceptance_rate:.2f}, "
          f"TV {tv}, mean energy {diag.mean_energy:.2f}")
