"""Why random Pauli tables still admit forgeries: the sign-matrix bound.

Write B_jk = +1 if table entries j and k commute and -1 otherwise.  For
random entries, B behaves like a Rademacher matrix and its top eigenvalue
stays O(sqrt m) rather than the m that full commuting structure would
give.  H = (1/m)(B-ish quadratic form) then keeps Tr[H^2]/2^n = 1/m, and
Markov-style counting forces a constant eigenvalue fraction above
1/(2 sqrt m) -- exactly the part the small-epsilon forger postselects.
"""

import numpy as np

from qmoney import max_eigenvalue_check, random_pauli

rng = np.random.default_rng(11)
n, m = 64, 1000
bound = 10 * np.sqrt(m)

print(f"m = {m} random {n}-qubit Paulis per trial; bound 10*sqrt(m) = {bound:.1f}\n")
worst = 0.0
for trial in range(5):
    ops = [random_pauli(n, rng, allow_identity=False) for _ in range(m)]
    lam = max_eigenvalue_check(ops)
    worst = max(worst, lam)
    print(f"trial {trial}: lambda_max(B) = {lam:7.2f}")

print(f"\nworst case {worst:.2f} <= {bound:.1f}: "
      f"{'holds' if worst <= bound else 'VIOLATED'}")
print("(a fully commuting table would reach lambda_max = m - 1 = "
      f"{m - 1})")
