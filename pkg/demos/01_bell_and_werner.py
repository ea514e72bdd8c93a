"""Correlations of the Bell state and the Werner family.

Run with ``python demos/01_bell_and_werner.py``.
"""

import numpy as np

from discordlab import (
    bell_state,
    classical_correlation,
    concurrence_2q,
    conditional_entropy,
    discord,
    mutual_information,
    werner,
)

# A maximally entangled pair: two bits of mutual information, split evenly
# between classical correlation and discord.
phi = bell_state(0).density()
print("Bell state")
print(f"  I(A:B)  = {mutual_information(phi):.6f}")
print(f"  S(A|B)  = {conditional_entropy(phi):.6f}")
print(f"  J(A:B)  = {classical_correlation(phi):.6f}")
print(f"  D(A:B)  = {discord(phi).value:.6f}")
print()

# Werner states p|Φ⟩⟨Φ| + (1-p) I/4 are entangled only for p > 1/3,
# yet their discord is positive for every p > 0.
print(f"{'p':>5} {'discord':>10} {'concurrence':>12} {'I(A:B)':>10}")
for p in np.linspace(0, 1, 11):
    rho = werner(p)
    d = max(discord(rho).value, 0.0)  # p = 0 comes back as -1e-16
    print(f"{p:5.2f} {d:10.6f} {concurrence_2q(rho):12.6f} {mutual_information(rho):10.6f}")
