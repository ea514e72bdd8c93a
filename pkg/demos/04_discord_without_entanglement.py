"""Discord is not entanglement, and it is not symmetric.

A state that is classical on A but holds non-orthogonal states on B has no
entanglement and zero discord when A is measured, but positive discord when
B is measured.
"""

import numpy as np

from discordlab import DensityOperator, OptimizerOptions, classical_quantum_state, concurrence_2q, discord
from discordlab.states import basis_state

plus = DensityOperator((2,), np.full((2, 2), 0.5))
rho = classical_quantum_state([0.5, 0.5], 2, [basis_state(2, 0), plus], classical_side="A")

print(f"concurrence     {concurrence_2q(rho):.6f}")
print(f"D measuring A   {discord(rho, 'A').value:.6f}")
print(f"D measuring B   {discord(rho, 'B').value:.6f}")

# POVM mode: allow four rank-1 outcomes on B and see whether that helps
res = discord(rho, "B", OptimizerOptions(povm_mode=True))
print(f"D over 4-outcome POVMs {res.value:.6f} (gap to projective {res.povm_gap:.2e})")
