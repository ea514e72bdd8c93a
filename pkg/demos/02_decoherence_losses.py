"""How much does decoherence on Bob's side cost each protocol?

The loss is the drop in net gain between running a protocol on ρ_AB and on
(id ⊗ N)(ρ_AB). For teleportation, merging, dense coding and FQSW it is the
same number, S(A'|B') - S(A|B).
"""

from discordlab import channels, protocols, states, werner
from discordlab.measure import Povm

rho = werner(0.8)

noise = {
    "identity": channels.identity_channel(2),
    "random unitary": channels.unitary_channel(states.random_unitary(2, seed=3)),
    "dephasing 0.5": channels.dephasing(0.5),
    "depolarizing 0.3": channels.depolarizing(2, 0.3),
    "amplitude damping 0.4": channels.amplitude_damping(0.4),
    "measure Z": channels.measurement_channel(Povm.computational(2)),
}

header = "".join(f"{name:>11}" for name in protocols.PROTOCOLS)
print(f"{'channel on B':<24}{header}")
for label, ch in noise.items():
    losses = [protocols.protocol_report(name, rho, ch).loss for name in protocols.PROTOCOLS]
    print(f"{label:<24}" + "".join(f"{x:11.6f}" for x in losses))

# every row is constant, and a unitary on B loses nothing
