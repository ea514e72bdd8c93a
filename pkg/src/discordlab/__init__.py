"""Quantum discord and decoherence losses in FQSW-family protocols.

Quick tour::

    >>> from discordlab import bell_state, discord
    >>> round(discord(bell_state(0).density()).value, 6)
    1.0
"""

from .channels import (
    Dilation,
    KrausChannel,
    amplitude_damping,
    apply,
    dephasing,
    depolarizing,
    dilate,
    identity_channel,
    measurement_channel,
    random_channel,
    unitary_channel,
)
from .correlations import (
    DiscordResult,
    classical_correlation,
    coherent_information,
    concurrence_2q,
    conditional_entropy,
    discord,
    measured_conditional_entropy,
    mutual_information,
    shannon_entropy,
    von_neumann_entropy,
    zurek_discord,
)
from .measure import ConditionalEnsemble, Povm, fine_grain, measure_side, neumark, trine
from .optimize import OptimizerOptions
from .protocols import (
    ProtocolReport,
    ResourceVector,
    decohered_fqsw_report,
    dense_coding_report,
    distillation_report,
    fqsw_report,
    merging_report,
    min_loss_over_measurements,
    teleportation_report,
)
from .qmat import ConvergenceError, DimensionError, InvariantError
from .states import (
    DensityOperator,
    PureState,
    bell_state,
    classical_quantum_state,
    purify,
    random_density,
    trace_distance,
    werner,
)

__version__ = "0.1.0"
