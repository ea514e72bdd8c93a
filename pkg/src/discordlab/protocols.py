"""Asymptotic resource accounting for FQSW and its children under decoherence.

Every report compares the protocol run on ``ρ_AB`` with the same protocol
run on ``ρ'_AB = (id ⊗ N)(ρ_AB)`` where ``N`` acts on Bob's side only.
Rates are per copy; no finite block coding is simulated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import optimize
from .channels import KrausChannel, apply, measurement_channel
from .correlations import (
    _check_side_dim,
    conditional_entropy,
    measurement_search,
    von_neumann_entropy,
)
from .optimize import OptimizerOptions
from .qmat import DimensionError, InvariantError
from .states import DensityOperator, purify, regroup, require_bipartite

IDENTITY_TOL = 1e-9
PROTOCOLS = ("fqsw", "teleport", "densecode", "distill", "merge")


@dataclass(frozen=True)
class ResourceVector:
    """Per-copy rates: shared ebits, qubits and cbits sent from A to B."""

    ebits: float = 0.0
    qbits_a_to_b: float = 0.0
    cbits_a_to_b: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite([self.ebits, self.qbits_a_to_b, self.cbits_a_to_b])):
            raise InvariantError("finite rates", repr(self))

    def as_dict(self) -> dict:
        return {"ebits": self.ebits, "qbits_a_to_b": self.qbits_a_to_b, "cbits_a_to_b": self.cbits_a_to_b}


@dataclass(frozen=True)
class ProtocolReport:
    protocol: str
    coherent_cost: ResourceVector
    coherent_yield: ResourceVector
    decohered_cost: ResourceVector
    decohered_yield: ResourceVector
    net_gain: float
    net_gain_decohered: float
    loss: float

    def __post_init__(self):
        if abs(self.loss - (self.net_gain - self.net_gain_decohered)) > 1e-12:
            raise InvariantError("loss = net_gain - net_gain_decohered")

    def as_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "coherent": {"cost": self.coherent_cost.as_dict(), "yield": self.coherent_yield.as_dict()},
            "decohered": {"cost": self.decohered_cost.as_dict(), "yield": self.decohered_yield.as_dict()},
            "net_gain": self.net_gain,
            "net_gain_decohered": self.net_gain_decohered,
            "loss": self.loss,
        }


@dataclass(frozen=True)
class _Quantities:
    s_a: float
    s_b: float
    s_ab: float
    i_ab: float
    i_ar: float

    @property
    def cond(self) -> float:
        return self.s_ab - self.s_b


def _quantities(rho: DensityOperator) -> _Quantities:
    require_bipartite(rho)
    s_ab = von_neumann_entropy(rho)
    s_a = von_neumann_entropy(rho.partial_trace([0]))
    s_b = von_neumann_entropy(rho.partial_trace([1]))
    # I(A:R) from an explicit purification rather than the identity S(R)=S(AB)
    psi = purify(rho).density()
    s_r = von_neumann_entropy(psi.partial_trace([2]))
    s_ar = von_neumann_entropy(psi.partial_trace([0, 2]))
    return _Quantities(s_a, s_b, s_ab, s_a + s_b - s_ab, s_a + s_r - s_ar)


def _decohere(rho: DensityOperator, ch: KrausChannel, side: str = "B") -> DensityOperator:
    if side != "B":
        raise ValueError("decoherence is only modelled on Bob's side (B)")
    require_bipartite(rho)
    if ch.input_dim != rho.dims[1]:
        raise DimensionError(f"channel input dim {ch.input_dim} does not match B of dim {rho.dims[1]}")
    return apply(ch, rho, 1)


def fqsw_report(rho: DensityOperator) -> tuple[ResourceVector, ResourceVector, float]:
    """Cost ``½ I(A:R)`` qubits, yield ``½ I(A:B)`` ebits, gain ``-S(A|B)``."""
    q = _quantities(rho)
    gain = 0.5 * q.i_ab - 0.5 * q.i_ar
    if abs(gain + q.cond) > IDENTITY_TOL:
        raise InvariantError("FQSW gain = -S(A|B)", f"{gain} vs {-q.cond}")
    return ResourceVector(qbits_a_to_b=0.5 * q.i_ar), ResourceVector(ebits=0.5 * q.i_ab), gain


def _report(name: str, rho: DensityOperator, ch: KrausChannel, side: str, account) -> ProtocolReport:
    prime = _decohere(rho, ch, side)
    before = _quantities(rho)
    after = _quantities(prime)
    cost, yld, gain = account(before)
    cost_d, yld_d, gain_d = account(after)
    return ProtocolReport(name, cost, yld, cost_d, yld_d, gain, gain_d, gain - gain_d)


def _fqsw_account(q: _Quantities):
    return (
        ResourceVector(qbits_a_to_b=0.5 * q.i_ar),
        ResourceVector(ebits=0.5 * q.i_ab),
        0.5 * q.i_ab - 0.5 * q.i_ar,
    )


def _teleport_account(q: _Quantities):
    # classical communication is free when teleporting unknown states
    return ResourceVector(cbits_a_to_b=q.i_ab), ResourceVector(qbits_a_to_b=-q.cond), -q.cond


def _densecode_account(q: _Quantities):
    return ResourceVector(qbits_a_to_b=q.s_a), ResourceVector(cbits_a_to_b=q.i_ab), q.i_ab


def _distill_account(q: _Quantities):
    return ResourceVector(cbits_a_to_b=q.i_ar), ResourceVector(ebits=-q.cond), -q.cond


def _merge_account(q: _Quantities):
    # negative quantum cost means Alice and Bob end up with -S(A|B) ebits
    return ResourceVector(qbits_a_to_b=q.cond, cbits_a_to_b=q.i_ab), ResourceVector(), -q.cond


def decohered_fqsw_report(rho: DensityOperator, ch: KrausChannel, side: str = "B") -> ProtocolReport:
    """FQSW with and without decoherence on B; loss ``S(A'|B') - S(A|B)``."""
    report = _report("fqsw", rho, ch, side, _fqsw_account)
    if report.loss < -IDENTITY_TOL:
        raise InvariantError("data processing: loss >= 0", f"loss = {report.loss:.3e}")
    return report


def teleportation_report(rho: DensityOperator, ch: KrausChannel, side: str = "B") -> ProtocolReport:
    """Teleported qubits ``I(A⟩B)`` per copy; loss ``I(A⟩B) - I(A'⟩B')``."""
    report = _report("teleport", rho, ch, side, _teleport_account)
    fqsw = decohered_fqsw_report(rho, ch, side)
    if abs(report.loss - fqsw.loss) > 1e-12:
        raise InvariantError("teleportation loss = FQSW loss", f"{report.loss} vs {fqsw.loss}")
    return report


def dense_coding_report(rho: DensityOperator, ch: KrausChannel, side: str = "B") -> ProtocolReport:
    """Classical bits ``I(A:B)`` at qubit cost ``S(A)``; loss ``I(A:B) - I(A':B')``."""
    report = _report("densecode", rho, ch, side, _densecode_account)
    if abs(report.coherent_cost.qbits_a_to_b - report.decohered_cost.qbits_a_to_b) > IDENTITY_TOL:
        raise InvariantError("S(A) = S(A')")
    return report


def distillation_report(rho: DensityOperator, ch: KrausChannel, side: str = "B") -> ProtocolReport:
    """One-way distilled ebits ``I(A⟩B)``; the classical overhead is not counted."""
    return _report("distill", rho, ch, side, _distill_account)


def merging_report(rho: DensityOperator, ch: KrausChannel, side: str = "B") -> ProtocolReport:
    """State merging at quantum cost ``S(A|B)``; the loss is the markup
    ``S(A'|B') - S(A|B)``."""
    return _report("merge", rho, ch, side, _merge_account)


REPORTS = {
    "fqsw": decohered_fqsw_report,
    "teleport": teleportation_report,
    "densecode": dense_coding_report,
    "distill": distillation_report,
    "merge": merging_report,
}


def protocol_report(name: str, rho: DensityOperator, ch: KrausChannel) -> ProtocolReport:
    try:
        fn = REPORTS[name]
    except KeyError:
        raise ValueError(f"unknown protocol {name!r}; choose from {', '.join(PROTOCOLS)}") from None
    return fn(rho, ch)


def conditional_entropy_abc(rho_abc: DensityOperator) -> tuple[float, float]:
    """``(S(A|BC), S(A|B))`` for a tripartite state."""
    if len(rho_abc.dims) != 3:
        raise DimensionError("expected a tripartite state")
    a_bc = regroup(rho_abc, [[0], [1, 2]])
    a_b = rho_abc.partial_trace([0, 1])
    return conditional_entropy(a_bc), conditional_entropy(a_b)


# -- minimum loss over measurement channels --------------------------------


def _loss_objective(rho: DensityOperator, d: int, k: int):
    """FQSW loss after the measurement channel for Givens parameters ``x``.

    Goes through the channel path: build the POVM, its Neumark
    measurement channel, apply it to B and evaluate entropies of ``ρ'``.
    """
    s_cond = conditional_entropy(rho)

    def objective(x):
        povm = optimize.povm_from_params(x, d, k)
        prime = apply(measurement_channel(povm), rho, 1)
        return conditional_entropy(prime) - s_cond

    return objective


@dataclass(frozen=True)
class MinLossResult:
    value: float
    measurement: object
    converged: bool


def min_loss_search(rho: DensityOperator, opts: OptimizerOptions | None = None) -> MinLossResult:
    opts = opts or OptimizerOptions()
    require_bipartite(rho)
    _check_side_dim(rho, "B", opts)
    best, povm, _ = measurement_search(lambda d, k: _loss_objective(rho, d, k), rho.dims[1], opts)
    loss = decohered_fqsw_report(rho, measurement_channel(povm)).loss
    return MinLossResult(loss, povm, best.converged)


def min_loss_over_measurements(rho: DensityOperator, opts: OptimizerOptions | None = None) -> float:
    """Smallest FQSW loss over rank-1 measurement channels on B, in ebits.

    Equal to the discord of ``rho`` measured on B.
    """
    return min_loss_search(rho, opts).value
