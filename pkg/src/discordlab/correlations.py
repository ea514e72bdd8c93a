"""Entropic correlation measures of bipartite states, in bits.

Discord and classical correlation are optimized over rank-1 measurements
on the measured side (``'B'`` by default). The optimizer searches
orthonormal measurements unless :attr:`OptimizerOptions.povm_mode` is set.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import entr

from . import optimize
from .measure import Povm, measure_side
from .optimize import OptimizerOptions
from .qmat import DimensionError, InvariantError
from .states import DensityOperator, require_bipartite, side_index, swap_sides

PROB_TOL = 1e-9
NEG_EIG_TOL = 1e-9
CLIP = 1e-12
LN2 = np.log(2.0)


def shannon_entropy(p) -> float:
    """``-Σ p_i log2 p_i`` with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size == 0 or np.any(p < -PROB_TOL) or abs(p.sum() - 1.0) > PROB_TOL:
        raise ValueError("not a probability distribution")
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def spectrum_entropy(lam) -> float:
    """Entropy of a density-matrix spectrum, clipping eigensolver dust.

    Eigenvalues below ``-1e-9`` are treated as a PSD violation.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.size and lam.min() < -NEG_EIG_TOL:
        raise InvariantError("positive semidefinite", f"eigenvalue {lam.min():.3e}")
    lam = np.clip(lam, 0.0, 1.0)
    lam = lam[lam > CLIP]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(rho: DensityOperator) -> float:
    return spectrum_entropy(rho.eigenvalues())


def _entropies(rho: DensityOperator) -> tuple[float, float, float]:
    require_bipartite(rho)
    s_ab = von_neumann_entropy(rho)
    s_a = von_neumann_entropy(rho.partial_trace([0]))
    s_b = von_neumann_entropy(rho.partial_trace([1]))
    return s_a, s_b, s_ab


def mutual_information(rho: DensityOperator) -> float:
    s_a, s_b, s_ab = _entropies(rho)
    return s_a + s_b - s_ab


def conditional_entropy(rho: DensityOperator, given: str = "B") -> float:
    """``S(AB) - S(given)``; ``given='B'`` is ``S(A|B)``."""
    require_bipartite(rho)
    return von_neumann_entropy(rho) - von_neumann_entropy(rho.partial_trace([side_index(given)]))


def coherent_information(rho: DensityOperator) -> float:
    """``I(A⟩B) = -S(A|B)``."""
    return -conditional_entropy(rho, "B")


def measured_conditional_entropy(rho: DensityOperator, povm: Povm, side: str = "B") -> float:
    """``Σ_i p_i S(ρ_{unmeasured|i})`` for a measurement on ``side``."""
    ens = measure_side(rho, povm, side)
    return float(
        sum(p * von_neumann_entropy(s) for p, s in zip(ens.probs, ens.states) if s is not None)
    )


def zurek_discord(rho: DensityOperator, povm: Povm, side: str = "B") -> float:
    """Discord for a fixed measurement on ``side``: measured minus quantum
    conditional entropy of the unmeasured side."""
    return measured_conditional_entropy(rho, povm, side) - conditional_entropy(rho, given=side)


# -- optimization -----------------------------------------------------------


def _measured_entropy_objective(rho: DensityOperator, d: int, k: int):
    """Fast objective over Givens parameters for a measurement on B."""
    da, db = rho.dims
    # rows (b, c), columns (a, x): Tr_B[(I ⊗ |w_i⟩⟨w_i|) ρ] is one matmul
    r = rho.mat.reshape(da, db, da, db).transpose(1, 3, 0, 2).reshape(db * db, da * da)

    def objective(x):
        w = optimize.isometry_rows(x, d, k)
        ww = (w[:, :, None] * w.conj()[:, None, :]).reshape(k, db * db)
        m = (ww @ r).reshape(k, da, da)
        lam = np.clip(np.linalg.eigvalsh(m), 0.0, None)
        # entr(x) = -x ln x with entr(0) = 0
        return float((entr(lam).sum() - entr(lam.sum(axis=1)).sum()) / LN2)

    return objective


def measurement_search(fun_factory, d: int, opts: OptimizerOptions):
    """Minimize ``fun_factory(d, k)`` over rank-1 measurements.

    Returns ``(search_result, povm, projective_value)``. In POVM mode the
    projective optimum seeds the POVM search, so the POVM result is never
    worse than the projective one.
    """
    proj_fun = fun_factory(d, d)
    proj_opts = replace(opts, povm_mode=False)
    best = optimize.multistart(proj_fun, optimize.start_points(d, proj_opts), proj_opts)
    povm = optimize.povm_from_params(best.x, d, d)
    projective_value = best.value
    if opts.povm_mode:
        k = opts.outcomes(d)
        fun = fun_factory(d, k)
        starts = [optimize.embed_params(best.x, d, k)] + optimize.start_points(k, opts)
        pbest = optimize.multistart(fun, starts, opts)
        if pbest.value < best.value:
            pbest.trace = best.trace + [(len(best.trace) + i, v) for i, v in pbest.trace]
            best = pbest
            povm = optimize.povm_from_params(best.x, d, k)
    return best, povm, projective_value


def _check_side_dim(rho: DensityOperator, side: str, opts: OptimizerOptions):
    d = rho.dims[side_index(side)]
    if d > opts.max_side_dim:
        raise DimensionError(
            f"measured side has dimension {d}, above the optimizer cap {opts.max_side_dim}"
        )


@dataclass(frozen=True)
class DiscordResult:
    """Optimized discord with the measurement that attains it.

    ``projective_value`` is the best value over orthonormal measurements;
    it differs from ``value`` only in POVM mode.
    """

    value: float
    optimal_measurement: Povm
    optimizer_trace: list
    direction: str
    converged: bool
    classical_correlation: float
    projective_value: float

    @property
    def povm_gap(self) -> float:
        return self.projective_value - self.value


def _optimize(rho: DensityOperator, side: str, opts: OptimizerOptions):
    require_bipartite(rho)
    _check_side_dim(rho, side, opts)
    work = rho if side_index(side) == 1 else swap_sides(rho)
    d = work.dims[1]
    best, povm, proj = measurement_search(
        lambda d_, k_: _measured_entropy_objective(work, d_, k_), d, opts
    )
    return best, povm, proj


def discord(rho: DensityOperator, side: str = "B", opts: OptimizerOptions | None = None) -> DiscordResult:
    """Quantum discord with the measurement on ``side``.

    The returned value is recomputed through :func:`zurek_discord` at the
    optimal measurement, so it is self-consistent with that function.
    """
    opts = opts or OptimizerOptions()
    side = "B" if side_index(side) == 1 else "A"
    best, povm, proj = _optimize(rho, side, opts)
    value = zurek_discord(rho, povm, side)
    cond = conditional_entropy(rho, given=side)
    unmeasured = rho.partial_trace([1 - side_index(side)])
    j = von_neumann_entropy(unmeasured) - (value + cond)
    return DiscordResult(
        value=value,
        optimal_measurement=povm,
        optimizer_trace=best.trace,
        direction=side,
        converged=best.converged,
        classical_correlation=j,
        projective_value=proj - cond,
    )


def classical_correlation(rho: DensityOperator, side: str = "B", opts: OptimizerOptions | None = None) -> float:
    """``J = max_Π [S(unmeasured) - S̃_Π]`` over rank-1 measurements on ``side``."""
    opts = opts or OptimizerOptions()
    _, povm, _ = _optimize(rho, side, opts)
    unmeasured = rho.partial_trace([1 - side_index(side)])
    return von_neumann_entropy(unmeasured) - measured_conditional_entropy(rho, povm, side)


# -- entanglement -----------------------------------------------------------


def concurrence_2q(rho: DensityOperator) -> float:
    """Wootters concurrence of a two-qubit state."""
    if tuple(rho.dims) != (2, 2):
        raise DimensionError(f"concurrence needs dims (2, 2), got {rho.dims}")
    yy = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)
    flipped = yy @ rho.mat.conj() @ yy
    w, v = np.linalg.eigh(rho.mat)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    lam = np.linalg.eigvalsh(sqrt_rho @ flipped @ sqrt_rho)
    lam = np.sqrt(np.clip(lam, 0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
