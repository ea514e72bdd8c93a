"""Multi-start simplex search over rank-1 measurements.

A rank-1 measurement with ``k`` outcomes on a ``d``-dimensional system is
read off the first ``d`` columns of a ``k x k`` unitary: the rows of that
``k x d`` isometry are ``√w_i ⟨u_i|``. With ``k = d`` this is an
orthonormal (projective) measurement. The unitary is a product of Givens
rotations with phases, one (angle, phase) pair per index pair ``i < j``.
Diagonal phases are omitted because they do not change the measurement.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .measure import Povm
from .states import rng

FIXED_ANGLES = (0.0, np.pi / 4, np.pi / 8, 3 * np.pi / 8)
FIXED_PHASES = (0.0, np.pi / 2)
POLISH_STEP = 1e-3


@dataclass(frozen=True)
class OptimizerOptions:
    """Settings shared by every measurement optimization.

    ``restarts`` local searches are run: up to ``fixed_starts`` from fixed
    structured bases, the rest from seeded random unitaries. Each local
    search is a Nelder-Mead run, repeated from its own optimum until one
    repetition improves the objective by less than ``tol``.
    """

    restarts: int = 16
    fixed_starts: int = 8
    seed: int = 42
    tol: float = 1e-9
    max_iter: int = 4000
    max_polish: int = 20
    povm_mode: bool = False
    povm_outcomes: int | None = None
    max_side_dim: int = 4

    def outcomes(self, d: int) -> int:
        if not self.povm_mode:
            return d
        k = 2 * d if self.povm_outcomes is None else self.povm_outcomes
        if not d <= k <= 2 * d:
            raise ValueError(f"POVM mode needs between {d} and {2 * d} outcomes, got {k}")
        return k


def n_params(k: int) -> int:
    return k * (k - 1)


@lru_cache(maxsize=None)
def _pairs(k: int) -> tuple:
    return tuple(combinations(range(k), 2))


def givens_unitary(params: np.ndarray, k: int) -> np.ndarray:
    """Ordered product over pairs ``(i, j)`` (lexicographic) of rotations
    by angle ``params[2p]`` with relative phase ``params[2p + 1]``."""
    # scalar Python arithmetic: numpy call overhead dominates at k <= 8
    cols = [[1.0 + 0j if r == c else 0j for r in range(k)] for c in range(k)]
    values = np.asarray(params, dtype=float).tolist()
    for p, (i, j) in enumerate(_pairs(k)):
        c, s = math.cos(values[2 * p]), math.sin(values[2 * p])
        se = s * cmath.exp(1j * values[2 * p + 1])
        sec = se.conjugate()
        ci, cj = cols[i], cols[j]
        cols[i] = [c * a + se * b for a, b in zip(ci, cj)]
        cols[j] = [c * b - sec * a for a, b in zip(ci, cj)]
    return np.array(cols, dtype=complex).T


def isometry_rows(params: np.ndarray, d: int, k: int) -> np.ndarray:
    """``k x d`` matrix whose rows are ``√w_i ⟨u_i|``."""
    return givens_unitary(params, k)[:, :d]


def povm_from_params(params: np.ndarray, d: int, k: int) -> Povm:
    rows = isometry_rows(params, d, k)
    return Povm.from_vectors(rows.conj())


def embed_params(params: np.ndarray, d: int, k: int) -> np.ndarray:
    """Lift ``d``-dimensional parameters to ``k`` dimensions so that the
    resulting unitary is ``diag(U_d, I)``."""
    out = np.zeros(n_params(k))
    small = {pair: p for p, pair in enumerate(combinations(range(d), 2))}
    for p, pair in enumerate(combinations(range(k), 2)):
        if pair in small:
            q = small[pair]
            out[2 * p : 2 * p + 2] = params[2 * q : 2 * q + 2]
    return out


def start_points(k: int, opts: OptimizerOptions) -> list[np.ndarray]:
    """Fixed structured starts followed by seeded random ones."""
    npar = n_params(k)
    starts = []
    for idx in range(min(opts.fixed_starts, opts.restarts)):
        angle = FIXED_ANGLES[idx % len(FIXED_ANGLES)]
        phase = FIXED_PHASES[(idx // len(FIXED_ANGLES)) % len(FIXED_PHASES)]
        x = np.empty(npar)
        x[0::2] = angle
        x[1::2] = phase
        starts.append(x)
    g = rng(opts.seed)
    while len(starts) < opts.restarts:
        starts.append(g.uniform(-np.pi, np.pi, npar))
    return starts


@dataclass
class SearchResult:
    x: np.ndarray
    value: float
    trace: list = field(default_factory=list)
    converged: bool = True
    restart: int = 0


def _small_simplex(x: np.ndarray, step: float) -> np.ndarray:
    simplex = np.tile(x, (x.size + 1, 1))
    simplex[1:] += step * np.eye(x.size)
    return simplex


def local_search(fun: Callable[[np.ndarray], float], x0: np.ndarray, opts: OptimizerOptions):
    """Nelder-Mead repeated from its own optimum until the gain is below ``tol``.

    Repeats start from a small simplex around the incumbent; near a smooth
    minimum ``xatol = 1e-7`` already pins the value to ~1e-14.
    """
    x = np.asarray(x0, dtype=float)
    best = fun(x)
    converged = False
    for polish in range(opts.max_polish):
        options = {"xatol": 1e-7, "fatol": 1e-13, "maxiter": opts.max_iter, "adaptive": x.size > 4}
        if polish:
            options["initial_simplex"] = _small_simplex(x, POLISH_STEP)
        res = minimize(fun, x, method="Nelder-Mead", options=options)
        gain = best - res.fun
        if res.fun < best:
            x, best = res.x, float(res.fun)
        if gain < opts.tol:
            converged = True
            break
    return x, best, converged


def multistart(
    fun: Callable[[np.ndarray], float], starts: list[np.ndarray], opts: OptimizerOptions
) -> SearchResult:
    """Run :func:`local_search` from each start; keep the lowest value.

    Ties go to the lowest restart index.
    """
    best = None
    trace = []
    all_converged = True
    for idx, x0 in enumerate(starts):
        x, val, ok = local_search(fun, x0, opts)
        trace.append((idx, val))
        all_converged &= ok
        if best is None or val < best.value:
            best = SearchResult(x=x, value=val, restart=idx)
    best.trace = trace
    best.converged = all_converged
    return best

