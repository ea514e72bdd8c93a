"""Density operators on multipartite systems and common constructors."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qmat
from .qmat import DimensionError, InvariantError

STATE_TOL = 1e-9
PURE_NORM_TOL = 1e-10
RANK_TOL = 1e-10


def rng(seed: int) -> np.random.Generator:
    """Counter-based generator owned by a single call."""
    return np.random.Generator(np.random.Philox(int(seed)))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A mixed state ``mat`` on subsystems of dimensions ``dims``.

    Construction validates Hermiticity, unit trace and positivity (all at
    tolerance 1e-9) and the global dimension cap.
    """

    dims: tuple
    mat: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        mat = qmat.as_matrix(self.mat, "density matrix")
        if any(d < 1 for d in dims) or not dims:
            raise DimensionError(f"invalid dims {dims}")
        total = int(np.prod(dims))
        if mat.shape != (total, total):
            raise DimensionError(f"matrix shape {mat.shape} inconsistent with dims {dims}")
        cap = qmat.max_dim()
        if total > cap:
            raise DimensionError(f"dimension {total} exceeds cap {cap}")
        if not qmat.is_hermitian(mat, STATE_TOL):
            raise InvariantError("hermitian", "density matrix is not Hermitian within 1e-9")
        tr = np.trace(mat)
        if abs(tr - 1.0) > STATE_TOL:
            raise InvariantError("unit trace", f"trace = {tr.real:.12g}")
        lam_min = qmat.eigvalsh_desc(mat)[-1]
        if lam_min < -STATE_TOL:
            raise InvariantError("positive semidefinite", f"smallest eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", _freeze(0.5 * (mat + qmat.dagger(mat))))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def eigenvalues(self) -> np.ndarray:
        return qmat.eigvalsh_desc(self.mat)

    def partial_trace(self, keep) -> "DensityOperator":
        keep = sorted(set(keep))
        return DensityOperator(
            tuple(self.dims[k] for k in keep), qmat.partial_trace(self.mat, self.dims, keep)
        )

    def marginal(self, side: str) -> "DensityOperator":
        """Reduced state of side ``'A'`` (subsystem 0) or ``'B'`` (subsystem 1)."""
        require_bipartite(self)
        return self.partial_trace([side_index(side)])

    def __repr__(self):
        return f"DensityOperator(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class PureState:
    dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.size != int(np.prod(dims)):
            raise DimensionError(f"{amp.size} amplitudes inconsistent with dims {dims}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > PURE_NORM_TOL:
            raise InvariantError("unit norm", f"norm = {norm:.12g}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", _freeze(amp))

    def density(self) -> DensityOperator:
        return DensityOperator(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self):
        return f"PureState(dims={self.dims})"


def side_index(side: str) -> int:
    if side in ("A", "a", 0):
        return 0
    if side in ("B", "b", 1):
        return 1
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def other_side(side: str) -> str:
    return "B" if side_index(side) == 0 else "A"


def require_bipartite(rho: DensityOperator):
    if len(rho.dims) != 2:
        raise DimensionError(f"expected a bipartite state, got dims {rho.dims}")


def regroup(rho: DensityOperator, groups: Sequence[Sequence[int]]) -> DensityOperator:
    """Permute and merge subsystems: each group becomes one subsystem.

    ``regroup(rho_ABC, [[0], [1, 2]])`` gives the A|BC bipartition.
    Every subsystem must appear in exactly one group.
    """
    order = [int(k) for g in groups for k in g]
    if sorted(order) != list(range(len(rho.dims))):
        raise DimensionError(f"groups {groups} do not partition {len(rho.dims)} subsystems")
    mat = qmat.permute_subsystems(rho.mat, rho.dims, order)
    dims = tuple(int(np.prod([rho.dims[k] for k in g])) for g in groups)
    return DensityOperator(dims, mat)


def swap_sides(rho: DensityOperator) -> DensityOperator:
    require_bipartite(rho)
    return regroup(rho, [[1], [0]])


def product(*states: DensityOperator) -> DensityOperator:
    dims = tuple(d for s in states for d in s.dims)
    return DensityOperator(dims, qmat.tensor(*[s.mat for s in states]))


def basis_state(d: int, i: int) -> DensityOperator:
    m = np.zeros((d, d), dtype=complex)
    m[i, i] = 1.0
    return DensityOperator((d,), m)


def maximally_mixed(dims: Sequence[int]) -> DensityOperator:
    dims = tuple(dims)
    n = int(np.prod(dims))
    return DensityOperator(dims, np.eye(n) / n)


def bell_state(k: int = 0) -> PureState:
    """Bell states ``k = 0..3``: Φ⁺, Φ⁻, Ψ⁺, Ψ⁻."""
    s = 1 / np.sqrt(2)
    table = {
        0: [s, 0, 0, s],
        1: [s, 0, 0, -s],
        2: [0, s, s, 0],
        3: [0, s, -s, 0],
    }
    if k not in table:
        raise ValueError(f"Bell state index must be 0..3, got {k}")
    return PureState((2, 2), table[k])


def werner(p: float) -> DensityOperator:
    """``p |Φ⁺⟩⟨Φ⁺| + (1 - p) I/4``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner parameter must lie in [0, 1], got {p}")
    phi = bell_state(0).density().mat
    return DensityOperator((2, 2), p * phi + (1 - p) * np.eye(4) / 4)


def classical_quantum_state(
    probs: Sequence[float],
    pointer_dim: int,
    conditional_states: Sequence[DensityOperator],
    classical_side: str = "B",
) -> DensityOperator:
    """``Σ p_i ρ_i ⊗ |i⟩⟨i|`` (classical side B) or ``Σ p_i |i⟩⟨i| ⊗ ρ_i`` (side A)."""
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or probs.size == 0:
        raise ValueError("probs must be a non-empty list")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > STATE_TOL:
        raise ValueError("probs must be non-negative and sum to 1")
    if probs.size > pointer_dim:
        raise ValueError(f"{probs.size} outcomes do not fit a pointer of dimension {pointer_dim}")
    if len(conditional_states) != probs.size:
        raise ValueError("need one conditional state per probability")
    dims = {s.dims for s in conditional_states}
    if len(dims) != 1:
        raise DimensionError("conditional states must share dims")
    (qdims,) = dims
    qdim = int(np.prod(qdims))
    side = side_index(classical_side)
    total = np.zeros((qdim * pointer_dim,) * 2, dtype=complex)
    for i, (p, s) in enumerate(zip(probs, conditional_states)):
        pointer = np.zeros((pointer_dim, pointer_dim))
        pointer[i, i] = 1.0
        total += p * (np.kron(s.mat, pointer) if side == 1 else np.kron(pointer, s.mat))
    out_dims = (qdim, pointer_dim) if side == 1 else (pointer_dim, qdim)
    return DensityOperator(out_dims, total)


def random_unitary(d: int, seed: int) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    g = rng(seed)
    z = (g.standard_normal((d, d)) + 1j * g.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_pure(dims: Sequence[int], seed: int) -> PureState:
    dims = tuple(dims)
    n = int(np.prod(dims))
    g = rng(seed)
    v = g.standard_normal(n) + 1j * g.standard_normal(n)
    return PureState(dims, v / np.linalg.norm(v))


def random_density(dims: Sequence[int], rank: int | None = None, seed: int = 0) -> DensityOperator:
    """Induced-measure random state: trace out a ``rank``-dimensional ancilla
    from a Haar-random pure state on system ⊗ ancilla.
    """
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    if rank is None:
        rank = n
    if not 1 <= rank <= n:
        raise ValueError(f"rank must lie in [1, {n}], got {rank}")
    g = rng(seed)
    z = g.standard_normal((n, rank)) + 1j * g.standard_normal((n, rank))
    m = z @ z.conj().T
    return DensityOperator(dims, m / np.trace(m).real)


def purify(rho: DensityOperator) -> PureState:
    """Purification on ``dims + (r,)`` with ``r`` the numerical rank of ``rho``.

    ``|ψ⟩ = Σ_k √λ_k |v_k⟩ ⊗ |k⟩`` over eigenvalues above 1e-10.
    """
    eig = qmat.hermitian_eig(rho.mat)
    mask = eig.eigenvalues > RANK_TOL
    lam = eig.eigenvalues[mask]
    vecs = eig.eigenvectors[:, mask]
    r = lam.size
    psi = (vecs * np.sqrt(lam)).reshape(rho.dim, r)
    psi = psi.reshape(-1)
    psi /= np.linalg.norm(psi)
    return PureState(rho.dims + (r,), psi)


def trace_distance(a: DensityOperator, b: DensityOperator) -> float:
    if a.dims != b.dims:
        raise DimensionError(f"dims differ: {a.dims} vs {b.dims}")
    lam = np.linalg.eigvalsh(a.mat - b.mat)
    return float(0.5 * np.sum(np.abs(lam)))


# -- file format ------------------------------------------------------------


def state_to_json(rho: DensityOperator) -> dict:
    return {"dims": list(rho.dims), "matrix": qmat.matrix_to_json(rho.mat)}


def state_from_json(obj) -> DensityOperator:
    if not isinstance(obj, dict):
        raise ValueError("state: expected a JSON object with 'dims' and 'matrix'")
    for key in ("dims", "matrix"):
        if key not in obj:
            raise ValueError(f"state: missing field '{key}'")
    dims = obj["dims"]
    if (
        not isinstance(dims, list)
        or not dims
        or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims)
    ):
        raise ValueError("dims: expected a non-empty list of positive integers")
    mat = qmat.matrix_from_json(obj["matrix"], "matrix")
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"matrix: not square ({mat.shape[0]}x{mat.shape[1]})")
    if mat.shape[0] != int(np.prod(dims)):
        raise ValueError(f"dims: product {int(np.prod(dims))} does not match matrix size {mat.shape[0]}")
    return DensityOperator(tuple(dims), mat)


def load_state(path) -> DensityOperator:
    with open(path) as fh:
        return state_from_json(json.load(fh))


def save_state(rho: DensityOperator, path):
    with open(path, "w") as fh:
        json.dump(state_to_json(rho), fh)
        fh.write("\n")
