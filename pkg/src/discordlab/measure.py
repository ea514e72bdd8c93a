"""POVMs, rank-1 fine-graining, Neumark extension and conditional ensembles."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import qmat
from .qmat import DimensionError, InvariantError
from .states import DensityOperator, require_bipartite, rng, side_index

POVM_TOL = 1e-9
WEIGHT_CUTOFF = 1e-12
PROB_CUTOFF = 1e-12


def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first nonzero amplitude is real positive."""
    idx = np.flatnonzero(np.abs(v) > 1e-12)
    if idx.size == 0:
        return v
    z = v[idx[0]]
    return v * (abs(z) / z)


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operators on a ``dim``-dimensional space summing to identity."""

    dim: int
    elements: tuple

    def __post_init__(self):
        elems = tuple(qmat.as_matrix(e, "POVM element") for e in self.elements)
        d = int(self.dim)
        if not elems:
            raise InvariantError("non-empty", "POVM has no elements")
        for i, e in enumerate(elems):
            if e.shape != (d, d):
                raise DimensionError(f"POVM element {i} has shape {e.shape}, expected {(d, d)}")
        stack = np.stack(elems)
        herm_err = np.max(np.abs(stack - qmat.dagger(stack)), axis=(1, 2))
        if np.any(herm_err > POVM_TOL):
            raise InvariantError("hermitian elements", f"element {int(np.argmax(herm_err))}")
        stack = 0.5 * (stack + qmat.dagger(stack))
        lam_min = np.linalg.eigvalsh(stack)[:, 0]
        if np.any(lam_min < -POVM_TOL):
            i = int(np.argmin(lam_min))
            raise InvariantError("positive elements", f"element {i} has a negative eigenvalue")
        if not np.allclose(stack.sum(axis=0), np.eye(d), atol=POVM_TOL, rtol=0):
            raise InvariantError("completeness", "POVM elements do not sum to identity")
        stack.setflags(write=False)
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "elements", tuple(stack))

    def __len__(self):
        return len(self.elements)

    def probabilities(self, sigma: np.ndarray) -> np.ndarray:
        """Outcome distribution ``Tr(Π_i σ)`` on a single-system operator."""
        return np.array([np.trace(e @ sigma).real for e in self.elements])

    def is_rank1(self, tol: float = 1e-9) -> bool:
        lam = np.linalg.eigvalsh(np.stack(self.elements))
        return bool(lam.shape[1] < 2 or np.all(lam[:, -2] <= tol))

    @classmethod
    def from_vectors(cls, vectors) -> "Povm":
        """Rank-1 POVM ``{|v_i⟩⟨v_i|}`` from unnormalized vectors."""
        vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
        return cls(vecs[0].size, tuple(np.outer(v, v.conj()) for v in vecs))

    @classmethod
    def projective(cls, basis: np.ndarray) -> "Povm":
        """Projectors onto the columns of a unitary ``basis``."""
        basis = qmat.as_matrix(basis, "basis")
        return cls.from_vectors(basis.T)

    @classmethod
    def computational(cls, d: int) -> "Povm":
        return _computational(d)

    def __repr__(self):
        return f"Povm(dim={self.dim}, outcomes={len(self.elements)})"


@lru_cache(maxsize=None)
def _computational(d: int) -> Povm:
    return Povm.projective(np.eye(d))


def pauli_basis(axis: str) -> np.ndarray:
    s = 1 / np.sqrt(2)
    bases = {
        "Z": np.eye(2),
        "X": np.array([[s, s], [s, -s]]),
        "Y": np.array([[s, s], [1j * s, -1j * s]]),
    }
    return bases[axis.upper()].astype(complex)


def bloch_projective(theta: float, phi: float) -> Povm:
    """Qubit projective measurement along the Bloch direction (theta, phi)."""
    up = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    down = np.array([-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2)])
    return Povm.from_vectors([up, down])


def trine() -> Povm:
    """Three elements ``(2/3)|u_k⟩⟨u_k|`` at 120° on the Bloch equator."""
    vecs = []
    for k in range(3):
        phi = 2 * np.pi * k / 3
        u = np.array([1, np.exp(1j * phi)]) / np.sqrt(2)
        vecs.append(np.sqrt(2 / 3) * u)
    return Povm.from_vectors(vecs)


def random_rank1_povm(d: int, k: int, seed: int) -> Povm:
    """Random ``k``-outcome rank-1 POVM from the rows of a Haar isometry."""
    if k < d:
        raise ValueError("a rank-1 POVM needs at least d outcomes")
    g = rng(seed)
    z = g.standard_normal((k, d)) + 1j * g.standard_normal((k, d))
    q, _ = np.linalg.qr(z)  # k x d with orthonormal columns
    return Povm.from_vectors(q.conj())


@dataclass(frozen=True)
class ConditionalEnsemble:
    """Outcome probabilities and post-measurement states of the unmeasured side.

    ``states[i]`` is ``None`` for outcomes with probability below 1e-12.
    """

    probs: np.ndarray
    states: tuple = field(repr=False)

    def average(self) -> np.ndarray:
        """``Σ p_i ρ_{A|i}``, the unconditioned post-measurement state."""
        terms = [p * s.mat for p, s in zip(self.probs, self.states) if s is not None]
        return np.sum(terms, axis=0)


def measure_side(rho: DensityOperator, povm: Povm, side: str = "B") -> ConditionalEnsemble:
    """Measure one side of a bipartite state and collect the conditional ensemble.

    ``p_i = Tr(Π_i ρ)`` and ``ρ_{A|i} = Tr_B(Π_i ρ)/p_i`` (mirrored when
    measuring A).
    """
    require_bipartite(rho)
    s = side_index(side)
    if povm.dim != rho.dims[s]:
        raise DimensionError(
            f"POVM of dim {povm.dim} cannot measure side {side} of dim {rho.dims[s]}"
        )
    keep = 1 - s
    probs = []
    states = []
    for e in povm.elements:
        op = qmat.embed_operator(e, rho.dims, s)
        unnorm = qmat.partial_trace(op @ rho.mat, rho.dims, [keep])
        p = float(np.trace(unnorm).real)
        if p < PROB_CUTOFF:
            probs.append(0.0)
            states.append(None)
            continue
        probs.append(p)
        states.append(DensityOperator((rho.dims[keep],), unnorm / p))
    return ConditionalEnsemble(np.array(probs), tuple(states))


def fine_grain(povm: Povm) -> tuple[Povm, list[int]]:
    """Split every element into rank-1 pieces ``λ_k |v_k⟩⟨v_k|``.

    Returns the fine POVM and, for each fine outcome, the index of the
    coarse element it came from.
    """
    vectors = []
    origin = []
    for i, e in enumerate(povm.elements):
        eig = qmat.hermitian_eig(e)
        for lam, v in zip(eig.eigenvalues, eig.eigenvectors.T):
            if lam > WEIGHT_CUTOFF:
                vectors.append(np.sqrt(lam) * _phase_fix(v))
                origin.append(i)
    return Povm.from_vectors(vectors), origin


def rank1_vectors(povm: Povm, tol: float = 1e-9) -> np.ndarray:
    """Rows ``√w_i u_i`` with ``Π_i = w_i |u_i⟩⟨u_i|``; rejects higher rank."""
    lam, vecs = np.linalg.eigh(np.stack(povm.elements))
    if lam.shape[1] > 1 and np.any(lam[:, -2] > tol):
        i = int(np.argmax(lam[:, -2]))
        raise InvariantError("rank-1 elements", f"element {i} has rank > 1; fine_grain first")
    top = vecs[:, :, -1]
    # phase convention: first nonzero amplitude real positive
    first = np.argmax(np.abs(top) > 1e-12, axis=1)
    z = top[np.arange(top.shape[0]), first]
    phase = np.where(np.abs(z) > 1e-12, np.abs(z) / np.where(z == 0, 1, z), 1)
    return np.sqrt(np.clip(lam[:, -1], 0, None))[:, None] * top * phase[:, None]


def neumark(povm: Povm) -> tuple[Povm, np.ndarray]:
    """Neumark extension of a rank-1 POVM with ``n`` outcomes.

    Returns the canonical projectors ``|i⟩⟨i|`` on the ``n``-dimensional
    space and the isometry ``V`` (n x dim) whose rows are ``√w_i ⟨u_i|``,
    so that ``Tr(|i⟩⟨i| V ρ V†) = Tr(Π_i ρ)``.
    """
    v = rank1_vectors(povm).conj()
    n = v.shape[0]
    return Povm.computational(n), v


# -- file format ------------------------------------------------------------


def povm_to_json(povm: Povm) -> dict:
    return {"dim": povm.dim, "elements": [qmat.matrix_to_json(e) for e in povm.elements]}


def povm_from_json(obj) -> Povm:
    if not isinstance(obj, dict):
        raise ValueError("povm: expected a JSON object with 'dim' and 'elements'")
    for key in ("dim", "elements"):
        if key not in obj:
            raise ValueError(f"povm: missing field '{key}'")
    d = obj["dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ValueError("dim: expected a positive integer")
    elems = obj["elements"]
    if not isinstance(elems, list) or not elems:
        raise ValueError("elements: expected a non-empty list of matrices")
    mats = [qmat.matrix_from_json(m, f"elements[{i}]") for i, m in enumerate(elems)]
    for i, m in enumerate(mats):
        if m.shape != (d, d):
            raise ValueError(f"elements[{i}]: shape {m.shape} does not match dim {d}")
    return Povm(d, tuple(mats))


def load_povm(path) -> Povm:
    with open(path) as fh:
        return povm_from_json(json.load(fh))


def save_povm(povm: Povm, path):
    with open(path, "w") as fh:
        json.dump(povm_to_json(povm), fh)
        fh.write("\n")
