"""CPTP maps in Kraus form and their Stinespring dilations.

A channel acts on one subsystem of a multipartite state. The dilation
realizes it as a unitary coupling to an ancilla prepared in ``|0⟩``,
followed by discarding the ancilla.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import qmat
from .measure import Povm, fine_grain, neumark
from .qmat import DimensionError, InvariantError
from .states import DensityOperator, rng

COMPLETENESS_TOL = 1e-9
ZERO_KRAUS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """``σ ↦ Σ_j K_j σ K_j†`` with each ``K_j`` of shape (output_dim, input_dim)."""

    input_dim: int
    output_dim: int
    kraus: tuple

    def __post_init__(self):
        din, dout = int(self.input_dim), int(self.output_dim)
        ops = tuple(qmat.as_matrix(k, "Kraus operator") for k in self.kraus)
        if not ops:
            raise InvariantError("non-empty", "channel has no Kraus operators")
        for i, k in enumerate(ops):
            if k.shape != (dout, din):
                raise DimensionError(f"Kraus operator {i} has shape {k.shape}, expected {(dout, din)}")
        gram = sum(qmat.dagger(k) @ k for k in ops)
        if not np.allclose(gram, np.eye(din), atol=COMPLETENESS_TOL, rtol=0):
            raise InvariantError("completeness", "Σ K†K differs from identity")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "input_dim", din)
        object.__setattr__(self, "output_dim", dout)
        object.__setattr__(self, "kraus", ops)

    def __call__(self, sigma: np.ndarray) -> np.ndarray:
        """Action on a single-system operator."""
        return sum(k @ sigma @ qmat.dagger(k) for k in self.kraus)

    def __repr__(self):
        return f"KrausChannel({self.input_dim}->{self.output_dim}, {len(self.kraus)} Kraus)"


def apply(ch: KrausChannel, rho: DensityOperator, target: int) -> DensityOperator:
    """Apply ``ch`` to subsystem ``target`` of ``rho``."""
    if not 0 <= target < len(rho.dims):
        raise DimensionError(f"target {target} out of range for dims {rho.dims}")
    if rho.dims[target] != ch.input_dim:
        raise DimensionError(
            f"channel input dim {ch.input_dim} does not match subsystem {target} of dim {rho.dims[target]}"
        )
    out = np.zeros((rho.dim // ch.input_dim * ch.output_dim,) * 2, dtype=complex)
    for k in ch.kraus:
        big = qmat.embed_operator(k, rho.dims, target)
        out += big @ rho.mat @ qmat.dagger(big)
    dims = list(rho.dims)
    dims[target] = ch.output_dim
    return DensityOperator(tuple(dims), out)


# -- dilation ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Dilation:
    """Unitary ``U`` on system ⊗ ancilla reproducing a channel.

    The system register has ``system_dim = max(input_dim, output_dim)``
    levels; inputs occupy its first ``input_dim`` levels and outputs its
    first ``output_dim`` levels. The ancilla starts in ``|0⟩``.
    """

    input_dim: int
    output_dim: int
    system_dim: int
    ancilla_dim: int
    unitary: np.ndarray

    def couple(self, rho: DensityOperator, target: int) -> DensityOperator:
        """``U (ρ ⊗ |0⟩⟨0|) U†`` before discarding; the ancilla is appended
        right after ``target``."""
        if rho.dims[target] != self.input_dim:
            raise DimensionError("dilation input dim does not match target subsystem")
        s, m = self.system_dim, self.ancilla_dim
        embed = np.zeros((s * m, self.input_dim), dtype=complex)
        for i in range(self.input_dim):
            embed[i * m, i] = 1.0
        big = qmat.embed_operator(self.unitary @ embed, rho.dims, target)
        dims = list(rho.dims)
        dims[target : target + 1] = [s, m]
        return DensityOperator(tuple(dims), big @ rho.mat @ qmat.dagger(big))

    def apply(self, rho: DensityOperator, target: int) -> DensityOperator:
        """``Tr_C[U (ρ ⊗ |0⟩⟨0|) U†]`` restricted to the output levels."""
        joint = self.couple(rho, target)
        n = len(joint.dims)
        keep = [k for k in range(n) if k != target + 1]
        reduced = qmat.partial_trace(joint.mat, joint.dims, keep)
        dims = [joint.dims[k] for k in keep]
        if self.output_dim < self.system_dim:
            trunc = np.eye(self.system_dim)[: self.output_dim]
            proj = qmat.embed_operator(trunc, dims, target)
            reduced = proj @ reduced @ qmat.dagger(proj)
            dims[target] = self.output_dim
        return DensityOperator(tuple(dims), reduced)


def _complete_unitary(cols: dict, n: int) -> np.ndarray:
    """Fill the missing columns of an ``n x n`` unitary by Gram-Schmidt over
    canonical basis vectors, in index order, with one re-orthogonalization."""
    basis = [cols[j] for j in sorted(cols)]
    extra = []
    for e_idx in range(n):
        if len(basis) + len(extra) == n:
            break
        v = np.zeros(n, dtype=complex)
        v[e_idx] = 1.0
        for _ in range(2):
            for b in basis + extra:
                v = v - b * np.vdot(b, v)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            extra.append(v / norm)
    if len(basis) + len(extra) != n:
        raise InvariantError("unitary completion", "could not complete isometry to a unitary")
    u = np.zeros((n, n), dtype=complex)
    free = [j for j in range(n) if j not in cols]
    for j, v in cols.items():
        u[:, j] = v
    for j, v in zip(free, extra):
        u[:, j] = v
    return u


def dilate(ch: KrausChannel) -> Dilation:
    """Stinespring dilation with one ancilla level per nonzero Kraus operator."""
    ops = [k for k in ch.kraus if np.linalg.norm(k) > ZERO_KRAUS_TOL]
    m = len(ops)
    s = max(ch.input_dim, ch.output_dim)
    n = s * m
    cols = {}
    for i in range(ch.input_dim):
        col = np.zeros(n, dtype=complex)
        for j, k in enumerate(ops):
            for o in range(ch.output_dim):
                col[o * m + j] = k[o, i]
        cols[i * m] = col
    u = _complete_unitary(cols, n)
    if not qmat.is_unitary(u, 1e-9):
        raise InvariantError("unitary dilation", "completed matrix is not unitary")
    u.setflags(write=False)
    return Dilation(ch.input_dim, ch.output_dim, s, m, u)


# -- standard families ------------------------------------------------------


def _check_unit(name: str, x: float):
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel(d, d, (np.eye(d),))


def unitary_channel(u) -> KrausChannel:
    u = qmat.as_matrix(u, "unitary")
    if not qmat.is_unitary(u):
        raise InvariantError("unitary", "matrix is not unitary")
    return KrausChannel(u.shape[0], u.shape[0], (u,))


def _weyl_operators(d: int):
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    for a in range(d):
        for b in range(d):
            yield (a, b), np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)


def depolarizing(d: int, p: float) -> KrausChannel:
    """``σ ↦ (1 - p) σ + p Tr(σ) I/d`` via the d² Weyl operators."""
    _check_unit("depolarizing probability", p)
    ops = []
    for (a, b), w in _weyl_operators(d):
        weight = 1 - p + p / d**2 if (a, b) == (0, 0) else p / d**2
        if weight > 0:
            ops.append(np.sqrt(weight) * w)
    return KrausChannel(d, d, tuple(ops))


def dephasing(p: float) -> KrausChannel:
    """Qubit phase flip with probability ``p/2``; coherences shrink by ``1 - p``."""
    _check_unit("dephasing strength", p)
    z = np.diag([1.0, -1.0])
    ops = [np.sqrt(1 - p / 2) * np.eye(2)]
    if p > 0:
        ops.append(np.sqrt(p / 2) * z)
    return KrausChannel(2, 2, tuple(ops))


def amplitude_damping(gamma: float) -> KrausChannel:
    _check_unit("damping rate", gamma)
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return KrausChannel(2, 2, (k0, k1))


def measurement_channel(povm: Povm) -> KrausChannel:
    """Measure-and-record channel built from the Neumark extension.

    Non-rank-1 POVMs are fine-grained first. A projective measurement
    dephases in its own basis, ``σ ↦ Σ_j Π_j σ Π_j``. With ``n > d``
    outcomes the output lives on the ``n``-dimensional Neumark space,
    ``σ ↦ Σ_j π_j V σ V† π_j`` with ``π_j = |j⟩⟨j|``. Either way a joint
    state becomes ``Σ_j p_j ρ_{A|j} ⊗ π_j`` for orthogonal ``π_j``.
    """
    if not povm.is_rank1():
        povm, _ = fine_grain(povm)
    projectors, v = neumark(povm)
    if v.shape[0] == povm.dim:
        # V is unitary; rotating the record back gives Π_j = V† π_j V
        ops = tuple(qmat.dagger(v) @ pi @ v for pi in projectors.elements)
    else:
        ops = tuple(pi @ v for pi in projectors.elements)
    return KrausChannel(povm.dim, v.shape[0], ops)


def random_channel(d: int, n_kraus: int, seed: int, output_dim: int | None = None) -> KrausChannel:
    """Random channel from a Haar isometry ``d -> output_dim ⊗ n_kraus``."""
    dout = d if output_dim is None else output_dim
    g = rng(seed)
    n = dout * n_kraus
    if n < d:
        raise ValueError("output_dim * n_kraus must be at least the input dimension")
    z = g.standard_normal((n, d)) + 1j * g.standard_normal((n, d))
    q, _ = np.linalg.qr(z)
    iso = q.reshape(dout, n_kraus, d)
    return KrausChannel(d, dout, tuple(iso[:, j, :] for j in range(n_kraus)))


# -- file format ------------------------------------------------------------


def channel_to_json(ch: KrausChannel) -> dict:
    return {"input_dim": ch.input_dim, "kraus": [qmat.matrix_to_json(k) for k in ch.kraus]}


def channel_from_json(obj) -> KrausChannel:
    if not isinstance(obj, dict):
        raise ValueError("channel: expected a JSON object with 'input_dim' and 'kraus'")
    for key in ("input_dim", "kraus"):
        if key not in obj:
            raise ValueError(f"channel: missing field '{key}'")
    d = obj["input_dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ValueError("input_dim: expected a positive integer")
    raw = obj["kraus"]
    if not isinstance(raw, list) or not raw:
        raise ValueError("kraus: expected a non-empty list of matrices")
    ops = [qmat.matrix_from_json(m, f"kraus[{i}]") for i, m in enumerate(raw)]
    shapes = {k.shape for k in ops}
    if len(shapes) != 1:
        raise ValueError("kraus: operators have different shapes")
    (shape,) = shapes
    if shape[1] != d:
        raise ValueError(f"kraus: operators have {shape[1]} columns but input_dim is {d}")
    return KrausChannel(d, shape[0], tuple(ops))


def load_channel(path) -> KrausChannel:
    with open(path) as fh:
        return channel_from_json(json.load(fh))


def save_channel(ch: KrausChannel, path):
    with open(path, "w") as fh:
        json.dump(channel_to_json(ch), fh)
        fh.write("\n")
