"""Dense complex linear algebra on small matrices.

Matrices are plain ``numpy`` complex arrays. Subsystem 0 is always the
leftmost tensor factor, i.e. the slowest-varying index of a Kronecker
product; every other module inherits this convention.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MAX_DIM = 64
HERMITIAN_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when matrix or subsystem dimensions are inconsistent."""


class InvariantError(ValueError):
    """Raised when an object violates one of its defining invariants.

    The ``invariant`` attribute names the failed condition.
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        msg = f"invariant violated: {invariant}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ConvergenceError(RuntimeError):
    """Raised when the eigensolver fails to converge."""


def max_dim() -> int:
    """Dimension cap, overridable with ``DISCORDLAB_MAX_DIM``."""
    raw = os.environ.get("DISCORDLAB_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"DISCORDLAB_MAX_DIM must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("DISCORDLAB_MAX_DIM must be positive")
    return value


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-d complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvariantError("finite entries", f"{name} contains NaN or Inf")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def multiply(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def tensor(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors).

    The first factor owns the slowest-varying index. Raises
    :class:`DimensionError` if the result would exceed :func:`max_dim`.
    """
    if not factors:
        raise ValueError("tensor needs at least one factor")
    arrays = [np.asarray(f, dtype=complex) for f in factors]
    cap = max_dim()
    rows = int(np.prod([a.shape[0] for a in arrays]))
    if rows > cap:
        raise DimensionError(f"tensor product dimension {rows} exceeds cap {cap}")
    return reduce(np.kron, arrays)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= tol)


def is_unitary(m: np.ndarray, tol: float = 1e-9) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.allclose(dagger(m) @ m, np.eye(m.shape[0]), atol=tol, rtol=0))


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def hermitian_eig(m) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Backed by LAPACK ``heevd`` through :func:`numpy.linalg.eigh`; the input
    is symmetrized before the call so that tiny anti-Hermitian noise does
    not leak into the eigenvectors.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"eigendecomposition needs a square matrix, got {m.shape}")
    if not is_hermitian(m):
        raise InvariantError("hermitian", "eigendecomposition input is not Hermitian")
    try:
        w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(eigenvalues=w[order], eigenvectors=v[:, order])


def eigvalsh_desc(m: np.ndarray) -> np.ndarray:
    """Eigenvalues only, descending. No validation; for inner loops."""
    return np.linalg.eigvalsh(0.5 * (m + dagger(m)))[..., ::-1]


def _check_dims(shape: tuple, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if len(shape) != 2 or shape[0] != shape[1] or shape[0] != total:
        raise DimensionError(f"matrix of shape {shape} does not match dims {dims}")
    return dims


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original order regardless of the order
    given in ``keep``.
    """
    m = np.asarray(m, dtype=complex)
    dims = _check_dims(m.shape, dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    n = len(dims)
    if keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"keep {keep} out of range for {n} subsystems")
    t = m.reshape(dims + dims)
    # einsum labels: row index i_k, column index j_k (= i_k when traced)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise DimensionError("too many subsystems")
    row = list(letters[:n])
    col = [letters[n + k] if k in keep else row[k] for k in range(n)]
    out = [row[k] for k in keep] + [col[k] for k in keep]
    spec = "".join(row) + "".join(col) + "->" + "".join(out)
    d_keep = int(np.prod([dims[k] for k in keep]))
    return np.einsum(spec, t).reshape(d_keep, d_keep)


def permute_subsystems(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of an operator: new factor k is old ``order[k]``."""
    m = np.asarray(m, dtype=complex)
    dims = _check_dims(m.shape, dims)
    order = [int(o) for o in order]
    if sorted(order) != list(range(len(dims))):
        raise DimensionError(f"{order} is not a permutation of {len(dims)} subsystems")
    n = len(dims)
    t = m.reshape(dims + dims).transpose(order + [n + o for o in order])
    total = m.shape[0]
    return t.reshape(total, total)


def embed_operator(op, dims: Sequence[int], target: int) -> np.ndarray:
    """``I ⊗ op ⊗ I`` with ``op`` acting on subsystem ``target``.

    ``op`` may be rectangular (output_dim x dims[target]).
    """
    op = as_matrix(op, "op")
    dims = [int(d) for d in dims]
    if not 0 <= target < len(dims):
        raise DimensionError(f"target {target} out of range")
    if op.shape[1] != dims[target]:
        raise DimensionError(
            f"operator with {op.shape[1]} columns cannot act on subsystem of dim {dims[target]}"
        )
    left = int(np.prod(dims[:target]))
    right = int(np.prod(dims[target + 1 :]))
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


# -- JSON matrix encoding ---------------------------------------------------


def matrix_to_json(m: np.ndarray) -> list:
    """Row-major nested list with each entry as ``[re, im]``."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(obj, field: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ValueError(f"{field}: expected a non-empty list of rows")
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ValueError(f"{field}[{i}]: expected a list of entries")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValueError(f"{field}[{i}]: ragged row (length {len(row)}, expected {width})")
        entries = []
        for j, z in enumerate(row):
            if (
                not isinstance(z, list)
                or len(z) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)
            ):
                raise ValueError(f"{field}[{i}][{j}]: expected [re, im] pair of numbers")
            entries.append(complex(z[0], z[1]))
        rows.append(entries)
    arr = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{field}: entries must be finite")
    return arr
