"""Dense operator algebra on finite-dimensional Hilbert spaces.

Operators are plain complex ``numpy`` arrays. The validators in this module
(`as_matrix`, `as_hermitian`, `as_unitary`, `as_density`) check the
invariants of each operator class and return a fresh complex array.

Tensor products are left-major: in ``H (x) K`` the index of ``H`` varies
slowest, i.e. the joint index is ``i * dim_K + k``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
DEGENERACY_TOL = 1e-8
MAX_EIG_DIM = 512


class DimensionError(ValueError):
    """Operator shapes do not fit together."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class NumericError(ArithmeticError):
    """A numerical routine failed to produce a trustworthy result."""


def max_abs(a) -> float:
    """Entrywise max norm, the ``||.||_inf`` used for every tolerance here."""
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def as_matrix(a, square: bool = False) -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


def as_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(a, square=True)
    dev = max_abs(m - dagger(m))
    if dev > tol:
        raise DomainError(f"matrix is not Hermitian (deviation {dev:.3g})")
    return m


def as_unitary(a, tol: float = UNITARY_TOL) -> np.ndarray:
    m = as_matrix(a, square=True)
    dev = max_abs(dagger(m) @ m - np.eye(m.shape[0]))
    if dev > tol:
        raise DomainError(f"matrix is not unitary (deviation {dev:.3g})")
    return m


def as_density(a, tol: float = TRACE_TOL) -> np.ndarray:
    m = as_hermitian(a)
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise DomainError(f"density operator has trace {tr!r}")
    low = np.linalg.eigvalsh(hermitian_part(m))[0]
    if low < -PSD_TOL:
        raise DomainError(f"density operator has negative eigenvalue {low:.3g}")
    return m


def is_projector(p: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return max_abs(p @ p - p) <= tol and max_abs(p - dagger(p)) <= tol


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with the left factor as the slow index."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dim_left: int, dim_right: int, side: str = "right") -> np.ndarray:
    """Trace out one factor of ``H (x) K``.

    ``side`` names the factor that is traced *out*: ``"right"`` returns
    ``Tr_K`` (a ``dim_left`` square matrix), ``"left"`` returns ``Tr_H``.
    """
    m = as_matrix(m)
    n = dim_left * dim_right
    if m.shape != (n, n):
        raise DimensionError(
            f"matrix of shape {m.shape} does not factor as {dim_left} x {dim_right}"
        )
    t = m.reshape(dim_left, dim_right, dim_left, dim_right)
    if side == "right":
        return np.einsum("ikjk->ij", t)
    if side == "left":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _fix_phase(v: np.ndarray, eps: float = 1e-10) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > eps)
    if nz.size == 0:
        return v
    z = v[nz[0]]
    return v * (abs(z) / z)


def _sort_key(v: np.ndarray) -> tuple:
    r = np.round(v, 10)
    return tuple(x for z in r for x in (z.real, z.imag))


def hermitian_eig(h) -> EigenDecomposition:
    """Ascending eigendecomposition with a reproducible eigenvector convention.

    Each eigenvector has its first non-negligible entry made real positive;
    eigenvectors sharing an eigenvalue (within `DEGENERACY_TOL`) are sorted
    lexicographically by their entries.
    """
    h = as_hermitian(h)
    if h.shape[0] > MAX_EIG_DIM:
        raise NumericError(f"dimension {h.shape[0]} exceeds {MAX_EIG_DIM}")
    try:
        w, v = np.linalg.eigh(hermitian_part(h))
    except np.linalg.LinAlgError as exc:
        raise NumericError(str(exc)) from exc
    v = np.column_stack([_fix_phase(v[:, k]) for k in range(v.shape[1])])

    order = []
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[start] <= DEGENERACY_TOL:
            stop += 1
        block = list(range(start, stop))
        block.sort(key=lambda k: _sort_key(v[:, k]))
        order.extend(block)
        start = stop
    return EigenDecomposition(w[order], v[:, order])


def unitary_exp(h, t: float) -> np.ndarray:
    """``exp(-i t H)`` through the spectral decomposition of ``H``."""
    eig = hermitian_eig(h)
    v = eig.eigenvectors
    return (v * np.exp(-1j * t * eig.eigenvalues)) @ dagger(v)


def eigenspace_projector(h, level: float, tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Orthogonal projector onto the eigenvectors of ``h`` with ``|lambda - level| <= tol``."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    eig = hermitian_eig(h)
    sel = np.abs(eig.eigenvalues - level) <= tol
    if not sel.any():
        raise DomainError(f"no eigenvalue within {tol} of {level}")
    v = eig.eigenvectors[:, sel]
    return v @ dagger(v)


def rank(m, tol: float = 1e-8) -> int:
    return int(np.sum(np.linalg.svd(as_matrix(m), compute_uv=False) > tol))
