"""Measurement dilations ``(K, sigma, V, Q)`` and the standard construction.

A dilation couples the system (left tensor factor) to an auxiliary system
(right factor) in state ``sigma``, evolves both with ``V`` and performs a
Lüders measurement of the sharp auxiliary observable ``Q``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hilbert import (
    DimensionError,
    DomainError,
    as_density,
    as_matrix,
    as_unitary,
    dagger,
    hermitian_eig,
    hermitian_part,
    max_abs,
    partial_trace,
)
from .instruments import (
    Instrument,
    Operation,
    Povm,
    SharpObservable,
    choi_matrix,
    choi_of_map,
    instruments_equal,
    total_operation,
)

ZERO_KRAUS_TOL = 1e-12
SIGMA_WEIGHT_TOL = 1e-12
COMPLETION_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MeasurementDilation:
    sys_dim: int
    aux_dim: int
    sigma: np.ndarray
    V: np.ndarray
    Q: SharpObservable

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_density(self.sigma))
        object.__setattr__(self, "V", as_unitary(self.V))
        if self.sigma.shape[0] != self.aux_dim:
            raise DimensionError("sigma does not act on the auxiliary space")
        if self.V.shape[0] != self.sys_dim * self.aux_dim:
            raise DimensionError("V does not act on system (x) auxiliary space")
        if self.Q.dim != self.aux_dim:
            raise DimensionError("Q does not act on the auxiliary space")

    @property
    def outcomes(self) -> tuple[str, ...]:
        return self.Q.labels

    def with_observable(self, q: SharpObservable) -> "MeasurementDilation":
        return MeasurementDilation(self.sys_dim, self.aux_dim, self.sigma, self.V, q)


def _check_state(d: MeasurementDilation, rho) -> np.ndarray:
    rho = as_matrix(rho, square=True)
    if rho.shape[0] != d.sys_dim:
        raise DimensionError(f"state dim {rho.shape[0]} vs system dim {d.sys_dim}")
    return rho


def evolved_state(d: MeasurementDilation, rho) -> np.ndarray:
    """``V (rho (x) sigma) V^*`` before any measurement."""
    rho = _check_state(d, rho)
    return d.V @ np.kron(rho, d.sigma) @ dagger(d.V)


def post_measurement_state(d: MeasurementDilation, rho, outcome: str | None = None) -> np.ndarray:
    """Joint state after the Lüders measurement of ``Q``.

    With ``outcome`` given, only that branch (unnormalized) is returned.
    The map is linear in ``rho``, so it also accepts non-Hermitian inputs.
    """
    big = evolved_state(d, rho)
    eye = np.eye(d.sys_dim)
    out = np.zeros_like(big)
    for n, q in zip(d.Q.labels, d.Q.projections):
        if outcome is not None and n != outcome:
            continue
        lift = np.kron(eye, q)
        out += lift @ big @ lift
    return out


def reduced_states(d: MeasurementDilation, rho) -> tuple[np.ndarray, np.ndarray]:
    post = post_measurement_state(d, rho)
    rho1 = partial_trace(post, d.sys_dim, d.aux_dim, "right")
    rho2 = partial_trace(post, d.sys_dim, d.aux_dim, "left")
    return hermitian_part(rho1), hermitian_part(rho2)


def unmeasured_reduction(d: MeasurementDilation, rho) -> np.ndarray:
    """``Tr_K(V (rho (x) sigma) V^*)``, the total operation without measuring."""
    return partial_trace(evolved_state(d, rho), d.sys_dim, d.aux_dim, "right")


def dilation_effects(d: MeasurementDilation) -> Povm:
    """``F_n = Tr_K[(1 (x) sigma) V^* (1 (x) Q_n) V]`` directly from the dilation."""
    eye = np.eye(d.sys_dim)
    fs = []
    for q in d.Q.projections:
        m = np.kron(eye, d.sigma) @ dagger(d.V) @ np.kron(eye, q) @ d.V
        fs.append(hermitian_part(partial_trace(m, d.sys_dim, d.aux_dim, "right")))
    return Povm(fs, d.Q.labels)


def _adapted_basis(q: np.ndarray) -> np.ndarray:
    eig = hermitian_eig(hermitian_part(q))
    return eig.eigenvectors[:, eig.eigenvalues > 0.5]


def kraus_from_dilation(
    d: MeasurementDilation,
    sigma_vectors: np.ndarray | None = None,
    q_bases: Sequence[np.ndarray] | None = None,
) -> dict[str, list[np.ndarray]]:
    """Kraus operators ``<a|A_{n,(m,j)}|b> = sqrt(q_j) <a phi_m|V|b psi_j>``.

    ``sigma_vectors`` are eigenvectors of ``sigma`` (columns) and ``q_bases``
    orthonormal bases of the ranges of ``Q_n``; both default to the
    deterministic eigenbases. Vanishing operators are dropped.
    """
    if sigma_vectors is None:
        eig = hermitian_eig(hermitian_part(d.sigma))
        psi, weights = eig.eigenvectors, eig.eigenvalues
    else:
        psi = as_matrix(sigma_vectors)
        weights = np.einsum("kj,kl,lj->j", psi.conj(), d.sigma, psi).real
    keep = weights > SIGMA_WEIGHT_TOL
    psi, weights = psi[:, keep], weights[keep]
    if q_bases is None:
        q_bases = [_adapted_basis(q) for q in d.Q.projections]
    if len(q_bases) != len(d.Q):
        raise DimensionError("need one basis per outcome")

    ds, da = d.sys_dim, d.aux_dim
    vr = d.V.reshape(ds, da, ds, da)
    right = np.einsum("akbl,lj->akbj", vr, psi) * np.sqrt(weights)
    out: dict[str, list[np.ndarray]] = {}
    for n, phi in zip(d.Q.labels, q_bases):
        blocks = np.einsum("km,akbj->majb", np.asarray(phi).conj(), right)
        ks = [blocks[m, :, j, :] for m in range(blocks.shape[0]) for j in range(blocks.shape[2])]
        out[n] = [k for k in ks if max_abs(k) > ZERO_KRAUS_TOL]
    return out


def instrument_from_dilation(d: MeasurementDilation, **bases) -> Instrument:
    ops = {}
    for n, ks in kraus_from_dilation(d, **bases).items():
        ops[n] = Operation(ks or [np.zeros((d.sys_dim, d.sys_dim))])
    return Instrument(ops)


def extend_partial_isometry(columns, total_dim: int, positions: Sequence[int] | None = None,
                            tol: float = 1e-10) -> np.ndarray:
    """Complete orthonormal ``columns`` to a unitary.

    The given columns are placed at ``positions`` (default: the first
    columns). The free columns are filled, in index order, by Gram-Schmidt
    orthonormalization of the canonical basis vectors against everything
    chosen so far; candidates with residual norm below 1e-8 are skipped.
    """
    cols = np.array(columns, dtype=complex)
    if cols.ndim == 1:
        cols = cols[:, None]
    if cols.shape[0] != total_dim:
        raise DimensionError(f"columns have length {cols.shape[0]}, expected {total_dim}")
    k = cols.shape[1]
    if max_abs(dagger(cols) @ cols - np.eye(k)) > tol:
        raise DomainError("columns are not orthonormal")
    if positions is None:
        positions = list(range(k))
    positions = list(positions)
    if len(positions) != k or len(set(positions)) != k:
        raise DimensionError("need one distinct position per column")

    basis = [cols[:, i] for i in range(k)]
    extra = []
    for e in range(total_dim):
        if len(basis) == total_dim:
            break
        v = np.zeros(total_dim, dtype=complex)
        v[e] = 1.0
        for _ in range(2):
            for b in basis:
                v = v - b * np.vdot(b, v)
        norm = np.linalg.norm(v)
        if norm < COMPLETION_TOL:
            continue
        v = v / norm
        basis.append(v)
        extra.append(v)
    if len(basis) != total_dim:
        raise DomainError("could not complete the columns to a basis")

    u = np.zeros((total_dim, total_dim), dtype=complex)
    u[:, positions] = cols
    free = [i for i in range(total_dim) if i not in set(positions)]
    u[:, free] = np.column_stack(extra) if extra else np.zeros((total_dim, 0))
    return u


def standard_dilation(ins: Instrument) -> MeasurementDilation:
    """The textbook dilation on ``K = C^{N'}`` with ``N' = {(n, i)}``.

    The auxiliary system starts in the first basis vector ``|(n_0, 0)>`` and
    ``V (psi (x) phi) = sum_{n,i} A_{ni} psi (x) |ni>`` on that slice.
    """
    pairs = [(n, k) for n in ins.outcomes for k in ins[n].kraus]
    ds, da = ins.dim, len(pairs)
    cols = np.zeros((ds * da, ds), dtype=complex)
    for idx, (_, a) in enumerate(pairs):
        # entry (row a, aux idx) of the column for input basis vector b is A[a, b]
        cols[idx::da, :] = a
    positions = [b * da for b in range(ds)]
    v = extend_partial_isometry(cols, ds * da, positions)

    sigma = np.zeros((da, da), dtype=complex)
    sigma[0, 0] = 1.0
    qs = []
    for n in ins.outcomes:
        q = np.zeros((da, da), dtype=complex)
        for idx, (m, _) in enumerate(pairs):
            if m == n:
                q[idx, idx] = 1.0
        qs.append(q)
    return MeasurementDilation(ds, da, sigma, v, SharpObservable(qs, ins.outcomes))


def total_choi(d: MeasurementDilation) -> np.ndarray:
    """Choi matrix of the total operation, computed through the dilation."""
    return choi_of_map(lambda e: partial_trace(
        post_measurement_state(d, e), d.sys_dim, d.aux_dim, "right"), d.sys_dim)


def total_op_independence_distance(d: MeasurementDilation, q_alt: SharpObservable) -> float:
    """Largest Choi discrepancy among the three total-operation routes."""
    if q_alt.dim != d.aux_dim:
        raise DimensionError("alternative observable does not act on the auxiliary space")
    a = choi_matrix(total_operation(instrument_from_dilation(d)))
    b = choi_matrix(total_operation(instrument_from_dilation(d.with_observable(q_alt))))
    c = choi_of_map(lambda e: unmeasured_reduction(d, e), d.sys_dim)
    return max(max_abs(a - b), max_abs(a - c), max_abs(b - c))


def verify_total_op_independence(d: MeasurementDilation, q_alt: SharpObservable,
                                 tol: float = 1e-9) -> bool:
    return total_op_independence_distance(d, q_alt) <= tol


def roundtrip_distances(ins: Instrument) -> dict[str, float]:
    """Per-outcome Choi distance between ``ins`` and its standard-dilation image."""
    back = instrument_from_dilation(standard_dilation(ins))
    return {n: max_abs(choi_matrix(ins[n]) - choi_matrix(back[n])) for n in ins.outcomes}


def roundtrip_ok(ins: Instrument, tol: float = 1e-9) -> bool:
    return instruments_equal(ins, instrument_from_dilation(standard_dilation(ins)), tol)
