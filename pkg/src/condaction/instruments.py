"""Operations, instruments and observables in Kraus form.

An `Operation` is a finite Kraus list; an `Instrument` maps ordered string
outcome labels to operations whose total is trace preserving. Equality of
operations is decided on Choi matrices, because Kraus decompositions are
only unique up to isometric re-mixing.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .hilbert import (
    DimensionError,
    DomainError,
    as_matrix,
    dagger,
    hermitian_eig,
    hermitian_part,
    max_abs,
)

CP_TOL = 1e-10
KRAUS_EIG_CUTOFF = 1e-10
PURE_TOL = 1e-9


def _labels(labels, n: int) -> tuple[str, ...]:
    if labels is None:
        return tuple(str(k) for k in range(n))
    labels = tuple(str(x) for x in labels)
    if len(labels) != n:
        raise DimensionError(f"{len(labels)} labels for {n} elements")
    if len(set(labels)) != n:
        raise DomainError("outcome labels must be distinct")
    return labels


@dataclass(frozen=True, eq=False)
class Operation:
    """A completely positive, trace non-increasing map ``rho -> sum A rho A^*``."""

    kraus: tuple[np.ndarray, ...]

    def __init__(self, kraus: Iterable):
        ks = tuple(as_matrix(k, square=True) for k in kraus)
        if not ks:
            raise DomainError("an operation needs at least one Kraus operator")
        d = ks[0].shape[0]
        if any(k.shape != (d, d) for k in ks):
            raise DimensionError("Kraus operators must share one square shape")
        for k in ks:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        top = np.linalg.eigvalsh(hermitian_part(self.effect()))[-1]
        if top > 1 + CP_TOL:
            raise DomainError(f"sum of A^*A exceeds identity (top eigenvalue {top!r})")

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def effect(self) -> np.ndarray:
        return sum(dagger(k) @ k for k in self.kraus)

    def __call__(self, rho) -> np.ndarray:
        return apply_operation(self, rho)

    def __len__(self) -> int:
        return len(self.kraus)


@dataclass(frozen=True, eq=False)
class SharpObservable:
    """Projection-valued resolution of the identity."""

    projections: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __init__(self, projections: Sequence, labels=None, tol: float = 1e-10):
        ps = tuple(as_matrix(p, square=True) for p in projections)
        if not ps:
            raise DomainError("observable needs at least one projection")
        d = ps[0].shape[0]
        if any(p.shape != (d, d) for p in ps):
            raise DimensionError("projections must share one shape")
        for i, p in enumerate(ps):
            if max_abs(p @ p - p) > tol or max_abs(p - dagger(p)) > tol:
                raise DomainError(f"element {i} is not an orthogonal projection")
            for q in ps[:i]:
                if max_abs(p @ q) > tol:
                    raise DomainError("projections are not mutually orthogonal")
        if max_abs(sum(ps) - np.eye(d)) > tol:
            raise DomainError("projections do not sum to the identity")
        object.__setattr__(self, "projections", ps)
        object.__setattr__(self, "labels", _labels(labels, len(ps)))

    @property
    def dim(self) -> int:
        return self.projections[0].shape[0]

    def __len__(self) -> int:
        return len(self.projections)


@dataclass(frozen=True, eq=False)
class Povm:
    """Outcome-labelled effects summing to the identity."""

    effects: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    def __init__(self, effects: Sequence, labels=None, tol: float = 1e-10):
        fs = tuple(as_matrix(f, square=True) for f in effects)
        d = fs[0].shape[0]
        for f in fs:
            if max_abs(f - dagger(f)) > tol:
                raise DomainError("effect is not Hermitian")
            w = np.linalg.eigvalsh(hermitian_part(f))
            if w[0] < -tol or w[-1] > 1 + tol:
                raise DomainError("effect spectrum leaves [0, 1]")
        if max_abs(sum(fs) - np.eye(d)) > tol:
            raise DomainError("effects do not sum to the identity")
        object.__setattr__(self, "effects", fs)
        object.__setattr__(self, "labels", _labels(labels, len(fs)))

    def __getitem__(self, label: str) -> np.ndarray:
        return self.effects[self.labels.index(label)]


@dataclass(frozen=True, eq=False)
class Instrument:
    """Outcome-indexed operations with a trace-preserving total."""

    ops: Mapping[str, Operation]

    def __init__(self, ops: Mapping[str, Operation] | Iterable[tuple[str, Operation]],
                 tol: float = 1e-10):
        items = list(ops.items()) if isinstance(ops, Mapping) else list(ops)
        if not items:
            raise DomainError("an instrument needs at least one outcome")
        labels = _labels([k for k, _ in items], len(items))
        d = items[0][1].dim
        if any(op.dim != d for _, op in items):
            raise DimensionError("all operations of an instrument share one dimension")
        total = sum(op.effect() for _, op in items)
        dev = max_abs(total - np.eye(d))
        if dev > tol:
            raise DomainError(f"total operation is not trace preserving (deviation {dev:.3g})")
        object.__setattr__(self, "ops", dict(zip(labels, (op for _, op in items))))

    @property
    def outcomes(self) -> tuple[str, ...]:
        return tuple(self.ops)

    @property
    def dim(self) -> int:
        return next(iter(self.ops.values())).dim

    def __getitem__(self, label: str) -> Operation:
        return self.ops[label]

    def __len__(self) -> int:
        return len(self.ops)

    def kraus_counts(self) -> tuple[int, ...]:
        return tuple(len(op) for op in self.ops.values())


def _check_dim(op: Operation, m: np.ndarray) -> None:
    if m.shape != (op.dim, op.dim):
        raise DimensionError(f"operator of shape {m.shape} vs operation dim {op.dim}")


def apply_operation(op: Operation, rho) -> np.ndarray:
    rho = as_matrix(rho, square=True)
    _check_dim(op, rho)
    return sum(k @ rho @ dagger(k) for k in op.kraus)


def dual_apply(op: Operation, x) -> np.ndarray:
    x = as_matrix(x, square=True)
    _check_dim(op, x)
    return sum(dagger(k) @ x @ k for k in op.kraus)


def total_operation(ins: Instrument) -> Operation:
    return Operation([k for op in ins.ops.values() for k in op.kraus])


def effects_of(ins: Instrument) -> Povm:
    return Povm([op.effect() for op in ins.ops.values()], ins.outcomes)


def outcome_probabilities(ins: Instrument, rho) -> np.ndarray:
    rho = as_matrix(rho, square=True)
    if rho.shape[0] != ins.dim:
        raise DimensionError(f"state dim {rho.shape[0]} vs instrument dim {ins.dim}")
    p = np.array([np.trace(rho @ f).real for f in effects_of(ins).effects])
    return np.clip(p, 0.0, None)


def luders_instrument(obs: SharpObservable) -> Instrument:
    if not isinstance(obs, SharpObservable):
        raise DomainError("Lüders instrument needs a SharpObservable")
    return Instrument({n: Operation([p]) for n, p in zip(obs.labels, obs.projections)})


def maxwell_instrument(obs: SharpObservable, unitaries: Sequence) -> Instrument:
    """Conditional action ``rho -> U_n P_n rho P_n U_n^*``."""
    us = [as_matrix(u, square=True) for u in unitaries]
    if len(us) != len(obs):
        raise DimensionError(f"{len(us)} unitaries for {len(obs)} outcomes")
    if any(u.shape[0] != obs.dim for u in us):
        raise DimensionError("unitaries and projections differ in dimension")
    for u in us:
        if max_abs(dagger(u) @ u - np.eye(obs.dim)) > 1e-10:
            raise DomainError("conditional actions must be unitary")
    return Instrument(
        {n: Operation([u @ p]) for n, p, u in zip(obs.labels, obs.projections, us)}
    )


def convex_combination(weights: Sequence[float], parts: Sequence[Instrument]) -> Instrument:
    """Mixture ``sum_i w_i I_i(n)`` realized by sqrt(w)-scaled Kraus concatenation."""
    w = np.asarray(weights, dtype=float)
    if len(w) != len(parts) or not len(parts):
        raise DimensionError("need one weight per part")
    if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-10:
        raise DomainError("weights must be positive and sum to 1")
    outcomes = parts[0].outcomes
    if any(p.outcomes != outcomes for p in parts):
        raise DomainError("parts must share the same outcome set")
    ops = {}
    for n in outcomes:
        ops[n] = Operation([np.sqrt(wi) * k for wi, p in zip(w, parts) for k in p[n].kraus])
    return Instrument(ops)


def choi_matrix(op: Operation) -> np.ndarray:
    """``(id (x) op)(|Omega><Omega|)`` for the unnormalized ``Omega = sum_i |ii>``."""
    vecs = np.stack([k.T.reshape(-1) for k in op.kraus], axis=1)
    return vecs @ dagger(vecs)


def choi_of_map(fn: Callable[[np.ndarray], np.ndarray], dim: int) -> np.ndarray:
    """Choi matrix of an arbitrary linear map, evaluated on matrix units."""
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = 1.0
            out[i * dim:(i + 1) * dim, j * dim:(j + 1) * dim] = fn(e)
    return out


def choi_distance(a: Operation, b: Operation) -> float:
    if a.dim != b.dim:
        raise DimensionError("operations act on different dimensions")
    return max_abs(choi_matrix(a) - choi_matrix(b))


def operations_equal(a: Operation, b: Operation, tol: float = 1e-9) -> bool:
    return choi_distance(a, b) <= tol


def instruments_equal(a: Instrument, b: Instrument, tol: float = 1e-9) -> bool:
    """Outcome-wise channel equality (finer than equality of total operations)."""
    if a.outcomes != b.outcomes:
        return False
    return all(operations_equal(a[n], b[n], tol) for n in a.outcomes)


def minimal_kraus_operation(op: Operation, cutoff: float = KRAUS_EIG_CUTOFF) -> Operation:
    """Kraus list of minimal length from the Choi eigendecomposition.

    Operators are ordered by decreasing Choi eigenvalue.
    """
    d = op.dim
    eig = hermitian_eig(hermitian_part(choi_matrix(op)))
    ks = [
        np.sqrt(lam) * eig.eigenvectors[:, k].reshape(d, d).T
        for k, lam in reversed(list(enumerate(eig.eigenvalues)))
        if lam > cutoff
    ]
    if not ks:
        ks = [np.zeros((d, d), dtype=complex)]
    return Operation(ks)


def choi_rank(op: Operation, tol: float = PURE_TOL) -> int:
    w = np.linalg.eigvalsh(hermitian_part(choi_matrix(op)))
    return int(np.sum(w > tol))


def is_pure(ins: Instrument, tol: float = PURE_TOL) -> bool:
    return all(choi_rank(op, tol) <= 1 for op in ins.ops.values())
