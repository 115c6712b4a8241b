"""Imperfect qubit erasure by a small Heisenberg spin bath.

A single spin-1/2 (the qubit, left tensor factor, site 0) is coupled to
``n_bath`` spins prepared in the maximally mixed ground state of their own
Heisenberg Hamiltonian. After ``exp(-i t H)`` on all ``n_bath + 1`` spins the
bath is measured for "still in the ground space" versus "excited".

Qubit basis: index 0 is spin up, index 1 is spin down (the default "0" state,
south pole of the Bloch ball).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

from .dilation import (
    MeasurementDilation,
    instrument_from_dilation,
    standard_dilation,
)
from .entropy import EntropyReport, conditional_action_report, von_neumann_entropy
from .hilbert import (
    DomainError,
    dagger,
    eigenspace_projector,
    hermitian_eig,
    hermitian_part,
    ket,
    projector,
    rank,
    unitary_exp,
)
from .instruments import (
    Instrument,
    Operation,
    SharpObservable,
    apply_operation,
    maxwell_instrument,
    minimal_kraus_operation,
    total_operation,
)

HALF = Fraction(1, 2)
MAX_SPINS = 9
GROUND_TOL = 1e-8

SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
SY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2
PAULI = (
    np.eye(2, dtype=complex),
    2 * SX,
    2 * SY,
    2 * SZ,
)
UP = ket(0, 2)
DOWN = ket(1, 2)


@dataclass(frozen=True)
class SpinBathConfig:
    n_bath: int = 6
    J: float = 1.0
    B: float = 1.0
    t: float = 2 * math.pi

    def __post_init__(self):
        if self.n_bath < 1:
            raise DomainError("n_bath must be at least 1")
        if self.n_bath + 1 > MAX_SPINS:
            raise DomainError(f"at most {MAX_SPINS} spins in total are supported")
        if self.J <= 0 or self.B <= 0:
            raise DomainError("J and B must be positive")


def site_operator(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    ops = [np.eye(2, dtype=complex)] * n_spins
    ops[site] = op
    return reduce(np.kron, ops)


def total_spin(n_spins: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return tuple(sum(site_operator(s, k, n_spins) for k in range(n_spins)) for s in (SX, SY, SZ))


def heisenberg_hamiltonian(cfg: SpinBathConfig, total_spins: int) -> np.ndarray:
    """``J sum_{mu<nu} s_mu . s_nu + B sum_mu s^z_mu`` on ``total_spins`` sites."""
    if total_spins < 1:
        raise DomainError("need at least one spin")
    if total_spins > MAX_SPINS:
        raise DomainError(f"2^{total_spins} exceeds the dimension cap 512")
    local = [[site_operator(s, k, total_spins) for s in (SX, SY, SZ)] for k in range(total_spins)]
    dim = 2 ** total_spins
    h = np.zeros((dim, dim), dtype=complex)
    for mu in range(total_spins):
        for nu in range(mu + 1, total_spins):
            h += cfg.J * sum(a @ b for a, b in zip(local[mu], local[nu]))
        h += cfg.B * local[mu][2]
    return hermitian_part(h)


def spin_values(n: int) -> list[Fraction]:
    """Admissible total spins for ``n`` spin-1/2 sites, ascending."""
    lo = Fraction(n % 2, 2)
    return [lo + k for k in range(int(Fraction(n, 2) - lo) + 1)]


def energy_levels(n: int, J: float, B: float) -> dict[tuple[Fraction, Fraction], float]:
    """Closed-form ``E_N(S, M) = (J/2)(S(S+1) - 3N/4) + B M``."""
    if n < 1:
        raise DomainError("need at least one spin")
    out = {}
    for s in spin_values(n):
        for k in range(int(2 * s) + 1):
            m = -s + k
            out[(s, m)] = J / 2 * (float(s * (s + 1)) - 3 * n / 4) + B * float(m)
    return out


@dataclass(frozen=True)
class DegeneracyTable:
    """Number of coupling paths ``D_N(S)``."""

    counts: dict[tuple[int, Fraction], int] = field(default_factory=dict)

    def __getitem__(self, key) -> int:
        n, s = key
        return self.counts.get((n, Fraction(s)), 0)

    @property
    def max_n(self) -> int:
        return max(n for n, _ in self.counts)

    def rows(self) -> list[tuple[int, Fraction, int]]:
        return [(n, s, d) for (n, s), d in sorted(self.counts.items())]

    def dimension(self, n: int) -> int:
        return int(sum(d * (2 * s + 1) for (m, s), d in self.counts.items() if m == n))


def degeneracy_table(max_n: int) -> DegeneracyTable:
    if max_n < 1:
        raise DomainError("max_n must be at least 1")
    layer = {Fraction(0): 1}
    counts = {}
    for n in range(1, max_n + 1):
        nxt: dict[Fraction, int] = {}
        for s, d in layer.items():
            for s_new in (s - HALF, s + HALF):
                if s_new >= 0:
                    nxt[s_new] = nxt.get(s_new, 0) + d
        layer = nxt
        counts.update({(n, s): d for s, d in layer.items()})
    return DegeneracyTable(counts)


def closed_form_spectrum(n: int, J: float, B: float, decimals: int = 9) -> dict[float, int]:
    """Energy -> multiplicity from the closed form and the path counts."""
    table = degeneracy_table(n)
    spec: dict[float, int] = {}
    for (s, _m), e in energy_levels(n, J, B).items():
        key = round(e, decimals) + 0.0
        spec[key] = spec.get(key, 0) + table[n, s]
    return dict(sorted(spec.items()))


def numerical_spectrum(h: np.ndarray, decimals: int = 9) -> dict[float, int]:
    spec: dict[float, int] = {}
    for e in hermitian_eig(h).eigenvalues:
        key = round(float(e), decimals) + 0.0
        spec[key] = spec.get(key, 0) + 1
    return dict(sorted(spec.items()))


def ground_projector(cfg: SpinBathConfig) -> np.ndarray:
    h = heisenberg_hamiltonian(cfg, cfg.n_bath)
    e0 = hermitian_eig(h).eigenvalues[0]
    return eigenspace_projector(h, e0, GROUND_TOL)


@lru_cache(maxsize=16)
def erasure_dilation(cfg: SpinBathConfig = SpinBathConfig()) -> MeasurementDilation:
    q0 = ground_projector(cfg)
    sigma = q0 / rank(q0)
    aux = 2 ** cfg.n_bath
    v = unitary_exp(heisenberg_hamiltonian(cfg, cfg.n_bath + 1), cfg.t)
    return MeasurementDilation(2, aux, sigma, v, SharpObservable([q0, np.eye(aux) - q0]))


@lru_cache(maxsize=16)
def erasure_instrument(cfg: SpinBathConfig = SpinBathConfig()) -> Instrument:
    return instrument_from_dilation(erasure_dilation(cfg))


def rho_p(p: float) -> np.ndarray:
    return np.diag([p, 1.0 - p]).astype(complex)


def bloch_state(x: Sequence[float]) -> np.ndarray:
    return 0.5 * (PAULI[0] + sum(xi * s for xi, s in zip(x, PAULI[1:])))


@dataclass(frozen=True, eq=False)
class BlochAffineMap:
    """Qubit channel as a real 4x4 matrix acting on ``(1, x1, x2, x3)``."""

    matrix: np.ndarray

    def apply(self, x: Sequence[float]) -> np.ndarray:
        """Image of the Bloch vector ``x``."""
        return (self.matrix @ np.concatenate([[1.0], np.asarray(x, dtype=float)]))[1:]

    @property
    def linear_part(self) -> np.ndarray:
        return self.matrix[1:, 1:]

    @property
    def offset(self) -> np.ndarray:
        return self.matrix[1:, 0]


def bloch_affine_map(op: Operation) -> BlochAffineMap:
    if op.dim != 2:
        raise DomainError("Bloch representation needs a qubit operation")
    m = np.array([[0.5 * np.trace(a @ apply_operation(op, b)).real for b in PAULI] for a in PAULI])
    return BlochAffineMap(m)


@dataclass(frozen=True, eq=False)
class EllipsoidLandmarks:
    center: np.ndarray
    north_image: np.ndarray
    south_image: np.ndarray
    semi_axes: np.ndarray


def ellipsoid_landmarks(bmap: BlochAffineMap) -> EllipsoidLandmarks:
    return EllipsoidLandmarks(
        center=bloch_state(bmap.offset),
        north_image=bloch_state(bmap.apply([0, 0, 1])),
        south_image=bloch_state(bmap.apply([0, 0, -1])),
        semi_axes=np.sort(np.linalg.svd(bmap.linear_part, compute_uv=False)),
    )


def minimal_kraus(ins: Instrument) -> Instrument:
    return Instrument({n: minimal_kraus_operation(op) for n, op in ins.ops.items()})


def closed_form_kraus() -> dict[str, list[np.ndarray]]:
    """Closed-form minimal Kraus operators of the default erasure instrument."""
    a1 = math.sqrt(5 / 14) * np.eye(2)
    a2 = np.diag([-1 / math.sqrt(14), 3 / math.sqrt(14)])
    a3 = np.array([[0, 0], [2 / math.sqrt(7), 0]])
    return {"0": [a1, a2], "1": [a3]}


def s1_closed_form(p: float) -> float:
    """Post-erasure entropy of ``rho(p)`` for the default model."""
    q = 3 * p / 7
    terms = [x * math.log(x) for x in (q, 1 - q) if x > 0]
    return -sum(terms)


S_HALF = (5.5 * math.log(14 / 11) + 1.5 * math.log(14 / 3)) / 7
S_FINAL = (
    4 / 7 * math.log(7 / 4) + 3 / 7 * math.log(7 / 3) + 5 * math.log(14) / 14
    + 4 / 7 * math.log(63 / 4) + math.log(126) / 14
)


@dataclass(frozen=True)
class CurvePoint:
    p: float
    S0: float
    S1: float
    S2: float
    H: float
    delta_S: float
    total_initial: float
    total_final: float


def _curve_point(d: MeasurementDilation, p: float) -> CurvePoint:
    r = conditional_action_report(d, rho_p(p))
    return CurvePoint(p, r.S0, r.S1, r.S2, r.shannon_H, r.delta_S,
                      r.S0 + r.S_sigma, r.S1 + r.S2)


def entropy_curve(cfg: SpinBathConfig, p_grid: Iterable[float]) -> list[CurvePoint]:
    grid = [float(p) for p in p_grid]
    if any(p < 0 or p > 1 for p in grid):
        raise DomainError("grid points must lie in [0, 1]")
    d = erasure_dilation(cfg)
    return [_curve_point(d, p) for p in grid]


def entropy_difference(cfg: SpinBathConfig, p: float) -> float:
    """``S0 - S1`` along ``rho(p)``, evaluated with the total operation."""
    rho = rho_p(p)
    rho1 = apply_operation(total_operation(erasure_instrument(cfg)), rho)
    return von_neumann_entropy(rho) - von_neumann_entropy(rho1)


def find_p1(cfg: SpinBathConfig = SpinBathConfig(), tol: float = 1e-10,
            lo: float = 1e-6, hi: float = 1.0) -> float:
    """Bisection for the ``rho(p)`` whose entropy is left unchanged by the erasure."""
    f_lo, f_hi = entropy_difference(cfg, lo), entropy_difference(cfg, hi)
    if f_lo == 0:
        return lo
    if f_lo * f_hi > 0:
        raise DomainError("entropy difference has no sign change on the interval")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = entropy_difference(cfg, mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def swap_unitary(d1: int, d2: int) -> np.ndarray:
    """``V (x (x) y) = y (x) x`` on ``C^d1 (x) C^d2`` with ``d1 == d2``."""
    if d1 != d2:
        raise DomainError("swap needs equal factors")
    n = d1 * d2
    v = np.zeros((n, n), dtype=complex)
    for i in range(d1):
        for j in range(d2):
            v[j * d1 + i, i * d2 + j] = 1.0
    return v


@dataclass(frozen=True, eq=False)
class CounterexampleResult:
    report_Q: EntropyReport
    report_Qtilde: EntropyReport
    dilation_Q: MeasurementDilation
    dilation_Qtilde: MeasurementDilation
    rho: np.ndarray


def two_qubit_dilations() -> tuple[MeasurementDilation, MeasurementDilation]:
    """Perfect two-qubit erasure by swapping with ``down-down``; fine and coarse readout."""
    basis = [np.kron(a, b) for a in (UP, DOWN) for b in (UP, DOWN)]
    phi = basis[3]
    v = swap_unitary(4, 4)
    q = SharpObservable([projector(b) for b in basis])
    up1 = np.kron(projector(UP), np.eye(2))
    q_tilde = SharpObservable([up1, np.eye(4) - up1])
    d_q = MeasurementDilation(4, 4, projector(phi), v, q)
    return d_q, d_q.with_observable(q_tilde)


def two_qubit_counterexample() -> CounterexampleResult:
    d_q, d_qt = two_qubit_dilations()
    rho = np.eye(4, dtype=complex) / 4
    return CounterexampleResult(
        conditional_action_report(d_q, rho),
        conditional_action_report(d_qt, rho),
        d_q, d_qt, rho,
    )


@dataclass(frozen=True, eq=False)
class WorkedExample:
    rho: np.ndarray
    observable: SharpObservable
    unitaries: tuple[np.ndarray, ...]
    instrument: Instrument
    report: EntropyReport
    rho1: np.ndarray


def szilard_worked_example() -> WorkedExample:
    """Qutrit with ``F = (P1, P2 + P3)``; the second branch shifts P2 -> P1, P3 -> P2."""
    e = [ket(k, 3) for k in range(3)]
    p1, p2, p3 = (projector(v) for v in e)
    rho = 0.5 * p1 + 0.3 * p2 + 0.2 * p3
    obs = SharpObservable([p1, p2 + p3])
    shift = np.column_stack([e[2], e[0], e[1]])
    unitaries = (np.eye(3, dtype=complex), shift)
    ins = maxwell_instrument(obs, unitaries)
    report = conditional_action_report(standard_dilation(ins), rho)
    rho1 = apply_operation(total_operation(ins), rho)
    return WorkedExample(rho, obs, unitaries, ins, report, rho1)


def spin_multiplet_basis(n_spins: int, J: float = 1.0, B: float = 1.0) -> np.ndarray:
    """Eigenbasis of ``S^2`` and ``S^z`` ordered by energy of ``H_N``."""
    sx, sy, sz = total_spin(n_spins)
    s2 = sx @ sx + sy @ sy + sz @ sz
    vecs = hermitian_eig(hermitian_part(s2 + math.pi * sz)).eigenvectors
    h = heisenberg_hamiltonian(SpinBathConfig(n_bath=max(n_spins - 1, 1), J=J, B=B), n_spins)
    energies = np.einsum("ki,kl,li->i", vecs.conj(), h, vecs).real
    order = np.argsort(np.round(energies, 8), kind="stable")
    return vecs[:, order]


def rotated_ground_bases(cfg: SpinBathConfig, rng: np.random.Generator):
    """Randomly rotated eigenbases of ``sigma`` and of ``Q0``, ``Q1``."""
    d = erasure_dilation(cfg)
    out = []
    for q in d.Q.projections:
        eig = hermitian_eig(q)
        base = eig.eigenvectors[:, eig.eigenvalues > 0.5]
        k = base.shape[1]
        z = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
        u, _ = np.linalg.qr(z)
        out.append(base @ u)
    return {"sigma_vectors": out[0], "q_bases": out}


def time_shifted(cfg: SpinBathConfig, dt: float) -> SpinBathConfig:
    return SpinBathConfig(cfg.n_bath, cfg.J, cfg.B, cfg.t + dt)


def erasure_effects_closed_form() -> tuple[np.ndarray, np.ndarray]:
    return np.diag([3 / 7, 1.0]), np.diag([4 / 7, 0.0])


def bloch_closed_form() -> np.ndarray:
    return np.array([[7, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [-4, 0, 0, 3]]) / 7


def rotation_z(theta: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * theta)])


def conjugated(op: Operation, u: np.ndarray) -> Operation:
    """The channel ``rho -> U op(U^* rho U) U^*``."""
    return Operation([u @ k @ dagger(u) for k in op.kraus])
