"""Entropy functionals and the entropy-balance bounds as executable checks.

All entropies are in nats.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .dilation import (
    MeasurementDilation,
    dilation_effects,
    post_measurement_state,
    reduced_states,
    standard_dilation,
)
from .hilbert import (
    DimensionError,
    DomainError,
    as_matrix,
    hermitian_part,
    partial_trace,
)
from .instruments import (
    Instrument,
    SharpObservable,
    apply_operation,
    luders_instrument,
    maxwell_instrument,
    outcome_probabilities,
    total_operation,
)

BOUND_TOL = 1e-9
CLAMP_TOL = 1e-10


def von_neumann_entropy(rho) -> float:
    rho = as_matrix(rho, square=True)
    w = np.linalg.eigvalsh(hermitian_part(rho))
    if w[0] < -CLAMP_TOL:
        raise DomainError(f"state has negative eigenvalue {w[0]:.3g}")
    w = w[w > 0]
    # eigenvalues a hair above 1 would otherwise give -1e-16
    return max(float(-np.sum(w * np.log(w))), 0.0)


def shannon_entropy(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    if np.any(p < -CLAMP_TOL) or abs(p.sum() - 1.0) > 1e-8:
        raise DomainError(f"not a probability distribution: {p}")
    p = p[p > 0]
    return max(float(-np.sum(p * np.log(p))), 0.0)


@dataclass(frozen=True)
class EntropyReport:
    S0: float
    S1: float
    S2: float
    S_sigma: float
    delta_S: float
    shannon_H: float
    szilard_bound_holds: bool
    balance_holds: bool

    def to_dict(self) -> dict:
        return asdict(self)


def conditional_action_report(d: MeasurementDilation, rho, tol: float = BOUND_TOL) -> EntropyReport:
    rho = as_matrix(rho, square=True)
    rho1, rho2 = reduced_states(d, rho)
    s0 = von_neumann_entropy(rho)
    s1 = von_neumann_entropy(rho1)
    s2 = von_neumann_entropy(rho2)
    s_sigma = von_neumann_entropy(d.sigma)
    p = [np.trace(rho @ f).real for f in dilation_effects(d).effects]
    h = shannon_entropy(np.clip(p, 0.0, None))
    delta = s0 - s1
    return EntropyReport(
        S0=s0, S1=s1, S2=s2, S_sigma=s_sigma, delta_S=delta, shannon_H=h,
        szilard_bound_holds=bool(delta <= h + tol),
        balance_holds=bool(delta <= s2 - s_sigma + tol),
    )


def szilard_margin(ins: Instrument, rho) -> float:
    """``H(rho, F) - (S(rho) - S(I(N)(rho)))``; non-negative when the bound holds."""
    rho1 = apply_operation(total_operation(ins), rho)
    delta = von_neumann_entropy(rho) - von_neumann_entropy(rho1)
    return shannon_entropy(outcome_probabilities(ins, rho)) - delta


def szilard_bound_check(ins: Instrument, rho, tol: float = BOUND_TOL) -> bool:
    return szilard_margin(ins, rho) >= -tol


@dataclass(frozen=True)
class OlrReport:
    S0: float
    S1: float
    S2: float
    S12: float
    S1_prime: float
    S2_prime: float
    S12_prime: float
    I: float
    I_prime: float
    delta_I: float
    delta_S: float
    bound_holds: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _joint_entropies(d: MeasurementDilation, rho) -> tuple[float, float, float]:
    joint = post_measurement_state(d, rho)
    r1 = partial_trace(joint, d.sys_dim, d.aux_dim, "right")
    r2 = partial_trace(joint, d.sys_dim, d.aux_dim, "left")
    return von_neumann_entropy(r1), von_neumann_entropy(r2), von_neumann_entropy(joint)


def olr_report(obs: SharpObservable, unitaries: Sequence, rho, tol: float = BOUND_TOL) -> OlrReport:
    """Mutual-information bound for a conditional action and its Lüders counterpart.

    The joint states use the branch projections ``1 (x) Q_n`` on the
    standard dilations of both instruments.
    """
    try:
        maxwell = maxwell_instrument(obs, unitaries)
    except (DimensionError, DomainError) as exc:
        raise DomainError(f"invalid conditional-action data: {exc}") from exc
    luders = luders_instrument(obs)
    rho = as_matrix(rho, square=True)
    s1, s2, s12 = _joint_entropies(standard_dilation(maxwell), rho)
    s1p, s2p, s12p = _joint_entropies(standard_dilation(luders), rho)
    s0 = von_neumann_entropy(rho)
    info = s1 + s2 - s12
    info_p = s1p + s2p - s12p
    delta_i = info_p - info
    delta_s = s0 - s1
    return OlrReport(
        S0=s0, S1=s1, S2=s2, S12=s12, S1_prime=s1p, S2_prime=s2p, S12_prime=s12p,
        I=info, I_prime=info_p, delta_I=delta_i, delta_S=delta_s,
        bound_holds=bool(delta_s <= delta_i + tol),
    )


def subadditivity_margin(rho12, dim_left: int, dim_right: int) -> float:
    rho12 = as_matrix(rho12, square=True)
    if rho12.shape[0] != dim_left * dim_right:
        raise DimensionError("state does not factor as requested")
    s1 = von_neumann_entropy(partial_trace(rho12, dim_left, dim_right, "right"))
    s2 = von_neumann_entropy(partial_trace(rho12, dim_left, dim_right, "left"))
    return s1 + s2 - von_neumann_entropy(rho12)


def subadditivity_check(rho12, dim_left: int, dim_right: int, tol: float = BOUND_TOL) -> bool:
    return subadditivity_margin(rho12, dim_left, dim_right) >= -tol
