"""Seeded randomized property suites for the entropy bounds and dilations.

Every suite returns a `SuiteResult` whose ``worst_margin`` is the smallest
slack observed: for an inequality ``lhs <= rhs`` the slack is ``rhs - lhs``
and the trial passes when it is ``>= -tol``; for an equality with distance
``delta`` the slack is ``tol - delta`` and the trial passes when it is
``>= 0``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .dilation import roundtrip_distances, total_op_independence_distance
from .entropy import (
    conditional_action_report,
    olr_report,
    subadditivity_margin,
    szilard_margin,
)
from .instruments import apply_operation, dual_apply, total_operation
from .samplers import (
    random_convex_pure,
    random_density,
    random_dilation,
    random_hermitian,
    random_instrument,
    random_maxwell_data,
    random_maxwell_instrument,
    random_pure_instrument,
    random_sharp_observable,
)

DEFAULT_TRIALS = 200
MAX_DIM = 4

TOLERANCES = {
    "theorem1": 1e-9,
    "corollary1": 1e-9,
    "prop0_balance": 1e-9,
    "prop1_independence": 1e-9,
    "prop2_olr": 1e-9,
    "subadditivity": 1e-9,
    "dilation_roundtrip": 1e-9,
    "duality": 1e-10,
    "counterexample": 1e-10,
    "erasure_szilard_grid": 1e-9,
}


@dataclass
class SuiteResult:
    name: str
    trials: int
    worst_margin: float
    tol: float
    failures: int
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _run(name: str, trials: int, tol: float, trial: Callable[[np.random.Generator], float],
         rng: np.random.Generator, equality: bool = False) -> SuiteResult:
    margins = np.array([trial(rng) for _ in range(trials)])
    threshold = 0.0 if equality else -tol
    failures = int(np.sum(margins < threshold))
    return SuiteResult(name, trials, float(margins.min()), tol, failures, failures == 0)


def _dim(rng) -> int:
    return int(rng.integers(2, MAX_DIM + 1))


def theorem1(rng, trials=DEFAULT_TRIALS, tol=TOLERANCES["theorem1"]) -> SuiteResult:
    def trial(rng):
        d = _dim(rng)
        n = int(rng.integers(2, d + 1))
        if rng.random() < 0.5:
            ins = random_pure_instrument(d, n, rng)
        else:
            ins = random_maxwell_instrument(d, n, rng)
        return szilard_margin(ins, random_density(d, rng))
    return _run("theorem1", trials, tol, trial, rng)


def corollary1(rng, trials=DEFAULT_TRIALS, tol=TOLERANCES["corollary1"]) -> SuiteResult:
    def trial(rng):
        d = _dim(rng)
        ins = random_convex_pure(d, int(rng.integers(2, 4)), int(rng.integers(2, 4)), rng)
        return szilard_margin(ins, random_density(d, rng))
    return _run("corollary1", trials, tol, trial, rng)


def prop0_balance(rng, trials=DEFAULT_TRIALS, tol=TOLERANCES["prop0_balance"]) -> SuiteResult:
    def trial(rng):
        ds = _dim(rng)
        da = int(rng.integers(2, MAX_DIM + 1))
        d = random_dilation(ds, da, int(rng.integers(1, da + 1)), rng,
                            sigma_rank=int(rng.integers(1, da + 1)))
        r = conditional_action_report(d, random_density(ds, rng, int(rng.integers(1, ds + 1))))
        return (r.S2 - r.S_sigma) - r.delta_S
    return _run("prop0_balance", trials, tol, trial, rng)


def prop1_independence(rng, trials=DEFAULT_TRIALS, tol=TOLERANCES["prop1_independence"]) -> SuiteResult:
    def trial(rng):
        ds = _dim(rng)
        da = int(rng.integers(2, MAX_DIM + 1))
        d = random_dilation(ds, da, int(rng.integers(1, da + 1)), rng,
                            sigma_rank=int(rng.integers(1, da + 1)))
        q_alt = random_sharp_observable(da, int(rng.integers(1, da + 1)), rng)
        return tol - total_op_independence_distance(d, q_alt)
    return _run("prop1_independence", trials, tol, trial, rng, equality=True)


def prop2_olr(rng, trials=DEFAULT_TRIALS, tol=TOLERANCES["prop2_olr"]) -> SuiteResult:
    def trial(rng):
        d = _dim(rng)
        obs, us = random_maxwell_data(d, int(rng.integers(2, d + 1)), rng)
        r = olr_report(obs, us, random_density(d, rng))
        return r.delta_I - r.delta_S
    return _run("prop2_olr", trials, tol, trial, rng)


def subadditivity(rng, trials=DEFAULT_TRIALS, tol=TOLERANCES["subadditivity"]) -> SuiteResult:
    def trial(rng):
        a, b = (int(x) for x in rng.integers(2, MAX_DIM + 1, size=2))
        rho = random_density(a * b, rng, int(rng.integers(1, a * b + 1)))
        return subadditivity_margin(rho, a, b)
    return _run("subadditivity", trials, tol, trial, rng)


def dilation_roundtrip(rng, trials=DEFAULT_TRIALS, tol=TOLERANCES["dilation_roundtrip"]) -> SuiteResult:
    def trial(rng):
        d = _dim(rng)
        ins = random_instrument(d, int(rng.integers(1, 4)), rng, max_kraus=3)
        return tol - max(roundtrip_distances(ins).values())
    return _run("dilation_roundtrip", trials, tol, trial, rng, equality=True)


def duality(rng, trials=DEFAULT_TRIALS, tol=TOLERANCES["duality"]) -> SuiteResult:
    def trial(rng):
        d = _dim(rng)
        op = total_operation(random_instrument(d, 2, rng))
        op = op if rng.random() < 0.5 else random_instrument(d, 2, rng)["0"]
        rho, x = random_density(d, rng), random_hermitian(d, rng)
        lhs = np.trace(x @ apply_operation(op, rho))
        rhs = np.trace(dual_apply(op, x) @ rho)
        return tol - abs(lhs - rhs)
    return _run("duality", trials, tol, trial, rng, equality=True)


def counterexample(rng=None, trials=1, tol=TOLERANCES["counterexample"]) -> SuiteResult:
    """Two-qubit erasure: the coarse readout must *violate* the Szilard bound."""
    from .spinmodel import two_qubit_counterexample

    res = two_qubit_counterexample()
    rq, rt = res.report_Q, res.report_Qtilde
    prop1 = total_op_independence_distance(res.dilation_Q, res.dilation_Qtilde.Q)
    checks = {
        "delta_S_is_log4": tol - abs(rt.delta_S - math.log(4)),
        "H_is_log2": tol - abs(rt.shannon_H - math.log(2)),
        "violation_margin": rt.delta_S - rt.shannon_H,
        "balance": (rt.S2 - rt.S_sigma) - rt.delta_S + tol,
        "fine_readout_bound": rq.shannon_H - rq.delta_S + tol,
        "prop1": 1e-9 - prop1,
    }
    worst = min(checks.values())
    ok = worst >= 0 and not rt.szilard_bound_holds
    return SuiteResult("counterexample", trials, float(worst), tol, 0 if ok else 1, ok, {
        "delta_S": rt.delta_S,
        "bound": rt.shannon_H,
        "expected_violation": True,
        "violation_observed": not rt.szilard_bound_holds,
        "balance_holds": rt.balance_holds,
        "fine_readout_bound_holds": rq.szilard_bound_holds,
        "prop1_choi_distance": prop1,
    })


def erasure_szilard_grid(rng=None, trials=101, tol=TOLERANCES["erasure_szilard_grid"],
                         cfg=None) -> SuiteResult:
    from .spinmodel import SpinBathConfig, entropy_curve

    cfg = cfg or SpinBathConfig()
    pts = entropy_curve(cfg, np.linspace(0.0, 1.0, trials))
    margins = np.array([pt.H - pt.delta_S for pt in pts])
    failures = int(np.sum(margins < -tol))
    return SuiteResult("erasure_szilard_grid", trials, float(margins.min()), tol, failures, failures == 0)


RANDOM_SUITES = {
    "theorem1": theorem1,
    "corollary1": corollary1,
    "prop0_balance": prop0_balance,
    "prop1_independence": prop1_independence,
    "prop2_olr": prop2_olr,
    "subadditivity": subadditivity,
    "dilation_roundtrip": dilation_roundtrip,
    "duality": duality,
}


def run_all(seed: int = 0, trials: int = DEFAULT_TRIALS, tol: float | None = None) -> list[SuiteResult]:
    """Run every suite; each random suite gets its own child generator of ``seed``."""
    children = np.random.SeedSequence(seed).spawn(len(RANDOM_SUITES))
    results = []
    for (name, fn), child in zip(RANDOM_SUITES.items(), children):
        t = TOLERANCES[name] if tol is None else tol
        results.append(fn(np.random.default_rng(child), trials=trials, tol=t))
    results.append(counterexample(tol=TOLERANCES["counterexample"] if tol is None else tol))
    results.append(erasure_szilard_grid(tol=TOLERANCES["erasure_szilard_grid"] if tol is None else tol))
    return results
