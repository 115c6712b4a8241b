"""Seeded random operators, states, instruments and dilations."""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .dilation import MeasurementDilation
from .hilbert import dagger, hermitian_part
from .instruments import (
    Instrument,
    Operation,
    SharpObservable,
    convex_combination,
    maxwell_instrument,
)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(dim, random_state=rng)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-induced mixed state of the given rank (full rank by default)."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = g @ dagger(g)
    return hermitian_part(rho / np.trace(rho).real)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * hermitian_part(g)


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return random_unitary(rows, rng)[:, :cols]


def _split(total: int, parts: int, rng: np.random.Generator) -> list[int]:
    """Random composition of ``total`` into ``parts`` positive integers."""
    cuts = np.sort(rng.choice(np.arange(1, total), size=parts - 1, replace=False)) if parts > 1 else []
    edges = [0, *cuts, total]
    return [int(b - a) for a, b in zip(edges, edges[1:])]


def random_instrument(dim: int, n_outcomes: int, rng: np.random.Generator,
                      max_kraus: int = 3) -> Instrument:
    """Instrument with 1..max_kraus Kraus operators per outcome from a random isometry."""
    counts = rng.integers(1, max_kraus + 1, size=n_outcomes)
    w = random_isometry(dim * int(counts.sum()), dim, rng)
    blocks = [w[k * dim:(k + 1) * dim] for k in range(int(counts.sum()))]
    ops, pos = {}, 0
    for n, c in enumerate(counts):
        ops[str(n)] = Operation(blocks[pos:pos + c])
        pos += c
    return Instrument(ops)


def random_pure_instrument(dim: int, n_outcomes: int, rng: np.random.Generator) -> Instrument:
    w = random_isometry(dim * n_outcomes, dim, rng)
    return Instrument({str(n): Operation([w[n * dim:(n + 1) * dim]]) for n in range(n_outcomes)})


def random_sharp_observable(dim: int, n_outcomes: int, rng: np.random.Generator) -> SharpObservable:
    """Random eigenbasis grouped into ``n_outcomes <= dim`` non-empty blocks."""
    u = random_unitary(dim, rng)
    sizes = _split(dim, n_outcomes, rng)
    projs, pos = [], 0
    for s in sizes:
        v = u[:, pos:pos + s]
        projs.append(v @ dagger(v))
        pos += s
    return SharpObservable(projs)


def random_maxwell_data(dim: int, n_outcomes: int, rng: np.random.Generator):
    obs = random_sharp_observable(dim, n_outcomes, rng)
    return obs, [random_unitary(dim, rng) for _ in range(n_outcomes)]


def random_maxwell_instrument(dim: int, n_outcomes: int, rng: np.random.Generator) -> Instrument:
    return maxwell_instrument(*random_maxwell_data(dim, n_outcomes, rng))


def random_convex_pure(dim: int, n_outcomes: int, n_parts: int,
                       rng: np.random.Generator) -> Instrument:
    w = rng.random(n_parts) + 0.05
    parts = [random_pure_instrument(dim, n_outcomes, rng) for _ in range(n_parts)]
    return convex_combination(w / w.sum(), parts)


def random_dilation(sys_dim: int, aux_dim: int, n_outcomes: int,
                    rng: np.random.Generator, sigma_rank: int | None = None) -> MeasurementDilation:
    return MeasurementDilation(
        sys_dim, aux_dim,
        random_density(aux_dim, rng, sigma_rank),
        random_unitary(sys_dim * aux_dim, rng),
        random_sharp_observable(aux_dim, n_outcomes, rng),
    )
