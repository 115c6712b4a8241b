import math

import numpy as np
import pytest

from condaction.dilation import post_measurement_state
from condaction.entropy import shannon_entropy, von_neumann_entropy
from condaction.hilbert import DimensionError, DomainError, dagger, partial_trace
from condaction.instruments import (
    Instrument,
    Operation,
    SharpObservable,
    apply_operation,
    choi_matrix,
    choi_of_map,
    choi_rank,
    convex_combination,
    dual_apply,
    effects_of,
    is_pure,
    luders_instrument,
    maxwell_instrument,
    minimal_kraus_operation,
    operations_equal,
    outcome_probabilities,
    total_operation,
)
from condaction.samplers import (
    random_density,
    random_hermitian,
    random_instrument,
    random_maxwell_instrument,
    random_pure_instrument,
    random_sharp_observable,
    random_unitary,
)
from condaction.spinmodel import erasure_dilation, erasure_instrument, closed_form_kraus

P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])
SWAP = np.array([[0, 1], [1, 0]])


def test_identity_kraus_leaves_state(rng):
    rho = random_density(3, rng)
    np.testing.assert_allclose(apply_operation(Operation([np.eye(3)]), rho), rho)


def test_luders_projector_on_diagonal_state():
    p = 0.3
    out = apply_operation(Operation([P0]), np.diag([p, 1 - p]))
    np.testing.assert_allclose(out, np.diag([p, 0]))


def test_erasure_component_matches_dilation_route():
    rho = np.eye(2) / 2
    via_kraus = apply_operation(erasure_instrument()["0"], rho)
    d = erasure_dilation()
    via_dilation = partial_trace(post_measurement_state(d, rho, "0"), 2, d.aux_dim)
    np.testing.assert_allclose(via_kraus, via_dilation, atol=1e-12)
    via_closed_form = apply_operation(Operation(closed_form_kraus()["0"]), rho)
    np.testing.assert_allclose(via_kraus, via_closed_form, atol=1e-12)
    np.testing.assert_allclose(via_kraus, np.diag([3 / 14, 1 / 2]), atol=1e-12)


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply_operation(Operation([np.eye(2)]), np.eye(3) / 3)
    with pytest.raises(DimensionError):
        dual_apply(Operation([np.eye(2)]), np.eye(3))


def test_dual_of_trace_preserving_is_unital(rng):
    op = total_operation(random_instrument(3, 3, rng))
    np.testing.assert_allclose(dual_apply(op, np.eye(3)), np.eye(3), atol=1e-12)


def test_duality_identity(rng):
    op = random_instrument(3, 2, rng)["1"]
    rho, x = random_density(3, rng), random_hermitian(3, rng)
    lhs = np.trace(x @ apply_operation(op, rho))
    rhs = np.trace(dual_apply(op, x) @ rho)
    assert abs(lhs - rhs) <= 1e-10


def test_dual_of_unitary(rng):
    u, x = random_unitary(3, rng), random_hermitian(3, rng)
    np.testing.assert_allclose(dual_apply(Operation([u]), x), dagger(u) @ x @ u, atol=1e-12)


def test_total_luders_is_dephasing(rng):
    rho = random_density(2, rng)
    out = apply_operation(total_operation(luders_instrument(SharpObservable([P0, P1]))), rho)
    np.testing.assert_allclose(out, np.diag(np.diag(rho)), atol=1e-15)


def test_total_operation_trace_preserving(rng):
    for _ in range(100):
        d = int(rng.integers(1, 5))
        ins = random_instrument(d, int(rng.integers(1, 4)), rng)
        rho = random_density(d, rng)
        assert np.trace(apply_operation(total_operation(ins), rho)).real == pytest.approx(1, abs=1e-10)


def test_effects_of_luders():
    obs = SharpObservable([P0, P1])
    for f, p in zip(effects_of(luders_instrument(obs)).effects, obs.projections):
        np.testing.assert_allclose(f, p)


def test_erasure_effects():
    povm = effects_of(erasure_instrument())
    np.testing.assert_allclose(povm["0"], np.diag([3 / 7, 1]), atol=1e-9)
    np.testing.assert_allclose(povm["1"], np.diag([4 / 7, 0]), atol=1e-9)


def test_effects_sum_to_identity(rng):
    for _ in range(20):
        ins = random_instrument(3, 3, rng)
        np.testing.assert_allclose(sum(effects_of(ins).effects), np.eye(3), atol=1e-10)


def test_outcome_probabilities_erasure():
    ins = erasure_instrument()
    np.testing.assert_allclose(outcome_probabilities(ins, P1), [1, 0], atol=1e-12)
    np.testing.assert_allclose(outcome_probabilities(ins, np.eye(2) / 2), [5 / 7, 2 / 7], atol=1e-12)


def test_outcome_probabilities_two_routes(rng):
    ins = random_instrument(3, 3, rng)
    rho = random_density(3, rng)
    traces = [np.trace(apply_operation(ins[n], rho)).real for n in ins.outcomes]
    np.testing.assert_allclose(outcome_probabilities(ins, rho), traces, atol=1e-12)
    assert sum(traces) == pytest.approx(1, abs=1e-10)


def test_luders_trivial_observable():
    ins = luders_instrument(SharpObservable([np.eye(3)]))
    assert operations_equal(ins["0"], Operation([np.eye(3)]))


def test_worked_example_shannon_entropy():
    ps = [np.diag(v) for v in np.eye(3)]
    rho = 0.5 * ps[0] + 0.3 * ps[1] + 0.2 * ps[2]
    ins = luders_instrument(SharpObservable([ps[0], ps[1] + ps[2]]))
    assert shannon_entropy(outcome_probabilities(ins, rho)) == pytest.approx(math.log(2), abs=1e-12)


def test_luders_never_decreases_entropy(rng):
    for _ in range(50):
        d = int(rng.integers(2, 5))
        ins = luders_instrument(random_sharp_observable(d, int(rng.integers(1, d + 1)), rng))
        rho = random_density(d, rng, int(rng.integers(1, d + 1)))
        after = apply_operation(total_operation(ins), rho)
        assert von_neumann_entropy(rho) <= von_neumann_entropy(after) + 1e-10


def test_maxwell_with_identities_is_luders(rng):
    obs = random_sharp_observable(3, 2, rng)
    a = maxwell_instrument(obs, [np.eye(3)] * 2)
    b = luders_instrument(obs)
    assert all(operations_equal(a[n], b[n], 1e-12) for n in a.outcomes)


def test_maxwell_qubit_erasure(rng):
    ins = maxwell_instrument(SharpObservable([P1, P0]), [np.eye(2), SWAP])
    for _ in range(10):
        rho = random_density(2, rng)
        np.testing.assert_allclose(apply_operation(total_operation(ins), rho), P1, atol=1e-12)


def test_maxwell_length_mismatch():
    with pytest.raises(DimensionError):
        maxwell_instrument(SharpObservable([P0, P1]), [np.eye(2)])
    with pytest.raises(DomainError):
        maxwell_instrument(SharpObservable([P0, P1]), [np.eye(2), 2 * np.eye(2)])


def test_convex_single_part(rng):
    ins = random_instrument(2, 2, rng)
    mix = convex_combination([1.0], [ins])
    assert all(operations_equal(mix[n], ins[n], 1e-12) for n in ins.outcomes)


def test_convex_luders_idempotent():
    ins = luders_instrument(SharpObservable([P0, P1]))
    mix = convex_combination([0.5, 0.5], [ins, ins])
    assert all(operations_equal(mix[n], ins[n], 1e-12) for n in ins.outcomes)


def test_convex_matches_weighted_sum(rng):
    for _ in range(10):
        parts = [random_pure_instrument(2, 2, rng) for _ in range(3)]
        w = rng.random(3) + 0.1
        w /= w.sum()
        mix = convex_combination(w, parts)
        for n in mix.outcomes:
            oracle = choi_of_map(lambda e: sum(wi * apply_operation(p[n], e) for wi, p in zip(w, parts)), 2)
            assert np.abs(choi_matrix(mix[n]) - oracle).max() <= 1e-10


def test_convex_rejects_bad_input(rng):
    a, b = random_instrument(2, 2, rng), random_instrument(2, 3, rng)
    with pytest.raises(DomainError):
        convex_combination([0.5, 0.5], [a, b])
    with pytest.raises(DomainError):
        convex_combination([0.7, 0.7], [a, a])


def test_purity(rng):
    assert is_pure(random_maxwell_instrument(3, 2, rng))
    assert is_pure(luders_instrument(SharpObservable([P0, P1])))
    ins = erasure_instrument()
    assert choi_rank(ins["0"]) == 2
    assert choi_rank(ins["1"]) == 1
    assert not is_pure(ins)


def test_choi_identity():
    c = choi_matrix(Operation([np.eye(2)]))
    omega = np.array([1, 0, 0, 1])
    np.testing.assert_allclose(c, np.outer(omega, omega))
    assert np.trace(c).real == pytest.approx(2)


def test_choi_matches_map_oracle(rng):
    op = random_instrument(3, 2, rng)["0"]
    np.testing.assert_allclose(choi_matrix(op), choi_of_map(lambda e: apply_operation(op, e), 3), atol=1e-14)


def test_choi_invariant_under_isometric_mixing(rng):
    ks = random_instrument(2, 1, rng, max_kraus=2)["0"].kraus
    ks = ks if len(ks) == 2 else ks + (np.zeros((2, 2)),)
    u = random_unitary(2, rng)
    mixed = [u[i, 0] * ks[0] + u[i, 1] * ks[1] for i in range(2)]
    assert operations_equal(Operation(ks), Operation(mixed), 1e-12)


def test_choi_rank_one_for_a3():
    assert choi_rank(Operation(closed_form_kraus()["1"])) == 1


def test_operations_equal_basics(rng):
    op = random_instrument(2, 2, rng)["0"]
    assert operations_equal(op, op)
    a = random_unitary(2, rng) / 2
    assert operations_equal(Operation([a]), Operation([-a]))
    assert not operations_equal(Operation([a]), Operation([a @ np.diag([1, -1])]))


def test_minimal_kraus_of_redundant_list(rng):
    k = random_unitary(2, rng) / np.sqrt(3)
    redundant = Operation([k, k, k])
    minimal = minimal_kraus_operation(redundant)
    assert len(minimal) == 1
    assert operations_equal(minimal, redundant, 1e-12)


def test_instrument_validation():
    with pytest.raises(DomainError):
        Instrument({"0": Operation([P0])})
    with pytest.raises(DomainError):
        Operation([np.eye(2) * 1.1])
    with pytest.raises(DomainError):
        SharpObservable([P0, P0])
