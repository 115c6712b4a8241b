import math
from fractions import Fraction

import numpy as np
import pytest

from condaction.dilation import instrument_from_dilation, total_op_independence_distance
from condaction.entropy import von_neumann_entropy
from condaction.hilbert import DomainError, rank
from condaction.instruments import (
    Operation,
    apply_operation,
    effects_of,
    instruments_equal,
    operations_equal,
    total_operation,
)
from condaction.spinmodel import (
    DOWN,
    S_FINAL,
    S_HALF,
    UP,
    SpinBathConfig,
    bloch_affine_map,
    bloch_closed_form,
    bloch_state,
    closed_form_spectrum,
    conjugated,
    degeneracy_table,
    ellipsoid_landmarks,
    energy_levels,
    entropy_curve,
    entropy_difference,
    erasure_dilation,
    erasure_effects_closed_form,
    erasure_instrument,
    find_p1,
    ground_projector,
    heisenberg_hamiltonian,
    minimal_kraus,
    numerical_spectrum,
    closed_form_kraus,
    rho_p,
    rotated_ground_bases,
    rotation_z,
    s1_closed_form,
    spin_multiplet_basis,
    spin_values,
    swap_unitary,
    szilard_worked_example,
    time_shifted,
    two_qubit_counterexample,
)

H = Fraction(1, 2)
DEFAULT = SpinBathConfig()


def test_config_validation():
    with pytest.raises(DomainError):
        SpinBathConfig(n_bath=0)
    with pytest.raises(DomainError):
        SpinBathConfig(n_bath=9)
    with pytest.raises(DomainError):
        SpinBathConfig(J=-1.0)


def test_basis_convention():
    np.testing.assert_allclose(rho_p(1.0), np.outer(UP, UP))
    np.testing.assert_allclose(bloch_state([0, 0, -1]), np.outer(DOWN, DOWN))


def test_spin_values():
    assert spin_values(6) == [0, 1, 2, 3]
    assert spin_values(7) == [H, 3 * H, 5 * H, 7 * H]


def test_degeneracy_table_frozen_rows():
    t = degeneracy_table(7)
    assert [t[6, s] for s in spin_values(6)] == [5, 9, 5, 1]
    assert [t[7, s] for s in spin_values(7)] == [14, 14, 6, 1]
    assert t[1, H] == 1
    assert [t[4, s] for s in spin_values(4)] == [2, 3, 1]


def test_degeneracy_dimension_check():
    t = degeneracy_table(8)
    for n in range(1, 9):
        assert sum(t[n, s] * (2 * s + 1) for s in spin_values(n)) == 2 ** n
        assert t.dimension(n) == 2 ** n


def test_energy_levels_formula():
    e = energy_levels(2, 1.0, 0.5)
    assert e[(Fraction(0), Fraction(0))] == pytest.approx(-0.75)
    assert e[(Fraction(1), Fraction(1))] == pytest.approx(0.25 + 0.5)
    with pytest.raises(DomainError):
        energy_levels(0, 1.0, 1.0)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_spectrum_matches_closed_form(n):
    cfg = SpinBathConfig(n_bath=max(n - 1, 1), J=1.0, B=1.0)
    assert numerical_spectrum(heisenberg_hamiltonian(cfg, n)) == closed_form_spectrum(n, 1.0, 1.0)


def test_spectrum_other_couplings():
    cfg = SpinBathConfig(n_bath=3, J=0.7, B=0.3)
    assert numerical_spectrum(heisenberg_hamiltonian(cfg, 4)) == closed_form_spectrum(4, 0.7, 0.3)


def test_ground_space():
    h = heisenberg_hamiltonian(DEFAULT, 6)
    assert np.linalg.eigvalsh(h)[0] == pytest.approx(-2.25, abs=1e-10)
    q0 = ground_projector(DEFAULT)
    assert rank(q0) == 14
    np.testing.assert_allclose(h @ q0, -2.25 * q0, atol=1e-9)


def test_dilation_shape_and_bath_entropy():
    d = erasure_dilation()
    assert (d.sys_dim, d.aux_dim) == (2, 64)
    assert von_neumann_entropy(d.sigma) == pytest.approx(math.log(14), abs=1e-12)


def test_effects():
    f0, f1 = erasure_effects_closed_form()
    fs = effects_of(erasure_instrument()).effects
    np.testing.assert_allclose(fs[0], f0, atol=1e-9)
    np.testing.assert_allclose(fs[1], f1, atol=1e-9)


def test_bloch_matrix():
    m = bloch_affine_map(total_operation(erasure_instrument())).matrix
    np.testing.assert_allclose(m, bloch_closed_form(), atol=1e-9)
    assert np.linalg.det(m[1:, 1:]) == pytest.approx(3 / 343, abs=1e-9)


def test_bloch_map_of_identity():
    m = bloch_affine_map(Operation([np.eye(2)])).matrix
    np.testing.assert_allclose(m, np.eye(4), atol=1e-15)
    with pytest.raises(DomainError):
        bloch_affine_map(Operation([np.eye(3)]))


def test_landmarks():
    lm = ellipsoid_landmarks(bloch_affine_map(total_operation(erasure_instrument())))
    np.testing.assert_allclose(lm.center, np.diag([3 / 14, 11 / 14]), atol=1e-9)
    np.testing.assert_allclose(lm.north_image, np.diag([3 / 7, 4 / 7]), atol=1e-9)
    np.testing.assert_allclose(lm.south_image, np.diag([0, 1]), atol=1e-9)
    np.testing.assert_allclose(lm.semi_axes, [1 / 7, 1 / 7, 3 / 7], atol=1e-9)


def test_minimal_kraus_matches_closed_form():
    mk = minimal_kraus(erasure_instrument())
    assert mk.kraus_counts() == (2, 1)
    ref = closed_form_kraus()
    assert operations_equal(mk["0"], Operation(ref["0"]), 1e-9)
    assert operations_equal(mk["1"], Operation(ref["1"]), 1e-9)


def test_kraus_basis_independence(rng):
    d = erasure_dilation()
    rotated = instrument_from_dilation(d, **rotated_ground_bases(DEFAULT, rng))
    assert instruments_equal(rotated, erasure_instrument(), 1e-9)


def test_multiplet_basis_gives_fewer_kraus_operators():
    d = erasure_dilation()
    w = spin_multiplet_basis(6)
    q0 = d.Q.projections[0]
    in_ground = np.einsum("ki,kl,li->i", w.conj(), q0, w).real > 0.5
    bases = [w[:, in_ground], w[:, ~in_ground]]
    ins = instrument_from_dilation(d, sigma_vectors=bases[0], q_bases=bases)
    assert sum(ins.kraus_counts()) < sum(erasure_instrument().kraus_counts())
    assert instruments_equal(ins, erasure_instrument(), 1e-9)


def test_z_rotation_covariance():
    op = total_operation(erasure_instrument())
    for theta in (0.3, 1.7):
        assert operations_equal(conjugated(op, rotation_z(theta)), op, 1e-9)


def test_total_operation_closed_form(rng):
    from condaction.samplers import random_density

    op = total_operation(erasure_instrument())
    ref = Operation(closed_form_kraus()["0"] + closed_form_kraus()["1"])
    rho = random_density(2, rng)
    np.testing.assert_allclose(apply_operation(op, rho), apply_operation(ref, rho), atol=1e-9)


def test_s1_closed_form_matches_numerics():
    for pt in entropy_curve(DEFAULT, np.linspace(0, 1, 11)):
        assert pt.S1 == pytest.approx(s1_closed_form(pt.p), abs=1e-9)


def test_half_point_scalars():
    (pt,) = entropy_curve(DEFAULT, [0.5])
    assert pt.S1 == pytest.approx(S_HALF, abs=1e-9)
    assert S_HALF == pytest.approx(0.5195798, abs=1e-6)
    assert pt.total_initial == pytest.approx(math.log(2) + math.log(14), abs=1e-12)


def test_curve_endpoints():
    start, end = entropy_curve(DEFAULT, [0.0, 1.0])
    assert start.S0 == 0.0 and start.S1 == pytest.approx(0.0, abs=1e-10)
    assert start.H == pytest.approx(0.0, abs=1e-10)
    assert end.S1 == pytest.approx(s1_closed_form(1.0), abs=1e-10)
    assert end.total_final == pytest.approx(S_FINAL, abs=1e-9)
    assert S_FINAL == pytest.approx(3.5462146, abs=1e-6)


def test_curve_rejects_bad_grid():
    with pytest.raises(DomainError):
        entropy_curve(DEFAULT, [1.5])


def test_szilard_bound_along_curve():
    for pt in entropy_curve(DEFAULT, np.linspace(0, 1, 41)):
        assert pt.delta_S <= pt.H + 1e-9
        assert pt.total_initial <= pt.total_final + 1e-9


def test_entropy_difference_signs():
    assert entropy_difference(DEFAULT, 0.25) > 0
    assert entropy_difference(DEFAULT, 0.75) < 0


def test_find_p1_is_seven_tenths():
    p1 = find_p1()
    assert p1 == pytest.approx(0.7, abs=1e-8)
    assert von_neumann_entropy(rho_p(p1)) == pytest.approx(s1_closed_form(p1), abs=1e-8)


def test_find_p1_without_sign_change():
    with pytest.raises(DomainError):
        find_p1(DEFAULT, lo=0.8, hi=0.9)


def test_four_pi_periodicity():
    cfg = SpinBathConfig(n_bath=3)
    a = total_operation(erasure_instrument(cfg))
    b = total_operation(erasure_instrument(time_shifted(cfg, 4 * math.pi)))
    assert operations_equal(a, b, 1e-8)
    rho = rho_p(0.3)
    ra = apply_operation(a, rho)
    rb = apply_operation(b, rho)
    assert von_neumann_entropy(ra) == pytest.approx(von_neumann_entropy(rb), abs=1e-9)


def test_swap_unitary():
    v = swap_unitary(2, 2)
    a, b = np.array([1, 2]), np.array([3, 5])
    np.testing.assert_allclose(v @ np.kron(a, b), np.kron(b, a))
    with pytest.raises(DomainError):
        swap_unitary(2, 3)


def test_counterexample():
    res = two_qubit_counterexample()
    rt, rq = res.report_Qtilde, res.report_Q
    assert rt.delta_S == pytest.approx(math.log(4), abs=1e-10)
    assert rt.shannon_H == pytest.approx(math.log(2), abs=1e-10)
    assert not rt.szilard_bound_holds
    assert rt.balance_holds
    assert rq.szilard_bound_holds
    assert total_op_independence_distance(res.dilation_Q, res.dilation_Qtilde.Q) <= 1e-9


def test_worked_example():
    ex = szilard_worked_example()
    assert ex.report.S0 == pytest.approx(1.029653, abs=1e-6)
    assert ex.report.delta_S == pytest.approx(0.5292506, abs=1e-6)
    assert ex.report.shannon_H == pytest.approx(math.log(2), abs=1e-12)
    np.testing.assert_allclose(ex.rho1, np.diag([0.8, 0.2, 0.0]), atol=1e-12)
