"""Dense Fock-space oracle: operator algebra, covariance, diagonalization."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpeps.errors import (
    ContractViolationError,
    ResourceLimitError,
    UndefinedStateError,
)
from fpeps.fock import (
    FockVector,
    ModeRegistry,
    OperatorPoly,
    apply_poly,
    apply_quadratic_h,
    covariance_matrix,
    exact_ground_state,
    majorana_vector,
    vacuum,
)


def reg(n):
    return ModeRegistry(tuple(("a", (i, 1)) for i in range(1, n + 1)))


def ladder(i, create, n=None):
    return OperatorPoly.from_terms([(1.0, ((("a", (i, 1)), create),))])


def test_vacuum_single_mode():
    v = vacuum(reg(1))
    assert np.allclose(v.amplitudes, [1, 0])


def test_vacuum_two_modes():
    v = vacuum(reg(2))
    assert v.amplitudes[0] == 1.0
    assert np.count_nonzero(v.amplitudes) == 1


def test_vacuum_cap():
    with pytest.raises(ResourceLimitError, match="25"):
        vacuum(reg(25))


def test_creation_on_vacuum():
    v = apply_poly(vacuum(reg(2)), ladder(1, True))
    assert v.amplitudes[0b01] == 1.0
    assert np.count_nonzero(v.amplitudes) == 1


def test_pauli_exclusion():
    state = apply_poly(vacuum(reg(2)), ladder(1, True))
    state = apply_poly(state, ladder(2, True))
    state = apply_poly(state, ladder(1, True))
    assert state.norm() == 0.0


def test_anticommutation_order_sign():
    a = apply_poly(apply_poly(vacuum(reg(2)), ladder(1, True)), ladder(2, True))
    b = apply_poly(apply_poly(vacuum(reg(2)), ladder(2, True)), ladder(1, True))
    assert np.allclose(a.amplitudes, -b.amplitudes)


def test_unknown_label():
    with pytest.raises(ContractViolationError):
        apply_poly(vacuum(reg(2)), OperatorPoly.from_terms(
            [(1.0, ((("alpha", (9, 9)), True),))]
        ))


def test_monomials_apply_right_to_left():
    # a1^dag a1 on |1> keeps it; a1 a1^dag annihilates it
    occ = apply_poly(vacuum(reg(1)), ladder(1, True))
    keep = OperatorPoly.from_terms([(1.0, ((("a", (1, 1)), True), (("a", (1, 1)), False)))])
    kill = OperatorPoly.from_terms([(1.0, ((("a", (1, 1)), False), (("a", (1, 1)), True)))])
    assert apply_poly(occ, keep).norm() == pytest.approx(1.0)
    assert apply_poly(occ, kill).norm() == 0.0


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=5),
    data=st.data(),
)
def test_majorana_anticommutation(n, data):
    i = data.draw(st.integers(min_value=0, max_value=n - 1))
    j = data.draw(st.integers(min_value=0, max_value=n - 1))
    ti = data.draw(st.integers(min_value=1, max_value=2))
    tj = data.draw(st.integers(min_value=1, max_value=2))
    rng = np.random.default_rng(data.draw(st.integers(min_value=0, max_value=2**30)))
    amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    state = FockVector(reg(n), amps / np.linalg.norm(amps))
    ci_cj = majorana_vector(
        FockVector(reg(n), majorana_vector(state, j, tj)), i, ti
    )
    cj_ci = majorana_vector(
        FockVector(reg(n), majorana_vector(state, i, ti)), j, tj
    )
    anti = ci_cj + cj_ci
    expected = 2.0 * state.amplitudes if (i, ti) == (j, tj) else 0.0
    assert np.allclose(anti, expected, atol=1e-12)


def test_covariance_vacuum_and_occupied():
    v = vacuum(reg(1))
    assert np.allclose(covariance_matrix(v), [[0, 1], [-1, 0]])
    occ = apply_poly(v, ladder(1, True))
    assert np.allclose(covariance_matrix(occ), [[0, -1], [1, 0]])


def test_covariance_zero_state():
    z = FockVector(reg(1), np.zeros(2, dtype=complex))
    with pytest.raises(UndefinedStateError):
        covariance_matrix(z)


def test_covariance_pure_state_squares_to_minus_one():
    rng = np.random.default_rng(0)
    # random Gaussian state: ground state of a random quadratic Hamiltonian
    n = 3
    h = rng.standard_normal((2 * n, 2 * n))
    h = (h - h.T) / 2
    _, gs = exact_ground_state(h, reg(n))
    gamma = covariance_matrix(gs)
    assert np.max(np.abs(gamma @ gamma + np.eye(2 * n))) < 1e-10


def test_exact_ground_state_zero_hamiltonian():
    e, state = exact_ground_state(np.zeros((4, 4)), reg(2))
    assert e == 0.0
    assert state.amplitudes[0] == 1.0


def test_exact_ground_state_single_mode():
    # h = [[0, t], [-t, 0]] gives H = 2 t (1 - 2 n): ground energy -2|t|
    for t in (0.7, -1.3):
        e, _ = exact_ground_state(np.array([[0.0, t], [-t, 0.0]]), reg(1))
        assert e == pytest.approx(-2 * abs(t), abs=1e-12)


def test_apply_quadratic_matches_ground_energy():
    rng = np.random.default_rng(1)
    n = 3
    h = rng.standard_normal((2 * n, 2 * n))
    h = (h - h.T) / 2
    e, gs = exact_ground_state(h, reg(n))
    hpsi = apply_quadratic_h(gs, h)
    assert np.allclose(hpsi.amplitudes, e * gs.amplitudes, atol=1e-9)


def test_quadratic_requires_antisymmetry():
    with pytest.raises(ContractViolationError):
        apply_quadratic_h(vacuum(reg(1)), np.eye(2))


def test_diagonalization_cap():
    with pytest.raises(ResourceLimitError):
        exact_ground_state(np.zeros((26, 26)), reg(13))


def test_json_round_trip():
    rng = np.random.default_rng(2)
    amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    state = FockVector(reg(2), amps)
    again = FockVector.from_json(state.to_json())
    assert again.registry == state.registry
    assert np.array_equal(again.amplitudes, state.amplitudes)
