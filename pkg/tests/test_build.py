"""Entangled bonds, local projectors, and the exact state assembly."""
import numpy as np
import pytest

from fpeps.build import (
    bond_h,
    bond_v,
    build_fpeps,
    build_fpeps_reference,
    projector_q,
)
from fpeps.errors import ContractViolationError, ResourceLimitError
from fpeps.fock import ModeRegistry, apply_poly, covariance_matrix, vacuum
from fpeps.lattice import LatticeSpec
from fpeps.tensors import FPEPSTensor

BOND_CM = np.array([
    [0, 0, 0, 1],
    [0, 0, -1, 0],
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=float)


def pair_registry():
    return ModeRegistry((("beta", (1, 1)), ("alpha", (2, 1))))


def test_bond_creates_maximally_entangled_pair():
    lat = LatticeSpec(2, 1)
    state = apply_poly(vacuum(pair_registry()), bond_h((1, 1), lat))
    expected = np.zeros(4, dtype=complex)
    expected[0b00] = expected[0b11] = 1 / np.sqrt(2)
    assert np.allclose(state.amplitudes, expected)


def test_bond_covariance_is_reference_bond():
    lat = LatticeSpec(2, 1)
    state = apply_poly(vacuum(pair_registry()), bond_h((1, 1), lat))
    assert np.allclose(covariance_matrix(state), BOND_CM, atol=1e-12)


def test_vertical_bond_same_structure():
    lat = LatticeSpec(1, 2)
    reg = ModeRegistry((("delta", (1, 1)), ("gamma", (1, 2))))
    state = apply_poly(vacuum(reg), bond_v((1, 1), lat))
    assert np.allclose(covariance_matrix(state), BOND_CM, atol=1e-12)


def test_bond_is_not_a_projector():
    lat = LatticeSpec(2, 1)
    op = bond_h((1, 1), lat)
    once = apply_poly(vacuum(pair_registry()), op)
    twice = apply_poly(once, op)
    assert abs(once.norm() - 1.0) < 1e-12
    assert abs(twice.norm() - 1.0) > 0.1


def one_entry(k, l, r, u, d, parity=0):
    arr = np.zeros((2,) * 5, dtype=complex)
    arr[k, l, r, u, d] = 1.0
    return FPEPSTensor(arr, parity)


def test_projector_identity_entry():
    op = projector_q((1, 1), one_entry(0, 0, 0, 0, 0))
    assert op.terms == ((1.0 + 0j, ()),)


def test_projector_monomial_transcription():
    op = projector_q((1, 1), one_entry(1, 1, 0, 0, 0, parity=0))
    (coeff, monomial), = op.terms
    assert coeff == 1.0
    assert monomial == ((("a", (1, 1)), True), (("alpha", (1, 1)), False))


def test_projector_rejects_parity_violation():
    arr = np.zeros((2,) * 5, dtype=complex)
    arr[1, 0, 0, 0, 0] = 1.0  # odd entry in an even tensor
    with pytest.raises(ContractViolationError):
        projector_q((1, 1), FPEPSTensor(arr, 0))


def test_build_1x1_identity_tensor_gives_vacuum():
    lattice = LatticeSpec(1, 1)
    state = build_fpeps(lattice, {(1, 1): one_entry(0, 0, 0, 0, 0)})
    assert abs(state.amplitudes[0]) > 0
    assert np.count_nonzero(np.abs(state.amplitudes) > 1e-14) == 1


def test_build_matches_reference_construction():
    lattice = LatticeSpec(2, 2)
    rng = np.random.default_rng(7)
    tensors = {s: FPEPSTensor.random(rng, parity=0) for s in lattice.sites()}
    fast = build_fpeps(lattice, tensors)
    slow = build_fpeps_reference(lattice, tensors)
    assert np.max(np.abs(fast.amplitudes - slow.amplitudes)) < 1e-12


def test_parity_superselection():
    lattice = LatticeSpec(2, 2)
    rng = np.random.default_rng(8)
    parity = {(1, 1): 1, (2, 1): 1, (1, 2): 0, (2, 2): 0}
    tensors = {s: FPEPSTensor.random(rng, parity=parity[s]) for s in lattice.sites()}
    state = build_fpeps(lattice, tensors)
    assert state.norm() > 1e-6
    occ_parity = np.array([bin(i).count("1") % 2 for i in range(16)])
    support = np.abs(state.amplitudes) > 1e-12
    assert set(occ_parity[support]) == {sum(parity.values()) % 2}


def test_even_projectors_commute():
    # applying the site projectors in two different orders gives equal states
    from fpeps.fock import standard_registry

    lattice = LatticeSpec(1, 2)
    rng = np.random.default_rng(9)
    tensors = {s: FPEPSTensor.random(rng, parity=0) for s in lattice.sites()}
    registry = standard_registry(lattice)
    base = vacuum(registry)
    for s in lattice.sites():
        base = apply_poly(base, bond_h(s, lattice))
        base = apply_poly(base, bond_v(s, lattice))
    order_a = apply_poly(
        apply_poly(base, projector_q((1, 1), tensors[(1, 1)])),
        projector_q((1, 2), tensors[(1, 2)]),
    )
    order_b = apply_poly(
        apply_poly(base, projector_q((1, 2), tensors[(1, 2)])),
        projector_q((1, 1), tensors[(1, 1)]),
    )
    assert np.max(np.abs(order_a.amplitudes - order_b.amplitudes)) < 1e-12


def test_missing_site_raises():
    lattice = LatticeSpec(2, 1)
    with pytest.raises(ContractViolationError, match="missing"):
        build_fpeps(lattice, {(1, 1): one_entry(0, 0, 0, 0, 0)})


def test_mode_cap():
    lattice = LatticeSpec(3, 2)  # 30 modes
    tensors = {s: one_entry(0, 0, 0, 0, 0) for s in lattice.sites()}
    with pytest.raises(ResourceLimitError):
        build_fpeps(lattice, tensors)


def test_zero_state_is_representable():
    from fpeps.critical import example_tensor_set

    lattice = LatticeSpec(2, 2)
    state = build_fpeps(lattice, example_tensor_set(lattice))
    assert state.norm() == pytest.approx(0.0, abs=1e-12)
