"""Exact spin-PEPS contraction."""
import numpy as np
import pytest

from fpeps.contraction import contract_peps
from fpeps.errors import ContractViolationError, ResourceLimitError
from fpeps.lattice import LatticeSpec
from fpeps.tensors import PEPSTensor


def product_tensor(amp0, amp1):
    """Rank-one tensor: physical state amp0|0> + amp1|1>, all bonds in slot 0."""
    arr = np.zeros((2,) * 7, dtype=complex)
    arr[0, 0, 0, 0, 0, 0, 0] = amp0
    arr[1, 0, 0, 0, 0, 0, 0] = amp1
    return PEPSTensor(arr)


def test_product_tensors_give_product_state():
    lattice = LatticeSpec(2, 2)
    amps = [(1.0, 2.0), (3.0, 5.0), (0.5, -1.0), (2.0, 1j)]
    tensors = {s: product_tensor(*amps[i]) for i, s in enumerate(lattice.sites())}
    state = contract_peps(lattice, tensors)
    expected = np.zeros(16, dtype=complex)
    for idx in range(16):
        val = 1.0 + 0j
        for m, (a0, a1) in enumerate(amps):
            val *= a1 if (idx >> m) & 1 else a0
        expected[idx] = val
    assert np.max(np.abs(state.amplitudes - expected)) < 1e-12


def test_site_order_of_amplitudes():
    # occupation of site M sits on bit M - 1
    lattice = LatticeSpec(2, 1)
    tensors = {
        (1, 1): product_tensor(0.0, 1.0),  # occupied
        (2, 1): product_tensor(1.0, 0.0),  # empty
    }
    state = contract_peps(lattice, tensors)
    assert abs(state.amplitudes[0b01]) == pytest.approx(1.0)
    assert np.count_nonzero(np.abs(state.amplitudes) > 1e-14) == 1


def test_shape_mismatch_raises():
    lattice = LatticeSpec(1, 1)
    with pytest.raises(ContractViolationError):
        contract_peps(lattice, {(1, 1): np.zeros((2, 2, 2))})


def test_missing_tensor_raises():
    lattice = LatticeSpec(2, 1)
    with pytest.raises(ContractViolationError, match="missing"):
        contract_peps(lattice, {(1, 1): product_tensor(1, 0)})


def test_site_cap():
    lattice = LatticeSpec(4, 4)
    tensors = {s: product_tensor(1, 0) for s in lattice.sites()}
    with pytest.raises(ResourceLimitError):
        contract_peps(lattice, tensors)
