"""Sign derivation and the fermionic-to-spin tensor translation."""
import numpy as np
import pytest

from fpeps.build import build_fpeps
from fpeps.contraction import contract_peps
from fpeps.errors import ContractViolationError
from fpeps.lattice import LatticeSpec
from fpeps.mapping import (
    derive_sign_function,
    derive_sign_functions,
    map_tensor_set,
    map_to_peps,
)
from fpeps.tensors import FPEPSTensor, SignFunction


def zero_sign():
    return SignFunction(np.zeros((2,) * 5, dtype=np.uint8))


def one_entry(k, l, r, u, d, value=1.0):
    arr = np.zeros((2,) * 5, dtype=complex)
    arr[k, l, r, u, d] = value
    return FPEPSTensor(arr, (k + l + r + u + d) % 2)


def test_map_identity_entry_first_column():
    lattice = LatticeSpec(3, 3)
    B = map_to_peps(one_entry(0, 0, 0, 0, 0), (1, 1), zero_sign(), lattice).entries
    # d + l = 0: both r' slots carry +1, l' pinned to 0
    assert B[0, 0, 0, 0, 0, 0, 0] == 1.0
    assert B[0, 0, 0, 0, 1, 0, 0] == 1.0
    assert np.count_nonzero(B) == 2


def test_map_first_column_boundary_phase():
    lattice = LatticeSpec(3, 3)
    B = map_to_peps(one_entry(0, 0, 1, 0, 1), (1, 1), zero_sign(), lattice).entries
    # r = d = 1, l = 0: the r' = 1 slot picks up (-1)^(d + l) = -1
    assert B[0, 0, 0, 1, 0, 0, 1] == 1.0
    assert B[0, 0, 0, 1, 1, 0, 1] == -1.0


def test_map_bulk_delta_constraint():
    lattice = LatticeSpec(3, 3)
    rng = np.random.default_rng(0)
    tensor = FPEPSTensor.random(rng, parity=0)
    B = map_to_peps(tensor, (2, 1), zero_sign(), lattice).entries
    for (k, l, lp, r, rp, u, d) in np.argwhere(np.abs(B) > 0):
        assert lp == (rp + u + d) % 2
    # exactly half the (l', r') slots can be populated
    assert np.count_nonzero(B) == 2 * np.count_nonzero(tensor.entries)


def test_map_last_column_pins_rprime():
    lattice = LatticeSpec(3, 3)
    rng = np.random.default_rng(1)
    tensor = FPEPSTensor.random(rng, parity=0)
    B = map_to_peps(tensor, (3, 2), zero_sign(), lattice).entries
    assert np.count_nonzero(B[:, :, :, :, 1, :, :]) == 0


def test_map_rejects_invalid_tensor():
    arr = np.zeros((2,) * 5, dtype=complex)
    arr[1, 0, 0, 0, 0] = 1.0
    with pytest.raises(ContractViolationError):
        map_to_peps(FPEPSTensor(arr, 0), (1, 1), zero_sign(), LatticeSpec(2, 2))


def test_zero_tensor_maps_to_zero():
    lattice = LatticeSpec(2, 2)
    zero = FPEPSTensor(np.zeros((2,) * 5, dtype=complex), 0)
    B = map_to_peps(zero, (2, 2), zero_sign(), lattice)
    assert np.count_nonzero(B.entries) == 0


def test_sign_function_depends_only_on_local_indices():
    # table shape and binary values are enforced by construction
    table = derive_sign_function(LatticeSpec(2, 2), (2, 1))
    assert table.table.shape == (2,) * 5
    assert set(np.unique(table.table)) <= {0, 1}


@pytest.mark.parametrize("shape", [(1, 2), (2, 1), (2, 2)])
def test_oracle_equivalence_even_tensors(shape):
    lattice = LatticeSpec(*shape)
    rng = np.random.default_rng(123)
    scale = 2.0 ** lattice.n_sites
    for _ in range(8):
        tensors = {s: FPEPSTensor.random(rng, parity=0) for s in lattice.sites()}
        oracle = build_fpeps(lattice, tensors)
        contracted = contract_peps(lattice, map_tensor_set(lattice, tensors))
        # the translation is exact including the global phase
        assert np.max(
            np.abs(contracted.amplitudes - scale * oracle.amplitudes)
        ) < 1e-10 * max(1.0, np.max(np.abs(contracted.amplitudes)))
        assert abs(oracle.normalized_overlap(contracted) - 1.0) < 1e-10


def test_oracle_equivalence_mixed_parity():
    lattice = LatticeSpec(2, 2)
    rng = np.random.default_rng(321)
    for _ in range(6):
        parity = {s: int(rng.integers(0, 2)) for s in lattice.sites()}
        tensors = {
            s: FPEPSTensor.random(rng, parity=parity[s]) for s in lattice.sites()
        }
        oracle = build_fpeps(lattice, tensors)
        contracted = contract_peps(lattice, map_tensor_set(lattice, tensors, parity))
        assert np.max(
            np.abs(contracted.amplitudes - 16.0 * oracle.amplitudes)
        ) < 1e-10 * max(1.0, np.max(np.abs(contracted.amplitudes)))


def test_parity_transport_telescopes():
    # the primed index of every bulk tensor equals the vertical parity sum
    # accumulated from the boundary column: r'(h) = sum_{j > h} (u_j + d_j)
    lattice = LatticeSpec(3, 1)
    rng = np.random.default_rng(5)
    tensors = {s: FPEPSTensor.random(rng, parity=0) for s in lattice.sites()}
    mapped = map_tensor_set(lattice, tensors)
    for h in (2, 3):
        B = mapped[(h, 1)].entries
        for (k, l, lp, r, rp, u, d) in np.argwhere(np.abs(B) > 0):
            assert lp == (rp + u + d) % 2
            if h == 3:
                assert rp == 0


def test_sign_tables_cover_all_sites():
    lattice = LatticeSpec(3, 3)
    tables = derive_sign_functions(lattice)
    assert set(tables) == set(lattice.sites())
