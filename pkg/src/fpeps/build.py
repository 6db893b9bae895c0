"""Exact construction of fermionic PEPS on small periodic lattices.

The state is assembled from maximally entangled auxiliary bonds

    H(h,v) = (1 + beta^dag_(h,v) alpha^dag_(h+1,v)) / sqrt(2)
    V(h,v) = (1 + delta^dag_(h,v) gamma^dag_(h,v+1)) / sqrt(2)

followed by one local projector per site,

    Q(h,v) = sum A[k,l,r,u,d] a^dag^k alpha^l beta^r gamma^u delta^d,

and a projection of every auxiliary mode onto the empty occupation.  The
site product of projectors is taken ascending in M left to right, so the
highest-M projector acts on the state first; for even-parity tensors the
order is immaterial since the projectors commute.

``build_fpeps`` keeps only the modes that are currently live (bond applied,
projector pending), which keeps the dense arrays small; the result is
identical to composing ``apply_poly`` over the full registry.
"""
from __future__ import annotations

import numpy as np

from .errors import ContractViolationError, ResourceLimitError
from .fock import (
    DEFAULT_MODE_CAP,
    FockVector,
    ModeRegistry,
    OperatorPoly,
    _bit_parity,
    physical_registry,
    standard_registry,
)
from .lattice import LatticeSpec, Site
from .tensors import FPEPSTensor

SQRT_HALF = 1.0 / np.sqrt(2.0)


def bond_h(site: Site, lattice: LatticeSpec) -> OperatorPoly:
    """Horizontal entangling bond leaving ``site`` to the right."""
    s = lattice.wrap(site)
    t = lattice.right(s)
    return OperatorPoly.from_terms([
        (SQRT_HALF, ()),
        (SQRT_HALF, ((("beta", s), True), (("alpha", t), True))),
    ])


def bond_v(site: Site, lattice: LatticeSpec) -> OperatorPoly:
    """Vertical entangling bond leaving ``site`` upward (v + 1)."""
    s = lattice.wrap(site)
    t = lattice.north(s)
    return OperatorPoly.from_terms([
        (SQRT_HALF, ()),
        (SQRT_HALF, ((("delta", s), True), (("gamma", t), True))),
    ])


def projector_q(site: Site, tensor: FPEPSTensor) -> OperatorPoly:
    """Local projector built from a parity-valid coefficient tensor."""
    tensor.validate()
    s = site
    terms = []
    for (k, l, r, u, d), coeff in tensor.nonzero_items():
        monomial = []
        if k:
            monomial.append((("a", s), True))
        if l:
            monomial.append((("alpha", s), False))
        if r:
            monomial.append((("beta", s), False))
        if u:
            monomial.append((("gamma", s), False))
        if d:
            monomial.append((("delta", s), False))
        terms.append((coeff, tuple(monomial)))
    return OperatorPoly.from_terms(terms)


class _ActiveState:
    """Flat dense amplitudes over the currently live subset of a registry.

    Bit i of the flat index is the occupation of the i-th live mode, where
    live modes are kept sorted by their registry position so Jordan-Wigner
    signs agree with the full-registry computation (all non-live modes are
    empty and contribute no parity).
    """

    def __init__(self, registry: ModeRegistry, initial_positions):
        self.registry = registry
        self.positions = sorted(initial_positions)
        self.amps = np.zeros(1 << len(self.positions), dtype=complex)
        self.amps[0] = 1.0

    def _slot(self, position: int) -> int:
        return self.positions.index(position)

    def add_mode(self, position: int):
        """Insert an empty live mode, keeping registry order."""
        slot = np.searchsorted(self.positions, position)
        idx = np.arange(self.amps.shape[0])
        low = idx & ((1 << slot) - 1)
        new_idx = low | ((idx >> slot) << (slot + 1))
        out = np.zeros(self.amps.shape[0] * 2, dtype=complex)
        out[new_idx] = self.amps
        self.positions.insert(slot, position)
        self.amps = out

    def apply_monomial(self, coeff: complex, factors):
        """Accumulates coeff * (monomial acting on current amps); returns array.

        ``factors`` is a sequence of (slot, is_creation); they act right to
        left as written.
        """
        work = self.amps
        idx = np.arange(work.shape[0])
        for slot, create in reversed(list(factors)):
            bit = 1 << slot
            below = bit - 1
            occupied = (idx & bit) != 0
            src = ~occupied if create else occupied
            sign = 1.0 - 2.0 * _bit_parity(idx[src] & below)
            out = np.zeros_like(work)
            out[idx[src] ^ bit] = sign * work[src]
            work = out
            if not work.any():
                break
        return coeff * work

    def apply_pair_creation(self, pos_first: int, pos_second: int, amplitude: complex):
        """Apply (1 + amplitude * c^dag_first c^dag_second) for two fresh modes."""
        self.add_mode(pos_first)
        self.add_mode(pos_second)
        s1, s2 = self._slot(pos_first), self._slot(pos_second)
        created = self.apply_monomial(amplitude, [(s1, True), (s2, True)])
        self.amps = self.amps + created

    def apply_site_projector(self, site: Site, tensor: FPEPSTensor):
        labels = [("a", site), ("alpha", site), ("beta", site),
                  ("gamma", site), ("delta", site)]
        slots = [self._slot(self.registry.position(lab)) for lab in labels]
        total = np.zeros_like(self.amps)
        for (k, l, r, u, d), coeff in tensor.nonzero_items():
            factors = []
            if k:
                factors.append((slots[0], True))
            if l:
                factors.append((slots[1], False))
            if r:
                factors.append((slots[2], False))
            if u:
                factors.append((slots[3], False))
            if d:
                factors.append((slots[4], False))
            total += self.apply_monomial(coeff, factors)
        self.amps = total

    def project_empty(self, positions):
        """Project the given live modes onto occupation 0 and drop them."""
        drop_slots = sorted(self._slot(p) for p in positions)
        keep_slots = [s for s in range(len(self.positions)) if s not in drop_slots]
        n_new = len(keep_slots)
        new_idx = np.arange(1 << n_new)
        old_idx = np.zeros(1 << n_new, dtype=np.int64)
        for rank, slot in enumerate(keep_slots):
            old_idx |= ((new_idx >> rank) & 1) << slot
        self.amps = self.amps[old_idx]
        self.positions = [self.positions[s] for s in keep_slots]


def build_fpeps(
    lattice: LatticeSpec,
    tensors: dict[Site, FPEPSTensor],
    cap: int = DEFAULT_MODE_CAP,
) -> FockVector:
    """Assemble the physical state exactly; may be the zero vector.

    Tensors are keyed by site (h, v); every site must be present.  The
    returned vector lives on the physical registry in M order.
    """
    total_modes = 5 * lattice.n_sites
    if total_modes > cap:
        raise ResourceLimitError(
            f"{total_modes} combined modes exceed the dense cap of {cap}"
        )
    sites = lattice.sites()
    missing = [s for s in sites if s not in tensors]
    if missing:
        raise ContractViolationError(f"missing tensors for sites {missing}")
    for s in sites:
        tensors[s].validate()

    registry = standard_registry(lattice)
    state = _ActiveState(registry, [registry.position(("a", s)) for s in sites])

    h_done: set[Site] = set()
    v_done: set[Site] = set()

    def ensure_h(source: Site):
        if source in h_done:
            return
        h_done.add(source)
        t = lattice.right(source)
        state.apply_pair_creation(
            registry.position(("beta", source)),
            registry.position(("alpha", t)),
            1.0,
        )
        state.amps *= SQRT_HALF

    def ensure_v(source: Site):
        if source in v_done:
            return
        v_done.add(source)
        t = lattice.north(source)
        state.apply_pair_creation(
            registry.position(("delta", source)),
            registry.position(("gamma", t)),
            1.0,
        )
        state.amps *= SQRT_HALF

    # The site product ascending in M means the last site acts first.
    for site in reversed(sites):
        ensure_h(site)              # provides beta(site)
        ensure_h(lattice.left(site))   # provides alpha(site)
        ensure_v(site)              # provides delta(site)
        ensure_v(lattice.south(site))  # provides gamma(site)
        state.apply_site_projector(site, tensors[site])
        state.project_empty(
            [registry.position((sp_, site))
             for sp_ in ("alpha", "beta", "gamma", "delta")]
        )

    phys = physical_registry(lattice)
    expected = [registry.position(("a", s)) for s in sites]
    assert state.positions == expected
    return FockVector(phys, state.amps)


def build_fpeps_reference(
    lattice: LatticeSpec,
    tensors: dict[Site, FPEPSTensor],
    cap: int = DEFAULT_MODE_CAP,
) -> FockVector:
    """Slow full-registry construction used to cross-check ``build_fpeps``."""
    from .fock import apply_poly, vacuum

    total_modes = 5 * lattice.n_sites
    if total_modes > cap:
        raise ResourceLimitError(
            f"{total_modes} combined modes exceed the dense cap of {cap}"
        )
    registry = standard_registry(lattice)
    state = vacuum(registry, cap=cap)
    for site in lattice.sites():
        state = apply_poly(state, bond_h(site, lattice))
        state = apply_poly(state, bond_v(site, lattice))
    for site in reversed(lattice.sites()):
        state = apply_poly(state, projector_q(site, tensors[site]))
    n_phys = lattice.n_sites
    phys_amps = state.amplitudes[: 1 << n_phys].copy()
    return FockVector(physical_registry(lattice), phys_amps)
