"""Exact contraction of small spin PEPS on a torus.

Tensors are B[k, l, l', r, r', u, d]; horizontal links identify (r, r') of
one site with (l, l') of its right neighbor, vertical links identify d with
the upper neighbor's u, both with periodic wraparound.  The extra primed
bond also wraps, but mapped tensor sets pin it to 0 on the boundary column,
which reproduces the open transport chain through a uniform code path.

The contraction is dense and column by column: each column collapses to a
transfer tensor over its physical legs and the 4-dimensional combined
(l, l') / (r, r') row indices, and columns are absorbed left to right.
"""
from __future__ import annotations

import numpy as np

from .errors import ContractViolationError, ResourceLimitError
from .fock import FockVector, physical_registry
from .lattice import LatticeSpec, Site
from .tensors import PEPSTensor

MAX_SITES = 12


def _column_tensor(lattice: LatticeSpec, tensors, h: int) -> np.ndarray:
    """Contract the vertical chain of column h into [phys, L, R]."""
    n_v = lattice.n_v
    blocks = []
    for v in range(1, n_v + 1):
        t = tensors[(h, v)]
        if not isinstance(t, PEPSTensor):
            t = PEPSTensor(np.asarray(t))
        blocks.append(t.entries.reshape(2, 4, 4, 2, 2))  # [k, L, R, u, d]

    if n_v == 1:
        # vertical self-loop: the single bond provides both u and d
        col = np.einsum("klruu->klr", blocks[0])
        return col.reshape(2, 4, 4)

    col = blocks[0]  # [p, L, R, u_top, d]
    for v in range(1, n_v):
        # merge: phys and L/R row-major (row 1 most significant)
        col = np.einsum("plrux,kabxd->pklarbud", col, blocks[v])
        p, k, l, a, r, b, u, d = col.shape
        col = col.reshape(p * k, l * a, r * b, u, d)
    return np.einsum("plruu->plr", col)


def contract_peps(lattice: LatticeSpec, tensors: dict[Site, PEPSTensor]) -> FockVector:
    """Full amplitude vector of the spin state, indexed in site M order."""
    if lattice.n_sites > MAX_SITES:
        raise ResourceLimitError(
            f"{lattice.n_sites} sites exceed the exact-contraction cap of {MAX_SITES}"
        )
    missing = [s for s in lattice.sites() if s not in tensors]
    if missing:
        raise ContractViolationError(f"missing tensors for sites {missing}")
    for s, t in tensors.items():
        arr = t.entries if isinstance(t, PEPSTensor) else np.asarray(t)
        if arr.shape != (2,) * 7:
            raise ContractViolationError(
                f"tensor at {s} has shape {arr.shape}, expected (2,)*7"
            )

    cols = [_column_tensor(lattice, tensors, h) for h in range(1, lattice.n_h + 1)]

    env = cols[0]  # [phys, L_open, R_current]
    for col in cols[1:]:
        env = np.einsum("plr,qrs->pqls", env, col)
        p, q, l, s = env.shape
        env = env.reshape(p * q, l, s)
    amps = np.einsum("pll->p", env)

    # env phys bits are column-major (column 1 most significant, rows inner);
    # reorder to the M-order Fock convention (site M on bit M-1).
    n = lattice.n_sites
    nd = amps.reshape((2,) * n)
    # source axis for site (h, v): (h-1)*n_v + (v-1); axis 0 most significant
    perm = []
    for t_axis in range(n):
        m = n - t_axis  # site with flat-index bit m-1
        h = (m - 1) % lattice.n_h + 1
        v = (m - 1) // lattice.n_h + 1
        perm.append((h - 1) * lattice.n_v + (v - 1))
    nd = np.transpose(nd, axes=perm)
    return FockVector(physical_registry(lattice), nd.reshape(-1))
