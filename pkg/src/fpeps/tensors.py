"""Site tensors for the fermionic and spin descriptions.

``FPEPSTensor`` holds the coefficients A[k, l, r, u, d] of a local fermionic
projector; nonzero entries require (k + l + r + u + d) mod 2 == parity.
Index names: k physical, l left, r right, u up (bond toward v-1), d down
(bond toward v+1).

``PEPSTensor`` is the mapped spin tensor B[k, l, l', r, r', u, d] with one
extra two-valued horizontal index pair (l', r').  First-column tensors only
populate l' = 0 and last-column tensors only r' = 0, which makes the extra
bonds an open chain along each row while every tensor keeps one uniform
shape.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError

_IDX = ((0, 1),) * 5


@dataclass(frozen=True)
class FPEPSTensor:
    entries: np.ndarray  # complex, shape (2, 2, 2, 2, 2), indexed [k, l, r, u, d]
    parity: int = 0

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.shape != (2,) * 5:
            raise ContractViolationError(
                f"fPEPS tensor must have shape (2,)*5, got {arr.shape}"
            )
        object.__setattr__(self, "entries", arr)
        if self.parity not in (0, 1):
            raise ContractViolationError(f"parity must be 0 or 1, got {self.parity}")

    def validate(self, atol: float = 0.0):
        bad = []
        for k in (0, 1):
            for l in (0, 1):
                for r in (0, 1):
                    for u in (0, 1):
                        for d in (0, 1):
                            if (k + l + r + u + d) % 2 != self.parity:
                                if abs(self.entries[k, l, r, u, d]) > atol:
                                    bad.append((k, l, r, u, d))
        if bad:
            raise ContractViolationError(
                f"parity-{self.parity} tensor has forbidden entries at {bad}"
            )

    def nonzero_items(self):
        for idx in np.ndindex(*(2,) * 5):
            val = self.entries[idx]
            if val != 0:
                yield idx, complex(val)

    @classmethod
    def random(cls, rng: np.random.Generator, parity: int = 0) -> "FPEPSTensor":
        arr = np.zeros((2,) * 5, dtype=complex)
        for idx in np.ndindex(*(2,) * 5):
            if sum(idx) % 2 == parity:
                arr[idx] = rng.standard_normal() + 1j * rng.standard_normal()
        return cls(arr, parity)


@dataclass(frozen=True)
class PEPSTensor:
    entries: np.ndarray  # complex, shape (2,)*7, indexed [k, l, lp, r, rp, u, d]

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.shape != (2,) * 7:
            raise ContractViolationError(
                f"PEPS tensor must have shape (2,)*7, got {arr.shape}"
            )
        object.__setattr__(self, "entries", arr)


@dataclass(frozen=True)
class SignFunction:
    """Per-site local sign table f(k, u, d, l, r) in {0, 1}."""

    table: np.ndarray  # uint8, shape (2,)*5, indexed [k, u, d, l, r]

    def __post_init__(self):
        arr = np.asarray(self.table, dtype=np.uint8)
        if arr.shape != (2,) * 5:
            raise ContractViolationError(
                f"sign table must have shape (2,)*5, got {arr.shape}"
            )
        if not np.isin(arr, (0, 1)).all():
            raise ContractViolationError("sign table values must be 0 or 1")
        object.__setattr__(self, "table", arr)

    def __call__(self, k: int, u: int, d: int, l: int, r: int) -> int:
        return int(self.table[k, u, d, l, r])
