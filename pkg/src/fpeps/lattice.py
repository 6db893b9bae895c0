"""Periodic 2D lattice geometry and site bookkeeping.

Sites are addressed as ``(h, v)`` with 1-based column ``h`` in ``1..n_h`` and
1-based row ``v`` in ``1..n_v``.  The linear site order is
``M(h, v) = (v - 1) * n_h + h``; every array indexed by site uses ``M - 1``.
Boundaries are always periodic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError

Site = tuple[int, int]


@dataclass(frozen=True)
class LatticeSpec:
    """Rectangular torus of ``n_h`` columns and ``n_v`` rows."""

    n_h: int
    n_v: int

    def __post_init__(self):
        if self.n_h < 1 or self.n_v < 1:
            raise ContractViolationError(
                f"lattice dimensions must be positive, got {self.n_h}x{self.n_v}"
            )

    @property
    def n_sites(self) -> int:
        return self.n_h * self.n_v

    def site_index(self, site: Site) -> int:
        """Zero-based linear index of ``site`` (M(h, v) - 1)."""
        h, v = self.wrap(site)
        return (v - 1) * self.n_h + (h - 1)

    def wrap(self, site: Site) -> Site:
        h, v = site
        return ((h - 1) % self.n_h + 1, (v - 1) % self.n_v + 1)

    def sites(self) -> list[Site]:
        """All sites in M order."""
        return [(h, v) for v in range(1, self.n_v + 1) for h in range(1, self.n_h + 1)]

    def right(self, site: Site) -> Site:
        h, v = site
        return self.wrap((h + 1, v))

    def left(self, site: Site) -> Site:
        h, v = site
        return self.wrap((h - 1, v))

    def north(self, site: Site) -> Site:
        """Neighbor reached by the vertical bond leaving ``site`` (v + 1)."""
        h, v = site
        return self.wrap((h, v + 1))

    def south(self, site: Site) -> Site:
        h, v = site
        return self.wrap((h, v - 1))

    def momenta(self) -> list[tuple[float, float]]:
        """Reciprocal-lattice angles (2*pi*k_h/n_h, 2*pi*k_v/n_v), k-major in M order."""
        out = []
        for kv in range(self.n_v):
            for kh in range(self.n_h):
                out.append((2.0 * np.pi * kh / self.n_h, 2.0 * np.pi * kv / self.n_v))
        return out

    def displacement(self, a: Site, b: Site) -> tuple[int, int]:
        """Minimal representative of b - a modulo the torus, in [0, n)."""
        ah, av = self.wrap(a)
        bh, bv = self.wrap(b)
        return ((bh - ah) % self.n_h, (bv - av) % self.n_v)


def parse_lattice(text: str) -> LatticeSpec:
    """Parse '3x3'-style lattice descriptions."""
    try:
        a, b = text.lower().split("x")
        return LatticeSpec(int(a), int(b))
    except (ValueError, TypeError) as exc:
        raise ContractViolationError(f"cannot parse lattice spec {text!r}") from exc
