"""Dense Fock-space simulation of fermionic modes.

A basis state with occupation bits ``(k_0, ..., k_{n-1})`` represents
``a_0^dag^k_0 ... a_{n-1}^dag^k_{n-1} |vac>`` with the creation operators
applied in registry order (registry position i lives on bit i of the flat
amplitude index).  Creation/annihilation on mode ``j`` picks up the
Jordan-Wigner sign ``(-1)^(number of occupied modes before j)``.

Everything here is exact dense linear algebra on ``complex128`` amplitude
vectors; it is the ground truth the tensor-network and covariance-matrix
code is tested against.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    ContractViolationError,
    NumericalValidityError,
    ResourceLimitError,
    UndefinedStateError,
)
from .lattice import LatticeSpec, Site

DEFAULT_MODE_CAP = 24
DEFAULT_DIAG_CAP = 12

SPECIES = ("a", "alpha", "beta", "gamma", "delta")

# (species, (h, v)); "a" is the physical mode, the rest are auxiliary.
ModeLabel = tuple[str, Site]


def _bit_parity(x: np.ndarray | int):
    """Parity (0/1) of the set bits of x (works on arrays of non-negative ints)."""
    x = np.bitwise_and(x, 0xFFFFFFFF)
    x ^= x >> 16
    x ^= x >> 8
    x ^= x >> 4
    x ^= x >> 2
    x ^= x >> 1
    return np.bitwise_and(x, 1)


@dataclass(frozen=True)
class ModeRegistry:
    """Fixed total ordering of labeled fermionic modes."""

    labels: tuple[ModeLabel, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        idx = {label: i for i, label in enumerate(self.labels)}
        if len(idx) != len(self.labels):
            raise ContractViolationError("duplicate mode labels in registry")
        object.__setattr__(self, "_index", idx)

    def __len__(self) -> int:
        return len(self.labels)

    def position(self, label: ModeLabel) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ContractViolationError(f"unknown mode label {label!r}") from None

    def __contains__(self, label: ModeLabel) -> bool:
        return label in self._index


def physical_registry(lattice: LatticeSpec) -> ModeRegistry:
    """Physical modes only, ordered by M(h, v)."""
    return ModeRegistry(tuple(("a", s) for s in lattice.sites()))


def standard_registry(lattice: LatticeSpec) -> ModeRegistry:
    """Physical modes first (by M), then per-site auxiliary quadruples.

    The auxiliary groups are site-major in M order with the fixed internal
    order (alpha, beta, gamma, delta), so projecting all auxiliary modes onto
    the empty occupation is a contiguous slice of the amplitude array.
    """
    labels: list[ModeLabel] = [("a", s) for s in lattice.sites()]
    for s in lattice.sites():
        labels.extend((sp_, s) for sp_ in ("alpha", "beta", "gamma", "delta"))
    return ModeRegistry(tuple(labels))


@dataclass
class FockVector:
    """Dense state vector over a mode registry."""

    registry: ModeRegistry
    amplitudes: np.ndarray

    def __post_init__(self):
        n = len(self.registry)
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << n,):
            raise ContractViolationError(
                f"amplitude array has shape {self.amplitudes.shape}, "
                f"expected ({1 << n},) for {n} modes"
            )

    @property
    def n_modes(self) -> int:
        return len(self.registry)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "FockVector") -> complex:
        if self.registry != other.registry:
            raise ContractViolationError("overlap between different registries")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def normalized_overlap(self, other: "FockVector") -> float:
        """|<self|other>| / (|self| |other|); the phase-free comparison."""
        na, nb = self.norm(), other.norm()
        if na == 0.0 or nb == 0.0:
            raise UndefinedStateError("normalized overlap with a zero vector")
        return abs(self.overlap(other)) / (na * nb)

    def copy(self) -> "FockVector":
        return FockVector(self.registry, self.amplitudes.copy())

    def to_json(self) -> dict:
        return {
            "modes": [[sp_, list(site)] for sp_, site in self.registry.labels],
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FockVector":
        labels = tuple((sp_, (int(s[0]), int(s[1]))) for sp_, s in data["modes"])
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        return cls(ModeRegistry(labels), amps)


@dataclass(frozen=True)
class OperatorPoly:
    """Sum of scalar-weighted monomials in creation/annihilation operators.

    Each monomial is a tuple of ``(label, is_creation)`` factors; factors act
    right to left exactly as written, with no implicit normal ordering.
    """

    terms: tuple[tuple[complex, tuple[tuple[ModeLabel, bool], ...]], ...]

    @classmethod
    def from_terms(cls, terms) -> "OperatorPoly":
        return cls(tuple((complex(c), tuple(m)) for c, m in terms))

    def __mul__(self, other: "OperatorPoly") -> "OperatorPoly":
        out = []
        for ca, ma in self.terms:
            for cb, mb in other.terms:
                out.append((ca * cb, ma + mb))
        return OperatorPoly.from_terms(out)

    def scaled(self, factor: complex) -> "OperatorPoly":
        return OperatorPoly.from_terms((factor * c, m) for c, m in self.terms)


def vacuum(registry: ModeRegistry, cap: int = DEFAULT_MODE_CAP) -> FockVector:
    """All-modes-empty state."""
    n = len(registry)
    if n == 0:
        raise ContractViolationError("empty registry")
    if n > cap:
        raise ResourceLimitError(f"{n} modes exceed the dense-vector cap of {cap}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return FockVector(registry, amps)


def _apply_ladder(amps: np.ndarray, pos: int, create: bool) -> np.ndarray:
    """Apply a single creation/annihilation operator on registry position pos."""
    n_states = amps.shape[0]
    idx = np.arange(n_states)
    bit = 1 << pos
    below = bit - 1
    occupied = (idx & bit) != 0
    src = ~occupied if create else occupied
    sign = 1.0 - 2.0 * _bit_parity(idx[src] & below)
    out = np.zeros_like(amps)
    out[idx[src] ^ bit] = sign * amps[src]
    return out


def apply_poly(state: FockVector, op: OperatorPoly) -> FockVector:
    """Linear action of an operator polynomial on a state."""
    reg = state.registry
    result = np.zeros_like(state.amplitudes)
    for coeff, monomial in op.terms:
        work = state.amplitudes
        for label, create in reversed(monomial):
            work = _apply_ladder(work, reg.position(label), create)
            if not work.any():
                break
        result += coeff * work
    return FockVector(reg, result)


def majorana_vector(state: FockVector, pos: int, which: int) -> np.ndarray:
    """Amplitudes of c^(which)_pos |state>, which in {1, 2}.

    c^(1) = a^dag + a and c^(2) = -i (a^dag - a).
    """
    amps = state.amplitudes
    idx = np.arange(amps.shape[0])
    bit = 1 << pos
    below = bit - 1
    sign = 1.0 - 2.0 * _bit_parity(idx & below)
    out = np.empty_like(amps)
    if which == 1:
        out[idx ^ bit] = sign * amps
    elif which == 2:
        occupied = (idx & bit) != 0
        phase = np.where(occupied, 1j, -1j)
        out[idx ^ bit] = phase * sign * amps
    else:
        raise ContractViolationError(f"Majorana type must be 1 or 2, got {which}")
    return out


def covariance_matrix(state: FockVector, modes=None, atol: float = 1e-12) -> np.ndarray:
    """Majorana covariance matrix <(i/2)[c_k, c_l]> of (a subset of) the modes.

    Returned qp-ordered: all type-1 Majoranas of the selected modes first,
    then all type-2, both in registry order of the selection.
    """
    nrm = state.norm()
    if nrm < 1e-14:
        raise UndefinedStateError("covariance matrix of a zero-norm state")
    positions = list(range(state.n_modes)) if modes is None else [
        state.registry.position(m) if not isinstance(m, int) else m for m in modes
    ]
    psi = state.amplitudes / nrm
    unit = FockVector(state.registry, psi)
    vecs = [majorana_vector(unit, p, 1) for p in positions]
    vecs += [majorana_vector(unit, p, 2) for p in positions]
    m2 = len(vecs)
    gamma = np.zeros((m2, m2))
    for k in range(m2):
        for l in range(k + 1, m2):
            # c_k is self-adjoint, so <psi|c_k c_l|psi> = <c_k psi|c_l psi>
            val = 1j * np.vdot(vecs[k], vecs[l])
            if abs(val.imag) > 1e-9:
                raise NumericalValidityError(
                    f"covariance entry not real: {val} at ({k}, {l})"
                )
            gamma[k, l] = val.real
            gamma[l, k] = -val.real
    if np.max(np.abs(gamma + gamma.T)) > atol:
        raise NumericalValidityError("covariance matrix not antisymmetric")
    return gamma


def _sparse_majorana(n: int, pos: int, which: int) -> sp.csr_matrix:
    dim = 1 << n
    idx = np.arange(dim)
    bit = 1 << pos
    below = bit - 1
    sign = 1.0 - 2.0 * _bit_parity(idx & below)
    if which == 1:
        data = sign.astype(complex)
    else:
        occupied = (idx & bit) != 0
        data = np.where(occupied, 1j, -1j) * sign
    rows = idx ^ bit
    return sp.csr_matrix((data, (rows, idx)), shape=(dim, dim))


def quadratic_operator(h: np.ndarray, n_modes: int) -> sp.csr_matrix:
    """Sparse many-body H = i sum_kl h_kl c_k c_l for real antisymmetric h.

    The Majorana index runs qp-ordered over the registry: k < n_modes is
    c^(1) of mode k, k >= n_modes is c^(2) of mode k - n_modes.
    """
    h = np.asarray(h, dtype=float)
    if h.shape != (2 * n_modes, 2 * n_modes):
        raise ContractViolationError(
            f"coefficient matrix shape {h.shape} does not match {n_modes} modes"
        )
    if np.max(np.abs(h + h.T)) > 1e-12:
        raise ContractViolationError("quadratic coefficient matrix must be antisymmetric")
    dim = 1 << n_modes
    majoranas = {}

    def cop(k):
        if k not in majoranas:
            which = 1 if k < n_modes else 2
            majoranas[k] = _sparse_majorana(n_modes, k % n_modes, which)
        return majoranas[k]

    H = sp.csr_matrix((dim, dim), dtype=complex)
    for k in range(2 * n_modes):
        for l in range(k + 1, 2 * n_modes):
            if h[k, l] != 0.0:
                H = H + (2j * h[k, l]) * (cop(k) @ cop(l))
    return H


def apply_quadratic_h(state: FockVector, h: np.ndarray) -> FockVector:
    """Apply H = i sum h_kl c_k c_l to a state."""
    H = quadratic_operator(h, state.n_modes)
    return FockVector(state.registry, H @ state.amplitudes)


def exact_ground_state(
    h: np.ndarray, registry: ModeRegistry, cap: int = DEFAULT_DIAG_CAP
) -> tuple[float, FockVector]:
    """Minimal eigenpair of the dense many-body quadratic Hamiltonian."""
    n = len(registry)
    if n > cap:
        raise ResourceLimitError(f"{n} modes exceed the diagonalization cap of {cap}")
    h = np.asarray(h, dtype=float)
    if not np.any(np.abs(h) > 0):
        return 0.0, vacuum(registry)
    H = quadratic_operator(h, n)
    dim = H.shape[0]
    if dim <= 64:
        w, v = np.linalg.eigh(H.toarray())
        return float(w[0]), FockVector(registry, v[:, 0])
    w, v = spla.eigsh(H, k=1, which="SA")
    return float(w[0]), FockVector(registry, v[:, 0])


def many_body_gap(h: np.ndarray, registry: ModeRegistry, cap: int = DEFAULT_DIAG_CAP) -> float:
    """E_1 - E_0 of the dense quadratic Hamiltonian."""
    n = len(registry)
    if n > cap:
        raise ResourceLimitError(f"{n} modes exceed the diagonalization cap of {cap}")
    H = quadratic_operator(h, n)
    if H.shape[0] <= 128:
        w = np.linalg.eigvalsh(H.toarray())
    else:
        w = np.sort(spla.eigsh(H, k=2, which="SA", return_eigenvectors=False))
    return float(w[1] - w[0])
