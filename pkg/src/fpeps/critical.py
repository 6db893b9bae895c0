"""The critical free-fermion example: channel, site tensor, parent model.

One physical mode per site maps from the four virtual bond modes through a
Gaussian projector.  Its channel blocks (qp ordering, species alpha..delta)
are fixed rational matrices; the resulting momentum-space state has

    p(phi)/d(phi) = (sin phi1 - sin phi2) / (-1 + sin phi1 sin phi2)
    q(phi)/d(phi) = cos phi1 cos phi2 / (-1 + sin phi1 sin phi2)

and the projection determinant factorizes as

    det(D - omega_hat(phi)) = 16 (1 - sin phi1 sin phi2)
                              cos^2(phi1/2) cos^2(phi2/2).

Its zeros on pi-lines are removable loop artifacts (the state's covariance
stays finite; a boundary-bond modification could restore the norm, which
this package only detects and reports).  The zeros where
sin phi1 sin phi2 = 1 are inherent: the state is undefined whenever the
torus contains them, which happens exactly when both dimensions are
multiples of four.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractViolationError, NumericalValidityError, ZeroNormError
from .fock import FockVector, ModeRegistry, OperatorPoly, apply_poly, vacuum
from .gaussian import GaussianChannel, gamma_out_hat
from .lattice import LatticeSpec, Site
from .quadratic import DiracQuadratic
from .tensors import FPEPSTensor

EXAMPLE_B = 0.5 * np.array([
    [1, -1, 0, 0, -1, 1, 0, 0],
    [0, 0, -1, 1, 0, 0, 1, -1],
], dtype=float)

EXAMPLE_D = 0.25 * np.array([
    [0, 2, 1, 1, 0, 2, -1, -1],
    [-2, 0, 1, 1, -2, 0, -1, -1],
    [-1, -1, 0, 2, 1, 1, 0, 2],
    [-1, -1, -2, 0, 1, 1, -2, 0],
    [0, 2, -1, -1, 0, 2, 1, 1],
    [-2, 0, -1, -1, -2, 0, 1, 1],
    [1, 1, 0, 2, -1, -1, 0, 2],
    [1, 1, -2, 0, -1, -1, -2, 0],
], dtype=float)


def example_channel() -> GaussianChannel:
    """The one-site Gaussian map of the critical model."""
    return GaussianChannel(np.zeros((2, 2)), EXAMPLE_B, EXAMPLE_D)


def closed_form_ratios(phi, atol: float = 1e-12) -> tuple[float, float]:
    """(p/d, q/d) of the critical model at one momentum."""
    s1, s2 = np.sin(phi[0]), np.sin(phi[1])
    den = -1.0 + s1 * s2
    if abs(den) < atol:
        raise ZeroNormError(
            f"momentum {tuple(phi)} sits on the singular set of the model",
            momenta=[tuple(phi)],
        )
    return (s1 - s2) / den, float(np.cos(phi[0]) * np.cos(phi[1])) / den


# ---------------------------------------------------------------------------
# projector tensor


def site_registry(site: Site = (1, 1)) -> ModeRegistry:
    return ModeRegistry((
        ("a", site), ("alpha", site), ("beta", site), ("gamma", site), ("delta", site),
    ))


def _generator_poly(site: Site) -> OperatorPoly:
    a = ("a", site)
    al, be, ga, de = ("alpha", site), ("beta", site), ("gamma", site), ("delta", site)

    def ann(label):
        return (label, False)

    return OperatorPoly.from_terms([
        (-1j, (ann(al), ann(ga))),
        (-1.0, (ann(al), ann(de))),
        (-1.0, (ann(be), ann(ga))),
        (+1j, (ann(be), ann(de))),
        (+1.0, (ann(al), ann(be))),
        (+1.0, (ann(ga), ann(de))),
        (-1j, ((a, True), ann(al))),
        (-1.0, ((a, True), ann(be))),
        (-1.0, ((a, True), ann(ga))),
        (+1j, ((a, True), ann(de))),
    ])


def example_projector_tensor() -> FPEPSTensor:
    """Coefficients A[k, l, r, u, d] of the exponential Gaussian projector.

    The exponential is expanded exactly in the five-mode Fock space (the
    series terminates by nilpotency); the resulting tensor is even-parity
    with 16 nonzero entries.
    """
    site = (1, 1)
    reg = site_registry(site)
    gen = _generator_poly(site)
    dim = 1 << len(reg)
    mat = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        basis = FockVector(reg, np.eye(dim, dtype=complex)[j])
        mat[:, j] = apply_poly(basis, gen).amplitudes
    Q = scipy.linalg.expm(mat)

    entries = np.zeros((2,) * 5, dtype=complex)
    for (k, l, r, u, d) in np.ndindex(*(2,) * 5):
        col = (l << 1) | (r << 2) | (u << 3) | (d << 4)
        row = k
        amp = Q[row, col]
        if (k + l + r + u + d) % 2:
            if abs(amp) > 1e-12:
                raise NumericalValidityError(
                    f"odd-parity amplitude {amp} at {(k, l, r, u, d)}"
                )
            continue
        if abs(amp) < 1e-14:
            continue
        # reference sign of the monomial a^dag^k alpha^l beta^r gamma^u delta^d
        mono = []
        if k:
            mono.append((("a", site), True))
        if l:
            mono.append((("alpha", site), False))
        if r:
            mono.append((("beta", site), False))
        if u:
            mono.append((("gamma", site), False))
        if d:
            mono.append((("delta", site), False))
        probe = np.zeros(dim, dtype=complex)
        probe[col] = 1.0
        ref = apply_poly(
            FockVector(reg, probe), OperatorPoly.from_terms([(1.0, tuple(mono))])
        ).amplitudes[row]
        if abs(ref) < 0.5:
            raise NumericalValidityError(
                f"reference monomial vanished at {(k, l, r, u, d)}"
            )
        entries[k, l, r, u, d] = amp / ref
    return FPEPSTensor(entries, parity=0)


def example_tensor_set(lattice: LatticeSpec) -> dict[Site, FPEPSTensor]:
    tensor = example_projector_tensor()
    return {s: tensor for s in lattice.sites()}


# ---------------------------------------------------------------------------
# parent-model coefficient table


def hcrit_coefficients(lattice: LatticeSpec | None = None) -> DiracQuadratic:
    """Literal coupling table of the critical parent Hamiltonian.

    Vertical pair creation 2i, horizontal pair creation -2i, and diagonal
    hopping -1 to both (h+1, v+1) and (h+1, v-1).  When a lattice is given,
    both dimensions must be odd (unique ground state).
    """
    if lattice is not None and (lattice.n_h % 2 == 0 or lattice.n_v % 2 == 0):
        raise ContractViolationError(
            f"critical model needs odd torus dimensions, got {lattice.n_h}x{lattice.n_v}"
        )
    return DiracQuadratic(
        pairing={(0, 1): 2j, (1, 0): -2j},
        hopping={(1, 1): -1.0, (1, -1): -1.0},
        mu=0.0,
        constant=0.0,
    )


# ---------------------------------------------------------------------------
# zero-norm census


@dataclass(frozen=True)
class NormZeroReport:
    lattice: LatticeSpec
    removable: tuple
    essential: tuple

    @property
    def state_defined(self) -> bool:
        return len(self.essential) == 0


def norm_zero_locator(lattice: LatticeSpec, atol: float = 1e-9) -> NormZeroReport:
    """Zeros of the projection determinant on the reciprocal lattice.

    Essential zeros (sin phi1 sin phi2 = 1) make the state undefined;
    removable ones (a momentum component on {0, pi}) are correlated-loop
    artifacts that leave the covariance data intact.
    """
    channel = example_channel()
    removable, essential = [], []
    for phi in lattice.momenta():
        fb = gamma_out_hat(channel, phi)
        if abs(fb.d) > atol:
            continue
        s1s2 = np.sin(phi[0]) * np.sin(phi[1])
        on_line = any(
            min(abs(c), abs(c - np.pi), abs(c - 2 * np.pi)) < 1e-9 for c in phi
        )
        if abs(s1s2 - 1.0) < 1e-9:
            essential.append(phi)
        elif on_line:
            removable.append(phi)
        else:
            raise NumericalValidityError(
                f"unclassified determinant zero at momentum {phi}"
            )
    return NormZeroReport(lattice, tuple(removable), tuple(essential))


# ---------------------------------------------------------------------------
# torus scans


def ground_state_blocks(torus: int) -> dict[str, np.ndarray]:
    """Displacement blocks t^{ab}(Delta) of the ground covariance on a torus.

    Entry arrays are indexed [dh, dv]; t11 couples two type-1 Majoranas,
    t12 type-1 with type-2 (t21 = -t12, t22 = -t11 for this model).
    """
    if torus % 2 == 0:
        raise ContractViolationError("torus size must be odd (unique ground state)")
    phis = 2.0 * np.pi * np.arange(torus) / torus
    s1 = np.sin(phis)[:, None]
    s2 = np.sin(phis)[None, :]
    den = -1.0 + s1 * s2
    rp = (s1 - s2) / den
    rq = (np.cos(phis)[:, None] * np.cos(phis)[None, :]) / den
    t11 = np.fft.ifft2(1j * rp)
    t12 = np.fft.ifft2(rq)
    if max(np.max(np.abs(t11.imag)), np.max(np.abs(t12.imag))) > 1e-11:
        raise NumericalValidityError("ground-state blocks should be real")
    return {"t11": t11.real, "t12": t12.real}


def block_covariance(blocks: dict[str, np.ndarray], torus: int, length: int) -> np.ndarray:
    """qp-ordered covariance matrix of an L x L block of sites."""
    t11, t12 = blocks["t11"], blocks["t12"]
    sites = [(h, v) for v in range(length) for h in range(length)]
    m = len(sites)
    gamma = np.zeros((2 * m, 2 * m))
    for i, (h1, v1) in enumerate(sites):
        for j, (h2, v2) in enumerate(sites):
            dh = (h2 - h1) % torus
            dv = (v2 - v1) % torus
            gamma[i, j] = t11[dh, dv]
            gamma[i, m + j] = t12[dh, dv]
            gamma[m + i, j] = -t12[(-dh) % torus, (-dv) % torus]
            gamma[m + i, m + j] = -t11[dh, dv]
    return gamma


def entropy_scan(torus: int, lengths) -> list[tuple[int, float]]:
    """Block entanglement entropy S(L) in bits on an odd torus."""
    from .quadratic import block_entropy

    blocks = ground_state_blocks(torus)
    out = []
    for length in lengths:
        if length >= torus:
            raise ContractViolationError("block must be smaller than the torus")
        gamma = block_covariance(blocks, torus, length)
        out.append((length, block_entropy(gamma, range(length * length))))
    return out


def gap_scan(sizes) -> list[tuple[int, float]]:
    """Single-particle gap of the parent model on odd N x N tori."""
    from .quadratic import parent_hamiltonian, single_particle_spectrum

    ham = parent_hamiltonian(example_channel(), radius_cap=2)
    out = []
    for n in sizes:
        if n % 2 == 0:
            raise ContractViolationError(f"torus size {n} must be odd")
        _, gap = single_particle_spectrum(ham, LatticeSpec(n, n))
        out.append((n, gap))
    return out
