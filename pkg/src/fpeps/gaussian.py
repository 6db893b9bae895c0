"""Majorana covariance matrices and pure Gaussian maps on a torus.

Conventions, used consistently across the package:

* Majorana operators c^(1) = a^dag + a, c^(2) = -i (a^dag - a); covariance
  Gamma_kl = <(i/2)[c_k, c_l]> is real antisymmetric, with Gamma^2 = -1 for
  pure states.
* qp ordering: all type-1 components first, then all type-2.  Within a type
  block, modes are site-major (M order) with the per-site auxiliary order
  (alpha, beta, gamma, delta).
* Block Fourier transform of a translationally invariant matrix:
  M_hat(phi)[mu, nu] = sum_Delta M[(s, mu), (s + Delta, nu)] e^{-i phi.Delta},
  i.e. momentum blocks of F M F^dag with Fourier modes carrying e^{+i phi.n}.

The virtual modes of one site connect to the neighbors through maximally
entangled bonds; the resulting 4x4 bond covariance matrix in the ordering
(c1_first, c1_second, c2_first, c2_second) is

    [[ 0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]]

where "first" is the mode whose creator appears left in the bond operator
(beta for horizontal bonds, delta for vertical ones).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ContractViolationError,
    NumericalValidityError,
    ZeroNormError,
)
from .lattice import LatticeSpec

ANTISYM_ATOL = 1e-12
PURITY_ATOL = 1e-10
ZERO_NORM_ATOL = 1e-9

# species offsets inside a site's virtual quadruple
ALPHA, BETA, GAMMA, DELTA = 0, 1, 2, 3


@dataclass(frozen=True)
class MajoranaCM:
    """Real antisymmetric covariance matrix in qp ordering."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise ContractViolationError(f"covariance matrix shape {mat.shape} invalid")
        if np.max(np.abs(mat + mat.T)) > ANTISYM_ATOL:
            raise ContractViolationError("covariance matrix must be antisymmetric")
        object.__setattr__(self, "matrix", mat)

    @property
    def m(self) -> int:
        """Number of fermionic modes."""
        return self.matrix.shape[0] // 2

    def purity_defect(self) -> float:
        """max |Gamma^2 + 1|; ~0 for pure Gaussian states."""
        mat = self.matrix
        return float(np.max(np.abs(mat @ mat + np.eye(mat.shape[0]))))

    def is_pure(self, atol: float = PURITY_ATOL) -> bool:
        return self.purity_defect() <= atol


def interleaved_from_qp(m: int) -> np.ndarray:
    """Index array reordering qp layout to per-mode (c1, c2) interleaving."""
    idx = np.empty(2 * m, dtype=int)
    idx[0::2] = np.arange(m)
    idx[1::2] = np.arange(m) + m
    return idx


def qp_from_interleaved(m: int) -> np.ndarray:
    """Index array reordering per-mode interleaved layout back to qp."""
    idx = np.empty(2 * m, dtype=int)
    idx[:m] = 2 * np.arange(m)
    idx[m:] = 2 * np.arange(m) + 1
    return idx


@dataclass(frozen=True)
class GaussianChannel:
    """Pure Gaussian map Gamma_out = B (D - Gamma_in)^-1 B^T + A.

    A is 2p x 2p, B is 2p x 2q and D is 2q x 2q for p output and q input
    modes; the assembled block matrix [[A, B], [-B^T, D]] must be
    antisymmetric and orthogonal.
    """

    A: np.ndarray
    B: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        D = np.asarray(self.D, dtype=float)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "D", D)
        if A.shape[0] != A.shape[1] or A.shape[0] != B.shape[0]:
            raise ContractViolationError("channel block A/B shapes inconsistent")
        if D.shape[0] != D.shape[1] or D.shape[0] != B.shape[1]:
            raise ContractViolationError("channel block B/D shapes inconsistent")
        if A.shape[0] % 2 or D.shape[0] % 2:
            raise ContractViolationError("channel blocks must have even dimension")
        self.validate()

    @property
    def p_modes(self) -> int:
        return self.A.shape[0] // 2

    @property
    def q_modes(self) -> int:
        return self.D.shape[0] // 2

    def assembled(self) -> np.ndarray:
        top = np.hstack([self.A, self.B])
        bottom = np.hstack([-self.B.T, self.D])
        return np.vstack([top, bottom])

    def validate(self, atol: float = ANTISYM_ATOL):
        G = self.assembled()
        n = G.shape[0]
        if np.max(np.abs(G + G.T)) > atol:
            raise ContractViolationError("channel matrix must be antisymmetric")
        if np.max(np.abs(G @ G.T - np.eye(n))) > atol:
            raise ContractViolationError("channel matrix must be orthogonal")

    def expand_to_lattice(self, n_sites: int) -> "GaussianChannel":
        """Site-diagonal lattice channel in the global qp ordering.

        Each per-site block with per-site type sub-blocks X_rs turns into
        kron(I_N, X_rs) within the global type-(r, s) block.
        """

        def expand(block: np.ndarray, rows: int, cols: int) -> np.ndarray:
            out = np.zeros((2 * rows * n_sites, 2 * cols * n_sites))
            for r in (0, 1):
                for s in (0, 1):
                    sub = block[r * rows:(r + 1) * rows, s * cols:(s + 1) * cols]
                    out[
                        r * rows * n_sites:(r + 1) * rows * n_sites,
                        s * cols * n_sites:(s + 1) * cols * n_sites,
                    ] = np.kron(np.eye(n_sites), sub)
            return out

        p, q = self.p_modes, self.q_modes
        return GaussianChannel(
            expand(self.A, p, p), expand(self.B, p, q), expand(self.D, q, q)
        )


def apply_channel(channel: GaussianChannel, gamma_in: MajoranaCM) -> MajoranaCM:
    """Evaluate the map; raises ZeroNormError when D - Gamma_in is singular."""
    D, B, A = channel.D, channel.B, channel.A
    if gamma_in.matrix.shape != D.shape:
        raise ContractViolationError(
            f"input covariance {gamma_in.matrix.shape} does not match D {D.shape}"
        )
    M = D - gamma_in.matrix
    sign, logabsdet = np.linalg.slogdet(M)
    if sign == 0 or logabsdet < np.log(ZERO_NORM_ATOL):
        det = sign * np.exp(logabsdet)
        raise ZeroNormError(
            f"projection is singular: det(D - Gamma_in) = {det:.3e}",
            determinant=det,
        )
    out = B @ np.linalg.solve(M, B.T) + A
    defect = np.max(np.abs(out + out.T))
    if defect > 1e-9:
        raise NumericalValidityError(f"channel output antisymmetry defect {defect:.2e}")
    return MajoranaCM((out - out.T) / 2.0)


# ---------------------------------------------------------------------------
# lattice bond covariance matrix and its momentum blocks


def virtual_majorana_index(lattice: LatticeSpec, site, species: int, mtype: int) -> int:
    """Global qp index of a virtual Majorana component."""
    n = lattice.n_sites
    return mtype * 4 * n + 4 * lattice.site_index(site) + species


def lattice_bond_cm(lattice: LatticeSpec) -> MajoranaCM:
    """Covariance matrix of all horizontal and vertical entangled bonds."""
    n = lattice.n_sites
    gamma = np.zeros((8 * n, 8 * n))

    def stamp(site_a, species_a, site_b, species_b):
        # bond pair (first = a, second = b): Gamma[c1_a, c2_b] = 1,
        # Gamma[c1_b, c2_a] = -1, plus antisymmetric partners.
        i1 = virtual_majorana_index(lattice, site_a, species_a, 0)
        j2 = virtual_majorana_index(lattice, site_b, species_b, 1)
        gamma[i1, j2] = 1.0
        gamma[j2, i1] = -1.0
        i2 = virtual_majorana_index(lattice, site_b, species_b, 0)
        j1 = virtual_majorana_index(lattice, site_a, species_a, 1)
        gamma[i2, j1] = -1.0
        gamma[j1, i2] = 1.0

    for s in lattice.sites():
        stamp(s, BETA, lattice.right(s), ALPHA)
        stamp(s, DELTA, lattice.north(s), GAMMA)
    return MajoranaCM(gamma)


def fourier_bond(phi) -> np.ndarray:
    """8x8 momentum block of the bond covariance matrix.

    Valid on reciprocal-lattice points of any torus (wraparound aliases
    reduce to the same values there) and for arbitrary angles as the
    infinite-lattice limit.  Ordering: qp with species (alpha, beta, gamma,
    delta).
    """
    phi1, phi2 = phi
    W = np.zeros((4, 4), dtype=complex)
    W[BETA, ALPHA] = np.exp(-1j * phi1)
    W[ALPHA, BETA] = -np.exp(1j * phi1)
    W[DELTA, GAMMA] = np.exp(-1j * phi2)
    W[GAMMA, DELTA] = -np.exp(1j * phi2)
    out = np.zeros((8, 8), dtype=complex)
    out[:4, 4:] = W
    out[4:, :4] = W
    return out


def blocks_from_matrix(matrix: np.ndarray, lattice: LatticeSpec, species: int):
    """Momentum blocks of a circulant qp-ordered lattice matrix.

    Returns {phi: complex (2*species x 2*species) block}.  The input must be
    translationally invariant; displacement data is read off site (1, 1).
    """
    n = lattice.n_sites
    width = 2 * species

    def entry(mtype, site_idx, sp):
        return mtype * species * n + species * site_idx + sp

    # displacement blocks T(Delta)[mu, nu] = M[(s0, mu), (s0 + Delta, nu)]
    t = {}
    s0 = (1, 1)
    i0 = lattice.site_index(s0)
    for dh in range(lattice.n_h):
        for dv in range(lattice.n_v):
            tgt = lattice.site_index((1 + dh, 1 + dv))
            block = np.zeros((width, width), dtype=complex)
            for r in (0, 1):
                for s_ in (0, 1):
                    for mu in range(species):
                        for nu in range(species):
                            block[r * species + mu, s_ * species + nu] = matrix[
                                entry(r, i0, mu), entry(s_, tgt, nu)
                            ]
            t[(dh, dv)] = block

    out = {}
    for phi in lattice.momenta():
        acc = np.zeros((width, width), dtype=complex)
        for (dh, dv), block in t.items():
            acc += block * np.exp(-1j * (phi[0] * dh + phi[1] * dv))
        out[phi] = acc
    return out


def matrix_from_blocks(blocks: dict, lattice: LatticeSpec, species: int) -> np.ndarray:
    """Inverse of :func:`blocks_from_matrix` (exact on the torus)."""
    n = lattice.n_sites
    width = 2 * species
    some = next(iter(blocks.values()))
    if some.shape != (width, width):
        raise ContractViolationError("block size does not match species count")

    t = {}
    for dh in range(lattice.n_h):
        for dv in range(lattice.n_v):
            acc = np.zeros((width, width), dtype=complex)
            for phi, block in blocks.items():
                acc += block * np.exp(1j * (phi[0] * dh + phi[1] * dv))
            t[(dh, dv)] = acc / n

    out = np.zeros((2 * species * n, 2 * species * n), dtype=complex)

    def entry(mtype, site_idx, sp):
        return mtype * species * n + species * site_idx + sp

    for s in lattice.sites():
        si = lattice.site_index(s)
        for (dh, dv), block in t.items():
            ti = lattice.site_index((s[0] + dh, s[1] + dv))
            for r in (0, 1):
                for s_ in (0, 1):
                    out[
                        entry(r, si, 0):entry(r, si, 0) + species,
                        entry(s_, ti, 0):entry(s_, ti, 0) + species,
                    ] += block[
                        r * species:(r + 1) * species, s_ * species:(s_ + 1) * species
                    ]
    return out


# ---------------------------------------------------------------------------
# momentum-space output blocks


@dataclass(frozen=True)
class FourierBlock:
    """Per-momentum covariance data of a channel output.

    ``p``, ``q``, ``d`` satisfy g_hat = (1/d) [[i p, q], [-conj(q), -i p]];
    ``q`` is complex in general and real for reflection-symmetric channels.
    ``zero_norm`` marks momenta where d vanishes (state undefined there);
    g_hat/gamma_hat are None in that case, while p and q (adjugate data)
    remain well defined.
    """

    phi: tuple[float, float]
    p: float
    q: complex
    d: float
    zero_norm: bool
    g_hat: np.ndarray | None
    gamma_hat: np.ndarray | None


def _adjugate(M: np.ndarray) -> tuple[np.ndarray, complex]:
    """(adj(M), det(M)) via the Faddeev-LeVerrier recursion."""
    n = M.shape[0]
    Bk = np.eye(n, dtype=M.dtype)
    ck = 1.0 + 0.0j
    for k in range(1, n):
        Mk = M @ Bk
        ck = -np.trace(Mk) / k
        Bk = Mk + ck * np.eye(n, dtype=M.dtype)
    Mn = M @ Bk
    cn = -np.trace(Mn) / n
    det = (-1.0) ** n * cn
    adj = (-1.0) ** (n - 1) * Bk
    return adj, det


def eq9_gamma_hat(p: float, q: complex, d: float) -> np.ndarray:
    """Real 4x4 momentum block over the paired (phi, -phi) real modes."""
    a, b, c = q.real / d, q.imag / d, p / d
    return np.array([
        [0.0, a, -b, c],
        [-a, 0.0, c, b],
        [b, -c, 0.0, a],
        [-c, -b, -a, 0.0],
    ])


def gamma_out_hat(channel: GaussianChannel, phi) -> FourierBlock:
    """Output momentum block of a one-site channel fed by the lattice bonds."""
    if channel.q_modes != 4 or channel.p_modes != 1:
        raise ContractViolationError(
            "momentum-space evaluation expects a one-site channel "
            "(1 physical, 4 virtual modes)"
        )
    M = channel.D - fourier_bond(phi)
    adj, det = _adjugate(M)
    if abs(det.imag) > 1e-9 * max(1.0, abs(det)):
        raise NumericalValidityError(f"determinant not real: {det}")
    d = det.real
    R = channel.B @ adj @ channel.B.T + d * channel.A
    if abs(R[0, 0].real) > 1e-9 * max(1.0, abs(R[0, 0])):
        raise NumericalValidityError(f"diagonal block entry not imaginary: {R[0, 0]}")
    p = R[0, 0].imag
    q = complex(R[0, 1])
    if abs(R[1, 0] + np.conj(q)) > 1e-9:
        raise NumericalValidityError("momentum block lost its antisymmetry pattern")
    zero = abs(d) <= ZERO_NORM_ATOL
    if zero:
        return FourierBlock(tuple(phi), p, q, d, True, None, None)
    g_hat = np.array([[1j * p, q], [-np.conj(q), -1j * p]]) / d
    return FourierBlock(tuple(phi), p, q, d, False, g_hat, eq9_gamma_hat(p, q, d))


def purity_check(block: FourierBlock) -> float:
    """max |g_hat^2 + 1|; at most ~1e-10 for a valid channel block."""
    if block.zero_norm or block.g_hat is None:
        raise ZeroNormError(
            "purity undefined at a zero-norm momentum",
            determinant=block.d,
            momenta=[block.phi],
        )
    g = block.g_hat
    return float(np.max(np.abs(g @ g + np.eye(2))))


def physical_cm_from_blocks(channel: GaussianChannel, lattice: LatticeSpec) -> MajoranaCM:
    """Real-space output covariance assembled from per-momentum blocks."""
    blocks = {}
    zero_norm = []
    for phi in lattice.momenta():
        fb = gamma_out_hat(channel, phi)
        if fb.zero_norm:
            zero_norm.append(phi)
        else:
            blocks[phi] = fb.g_hat
    if zero_norm:
        raise ZeroNormError(
            f"state undefined: zero-norm momenta {zero_norm}",
            momenta=zero_norm,
        )
    mat = matrix_from_blocks(blocks, lattice, species=1)
    if np.max(np.abs(mat.imag)) > 1e-10:
        raise NumericalValidityError("assembled covariance has imaginary residue")
    return MajoranaCM(mat.real)
