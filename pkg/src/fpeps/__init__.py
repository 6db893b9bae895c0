"""Fermionic projected entangled pair states on small periodic lattices.

Layers:

* :mod:`fpeps.fock` / :mod:`fpeps.build` -- exact dense Fock-space oracle
  and the entangled-bond state construction;
* :mod:`fpeps.mapping` / :mod:`fpeps.contraction` -- the sign-resolved
  translation to spin PEPS tensors and their exact contraction;
* :mod:`fpeps.gaussian` / :mod:`fpeps.quadratic` -- Majorana covariance
  matrices, pure Gaussian maps, parent Hamiltonians, spectra and entropies;
* :mod:`fpeps.critical` / :mod:`fpeps.correlators` -- the critical
  free-fermion model with its correlation asymptotics;
* :mod:`fpeps.cli` -- the ``fpeps`` command.
"""

from .build import bond_h, bond_v, build_fpeps, projector_q
from .contraction import contract_peps
from .correlators import (
    asymptotic_k,
    correlation_scan,
    correlator_numeric,
    correlator_residue,
)
from .critical import (
    closed_form_ratios,
    entropy_scan,
    example_channel,
    example_projector_tensor,
    gap_scan,
    hcrit_coefficients,
    norm_zero_locator,
)
from .errors import (
    ContractViolationError,
    FpepsError,
    NumericalValidityError,
    ResourceLimitError,
    UndefinedStateError,
    ZeroNormError,
)
from .fock import (
    FockVector,
    ModeRegistry,
    OperatorPoly,
    apply_poly,
    apply_quadratic_h,
    covariance_matrix,
    exact_ground_state,
    physical_registry,
    standard_registry,
    vacuum,
)
from .gaussian import (
    FourierBlock,
    GaussianChannel,
    MajoranaCM,
    apply_channel,
    fourier_bond,
    gamma_out_hat,
    lattice_bond_cm,
    physical_cm_from_blocks,
    purity_check,
)
from .lattice import LatticeSpec
from .mapping import derive_sign_function, derive_sign_functions, map_tensor_set, map_to_peps
from .quadratic import (
    DiracQuadratic,
    QuadraticHamiltonian,
    block_entropy,
    dirac_to_majorana,
    ground_state_cm,
    ground_state_cm_consistency,
    majorana_to_dirac,
    parent_hamiltonian,
    single_particle_spectrum,
)
from .tensors import FPEPSTensor, PEPSTensor, SignFunction

__version__ = "0.1.0"
