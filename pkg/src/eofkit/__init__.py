"""Formation entanglement of bipartite mixed states via optimal decompositions.

The package builds the named state families whose minimal-average-
entanglement decompositions are known in closed form, evaluates the
resulting formation entanglement / entanglement cost / distillable gaps,
composes decomposition families by tensor product, and certifies every
closed form against a brute-force convex-roof oracle.
"""

from .decompositions import (
    CoeffMatrix,
    ODFamily,
    VerificationReport,
    average_entanglement,
    coeff_matrix,
    compose,
    family_eof,
    isotropic_family,
    lemma3_family,
    mc_two_qubit_family,
    od_isotropic,
    od_lemma3,
    od_mc_two_qubit,
    od_sigma,
    od_werner,
    separable_family,
    separable_family_from_tag,
    sigma_family,
    tensor_bipartite_ket,
    verify_od,
    werner_family,
)
from .entanglement import (
    EntanglementReport,
    binary_entropy,
    concurrence,
    distillable_mc,
    eof_isotropic_family,
    eof_isotropic_member,
    eof_lemma3,
    eof_mc_two_qubit,
    eof_sigma,
    eof_werner,
    family_report,
    gap_lemma3,
    gap_tensor_mc,
    pure_entanglement,
    von_neumann_entropy,
    wootters_eof,
)
from .errors import (
    DegenerateParameterError,
    ParameterError,
    PatternError,
    ScaleGuardError,
    ShapeError,
)
from .io import RunReport, load_state, save_state
from .linalg import (
    Dims,
    eig_hermitian,
    frob_dist,
    kron,
    partial_trace,
    partial_transpose,
    schmidt_coefficients,
)
from .oracle import (
    CertificationReport,
    OracleConfig,
    OracleResult,
    certify_not_below,
    decomposition_from_isometry,
    eof_bruteforce,
    random_decomposition,
    splitmix64,
)
from .states import (
    BipartiteDensity,
    IsotropicParams,
    Lemma3Mc,
    McTwoQubit,
    PureKet,
    SeparableTag,
    SigmaFamily,
    WeightedEnsemble,
    WernerParams,
    ensemble_mix,
    is_maximally_correlated,
    isotropic,
    isotropic_twirl,
    lemma3_mc,
    max_entangled,
    mc_two_qubit,
    sigma_family_state,
    werner,
    werner_mixing_channel,
)

__version__ = "0.1.0"
