"""Sharp tan(theta) bounds for approximate spectral subspaces of Hermitian matrices."""

__version__ = "0.1.0"

from .certify import (
    AposterioriCertificate,
    AprioriCertificate,
    BlockForm,
    FailureReason,
    GapWindow,
    ResidualReport,
    block_partition,
    canonical_counterexample,
    certify_aposteriori,
    certify_apriori,
    delta_r,
    enclosure_check,
    exact_subspace,
    extract_window_apriori,
    lemma_intersection_check,
    residual,
)
from .linalg import (
    AngleSet,
    HermitianMatrix,
    OrthonormalFrame,
    Spectrum,
    complete_frame,
    hermitian_spectrum,
    orthonormalize,
    principal_angles,
    spectral_norm,
    validate_hermitian,
)
