"""Resolvent bounds and spectral convergence for operator families on varying spaces."""

from .convergence import (
    ConvergenceReport,
    FamilyMember,
    LemmaConstants,
    LimitProblem,
    Thresholds,
    condition_report,
    default_probes,
    lemma_constants,
    verify_forward_bound,
    verify_forward_nodes,
    verify_reverse_bound,
    verify_strong_variant,
)
from .operators import (
    INFINITE,
    DiscreteOperator,
    GraphNormContext,
    NumericalFailure,
    ResolventSample,
    SpectralWindow,
    graph_weight,
    norm_V_to_H,
    operator_norm,
    resolvent_norm,
)
from .resolvent_engine import (
    check_graph_resolvent_bound,
    commutator_defect,
    pseudospectrum,
    verify_commutator_propagation,
)
from .spectra import (
    CertificateOutcome,
    HausdorffResult,
    SpectralSet,
    certify_inclusion_bounded_resolvent,
    certify_isolated_eigenvalue,
    certify_no_pollution,
    hausdorff_distance,
    spectral_set,
    windowed_hausdorff_run,
)

__version__ = "0.1.0"
