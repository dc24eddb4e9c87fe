"""Adaptive greedy sparse decompositions on the unit circle.

Core pieces: analytic-signal utilities on an even uniform grid, reproducing
kernels and rational orthonormal systems on the disc, the adaptive greedy
decomposition with maximal selection, pre-orthogonalized pursuit over
abstract dictionaries, and their stochastic counterparts for weighted
ensembles of signals.  The CLI entry point lives in afdkit.cli.
"""

from .afd import (
    Decomposition,
    afd_decompose,
    expand_with_params,
    msp_select,
    reconstruct,
    reduce_remainder,
    standard_remainder,
)
from .circle import (
    CircleSignal,
    Spectrum,
    analytic_leakage,
    analytic_projection,
    eval_analytic,
    from_spectrum,
    hilbert_transform,
    inner_product,
    norm,
    real_from_analytic,
    sample_points,
    to_spectrum,
)
from .dictionaries import Dictionary, MatrixDictionary, SzegoDictionary
from .io import InputError, MODES, RunConfig, generate_noisy, ingest, load_config, run
from .poafd import (
    DictionaryExhausted,
    PoafdResult,
    appendix_equivalence,
    candidate_basis,
    poafd_decompose,
    pomsp_select,
    weak_select,
)
from .stochastic import (
    Ensemble,
    EnsembleDecomposition,
    autocorrelation,
    commute_check,
    ee_norm,
    expectation_signal,
    plus_norm_relation,
    remainder_ensemble,
    safd1_decompose,
    safd2_decompose,
    sbvc_probe,
    smsp_objective,
    spoafd_decompose,
    stationarity_score,
)
from .szego import (
    DiscGrid,
    TMSystem,
    blaschke_at,
    blaschke_product,
    multiple_kernel,
    reproducing_value,
    szego_eval,
    tm_phase,
    tm_system,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CircleSignal",
    "Spectrum",
    "sample_points",
    "to_spectrum",
    "from_spectrum",
    "inner_product",
    "norm",
    "hilbert_transform",
    "analytic_projection",
    "analytic_leakage",
    "eval_analytic",
    "real_from_analytic",
    "DiscGrid",
    "TMSystem",
    "szego_eval",
    "reproducing_value",
    "blaschke_product",
    "blaschke_at",
    "multiple_kernel",
    "tm_system",
    "tm_phase",
    "Decomposition",
    "afd_decompose",
    "msp_select",
    "reduce_remainder",
    "expand_with_params",
    "reconstruct",
    "standard_remainder",
    "Dictionary",
    "MatrixDictionary",
    "SzegoDictionary",
    "PoafdResult",
    "DictionaryExhausted",
    "candidate_basis",
    "pomsp_select",
    "weak_select",
    "poafd_decompose",
    "appendix_equivalence",
    "Ensemble",
    "EnsembleDecomposition",
    "ee_norm",
    "expectation_signal",
    "remainder_ensemble",
    "commute_check",
    "plus_norm_relation",
    "autocorrelation",
    "stationarity_score",
    "safd1_decompose",
    "smsp_objective",
    "safd2_decompose",
    "spoafd_decompose",
    "sbvc_probe",
    "MODES",
    "InputError",
    "RunConfig",
    "load_config",
    "ingest",
    "generate_noisy",
    "run",
]
