"""Hacking intervals: min/max of a summary statistic over near-optimal models.

Thin wrapper over the compiled ``_core`` extension; see the project README
for the operation catalog.
"""

from ._core import (  # noqa: F401
    CiEquivalenceReport,
    FeatureIntervalResult,
    HackingInterval,
    HackintError,
    KernelIntervalResult,
    OlsFit,
    PcaHackReport,
    SvmIntervalResult,
    SvmModel,
    __version__,
    adjustment_factor,
    ate_bound_variance,
    ate_interval,
    brute_force_interval,
    classical_ci_equivalence_check,
    fit_ols,
    generalization_bound,
    ite_interval,
    kernel_hacking_interval,
    kernel_loss,
    kernel_predict,
    knn_interval,
    knn_select_kstar,
    loss_threshold_from_profile,
    monomial_features,
    new_feature_interval,
    pca_scores,
    prediction_interval,
    profile_theta,
    resolve_theta,
    simulate_treatment_dgp,
    subset_hacking_report,
    subset_loss,
    svm_hacking_interval,
    svm_interval_batch,
    svm_min_loss,
)
