"""Information-theoretic fitting of hidden-layer dynamical models.

kNN estimators for entropy, mutual information and KL divergence, a
two-resource depletion model with a phase-aligned RK4 integrator, synthetic
outcome data generation, and sweep/SPSA fitting drivers.
"""

from ._core import (  # noqa: F401
    CogParams,
    ConfigError,
    Dataset,
    DegeneratePool,
    DimensionMismatch,
    EstimatorResult,
    LengthMismatch,
    NonFiniteState,
    NonPositiveSigma,
    ObjectiveValue,
    OutcomeModel,
    SingularTime,
    SpsaResult,
    SweepCurve,
    TooFewSamples,
    Trajectory,
    __version__,
    calibrate_outcome_model,
    cog_rhs,
    constraint_fc,
    entropy_knn,
    evaluate_objective,
    generate_dataset,
    integrate_schedule,
    kl_knn,
    kl_to_gaussian,
    load_dataset,
    mi_ksg,
    mi_lnc,
    mi_mixed,
    run_sweep,
    sample_outcomes,
    sample_schedule,
    save_dataset,
    spsa_minimize,
    success_probability,
    toy_candidate,
    toy_generate,
)
