//! Multiplier weights, unique continuation and the contraction iteration.

mod continuation;
mod iteration;
mod weight;

pub use continuation::{
    default_period, interpolation_check, lattice_frequencies, unique_continuation_constant, BandLimitedSample,
    InterpolationCheck, UcConstant, UnitWindow, INTERPOLATION_C,
};
pub use iteration::{
    build_psi, build_psi_from_u, coarse_grain, contraction_estimate, contraction_from_u, fatten, frequency_scale,
    gram_max, indicator_coefficients, iterate_fup, lattice_in, merge_intervals, psi_tail, set_samples, step_beta,
    Coefficients, Contraction, IterationConfig, IterationReport, IterationStep, PhiKind, PsiWeight, BOUND_SLACK,
    DEFAULT_PERIOD, DENSE_LIMIT,
};
pub use weight::{
    admissibility_check, build_weight, plateau, plateau_derivative, proof_c0, rho, theta, AdaptedWeight,
    Admissibility, AnnulusCover, TailModel, WeightChecks, WeightGrid, LOG_DERIVATIVE_BOUND, WEIGHT_SPACING,
};
