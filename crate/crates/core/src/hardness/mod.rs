//! Exact analysis of the noisy threshold distributions on the hypercube: Fourier
//! levels, Kravchuk polynomials and pairwise chi-square correlations.

pub mod binomial;
pub mod correlation;
pub mod distribution;
pub mod family;
pub mod fourier;
pub mod kravchuk;
pub mod ltf;
pub mod report;

use crate::error::{Error, Result};

pub(crate) use check_enumeration_budget as check_enumeration;

/// Largest `d` for which `{±1}^d` is enumerated.
pub const ENUMERATION_MAX_D: usize = 24;

/// Largest `d` for which all `2^d` Fourier coefficients are produced.
pub const FOURIER_MAX_D: usize = 14;

/// `Err(ExactBudget)` when `{±1}^d` is too large to enumerate.
pub fn check_enumeration_budget(d: usize) -> Result<()> {
    if d > ENUMERATION_MAX_D {
        return Err(Error::ExactBudget { d, cap: ENUMERATION_MAX_D });
    }
    Ok(())
}

pub use correlation::{
    correlation_bound_check, correlation_pair, correlation_pair_approx, correlation_pair_formula, correlation_sweep, rk_decomposition,
    rk_edge_bound, rk_terms, CorrelationBoundCheck, CorrelationReport, LevelSpectrum,
};
pub use distribution::{default_eta, hard_to_learner_dataset, sample_hard_cube, HardDistribution};
pub use family::near_orthogonal_set;
pub use fourier::{fourier_coefficient, fourier_coefficient_enumerated, level_coefficients};
pub use kravchuk::{kravchuk, kravchuk_bound_check, KravchukTable};
pub use ltf::{ltf_eval, threshold_for_mass, HypercubePoint, ThresholdLtf};
