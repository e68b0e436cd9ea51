//! Margin-halfspace learning under random classification noise, and exact
//! hypercube combinatorics for the matching statistical-query hard instances.
//!
//! The learner half has [`learner`] (projected subgradient descent on the
//! leaky-ReLU subgradient field with holdout selection) and [`dimreduce`] (the
//! same learner after a random sign projection). [`hardness`] evaluates
//! threshold functions on `{±1}^d`, their Fourier spectra via Kravchuk
//! polynomials, and pairwise correlations of the noisy hard distributions, in
//! exact rational arithmetic.

pub mod dataset;
pub mod dimreduce;
pub mod error;
pub mod hardness;
pub mod model;
pub mod par;
pub mod rng;
pub mod learner;
pub mod simulate;

pub use dataset::{read_dataset, write_dataset, Dataset, DatasetFile};
pub use error::{Error, Result};
pub use model::{
    disagreement_indicator, empirical_subgradient, leaky_relu_subgradient, sign_fn, BallVector, LabeledExample,
    MarginHalfspaceInstance, SignLabel, UnitVector,
};
pub use par::Execution;
pub use simulate::{generate_dataset, SimulatorConfig, WStarMode};
