//! Closed-form probabilities and rate functions.

pub mod ballsbins;
pub mod cover;
pub mod first_moment;
pub mod special;
pub mod threshold;

pub use ballsbins::{balls_bins_joint, poisson_conditioned_joint, poissonization_constant};
pub use cover::{balanced_cover_rate, cover_rate, cover_terms, optimal_alpha0, CoverRateTerms, OptimalAlpha0};
pub use first_moment::{
    balanced_coloring_rate, balanced_coloring_root, coloring_rate, d_first, expected_colorings_exact, grad_f,
    hessian_f, taylor_bound, RateParams,
};
pub use special::{chernoff_multiplicative, chernoff_tails, phi, ChernoffBounds};
pub use threshold::{bounds_table, cover_threshold, d_an, d_cavity, d_second, BoundsRow};
