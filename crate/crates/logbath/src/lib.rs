//! Bath correlation functions for spectral densities with logarithmic
//! low-frequency factors.
//!
//! The crate evaluates the dimensionless pair
//!
//! ```text
//! xi1(tau) = integral_0^inf  Omega(nu) coth(nu / 2 theta) cos(nu tau) dnu
//! xi2(tau) = integral_0^inf  Omega(nu) sin(nu tau) dnu
//! ```
//!
//! (coth = 1 at theta = 0) for density families whose low-frequency behavior
//! carries powers of logarithms, through four complementary routes:
//!
//! * direct split-domain quadrature ([`quad`]),
//! * short-time moment expansions and long-time pole laws ([`asymptotic`]),
//! * Mellin-transform diagnostics that certify the strips and decay rates the
//!   long-time laws rest on ([`mellin`]),
//! * cross-validation harnesses, slope fits, and figure reproduction
//!   ([`harness`], [`validate`]).
//!
//! All quantities are dimensionless; `omega_s` in a [`sd::SpectralDensity`]
//! is carried only as output metadata.

pub mod asymptotic;
pub mod cli;
pub mod error;
pub mod harness;
pub mod mellin;
pub mod quad;
pub mod sd;
pub mod special;
pub mod validate;

pub use asymptotic::{
    bcf_asymptotic, branch_coefficient, gamma_kernel, select_branch, short_time,
    AsymptoticBranch, AsymptoticSample, LawKind, Part, SpecialValue,
};
pub use error::{Error, Result};
pub use harness::{
    compare, figure_data, fit_line, fit_slope, ComparisonReport, FigureData, FigureRow,
    LineFit, RowSource, SlopeFit, SlopeTransform,
};
pub use mellin::{
    decay_fit, kernel_modulus_asymptote, mellin_closed_form, mellin_numeric,
    mellin_numeric_thermal, xi1_hat, xi2_hat, MellinProfile, ProfileTarget,
};
pub use quad::{bcf_numeric, fourier_tail_oracle, moment, BcfSample, QuadConfig};
pub use sd::{LowFreqExpansion, SpectralDensity};
pub use validate::{run_criterion, run_suite, suite_ids, CriterionResult};
