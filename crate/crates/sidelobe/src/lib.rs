//! Aperiodic autocorrelation and peak sidelobe level (PSL) toolkit for
//! binary (±1) sequences.
//!
//! The crate has four layers:
//!
//! - [`seq`]: bit-packed sequences, exact autocorrelation spectra (popcount
//!   and FFT kernels), PSL, and the order-8 PSL-preserving symmetry group.
//! - [`bounds`]: closed-form tail bounds — the `2n/(psi e^psi)` exceedance
//!   bound with its corollary-specific `psi(n)` choices, Chernoff tails for
//!   Rademacher sums, and the `sqrt(2 n log n)` concentration interval.
//! - [`exact`]: exhaustive enumeration over all `2^n` sequences at small `n`
//!   (symmetry-accelerated and Gray-code incremental), exact exceedance
//!   proportions, optimal PSL search with pruning, and exact distribution
//!   checks for single autocorrelation coefficients.
//! - [`stochastic`]: seeded, worker-count-independent Monte Carlo estimation
//!   of PSL exceedance probabilities with Wilson confidence intervals.
//!
//! [`record`] persists experiment runs as JSON lines for the CLI.

pub mod bounds;
pub mod exact;
pub mod record;
pub mod seq;
pub mod stochastic;

pub use bounds::{BoundSpec, PsiKind, TableRow};
pub use exact::{ExactExceedance, MuMinResult, PslDistribution};
pub use record::ExperimentRecord;
pub use seq::{AutocorrelationSpectrum, BinarySequence};
pub use stochastic::{ExceedanceEstimate, PslHistogram, SamplerConfig};
