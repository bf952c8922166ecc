//! Classical bisection baselines.

mod kl;
mod spectral;

pub use kl::{kernighan_lin, kernighan_lin_from, kernighan_lin_trace, random_balanced, KlConfig};
pub use spectral::{fiedler_vector, laplacian_apply, spectral_bisect, Fiedler, SpectralConfig, SplitRule};
