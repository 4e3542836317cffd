//! Radial-hedgehog solutions of the one-constant Landau-de Gennes model on the
//! spherical shell `1 ≤ |x| ≤ R`.

pub mod algebra;
pub mod error;
pub mod linalg;
pub mod minimizer;
pub mod plot;
pub mod profile;
pub mod qtensor;
pub mod shell;
pub mod spectra;
pub mod spline;
pub mod thresholds;

pub use error::{HedgehogError, Result};
pub use profile::{solve_profile, HedgehogProfile, RadialGrid};
pub use qtensor::{OrthFrame, ModeBasis, QTensor, ScalingParams};
