//! Spaces spanned by equidistant shifts of a periodic generator.
//!
//! The crate builds the orthogonal exponential bases of such spaces from the
//! generator's Fourier coefficients, certifies the coefficient conditions under
//! which the spaces are optimal for mean-square approximation of smooth periodic
//! classes, and cross-checks the resulting Jackson-type bounds, width values and
//! spline subspaces with independent numerical oracles.

pub mod certify;
pub mod error;
pub mod fourier;
pub mod kernels;
pub mod oracle;
pub mod shift_space;
pub mod splines;
pub mod summation;

pub use error::{Error, Result};
pub use fourier::{Complex, Envelope, Frequency, FunctionClassTag, SymmetryClass, Tolerance, TruncatedSpectrum};
pub use kernels::{KernelSpec, WeightSeq};
pub use shift_space::{basis, project, Basis, BasisElement, BasisKind, BasisLabel, GammaOutcome, Projection, ShiftSpaceSpec, SpaceVariant};
