//! Verification laboratory for finite identities around the Liouville
//! function: sign-pattern statistics of (lambda(n), lambda(N-n)), dilation
//! exceptional sets and their set algebra, prime-length Fourier identities,
//! Dirichlet-character decompositions, Pierce-expansion signatures, and
//! equidistribution diagnostics.
//!
//! Everything here is exact or carries an explicit tolerance; the crate
//! computes both sides of each identity from independent routes wherever
//! the structure allows it.

pub mod arith;
pub mod bitset;
pub mod characters;
pub mod dilation;
pub mod discrepancy;
pub mod error;
pub mod patterns;
pub mod pierce;
pub mod report;
pub mod spectral;

pub use num_complex::Complex64;

pub use arith::{ArithTable, FriableSet};
pub use bitset::BitSet;
pub use characters::CharacterTable;
pub use dilation::{DilationContext, GRatio};
pub use error::{Error, Result};
pub use patterns::{
    CaseTag, ExceptionalSet, PatternReport, ShustermanOutcome, ShustermanWitness, Sign,
    SignPatternCounts,
};
pub use pierce::{NuMode, NuMomentRow, NuStats, PierceSignature};
pub use report::VerificationReport;
pub use spectral::{Spectrum, TransformMethod};
