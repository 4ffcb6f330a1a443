//! Exact and asymptotic weighted domino-tiling counts of L-shaped Aztec
//! diamonds.
//!
//! The crate computes `F_N^{m,k}(a; epsilon)`, the generating function of
//! domino tilings of an Aztec diamond with a corner removed, exactly (by
//! enumeration or a Kasteleyn determinant) and asymptotically in each of
//! the four regimes of the removed corner's size. A shuffling sampler and
//! a Painleve II / Tracy-Widom solver complete the toolkit.

pub mod error;
pub mod exact;
pub mod exec;
pub mod experiment;
pub mod painleve;
pub mod quadrature;
pub mod regimes;
pub mod regions;
pub mod saddles;
pub mod sampler;
pub mod special;
pub mod weight;

pub use error::{Error, Result};
pub use exec::Exec;
pub use weight::Weight;
