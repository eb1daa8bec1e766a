//! Library for deciding and certifying rank-1 phenomena of finitely
//! presented groups of positive deficiency: first-homology witnesses found
//! in finite-index subgroups, Golod–Shafarevich violations, ascending HNN
//! extensions of free groups, and generalised Baumslag–Solitar graphs.

// modules appear as they are built
// pub mod classify;
pub mod freegroup;
// pub mod gbs;
pub mod hnn;
pub mod homology;
pub mod presentation;
pub mod subgroup;

/// Exact integers used by all homology computations.
pub type Int = num_bigint::BigInt;

/// Relation matrices with exact integer entries.
pub type IntMatrix = homology::Mat<Int>;

#[doc(hidden)]
pub fn cli_stub() {}
