//! Descriptive set theory on computable presentations: ordinals below ε₀,
//! trees and their ranks, closed and analytic sets of Baire space, and the
//! Suslin operation on clopen schemes.

pub mod analytic;
pub mod closedset;
pub mod coding;
pub mod format;
pub mod kb;
pub mod ordinal;
pub mod rank;
pub mod suslin;
pub mod tree;
