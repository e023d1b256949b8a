//! Gabidulin-like rank-metric codes over finite field towers.
//!
//! The crate builds lifted codes `eps_B(<v, theta(v), ..., theta^(d-1)(v)>_K)`
//! inside `k^(ell x m)`, checks their rank-metric parameters, recognizes them
//! among lifted codes, and computes proper automorphism groups and
//! equivalences through left/right idealisers and normalizer cosets.

pub mod aut;
pub mod code;
pub mod error;
pub mod field;
pub mod gabidulin;
pub mod linalg;

pub use error::{Error, Result};
