//! Exact counts of subsets of a finite field by their stabilizer in the
//! affine group `AGL(1, F_q)`, independent oracles that check those
//! counts, and the orbit designs and constant-weight codes they yield.

pub mod agl;
pub mod cli;
pub mod counting;
pub mod designs;
pub mod error;
pub mod ffield;
pub mod oracle;

pub use error::{Error, Result};
