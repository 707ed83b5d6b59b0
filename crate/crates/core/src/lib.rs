//! Elliptic curves over the cubic field F = Q(a), a³ = a² − 1.

pub mod arith;
pub mod curve;
pub mod dataset;
pub mod error;
pub mod field;
pub mod ideal;
pub mod isogeny;
pub mod ledger;
pub mod poly;
pub mod point;
pub mod polyf;
pub mod residue;
pub mod search;
pub mod tate;
pub mod torsion;

pub use error::{Error, Result};
pub use field::FieldElement;
pub use polyf::PolyOverF;
