//! Polynomials over Z, Q and Z/p.

pub mod modp;
pub mod zfactor;
pub mod zpoly;

pub use zpoly::{QPoly, ZPoly};
