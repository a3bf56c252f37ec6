//! Numerical building blocks shared by the model modules.

pub mod eig;
pub mod fit;
pub mod jet;
pub mod lowdisc;
pub mod quad;
pub mod sphere;

pub use jet::{Dual, Jet, Real};
