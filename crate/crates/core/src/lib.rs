//! Relaxation hull, wave cone, localized plane waves and the self-similar
//! Rayleigh–Taylor subsolution for the inhomogeneous incompressible Euler
//! equations.

pub mod error;
pub mod numeric;
pub mod planewave;
pub mod relaxation;
pub mod state;
pub mod subsolution;
pub mod suites;
pub mod wavecone;

pub use error::{Error, Result};
pub use state::{FluidSetup, ReducedState, StateZ, SymTraceless};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/hull.md")]
    mod hull {}
    #[doc = include_str!("../../../book/src/cone.md")]
    mod cone {}
    #[doc = include_str!("../../../book/src/waves.md")]
    mod waves {}
    #[doc = include_str!("../../../book/src/subsolution.md")]
    mod subsolution {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
