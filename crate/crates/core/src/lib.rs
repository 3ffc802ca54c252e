//! Bound states of the ring-shaped generalized inverse quadratic Yukawa
//! potential: closed-form spectra, Nikiforov–Uvarov machinery and
//! finite-difference cross-checks.

pub mod angular;
pub mod assembly;
pub mod cli;
pub mod error;
pub mod model;
pub mod nu;
pub mod oracle;
pub mod radial;
pub mod specfun;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/potential.md")]
    mod potential {}
    #[doc = include_str!("../../../book/src/nu-method.md")]
    mod nu_method {}
    #[doc = include_str!("../../../book/src/angular.md")]
    mod angular {}
    #[doc = include_str!("../../../book/src/radial.md")]
    mod radial {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
