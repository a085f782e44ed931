//! Docking trajectory planning for underwater vehicles by inverse dynamics in
//! the virtual domain.
//!
//! The pipeline has four stages:
//!
//! 1. [`refcurve`] fits polynomial-plus-trigonometric reference curves to the
//!    boundary conditions over a virtual argument.
//! 2. [`invdyn`] maps the virtual argument to time with a speed factor.
//! 3. [`invdyn`] recovers every vehicle state and rate from the curve.
//! 4. [`planner`] searches the few free variables with a downhill simplex,
//!    scoring each candidate with [`penalty`].
//!
//! [`harness`] repeats the planning under randomized conditions and
//! summarizes robustness; [`export`] reads and writes the data files.

pub mod error;
pub mod export;
pub mod harness;
pub mod invdyn;
pub mod model;
pub mod penalty;
pub mod planner;
pub mod refcurve;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/reference-curves.md")]
    mod reference_curves {}
    #[doc = include_str!("../../../book/src/inverse-dynamics.md")]
    mod inverse_dynamics {}
    #[doc = include_str!("../../../book/src/cost.md")]
    mod cost {}
    #[doc = include_str!("../../../book/src/planning.md")]
    mod planning {}
    #[doc = include_str!("../../../book/src/robustness.md")]
    mod robustness {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
