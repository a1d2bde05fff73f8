//! Verification toolkit for the model geometry of ALH\* gravitational
//! instantons.
//!
//! The crate has two halves that share nothing but the error type:
//!
//! * an analytic half ([`torus`], [`calabi`], [`semiflat`], [`hk`], [`slag`])
//!   that evaluates the Calabi ansatz and (non-)standard semi-flat
//!   hyperKähler structures pointwise, with derivatives obtained from
//!   forward-mode jets rather than finite differences, and measures triple
//!   identities, curvature, decay rates, periods and phases;
//! * an exact half ([`lattice`]) working over arbitrary-precision integers:
//!   intersection lattices, reflections, Weyl chambers, restriction to the
//!   complement of an `I_b` cycle and Torelli-type matching of marked
//!   lattices and periods for Looijenga pairs.
//!
//! [`numerics`] holds the shared machinery (finite differences used as
//! oracles, quadrature, log-log regression, Smith normal form, jets).

pub mod calabi;
pub mod error;
pub mod forms;
pub mod hk;
pub mod lattice;
pub mod numerics;
pub mod semiflat;
pub mod slag;
pub mod torus;

pub use error::{Error, Result};
pub use num_complex::Complex64;
