//! Shared numerical machinery.
//!
//! Everything here is a pure function of its inputs.

pub mod diff;
pub mod fit;
pub mod intmat;
pub mod jet;
pub mod quadrature;
pub mod snf;

pub use diff::{central_diff, central_diff2, Linear};
pub use fit::{linear_fit, loglog_fit, FitResult};
pub use intmat::IntMatrix;
pub use jet::{Jet, Scalar, NVARS};
pub use quadrature::{
    quadrature_periodic, quadrature_periodic_2d, try_quadrature_periodic_2d, GaussLegendre, Grid1D, Grid2D,
};
pub use snf::{smith_normal_form, SmithForm};
