//! Numerical kernels shared by the model, correlation and distance code.

pub mod optimize;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use optimize::{maximize_region, Maximum, SearchRegion};
pub use quadrature::{integrate, QuadratureSpec};
pub use roots::{find_root, find_root_bracketed, Root};
pub use special::{ln_gamma, theta_prefactor};
