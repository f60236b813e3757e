//! Numerical kernels for the space-time fractional Zener wave equation
//! `u_tt = L_t^alpha d_x E_x^beta u` on the real line.

pub mod charfun;
pub mod error;
pub mod fracops;
pub mod kernel;
pub mod laplace_oracle;
pub mod params;
pub mod quadrature;
pub mod rootfinder;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result, ValidationError};
pub use params::{ModelParams, PhysicalParams, Scales};
