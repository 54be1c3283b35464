//! Continuum-limit machinery of the iε-regularized Dirac sea: Bessel-kernel
//! closed forms with momentum-space oracles, closed-chain spectral
//! decomposition, the regularized light-cone expansion, Dirac/Maxwell
//! structure functions, and the 2D quadratures behind the current
//! coefficients and the coupling constant.

pub mod bessel;
pub mod chain;
pub mod clifford;
pub mod coeffs;
pub mod currents;
pub mod error;
pub mod kernel;
pub mod lightcone;
pub mod linalg;
pub mod quad;

pub use error::{Error, Result};
pub use kernel::{Params, RegularizedXi, SpacetimeDisplacement};
