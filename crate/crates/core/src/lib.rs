pub mod analysis;
pub mod bignum;
pub mod cli;
pub mod erf_gauss;
pub mod error;
pub mod oracles;
pub mod par;
pub mod pi_series;
pub mod quadrature;
pub mod sinc_expansion;

pub use bignum::{BigReal, PrecisionContext};
pub use error::{Error, Result};
