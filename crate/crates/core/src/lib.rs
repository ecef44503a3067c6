//! Exact p-adic tools for continuous functions `Z_p -> Z_p`: generalized van
//! der Put coefficients, Hensel lifting for functions outside the 1-Lipschitz
//! class, approximability certificates, and a brute-force root oracle.

pub mod approx;
pub mod cli;
pub mod error;
pub mod funcspace;
pub mod hensel;
pub mod oracle;
pub mod padic;
pub mod scale;
mod serde_decimal;
pub mod vdp;

pub use error::{Error, Result};
pub use padic::{PAdicApprox, Prime, Valuation};
pub use scale::ScaleFn;
