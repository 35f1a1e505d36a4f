//! Constructive machinery around sums of a prime and two powers of two.
//!
//! The crate builds arithmetic progressions `beta (mod 2W)` whose odd members
//! dodge every representation `p + 2^a + 2^b` that a covering system of
//! Mersenne and Fermat prime factors can trap, and pairs that construction
//! with brute-force representability oracles, density scanners, and empirical
//! checks of the analytic inequalities the construction leans on.
//!
//! Modules:
//! - [`arith`]: primality, sieving, Mersenne/Fermat-aware factorization, CRT;
//! - [`represent`]: representability finders, density scans, covering checks;
//! - [`construct`]: the block-selection / CRT-assembly / verification pipeline;
//! - [`analytics`]: Mertens sums, series partial sums, sieve-constant ratios;
//! - [`cli`]: the `polignac` command-line surface.

pub mod analytics;
pub mod arith;
pub mod cli;
pub mod construct;
pub mod error;
pub mod represent;
pub(crate) mod serde_util;

pub use error::{Error, Result};
