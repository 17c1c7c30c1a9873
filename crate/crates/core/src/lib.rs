//! Exact point-concentration probabilities for quadratic polynomials of
//! Bernoulli and slice variables, the finite polynomial families `G(m)`, and
//! certificates built from them.
//!
//! Everything here is `no_std` with `alloc`; file formats, the command line
//! and worker pools live in the `edgestat` crate.

#![no_std]

extern crate alloc;

pub mod constructions;
pub mod dist;
pub mod error;
pub mod gm;
pub mod poly;
pub mod rational;
pub mod verify;

use alloc::format;

pub use error::{Error, Result};
pub use poly::{CanonicalKey, GPolynomial, MultilinearPoly};
pub use rational::Rational;

/// Enumeration limits. Exceeding one is an error, never a silent sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest number of 0/1 assignments enumerated for one polynomial.
    pub assignments: u64,
    /// Largest number of `k`-subsets enumerated for one slice distribution.
    pub subsets: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            assignments: 1 << 24,
            subsets: 10_000_000,
        }
    }
}

impl Caps {
    pub fn check_assignments(&self, num_vars: usize) -> Result<()> {
        let count = if num_vars >= 64 { u128::MAX } else { 1u128 << num_vars };
        if count > u128::from(self.assignments) {
            return Err(Error::CapExceeded {
                what: "assignments",
                count: format!("2^{num_vars}"),
                cap: format!("{}", self.assignments),
            });
        }
        Ok(())
    }

    pub fn check_subsets(&self, n: u64, k: u64) -> Result<u64> {
        let count = rational::binomial_u128(n, k);
        if count > u128::from(self.subsets) {
            return Err(Error::CapExceeded {
                what: "k-subsets",
                count: format!("C({n},{k}) = {}", rational::binomial(n, k)),
                cap: format!("{}", self.subsets),
            });
        }
        Ok(count as u64)
    }
}
