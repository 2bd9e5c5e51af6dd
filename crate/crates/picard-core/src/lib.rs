//! Exact arithmetic for nonuniform arithmetic lattices in SU(2,1).
//!
//! The crate computes covolumes and Euler characteristics of Picard modular
//! groups from imaginary quadratic field data (class numbers, Dirichlet
//! L-values at negative integers), searches parahoric variants for minimal
//! covolume, and provides a finitely presented group engine (coset
//! enumeration, low-index subgroup search, subgroup homology, cusp counts)
//! for the manifold census.

pub mod fpgroup;
pub mod lfunc;
pub mod prasad;
pub mod quadfield;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Shorthand for building an exact rational from machine integers.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
