//! Dirichlet L-values for the quadratic character of an imaginary quadratic
//! field, computed exactly at negative integers via generalized Bernoulli
//! numbers, with an independent floating-point cross-check through the
//! functional equation.

use crate::quadfield::{chi, QuadField};
use crate::{rat, BigInt, BigRational};
use num_traits::{Signed, ToPrimitive, Zero};

/// Third Bernoulli polynomial B_3(x) = x^3 - (3/2)x^2 + (1/2)x.
pub fn bernoulli3(x: &BigRational) -> BigRational {
    x * x * x - rat(3, 2) * x * x + rat(1, 2) * x
}

/// First Bernoulli polynomial B_1(x) = x - 1/2.
pub fn bernoulli1(x: &BigRational) -> BigRational {
    x - rat(1, 2)
}

/// Generalized Bernoulli number B_{3,chi} = f^2 * sum_{a=1}^{f} chi(a) B_3(a/f).
pub fn bernoulli3_chi(field: &QuadField) -> BigRational {
    let f = field.conductor as i64;
    let mut s = BigRational::zero();
    for a in 1..=f {
        let c = chi(field, a);
        if c != 0 {
            s += rat(c as i64, 1) * bernoulli3(&rat(a, f));
        }
    }
    rat(f * f, 1) * s
}

/// Generalized Bernoulli number B_{1,chi} = (1/f) * sum_{a=1}^{f} a chi(a).
pub fn bernoulli1_chi(field: &QuadField) -> BigRational {
    let f = field.conductor as i64;
    let mut s = BigInt::zero();
    for a in 1..=f {
        s += BigInt::from(a) * BigInt::from(chi(field, a));
    }
    BigRational::new(s, BigInt::from(f))
}

/// Exact value L_k(-2) = -B_{3,chi}/3 for the quadratic character of k.
pub fn l_minus_two(field: &QuadField) -> BigRational {
    -bernoulli3_chi(field) / rat(3, 1)
}

/// Class-number oracle h = w_k |B_{1,chi}| / 2, independent of form counting.
pub fn class_number_analytic(field: &QuadField) -> u64 {
    let h = rat(field.roots_of_unity as i64, 2) * bernoulli1_chi(field).abs();
    debug_assert!(h.is_integer());
    h.to_integer().to_u64().expect("class number fits in u64")
}

/// Floating-point value of L_k(3) = sum chi(n)/n^3, truncated at `terms`
/// full periods of the character; the tail is below 1/(2*terms^2).
pub fn l_at_three(field: &QuadField, terms: u64) -> f64 {
    let n_max = terms.max(1) * field.conductor;
    let mut s = 0.0f64;
    for n in 1..=n_max {
        let c = chi(field, n as i64);
        if c != 0 {
            s += c as f64 / (n as f64).powi(3);
        }
    }
    s
}

/// Certified rational upper bound on L_k(3): partial sum over `terms`
/// periods plus the tail bound 1/(2*terms^2 * f^2), done in exact arithmetic.
pub fn l_at_three_upper(field: &QuadField, terms: u64) -> BigRational {
    let terms = terms.max(1);
    let f = field.conductor;
    let n_max = terms * f;
    // Accumulate over a fixed power-of-ten denominator, rounding positive
    // terms up and negative terms toward zero, so the sum is a certified
    // upper bound computed in plain integer arithmetic.
    let scale = BigInt::from(10u64).pow(24);
    let mut acc = BigInt::zero();
    for n in 1..=n_max {
        let c = chi(field, n as i64);
        if c == 0 {
            continue;
        }
        let den = BigInt::from(n) * n * n;
        let q = &scale / &den;
        if c > 0 {
            acc += if (&scale % &den).is_zero() { q } else { q + 1 };
        } else {
            acc -= q;
        }
    }
    // grouping by full periods of the character, the tail after n_max is
    // bounded by 1/(2*n_max^2)
    BigRational::new(acc, scale)
        + BigRational::new(BigInt::from(1u32), BigInt::from(2u32) * n_max * n_max)
}

/// Numeric evaluation of L_k(-2) through the functional equation
/// L_k(-2) = -|d_k|^{5/2} / (2 pi^3) * L_k(3).  Independent oracle for the
/// exact Bernoulli value.
pub fn l_minus_two_numeric(field: &QuadField, terms: u64) -> f64 {
    let dk = field.conductor as f64;
    -(dk.powf(2.5) / (2.0 * std::f64::consts::PI.powi(3))) * l_at_three(field, terms)
}
