//! Imaginary quadratic fields Q(sqrt(-d)): discriminants, Kronecker
//! characters, prime splitting, and class numbers via reduced binary
//! quadratic forms.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("d must be a positive integer, got {0}")]
    NonPositive(i64),
    #[error("d must be squarefree, {0} is divisible by {1}^2")]
    NotSquarefree(u64, u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// The imaginary quadratic field k = Q(sqrt(-d)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadField {
    /// Squarefree positive integer defining k = Q(sqrt(-d)).
    pub d: u64,
    /// Fundamental discriminant: -d if d = 3 mod 4, otherwise -4d.
    pub d_k: i64,
    /// Conductor of the quadratic character, f = |d_k|.
    pub conductor: u64,
    /// Number of roots of unity in k: 6 for d=3, 4 for d=1, else 2.
    pub roots_of_unity: u32,
}

/// Behaviour of a rational prime in the ring of integers of k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeSplitting {
    Split,
    Inert,
    Ramified,
}

/// Class number of k together with the order of the 3-primary part
/// of the class group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassData {
    pub h: u64,
    pub h3: u64,
}

pub fn is_squarefree(d: u64) -> bool {
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Build the field constants for k = Q(sqrt(-d)).
pub fn make_field(d: i64) -> Result<QuadField, FieldError> {
    if d <= 0 {
        return Err(FieldError::NonPositive(d));
    }
    let d = d as u64;
    {
        let mut n = d;
        let mut p = 2u64;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return Err(FieldError::NotSquarefree(d, p));
                }
            }
            p += 1;
        }
    }
    let d_k = if d % 4 == 3 { -(d as i64) } else { -4 * d as i64 };
    let roots_of_unity = match d {
        1 => 4,
        3 => 6,
        _ => 2,
    };
    Ok(QuadField {
        d,
        d_k,
        conductor: d_k.unsigned_abs(),
        roots_of_unity,
    })
}

/// Kronecker symbol (a/n), total on all integer pairs.
///
/// For a fundamental discriminant a = d_k this is the quadratic character
/// attached to k, completely multiplicative with period |d_k|.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut sign = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    // factor out 2s of n using the (a/2) supplement
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => sign = -sign,
            _ => return 0, // a even
        }
    }
    a = a.rem_euclid(n);
    // now n odd positive: Jacobi symbol loop
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// The quadratic character chi_{d_k}(n) of the field.
pub fn chi(field: &QuadField, n: i64) -> i32 {
    kronecker(field.d_k, n)
}

/// Splitting behaviour of the prime p in the ring of integers of k.
pub fn splitting(field: &QuadField, p: u64) -> Result<PrimeSplitting, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    Ok(match kronecker(field.d_k, p as i64) {
        1 => PrimeSplitting::Split,
        -1 => PrimeSplitting::Inert,
        _ => PrimeSplitting::Ramified,
    })
}

fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    gcd(gcd(a, b), c)
}

/// Class number by counting reduced primitive forms (a,b,c) with
/// b^2 - 4ac = d_k, |b| <= a <= c, and b >= 0 when |b| = a or a = c.
pub fn class_number(field: &QuadField) -> ClassData {
    let disc = field.d_k;
    let mut h = 0u64;
    let mut a = 1i64;
    while 3 * a * a <= -disc {
        for b in -a..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (b == -a || a == c) {
                continue;
            }
            if gcd3(a as u64, b.unsigned_abs(), c as u64) != 1 {
                continue;
            }
            h += 1;
        }
        a += 1;
    }
    let mut h3 = 1u64;
    let mut m = h;
    while m % 3 == 0 {
        h3 *= 3;
        m /= 3;
    }
    ClassData { h, h3 }
}

/// The primes dividing the discriminant, i.e. the primes ramified in k.
pub fn ramified_primes(field: &QuadField) -> Vec<u64> {
    let mut n = field.conductor;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
