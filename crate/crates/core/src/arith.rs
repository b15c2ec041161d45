//! Checked integer helpers for period arithmetic.
//!
//! Period lengths grow through lcm chains, so every product is checked and
//! overflow surfaces as an error instead of wrapping.

use num_integer::Integer;

/// Raised when a period computation leaves the `i64` range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("integer overflow while computing {0}")]
pub struct Overflow(pub &'static str);

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn checked_lcm(a: i64, b: i64, what: &'static str) -> Result<i64, Overflow> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    let g = gcd(a, b);
    (a / g)
        .checked_mul(b)
        .map(i64::abs)
        .ok_or(Overflow(what))
}

pub fn checked_mul(a: i64, b: i64, what: &'static str) -> Result<i64, Overflow> {
    a.checked_mul(b).ok_or(Overflow(what))
}

/// Exact quotient of an `i128` expression, narrowed to `i64`.
///
/// Returns `None` when `den` does not divide `num`.
pub fn exact_div(num: i128, den: i128, what: &'static str) -> Result<Option<i64>, Overflow> {
    if den == 0 || num % den != 0 {
        return Ok(None);
    }
    i64::try_from(num / den).map(Some).map_err(|_| Overflow(what))
}

/// Distinct prime factors in ascending order (trial division).
pub fn prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    n = n.abs();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}
