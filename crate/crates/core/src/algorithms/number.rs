//! Integer helpers for Shor's post-processing.

use std::fmt;

use crate::error::{QlabError, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `base^exp mod modulus`, square-and-multiply with 128-bit intermediates.
pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// `⌊n^(1/k)⌋` for `k ≥ 1`.
pub fn integer_root(n: u64, k: u32) -> u64 {
    assert!(k >= 1, "root degree must be positive");
    if n < 2 || k == 1 {
        return n;
    }
    let fits = |r: u64| r.checked_pow(k).is_some_and(|p| p <= n);
    let mut r = (n as f64).powf(1.0 / k as f64) as u64;
    while r > 0 && !fits(r) {
        r -= 1;
    }
    while fits(r + 1) {
        r += 1;
    }
    r
}

/// `Some((root, k))` with the smallest `k ≥ 2` such that `root^k = n`.
pub fn perfect_power(n: u64) -> Option<(u64, u32)> {
    let max_k = 64 - n.leading_zeros();
    (2..=max_k).find_map(|k| {
        let r = integer_root(n, k);
        (r >= 2 && r.checked_pow(k) == Some(n)).then_some((r, k))
    })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// A reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    numerator: u64,
    denominator: u64,
}

impl Fraction {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(QlabError::input("fraction denominator is zero"));
        }
        let g = gcd(numerator, denominator);
        Ok(Fraction {
            numerator: numerator / g,
            denominator: denominator / g,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Convergents of `numerator/denominator` whose denominators do not exceed
/// `max_denominator`, in expansion order.
pub fn continued_fractions(
    numerator: u64,
    denominator: u64,
    max_denominator: u64,
) -> Result<Vec<Fraction>> {
    if denominator == 0 || numerator >= denominator {
        return Err(QlabError::input(format!(
            "continued fractions need 0 <= numerator < denominator, got {numerator}/{denominator}"
        )));
    }
    // h_k = a_k h_{k-1} + h_{k-2}, k_k likewise, seeded with (1, 0) and (0, 1).
    let (mut h_prev, mut h) = (0u128, 1u128);
    let (mut k_prev, mut k) = (1u128, 0u128);
    let (mut num, mut den) = (numerator as u128, denominator as u128);
    let mut out = Vec::new();
    while den != 0 {
        let a = num / den;
        (num, den) = (den, num - a * den);
        (h_prev, h) = (h, a * h + h_prev);
        (k_prev, k) = (k, a * k + k_prev);
        if k > max_denominator as u128 {
            break;
        }
        out.push(Fraction {
            numerator: h as u64,
            denominator: k as u64,
        });
    }
    Ok(out)
}
