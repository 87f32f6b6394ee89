//! Closed real intervals and the arithmetic behind the natural interval
//! extension.
//!
//! Endpoints are computed with ordinary round-to-nearest `f64` operations.
//! Every operation is built from the same scalar operations that point
//! evaluation uses, and rounding is monotone, so a point value computed with
//! [`crate::expr::Expr::eval`] always lies inside the interval computed over
//! any box containing the point.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Builds `[lo, hi]`. Returns `None` when `lo > hi` or either end is NaN.
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        if lo <= hi {
            Some(Self { lo, hi })
        } else {
            None
        }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        let mid = 0.5 * (self.lo + self.hi);
        // guards against overflow of lo + hi and keeps the midpoint inside
        mid.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `true` when `other` lies inside `self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Splits at the midpoint into `[lo, mid]` and `[mid, hi]`.
    pub fn bisect(&self) -> (Interval, Interval) {
        let mid = self.midpoint();
        (
            Interval { lo: self.lo, hi: mid },
            Interval { lo: mid, hi: self.hi },
        )
    }

    pub fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn add(self, rhs: Self) -> Self {
        Self {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }

    pub fn sub(self, rhs: Self) -> Self {
        Self {
            lo: self.lo - rhs.hi,
            hi: self.hi - rhs.lo,
        }
    }

    pub fn mul(self, rhs: Self) -> Self {
        let products = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        hull(&products)
    }

    /// Division by an interval that excludes zero. Returns `None` otherwise.
    pub fn div(self, rhs: Self) -> Option<Self> {
        if rhs.contains_zero() {
            return None;
        }
        let quotients = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        Some(hull(&quotients))
    }

    /// Integer power with even-power tightening.
    pub fn powi(self, exponent: u32) -> Self {
        if exponent == 0 {
            return Self::point(1.0);
        }
        let lo = int_pow(self.lo, exponent);
        let hi = int_pow(self.hi, exponent);
        if exponent % 2 == 1 {
            Self { lo, hi }
        } else if self.contains_zero() {
            Self {
                lo: 0.0,
                hi: lo.max(hi),
            }
        } else {
            Self {
                lo: lo.min(hi),
                hi: lo.max(hi),
            }
        }
    }

    pub fn min(self, rhs: Self) -> Self {
        Self {
            lo: self.lo.min(rhs.lo),
            hi: self.hi.min(rhs.hi),
        }
    }

    pub fn max(self, rhs: Self) -> Self {
        Self {
            lo: self.lo.max(rhs.lo),
            hi: self.hi.max(rhs.hi),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

fn hull(values: &[f64; 4]) -> Interval {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Interval { lo, hi }
}

/// `base^exponent` by repeated squaring on `|base|`, sign restored for odd
/// exponents. Shared by point and interval evaluation so both round the same
/// way.
pub(crate) fn int_pow(base: f64, exponent: u32) -> f64 {
    let mut acc = 1.0;
    let mut square = base.abs();
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            acc *= square;
        }
        e >>= 1;
        if e > 0 {
            square *= square;
        }
    }
    if base.is_sign_negative() && exponent % 2 == 1 {
        -acc
    } else {
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn rejects_reversed_bounds() {
        assert!(Interval::new(1.0, 0.0).is_none());
        assert!(Interval::new(f64::NAN, 0.0).is_none());
    }

    #[test]
    fn even_power_straddling_zero_is_tight() {
        assert_eq!(iv(-2.0, 2.0).powi(2), iv(0.0, 4.0));
        assert_eq!(iv(-1.0, 3.0).powi(4), iv(0.0, 81.0));
        assert_eq!(iv(-3.0, -1.0).powi(2), iv(1.0, 9.0));
    }

    #[test]
    fn odd_power_is_monotone() {
        assert_eq!(iv(-2.0, 1.0).powi(3), iv(-8.0, 1.0));
    }

    #[test]
    fn int_pow_matches_naive_product() {
        for base in [-2.5, -1.0, 0.0, 0.3, 1.7] {
            for e in 0..9u32 {
                let naive: f64 = (0..e).map(|_| base).product();
                assert!((int_pow(base, e) - naive).abs() <= 1e-12 * naive.abs().max(1.0));
            }
        }
    }

    #[test]
    fn division_needs_zero_free_divisor() {
        assert!(iv(1.0, 2.0).div(iv(-1.0, 1.0)).is_none());
        assert_eq!(iv(1.0, 2.0).div(iv(2.0, 4.0)), Some(iv(0.25, 1.0)));
    }

    #[test]
    fn min_max_are_pointwise() {
        assert_eq!(iv(-1.0, 3.0).min(iv(0.0, 1.0)), iv(-1.0, 1.0));
        assert_eq!(iv(-1.0, 3.0).max(iv(0.0, 1.0)), iv(0.0, 3.0));
    }
}
