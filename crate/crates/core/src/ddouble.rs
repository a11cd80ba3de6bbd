//! Minimal double-double arithmetic (about 32 significant digits).
//!
//! Only the handful of operations needed by the Bessel series and the
//! extended-precision spectrum checks are provided.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct DDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DDouble {
    pub const ONE: DDouble = DDouble { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn new(x: f64) -> Self {
        DDouble { hi: x, lo: 0.0 }
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        DDouble { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let (s, t) = two_sum(self.hi, -p);
        let t = t + self.lo - e;
        let q2 = (s + t) / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        DDouble { hi, lo }
    }

    #[inline]
    pub fn sqr(self) -> Self {
        self * self
    }
}

impl From<f64> for DDouble {
    fn from(x: f64) -> Self {
        DDouble::new(x)
    }
}

impl Neg for DDouble {
    type Output = DDouble;
    #[inline]
    fn neg(self) -> DDouble {
        DDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DDouble {
    type Output = DDouble;
    #[inline]
    fn add(self, o: DDouble) -> DDouble {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        DDouble { hi, lo }
    }
}

impl Sub for DDouble {
    type Output = DDouble;
    #[inline]
    fn sub(self, o: DDouble) -> DDouble {
        self + (-o)
    }
}

impl Mul for DDouble {
    type Output = DDouble;
    #[inline]
    fn mul(self, o: DDouble) -> DDouble {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DDouble { hi, lo }
    }
}

impl Div for DDouble {
    type Output = DDouble;
    #[inline]
    fn div(self, o: DDouble) -> DDouble {
        let q1 = self.hi / o.hi;
        let r = self - o * DDouble::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DDouble::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DDouble { hi, lo } + DDouble::new(q3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_bits_lost_in_plain_addition() {
        let big = DDouble::new(1.0e16);
        let s = big + DDouble::new(1.0) - big;
        assert_eq!(s.to_f64(), 1.0);
    }

    #[test]
    fn division_round_trips() {
        let a = DDouble::new(1.0) / DDouble::new(3.0);
        let back = a * DDouble::new(3.0) - DDouble::ONE;
        assert!(back.to_f64().abs() < 1e-30);
        let b = DDouble::new(2.0).div_f64(7.0) * DDouble::new(7.0) - DDouble::new(2.0);
        assert!(b.to_f64().abs() < 1e-30);
    }
}
