//! Bessel functions of the first kind for small integer orders.
//!
//! Evaluation uses the ascending power series accumulated in double-double
//! arithmetic, which keeps full double precision up to `|x| = 30` despite
//! the cancellation between large alternating terms.

use std::sync::OnceLock;

use crate::ddouble::DDouble;
use crate::error::{Error, Result};

/// Largest supported `|x|`.
pub const MAX_ARGUMENT: f64 = 30.0;
/// Largest supported order.
pub const MAX_ORDER: u32 = 6;

const MAX_TERMS: usize = 60;
const TERM_CUTOFF: f64 = 1e-17;

/// Order `k` of a Bessel function, restricted to `0..=6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BesselOrder(u32);

impl BesselOrder {
    pub fn new(k: u32) -> Result<Self> {
        if k > MAX_ORDER {
            return Err(Error::domain(format!(
                "Bessel order {k} outside supported range 0..={MAX_ORDER}"
            )));
        }
        Ok(BesselOrder(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::domain(format!(
            "Bessel argument {x} outside supported range |x| <= {MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

/// `J_k(x)` for `|x| <= 30`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    check_argument(x)?;
    Ok(jn(order.0, x))
}

/// Sum of `(-1)^m u^m / (m! (m+k)!)` with `u = x^2/4`, i.e. `J_k(x) / (x/2)^k`.
fn reduced_series(k: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    reduced_series_dd(k, DDouble::from_prod(half, half)).to_f64()
}

fn reduced_series_dd(k: u32, u: DDouble) -> DDouble {
    let mut term = DDouble::ONE;
    for j in 2..=k {
        term = term.div_f64(j as f64);
    }
    let mut sum = term;
    for m in 1..MAX_TERMS {
        let denom = (m as f64) * ((m as u32 + k) as f64);
        term = (-(term * u)).div_f64(denom);
        sum = sum + term;
        if term.hi.abs() < TERM_CUTOFF * sum.hi.abs() {
            break;
        }
    }
    sum
}

/// `J_k(x)` without the range check. Callers must guarantee `|x| <= 30`.
pub(crate) fn jn(k: u32, x: f64) -> f64 {
    debug_assert!(x.abs() <= MAX_ARGUMENT + 1e-9);
    let series = reduced_series(k, x);
    if k == 0 {
        series
    } else {
        (0.5 * x).powi(k as i32) * series
    }
}

/// `J_1(x) / x`, finite at the origin where it equals `1/2`.
pub(crate) fn j1_over_x(x: f64) -> f64 {
    0.5 * reduced_series(1, x)
}

/// `J_1(x) / x` as a function of `u = x^2 / 4`, in double-double.
pub(crate) fn j1_over_x_dd(u: DDouble) -> DDouble {
    reduced_series_dd(1, u).div_f64(2.0)
}

/// `J_0..J_3` at one argument.
pub(crate) fn j0123(x: f64) -> [f64; 4] {
    [jn(0, x), jn(1, x), jn(2, x), jn(3, x)]
}

/// Residuals of the recurrences `J0 + J2 = 2 J1 / x` and `J1 + J3 = 4 J2 / x`.
pub fn bessel_identity_residuals(x: f64) -> Result<(f64, f64)> {
    check_argument(x)?;
    if x == 0.0 {
        return Err(Error::domain("recurrence residuals undefined at x = 0"));
    }
    let [j0, j1, j2, j3] = j0123(x);
    let res_a = (j0 + j2 - 2.0 * j1 / x).abs();
    let res_b = (j1 + j3 - 4.0 * j2 / x).abs();
    Ok((res_a, res_b))
}

/// Deviation between the `terms`-term partial sum of the classical drive series
/// `sum_k (-1)^k phi0^(2k+1) nbar^k / (k! (k+1)!)` and its closed form
/// `J1(2 phi0 sqrt(nbar)) / sqrt(nbar)`.
pub fn rwa_series_check(phi0: f64, nbar: f64, terms: u32) -> Result<f64> {
    if !(phi0 > 0.0) || !phi0.is_finite() {
        return Err(Error::domain(format!("phi0 must be positive, got {phi0}")));
    }
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::domain(format!("nbar must be >= 0, got {nbar}")));
    }
    if terms < 1 {
        return Err(Error::domain("series needs at least one term"));
    }
    let x = 2.0 * phi0 * nbar.sqrt();
    check_argument(x)?;

    let mut coeff = DDouble::new(phi0);
    let mut partial = coeff;
    let step = DDouble::from_prod(phi0 * phi0, nbar);
    for k in 1..=terms {
        let denom = (k as f64) * ((k + 1) as f64);
        coeff = (-(coeff * step)).div_f64(denom);
        partial = partial + coeff;
    }
    let closed = 2.0 * phi0 * j1_over_x(x);
    Ok((partial.to_f64() - closed).abs())
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All zeros of `J0(x) - J2(x)` (the stationary points of `J1`) in `(0, 30]`,
/// ascending.
pub fn j1_stationary_points() -> &'static [f64] {
    static ROOTS: OnceLock<Vec<f64>> = OnceLock::new();
    ROOTS.get_or_init(|| {
        let f = |x: f64| jn(0, x) - jn(2, x);
        let n = 3000;
        let mut roots = Vec::new();
        let mut x0 = 0.0;
        let mut f0 = f(x0);
        for i in 1..=n {
            let x1 = MAX_ARGUMENT * i as f64 / n as f64;
            let f1 = f(x1);
            if f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
                roots.push(bisect(f, x0, x1));
            }
            x0 = x1;
            f0 = f1;
        }
        roots
    })
}

/// First positive maximum of `J1`, the smallest zero of `J0 - J2` (about 1.8412).
pub fn first_j1_maximum() -> f64 {
    j1_stationary_points()[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(k: u32, x: f64) -> f64 {
        bessel_j(BesselOrder::new(k).unwrap(), x).unwrap()
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(j(0, 0.0), 1.0);
        assert_eq!(j(1, 0.0), 0.0);
        assert_eq!(j(3, 0.0), 0.0);
        assert_eq!(j1_over_x(0.0), 0.5);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            bessel_j(BesselOrder::new(0).unwrap(), 30.5),
            Err(Error::Domain(_))
        ));
        assert!(BesselOrder::new(7).is_err());
        assert!(bessel_j(BesselOrder::new(1).unwrap(), f64::NAN).is_err());
        assert!(matches!(bessel_identity_residuals(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn parity_is_exact() {
        for k in 0..=6 {
            for &x in &[0.3, 1.7, 4.2, 11.0, 29.9] {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(j(k, -x), sign * j(k, x));
            }
        }
    }

    #[test]
    fn recurrences_hold_on_examples() {
        for &x in &[1.0, 2.0, 10.0] {
            let (a, b) = bessel_identity_residuals(x).unwrap();
            assert!(a <= 1e-10 && b <= 1e-10, "x={x}: {a} {b}");
        }
    }

    #[test]
    fn first_stationary_point_of_j1() {
        let xs = first_j1_maximum();
        assert!((xs - 1.841_183_781_340_659).abs() < 1e-12);
        let h = 1e-4;
        assert!(j(1, xs) > j(1, xs - h) && j(1, xs) > j(1, xs + h));
        assert!(j1_stationary_points().len() >= 9);
    }

    #[test]
    fn rwa_series_examples() {
        assert_eq!(rwa_series_check(0.06, 0.0, 1).unwrap(), 0.0);
        assert!(rwa_series_check(0.06, 100.0, 20).unwrap() <= 1e-12);
        let coarse = rwa_series_check(0.2, 25.0, 2).unwrap();
        let fine = rwa_series_check(0.2, 25.0, 10).unwrap();
        assert!(fine < coarse);
        assert!(rwa_series_check(-0.1, 1.0, 3).is_err());
        assert!(rwa_series_check(1.0, 400.0, 3).is_err());
    }
}
