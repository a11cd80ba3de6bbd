//! Cavity models: classical Hamiltonians in the drive frame, their Wirtinger
//! derivatives, classical fixed points and bifurcation thresholds.
//!
//! Energies are in units of `hbar * gamma` and amplitudes are dimensionless
//! (`|alpha|^2` is a photon number). The phase convention is
//! `alpha = A exp(-i theta)`.

mod fixed_points;

pub use fixed_points::{
    bifurcation_threshold, bifurcation_threshold_with, find_fixed_points, Branch, FixedPoint, SearchSpec,
    ThresholdSearch,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ddouble::DDouble;
use crate::error::{Error, Result};
use crate::specfun::{self, MAX_ARGUMENT};

/// A driven cavity model with its parameters in internal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelDescriptor {
    /// Harmonic cavity with a linear drive `-eps (alpha + alpha*)`.
    Linear { delta: f64, drive: f64 },
    /// Linearly driven Kerr cavity, `-delta |alpha|^2 - (kerr/2) |alpha|^4 - eps (alpha + alpha*)`.
    Kerr { delta: f64, drive: f64, kerr: f64 },
    /// Josephson-driven cavity; `ej` is the renormalised Josephson energy `E_J*`.
    Josephson { delta: f64, ej: f64, phi0: f64 },
}

impl ModelDescriptor {
    pub fn linear(delta: f64, drive: f64) -> Self {
        ModelDescriptor::Linear { delta, drive }
    }

    pub fn kerr(delta: f64, drive: f64, kerr: f64) -> Self {
        ModelDescriptor::Kerr { delta, drive, kerr }
    }

    pub fn josephson(delta: f64, ej: f64, phi0: f64) -> Self {
        ModelDescriptor::Josephson { delta, ej, phi0 }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelDescriptor::Linear { .. } => "linear",
            ModelDescriptor::Kerr { .. } => "kerr",
            ModelDescriptor::Josephson { .. } => "josephson",
        }
    }

    pub fn delta(&self) -> f64 {
        match *self {
            ModelDescriptor::Linear { delta, .. }
            | ModelDescriptor::Kerr { delta, .. }
            | ModelDescriptor::Josephson { delta, .. } => delta,
        }
    }

    /// Drive amplitude `eps` (linear, Kerr) or `E_J*` (Josephson).
    pub fn drive(&self) -> f64 {
        match *self {
            ModelDescriptor::Linear { drive, .. } | ModelDescriptor::Kerr { drive, .. } => drive,
            ModelDescriptor::Josephson { ej, .. } => ej,
        }
    }

    pub fn phi0(&self) -> Option<f64> {
        match *self {
            ModelDescriptor::Josephson { phi0, .. } => Some(phi0),
            _ => None,
        }
    }

    pub fn with_delta(mut self, value: f64) -> Self {
        match &mut self {
            ModelDescriptor::Linear { delta, .. }
            | ModelDescriptor::Kerr { delta, .. }
            | ModelDescriptor::Josephson { delta, .. } => *delta = value,
        }
        self
    }

    pub fn with_drive(mut self, value: f64) -> Self {
        match &mut self {
            ModelDescriptor::Linear { drive, .. } | ModelDescriptor::Kerr { drive, .. } => *drive = value,
            ModelDescriptor::Josephson { ej, .. } => *ej = value,
        }
        self
    }

    pub fn with_phi0(mut self, value: f64) -> Result<Self> {
        match &mut self {
            ModelDescriptor::Josephson { phi0, .. } => *phi0 = value,
            _ => return Err(Error::invalid("phi0 only applies to the josephson model")),
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match *self {
            ModelDescriptor::Linear { delta, drive } => delta.is_finite() && drive.is_finite(),
            ModelDescriptor::Kerr { delta, drive, kerr } => {
                delta.is_finite() && drive.is_finite() && kerr.is_finite()
            }
            ModelDescriptor::Josephson { delta, ej, phi0 } => {
                if !(phi0 > 0.0 && phi0 < 1.0) {
                    return Err(Error::invalid(format!(
                        "josephson phi0 must lie in (0, 1), got {phi0}"
                    )));
                }
                delta.is_finite() && ej.is_finite()
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::invalid(format!("non-finite model parameter in {self:?}")))
        }
    }
}

/// First and second Wirtinger derivatives of the classical Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtingerDerivs {
    /// `d H / d alpha*`
    pub d1: Complex64,
    /// `d^2 H / d alpha d alpha*` (real for every supported model)
    pub d_mixed: f64,
    /// `d^2 H / d alpha*^2`
    pub d_anti: Complex64,
}

fn josephson_argument(phi0: f64, amplitude: f64) -> Result<f64> {
    let x = 2.0 * phi0 * amplitude;
    if !x.is_finite() || x > MAX_ARGUMENT {
        return Err(Error::domain(format!(
            "Bessel argument 2*phi0*|alpha| = {x} exceeds {MAX_ARGUMENT}"
        )));
    }
    Ok(x)
}

/// Polar decomposition with `alpha = A exp(-i theta)`; `theta = 0` at the origin.
pub(crate) fn polar(alpha: Complex64) -> (f64, f64) {
    let a = alpha.norm();
    if a == 0.0 {
        (0.0, 0.0)
    } else {
        (a, -alpha.arg())
    }
}

/// Classical Hamiltonian `H(alpha, alpha*)` in units of `hbar * gamma`.
pub fn classical_hamiltonian(model: &ModelDescriptor, alpha: Complex64) -> Result<f64> {
    let n = alpha.norm_sqr();
    match *model {
        ModelDescriptor::Linear { delta, drive } => Ok(-delta * n - 2.0 * drive * alpha.re),
        ModelDescriptor::Kerr { delta, drive, kerr } => {
            Ok(-delta * n - 0.5 * kerr * n * n - 2.0 * drive * alpha.re)
        }
        ModelDescriptor::Josephson { delta, ej, phi0 } => {
            // (i E/2)(alpha* - alpha) J1(2 phi0 |alpha|)/|alpha| = E Im(alpha) 2 phi0 J1(x)/x
            let x = josephson_argument(phi0, alpha.norm())?;
            Ok(-delta * n + ej * alpha.im * 2.0 * phi0 * specfun::j1_over_x(x))
        }
    }
}

/// Analytic Wirtinger derivatives of the classical Hamiltonian at `alpha`.
pub fn hamiltonian_derivatives(model: &ModelDescriptor, alpha: Complex64) -> Result<WirtingerDerivs> {
    match *model {
        ModelDescriptor::Linear { delta, drive } => Ok(WirtingerDerivs {
            d1: -delta * alpha - drive,
            d_mixed: -delta,
            d_anti: Complex64::new(0.0, 0.0),
        }),
        ModelDescriptor::Kerr { delta, drive, kerr } => {
            let n = alpha.norm_sqr();
            Ok(WirtingerDerivs {
                d1: -delta * alpha - kerr * n * alpha - drive,
                d_mixed: -delta - 2.0 * kerr * n,
                d_anti: -kerr * alpha * alpha,
            })
        }
        ModelDescriptor::Josephson { delta, ej, phi0 } => {
            let (a, theta) = polar(alpha);
            let x = josephson_argument(phi0, a)?;
            let [j0, j1, j2, j3] = specfun::j0123(x);
            let c = 0.5 * ej * phi0;
            let (s, co) = theta.sin_cos();
            let rot = Complex64::from_polar(1.0, -theta);
            // dH/dalpha* = [i C cos(theta) (J0+J2) - delta A - C sin(theta) (J0-J2)] e^{-i theta}
            let d1 = Complex64::new(-delta * a - c * s * (j0 - j2), c * co * (j0 + j2)) * rot;
            let d_mixed = -delta + ej * phi0 * phi0 * j1 * s;
            let r = -0.5
                * ej
                * phi0
                * phi0
                * (j1 * Complex64::from_polar(1.0, theta) + j3 * Complex64::from_polar(1.0, -theta));
            let d_anti = Complex64::i() * Complex64::from_polar(1.0, -2.0 * theta) * r;
            Ok(WirtingerDerivs { d1, d_mixed, d_anti })
        }
    }
}

/// `H(alpha + dx + i dy)` in double-double, so that the finite-difference
/// stencil below is limited by truncation rather than rounding.
fn hamiltonian_dd(model: &ModelDescriptor, alpha: Complex64, dx: f64, dy: f64) -> Result<DDouble> {
    let x = DDouble::new(alpha.re) + DDouble::new(dx);
    let y = DDouble::new(alpha.im) + DDouble::new(dy);
    let n = x.sqr() + y.sqr();
    let dd = DDouble::new;
    match *model {
        ModelDescriptor::Linear { delta, drive } => Ok(-(dd(delta) * n) - dd(2.0 * drive) * x),
        ModelDescriptor::Kerr { delta, drive, kerr } => {
            Ok(-(dd(delta) * n) - dd(0.5 * kerr) * n.sqr() - dd(2.0 * drive) * x)
        }
        ModelDescriptor::Josephson { delta, ej, phi0 } => {
            josephson_argument(phi0, n.to_f64().sqrt())?;
            let u = DDouble::from_prod(phi0, phi0) * n;
            let drive_term = dd(ej) * y * dd(2.0 * phi0) * specfun::j1_over_x_dd(u);
            Ok(drive_term - dd(delta) * n)
        }
    }
}

/// Central finite-difference estimate of the Wirtinger derivatives, using
/// `d/dalpha* = (d_x + i d_y)/2`, `d^2/dalpha dalpha* = (d_xx + d_yy)/4` and
/// `d^2/dalpha*^2 = (d_xx - d_yy + 2i d_xy)/4` on `H(x + iy)`.
pub fn fd_hamiltonian_derivatives(
    model: &ModelDescriptor,
    alpha: Complex64,
    h: f64,
) -> Result<WirtingerDerivs> {
    let scale = alpha.norm().max(1.0);
    if !(h >= 1e-6 * scale && h <= 1e-3 * scale) {
        return Err(Error::invalid(format!(
            "step {h} outside [1e-6, 1e-3] * max(1, |alpha|) = [{}, {}]",
            1e-6 * scale,
            1e-3 * scale
        )));
    }
    let f = |dx: f64, dy: f64| hamiltonian_dd(model, alpha, dx, dy);
    let f0 = f(0.0, 0.0)?;
    let fxp = f(h, 0.0)?;
    let fxm = f(-h, 0.0)?;
    let fyp = f(0.0, h)?;
    let fym = f(0.0, -h)?;
    let fpp = f(h, h)?;
    let fpm = f(h, -h)?;
    let fmp = f(-h, h)?;
    let fmm = f(-h, -h)?;

    let two = DDouble::new(2.0);
    let hh = DDouble::from_prod(h, h);
    let dx = ((fxp - fxm).div_f64(2.0 * h)).to_f64();
    let dy = ((fyp - fym).div_f64(2.0 * h)).to_f64();
    let dxx = ((fxp - two * f0 + fxm) / hh).to_f64();
    let dyy = ((fyp - two * f0 + fym) / hh).to_f64();
    let dxy = ((fpp - fpm - fmp + fmm) / (DDouble::new(4.0) * hh)).to_f64();

    Ok(WirtingerDerivs {
        d1: Complex64::new(0.5 * dx, 0.5 * dy),
        d_mixed: 0.25 * (dxx + dyy),
        d_anti: Complex64::new(0.25 * (dxx - dyy), 0.5 * dxy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1.0)
    }

    #[test]
    fn hamiltonian_examples() {
        let jj = ModelDescriptor::josephson(0.3, 50.0, 0.06);
        assert_eq!(classical_hamiltonian(&jj, Complex64::new(0.0, 0.0)).unwrap(), 0.0);
        let jj0 = ModelDescriptor::josephson(0.0, 50.0, 0.06);
        assert_eq!(
            classical_hamiltonian(&jj0, Complex64::new(3.0, 0.0)).unwrap(),
            0.0
        );
        let lin = ModelDescriptor::linear(-1.0, 0.0);
        assert_eq!(
            classical_hamiltonian(&lin, Complex64::new(0.0, 2.0)).unwrap(),
            4.0
        );
    }

    #[test]
    fn josephson_polar_form() {
        let (delta, ej, phi0) = (0.2, 120.0, 0.06);
        let m = ModelDescriptor::josephson(delta, ej, phi0);
        let (a, theta) = (7.5_f64, 0.8_f64);
        let alpha = Complex64::from_polar(a, -theta);
        let h = classical_hamiltonian(&m, alpha).unwrap();
        let polar_form = -delta * a * a - ej * theta.sin() * specfun::jn(1, 2.0 * phi0 * a);
        assert!((h - polar_form).abs() < 1e-12 * polar_form.abs().max(1.0));
    }

    #[test]
    fn josephson_domain_error() {
        let m = ModelDescriptor::josephson(0.0, 1.0, 0.5);
        assert!(matches!(
            classical_hamiltonian(&m, Complex64::new(40.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(hamiltonian_derivatives(&m, Complex64::new(40.0, 0.0)).is_err());
    }

    #[test]
    fn linear_derivatives_match_fd_exactly() {
        let m = ModelDescriptor::linear(-0.7, 1.3);
        let alpha = Complex64::new(1.0, 0.0);
        let an = hamiltonian_derivatives(&m, alpha).unwrap();
        let fd = fd_hamiltonian_derivatives(&m, alpha, 1e-4).unwrap();
        assert_eq!(an.d_mixed, 0.7);
        assert_eq!(an.d_anti, Complex64::new(0.0, 0.0));
        assert!((an.d_mixed - fd.d_mixed).abs() < 1e-10);
        assert!((an.d_anti - fd.d_anti).norm() < 1e-10);
        assert!((an.d1 - fd.d1).norm() < 1e-10);
    }

    #[test]
    fn josephson_derivatives_match_fd() {
        let m = ModelDescriptor::josephson(0.1, 300.0, 0.06);
        let alpha = Complex64::from_polar(10.0, -0.3);
        let an = hamiltonian_derivatives(&m, alpha).unwrap();
        let fd = fd_hamiltonian_derivatives(&m, alpha, 1e-4 * 10.0).unwrap();
        assert!(rel(fd.d1, an.d1) < 1e-6);
        assert!((fd.d_mixed - an.d_mixed).abs() / an.d_mixed.abs().max(1.0) < 1e-6);
        assert!(rel(fd.d_anti, an.d_anti) < 1e-6);
    }

    #[test]
    fn kerr_derivatives_match_fd() {
        let m = ModelDescriptor::kerr(-0.4, 0.9, 0.05);
        let alpha = Complex64::from_polar(2.0, 0.5);
        let an = hamiltonian_derivatives(&m, alpha).unwrap();
        let fd = fd_hamiltonian_derivatives(&m, alpha, 2e-4).unwrap();
        assert!(rel(fd.d1, an.d1) < 1e-8);
        assert!((fd.d_mixed - an.d_mixed).abs() / an.d_mixed.abs().max(1.0) < 1e-8);
        assert!(rel(fd.d_anti, an.d_anti) < 1e-8);
    }

    #[test]
    fn fd_step_is_range_checked() {
        let m = ModelDescriptor::linear(0.0, 0.0);
        assert!(fd_hamiltonian_derivatives(&m, Complex64::new(1.0, 0.0), 1e-2).is_err());
        assert!(fd_hamiltonian_derivatives(&m, Complex64::new(1.0, 0.0), 1e-8).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(ModelDescriptor::josephson(0.0, 1.0, 0.0).validate().is_err());
        assert!(ModelDescriptor::josephson(0.0, 1.0, 1.5).validate().is_err());
        assert!(ModelDescriptor::linear(f64::NAN, 1.0).validate().is_err());
        assert!(ModelDescriptor::kerr(0.0, 1.0, 0.1).validate().is_ok());
        assert!(ModelDescriptor::linear(0.0, 1.0).with_phi0(0.1).is_err());
    }
}
