//! Universal cooling formulas expressed through the local parameters
//! `(dtilde, r, gamma, n)` of a classical fixed point.

mod correlators;

pub use correlators::{
    correlator_initial_conditions, correlators_time, spectrum_via_transform, steady_state_by_elimination,
    CorrelatorSet,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cavity::{hamiltonian_derivatives, FixedPoint, ModelDescriptor};
use crate::ddouble::DDouble;
use crate::error::{Error, Result};

/// Local parameters of the linearised fluctuations around a fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalParams {
    /// Effective detuning `dtilde = -d^2H/(dalpha dalpha*)`.
    pub dtilde: f64,
    pub r1: f64,
    pub r2: f64,
    pub gamma: f64,
    /// Fixed-point photon number.
    pub n: f64,
    pub theta0: f64,
}

impl UniversalParams {
    pub fn new(dtilde: f64, r1: f64, r2: f64, gamma: f64, n: f64) -> Result<Self> {
        let up = UniversalParams {
            dtilde,
            r1,
            r2,
            gamma,
            n,
            theta0: 0.0,
        };
        up.validate()?;
        Ok(up)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.dtilde, self.r1, self.r2, self.gamma, self.n, self.theta0]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid(format!("non-finite parameter in {self:?}")));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::invalid(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.n >= 0.0) {
            return Err(Error::invalid(format!(
                "photon number must be >= 0, got {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Squeezing parameter `r = r1 + i r2`.
    pub fn r(&self) -> Complex64 {
        Complex64::new(self.r1, self.r2)
    }

    pub fn r_norm_sqr(&self) -> f64 {
        self.r1 * self.r1 + self.r2 * self.r2
    }

    /// Largest real part of the fluctuation eigenvalues.
    pub fn max_decay_real(&self) -> f64 {
        let (lp, lm) = fluctuation_eigenvalues(self);
        lp.re.max(lm.re)
    }

    pub fn is_stable(&self) -> bool {
        self.max_decay_real() < 0.0
    }
}

/// Mechanical mode parameters in internal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    pub omega_m: f64,
    pub gamma_m: f64,
    /// Thermal occupation of the mechanical bath.
    pub nbar_t: f64,
    /// Single-photon coupling.
    pub g0: f64,
}

impl MechanicalMode {
    pub fn new(omega_m: f64, gamma_m: f64, nbar_t: f64, g0: f64) -> Result<Self> {
        let m = MechanicalMode {
            omega_m,
            gamma_m,
            nbar_t,
            g0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("omega_m", self.omega_m, self.omega_m > 0.0),
            ("gamma_m", self.gamma_m, self.gamma_m > 0.0),
            ("nbar_t", self.nbar_t, self.nbar_t >= 0.0),
            ("g0", self.g0, self.g0 > 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(Error::invalid(format!("{name} out of range: {value}")));
            }
        }
        Ok(())
    }

    /// Warning text when the mechanical linewidth is not small against `gamma = 1`.
    pub fn warning(&self) -> Option<String> {
        (self.gamma_m > 0.1).then(|| {
            format!(
                "gamma_m = {} is not small against the cavity linewidth; results assume gamma_m << gamma",
                self.gamma_m
            )
        })
    }
}

/// Universal parameters at `alpha0 = a0 exp(-i theta0)`.
pub(crate) fn params_at(
    model: &ModelDescriptor,
    a0: f64,
    theta0: f64,
    gamma: f64,
) -> Result<UniversalParams> {
    let alpha = Complex64::from_polar(a0, -theta0);
    let d = hamiltonian_derivatives(model, alpha)?;
    // r = -i exp(2 i theta0) d^2H/dalpha*^2
    let r = -Complex64::i() * Complex64::from_polar(1.0, 2.0 * theta0) * d.d_anti;
    Ok(UniversalParams {
        dtilde: -d.d_mixed,
        r1: r.re,
        r2: r.im,
        gamma,
        n: a0 * a0,
        theta0,
    })
}

/// Universal parameters at a fixed point of `model`.
pub fn universal_params(model: &ModelDescriptor, fp: &FixedPoint, gamma: f64) -> Result<UniversalParams> {
    params_at(model, fp.a0, fp.theta0, gamma)
}

fn dd(x: f64) -> DDouble {
    DDouble::new(x)
}

/// `(dtilde^2 - omega^2 + gamma^2/4 - |r|^2)^2 + gamma^2 omega^2` in double-double.
fn denominator(up: &UniversalParams, omega: f64) -> DDouble {
    let g = dd(up.gamma);
    let inner = DDouble::from_prod(up.dtilde, up.dtilde) - DDouble::from_prod(omega, omega)
        + DDouble::from_prod(0.5 * up.gamma, 0.5 * up.gamma)
        - DDouble::from_prod(up.r1, up.r1)
        - DDouble::from_prod(up.r2, up.r2);
    inner.sqr() + (g * dd(omega)).sqr()
}

/// Spectrum numerator `(-dtilde + omega + r2)^2 + (gamma/2 + r1)^2` in double-double.
fn numerator(up: &UniversalParams, omega: f64) -> DDouble {
    let shift = dd(-up.dtilde) + dd(omega) + dd(up.r2);
    let damp = dd(0.5 * up.gamma) + dd(up.r1);
    shift.sqr() + damp.sqr()
}

/// `S_nn(omega)` as a double-double, in units of `1/gamma`.
fn spectrum_dd(up: &UniversalParams, omega: f64) -> DDouble {
    dd(up.n) * dd(up.gamma) * numerator(up, omega) / denominator(up, omega)
}

/// Photon-number spectrum `S_nn(omega) * gamma` (dimensionless, never negative).
pub fn photon_number_spectrum(up: &UniversalParams, omega: f64) -> f64 {
    (spectrum_dd(up, omega) * dd(up.gamma)).to_f64()
}

/// Optomechanical damping rate
/// `4 n g0^2 gamma omega (r2 - dtilde) / [(dtilde^2 - omega^2 + gamma^2/4 - |r|^2)^2 + gamma^2 omega^2]`.
pub fn optomechanical_damping(up: &UniversalParams, g0: f64, omega: f64) -> f64 {
    let num = 4.0 * up.n * g0 * g0 * up.gamma * omega * (up.r2 - up.dtilde);
    num / denominator(up, omega).to_f64()
}

/// Damping rate from the spectral asymmetry `g0^2 [S_nn(omega) - S_nn(-omega)]`.
pub fn damping_via_asymmetry(up: &UniversalParams, g0: f64, omega: f64) -> f64 {
    let diff = spectrum_dd(up, omega) - spectrum_dd(up, -omega);
    (DDouble::from_prod(g0, g0) * diff).to_f64()
}

/// Residual phonon number
/// `[(omega_m - (r2 - dtilde))^2 + (gamma/2 + r1)^2] / [4 (r2 - dtilde) omega_m]`.
pub fn residual_phonons(up: &UniversalParams, omega_m: f64) -> Result<f64> {
    if !(omega_m > 0.0) || !omega_m.is_finite() {
        return Err(Error::invalid(format!("omega_m must be positive, got {omega_m}")));
    }
    let s = up.r2 - up.dtilde;
    if !(s > 0.0) {
        return Err(Error::NotCooling(s));
    }
    let a = omega_m - s;
    let b = 0.5 * up.gamma + up.r1;
    Ok((a * a + b * b) / (4.0 * s * omega_m))
}

/// Residual phonon number from detailed balance,
/// `S_nn(-omega_m) / (S_nn(omega_m) - S_nn(-omega_m))`.
pub fn residual_phonons_via_balance(up: &UniversalParams, omega_m: f64) -> Result<f64> {
    if !(omega_m > 0.0) || !omega_m.is_finite() {
        return Err(Error::invalid(format!("omega_m must be positive, got {omega_m}")));
    }
    let heat = spectrum_dd(up, -omega_m);
    let cool = spectrum_dd(up, omega_m);
    let net = cool - heat;
    if !(net.to_f64() > 0.0) {
        return Err(Error::NotCooling(up.r2 - up.dtilde));
    }
    Ok((heat / net).to_f64())
}

/// Steady-state phonon number
/// `(gamma_opt nbar_r + gamma_m nbar_t) / (gamma_opt + gamma_m)`.
pub fn min_phonons(gamma_opt: f64, gamma_m: f64, nbar_r: f64, nbar_t: f64) -> Result<f64> {
    let total = gamma_opt + gamma_m;
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::invalid(format!(
            "total damping gamma_opt + gamma_m = {total} must be positive"
        )));
    }
    Ok((gamma_opt * nbar_r + gamma_m * nbar_t) / total)
}

/// Fluctuation eigenvalues `-gamma/2 +/- sqrt(|r|^2 - dtilde^2)`.
pub fn fluctuation_eigenvalues(up: &UniversalParams) -> (Complex64, Complex64) {
    let q = exceptional_point_gap(up);
    let half = -0.5 * up.gamma;
    if q >= 0.0 {
        let s = q.sqrt();
        (Complex64::new(half + s, 0.0), Complex64::new(half - s, 0.0))
    } else {
        let w = (-q).sqrt();
        (Complex64::new(half, w), Complex64::new(half, -w))
    }
}

/// `|r|^2 - dtilde^2`; zero at an exceptional point, non-negative where the
/// eigenvalues are real.
pub fn exceptional_point_gap(up: &UniversalParams) -> f64 {
    (DDouble::from_prod(up.r1, up.r1) + DDouble::from_prod(up.r2, up.r2)
        - DDouble::from_prod(up.dtilde, up.dtilde))
    .to_f64()
}

/// Distance from the zero-heating conditions `r1 = -gamma/2`, `omega_m = r2 - dtilde`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroHeating {
    pub r1_offset: f64,
    pub omega_opt: f64,
    /// `None` when `omega_opt <= 0` (no cooling at that frequency).
    pub nbar_r_at_opt: Option<f64>,
}

pub fn zero_heating_diagnostics(up: &UniversalParams) -> ZeroHeating {
    let omega_opt = up.r2 - up.dtilde;
    let nbar_r_at_opt = if omega_opt > 0.0 {
        residual_phonons(up, omega_opt).ok()
    } else {
        None
    };
    ZeroHeating {
        r1_offset: up.r1 + 0.5 * up.gamma,
        omega_opt,
        nbar_r_at_opt,
    }
}

/// Positive frequency maximising `|Gamma_opt(omega)|`.
///
/// With `D = dtilde^2 + gamma^2/4 - |r|^2` the stationarity condition of
/// `omega / [(D - omega^2)^2 + gamma^2 omega^2]` is
/// `3u^2 - (2D - gamma^2) u - D^2 = 0` in `u = omega^2`.
pub fn optimal_damping_frequency(up: &UniversalParams) -> f64 {
    let g2 = up.gamma * up.gamma;
    let d = up.dtilde * up.dtilde + 0.25 * g2 - up.r_norm_sqr();
    let b = 2.0 * d - g2;
    let u = (b + (b * b + 12.0 * d * d).sqrt()) / 6.0;
    u.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{find_fixed_points, SearchSpec};

    fn up(dtilde: f64, r1: f64, r2: f64, n: f64) -> UniversalParams {
        UniversalParams::new(dtilde, r1, r2, 1.0, n).unwrap()
    }

    #[test]
    fn resonant_lorentzian_peak() {
        assert_eq!(photon_number_spectrum(&up(0.0, 0.0, 0.0, 100.0), 0.0), 400.0);
    }

    #[test]
    fn spectral_zero_at_zero_heating_point() {
        let p = up(0.2, -0.5, 0.9, 50.0);
        let omega = -(p.r2 - p.dtilde);
        assert!(photon_number_spectrum(&p, omega) < 1e-28);
    }

    #[test]
    fn damping_vanishes_when_r2_equals_dtilde() {
        let p = up(0.3, 0.1, 0.3, 10.0);
        for w in [-1.0, 0.2, 2.5] {
            assert_eq!(optomechanical_damping(&p, 0.01, w), 0.0);
            assert_eq!(damping_via_asymmetry(&p, 0.01, w), 0.0);
        }
    }

    #[test]
    fn linear_red_sideband_limit() {
        // gamma << omega_m: Gamma ~ 4 n g0^2 / gamma.
        let wm = 200.0;
        let p = up(-wm, 0.0, 0.0, 3.0);
        let g = optomechanical_damping(&p, 0.02, wm);
        let approx = 4.0 * 3.0 * 0.02 * 0.02;
        assert!((g - approx).abs() < 1e-4 * approx);
        assert!(damping_via_asymmetry(&p, 0.02, wm) > 0.0);
    }

    #[test]
    fn residual_phonon_examples() {
        let p = up(-0.1, -0.5, 0.4, 1.0);
        assert_eq!(residual_phonons(&p, 0.5).unwrap(), 0.0);
        let wm = 0.1006666;
        let lin = up(-wm, 0.0, 0.0, 1.0);
        let expect = (1.0 / (4.0 * wm)).powi(2);
        assert!((residual_phonons(&lin, wm).unwrap() - expect).abs() < 1e-12 * expect);
        assert!(matches!(
            residual_phonons(&up(0.4, 0.0, 0.1, 1.0), 0.3),
            Err(Error::NotCooling(_))
        ));
    }

    #[test]
    fn min_phonon_examples() {
        assert_eq!(min_phonons(0.0, 0.1, 0.2, 2778.0).unwrap(), 2778.0);
        assert!(min_phonons(0.0, 0.0, 0.2, 1.0).is_err());
        let v = min_phonons(1282.39, 0.5, 0.075, 2778.0).unwrap();
        assert!((v - 1.15).abs() < 0.01, "{v}");
        let v = min_phonons(1282.39, 0.302, 0.075, 2778.0).unwrap();
        assert!((v - 0.73).abs() < 0.01, "{v}");
    }

    #[test]
    fn eigenvalue_examples() {
        let (a, b) = fluctuation_eigenvalues(&up(0.3, 0.0, 0.0, 1.0));
        assert!((a - Complex64::new(-0.5, 0.3)).norm() < 1e-15);
        assert!((b - Complex64::new(-0.5, -0.3)).norm() < 1e-15);
        let (a, b) = fluctuation_eigenvalues(&up(0.6, 0.0, 0.6, 1.0));
        assert_eq!(a, b);
        assert_eq!(a, Complex64::new(-0.5, 0.0));
        let p = up(0.0, 0.6, 0.0, 1.0);
        let (a, _) = fluctuation_eigenvalues(&p);
        assert!((a.re - 0.1).abs() < 1e-15);
        assert!(!p.is_stable());
    }

    #[test]
    fn ep_gap_examples() {
        assert!((exceptional_point_gap(&up(0.7, 0.0, 0.0, 1.0)) + 0.49).abs() < 1e-15);
        assert!(exceptional_point_gap(&up(0.5, 0.3, 0.4, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_heating_examples() {
        let z = zero_heating_diagnostics(&up(-0.1, -0.5, 0.4, 1.0));
        assert_eq!(z.r1_offset, 0.0);
        assert!((z.omega_opt - 0.5).abs() < 1e-15);
        assert_eq!(z.nbar_r_at_opt, Some(0.0));
        let z = zero_heating_diagnostics(&up(0.3, 0.0, 0.0, 1.0));
        assert_eq!(z.r1_offset, 0.5);
        assert_eq!(z.nbar_r_at_opt, None);
    }

    #[test]
    fn model_parameter_examples() {
        let lin = ModelDescriptor::linear(-0.4, 1.0);
        let fp = find_fixed_points(&lin, 1.0, &SearchSpec::default()).unwrap()[0];
        let p = universal_params(&lin, &fp, 1.0).unwrap();
        assert_eq!((p.dtilde, p.r1, p.r2), (-0.4, 0.0, 0.0));

        let (delta, k) = (-2.0, 0.1);
        let kerr = ModelDescriptor::kerr(delta, 1.0, k);
        for fp in find_fixed_points(&kerr, 1.0, &SearchSpec::default()).unwrap() {
            let p = universal_params(&kerr, &fp, 1.0).unwrap();
            assert!((p.dtilde - (delta + 2.0 * k * fp.n)).abs() < 1e-12);
            assert!(p.r1.abs() < 1e-12);
            assert!((p.r2 - k * fp.n).abs() < 1e-12);
        }

        let jj = ModelDescriptor::josephson(0.0, 200.0, 0.06);
        let fp = find_fixed_points(&jj, 1.0, &SearchSpec::default()).unwrap()[0];
        assert_eq!(fp.theta0, 0.0);
        let p = universal_params(&jj, &fp, 1.0).unwrap();
        assert_eq!(p.dtilde, 0.0);
        assert!(p.r2.abs() < 1e-15);
        assert!(p.r1 < 0.0);
    }

    #[test]
    fn optimal_damping_frequency_is_stationary() {
        let p = up(-0.3, 0.2, 0.1, 5.0);
        let w = optimal_damping_frequency(&p);
        let f = |x: f64| optomechanical_damping(&p, 1.0, x);
        assert!(f(w) >= f(w * (1.0 + 1e-4)) && f(w) >= f(w * (1.0 - 1e-4)));
    }

    #[test]
    fn mechanical_mode_validation() {
        assert!(MechanicalMode::new(0.1, 1e-7, 2778.0, 7e-4).is_ok());
        assert!(MechanicalMode::new(-0.1, 1e-7, 2778.0, 7e-4).is_err());
        assert!(MechanicalMode::new(0.1, 0.2, 1.0, 1e-3)
            .unwrap()
            .warning()
            .is_some());
    }
}
