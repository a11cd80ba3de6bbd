//! Cooling design: small phi0, a drive just below the bistability threshold,
//! and the detuning tuned for maximal optomechanical damping.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::optimize::best_damping;
use super::{admitted_points, maximize_on_interval, BranchPolicy};
use crate::cavity::{bifurcation_threshold_with, FixedPoint, ModelDescriptor, ThresholdSearch};
use crate::error::{Error, Result};
use crate::semiclassical::{
    exceptional_point_gap, min_phonons, optomechanical_damping, residual_phonons, zero_heating_diagnostics,
    MechanicalMode, UniversalParams, ZeroHeating,
};

/// Planck constant in eV s.
pub const PLANCK_EV_S: f64 = 6.626_070_15e-34 / 1.602_176_634e-19;

/// How an SI energy is converted to the internal unit.
///
/// With `gamma = 2 pi f_gamma`:
/// `HbarGamma` divides by `hbar gamma = h f_gamma`; `HGamma` divides by
/// `h gamma = 2 pi h f_gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyConvention {
    HGamma,
    HbarGamma,
}

impl EnergyConvention {
    fn unit_ev(self, gamma_hz: f64) -> f64 {
        match self {
            EnergyConvention::HbarGamma => PLANCK_EV_S * gamma_hz,
            EnergyConvention::HGamma => 2.0 * PI * PLANCK_EV_S * gamma_hz,
        }
    }

    /// Energy in eV to internal units for a linewidth `gamma = 2 pi gamma_hz`.
    pub fn to_internal(self, energy_ev: f64, gamma_hz: f64) -> f64 {
        energy_ev / self.unit_ev(gamma_hz)
    }

    pub fn to_ev(self, energy: f64, gamma_hz: f64) -> f64 {
        energy * self.unit_ev(gamma_hz)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EnergyConvention::HGamma => "h_gamma",
            EnergyConvention::HbarGamma => "hbar_gamma",
        }
    }
}

impl FromStr for EnergyConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h_gamma" => Ok(EnergyConvention::HGamma),
            "hbar_gamma" => Ok(EnergyConvention::HbarGamma),
            _ => Err(Error::invalid(format!(
                "unknown energy convention '{s}' (expected h_gamma or hbar_gamma)"
            ))),
        }
    }
}

/// Device parameters in SI form. Frequencies are ordinary frequencies in Hz
/// (the angular value is `2 pi` times larger); the detuning is signed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignInputs {
    pub omega_m_hz: f64,
    pub gamma_m_hz: f64,
    pub gamma_hz: f64,
    pub g0_hz: f64,
    pub ej_ev: f64,
    pub phi0: f64,
    pub delta_hz: f64,
    pub nbar_t: f64,
}

impl DesignInputs {
    /// Mechanical, coupling and circuit parameters of the reference device.
    pub fn reference_device() -> Self {
        DesignInputs {
            omega_m_hz: 302e3,
            gamma_m_hz: 0.5,
            gamma_hz: 3e6,
            g0_hz: 2.1e3,
            ej_ev: 31.32e-6,
            phi0: 0.06,
            delta_hz: -30e3,
            nbar_t: 2778.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_m", self.omega_m_hz),
            ("gamma_m", self.gamma_m_hz),
            ("gamma", self.gamma_hz),
            ("g0", self.g0_hz),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.delta_hz.is_finite() || !self.ej_ev.is_finite() || !(self.nbar_t >= 0.0) {
            return Err(Error::invalid(
                "detuning, drive and nbar_t must be finite (nbar_t >= 0)",
            ));
        }
        if !(self.phi0 > 0.0 && self.phi0 < 1.0) {
            return Err(Error::invalid(format!(
                "phi0 must lie in (0, 1), got {}",
                self.phi0
            )));
        }
        Ok(())
    }

    pub fn mechanics(&self) -> Result<MechanicalMode> {
        MechanicalMode::new(
            self.omega_m_hz / self.gamma_hz,
            self.gamma_m_hz / self.gamma_hz,
            self.nbar_t,
            self.g0_hz / self.gamma_hz,
        )
    }

    pub fn delta(&self) -> f64 {
        self.delta_hz / self.gamma_hz
    }

    pub fn ej(&self, convention: EnergyConvention) -> f64 {
        convention.to_internal(self.ej_ev, self.gamma_hz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdReference {
    /// Threshold at zero detuning.
    Resonance,
    /// Threshold at the operating detuning.
    AtDetuning,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriveChoice {
    /// The SI drive of [`DesignInputs`] under the chosen energy convention.
    FromInputs,
    /// Drive given directly in internal units.
    Internal { ej: f64 },
    /// `margin * E_bif`, with `0 < margin < 1`.
    ThresholdMargin {
        margin: f64,
        reference: ThresholdReference,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetuningChoice {
    FromInputs,
    /// Maximise `Gamma_opt(omega_m)` over `[min, max]` (internal units).
    Optimize {
        min: f64,
        max: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    pub drive: DriveChoice,
    pub detuning: DetuningChoice,
    pub policy: BranchPolicy,
    pub energy_convention: EnergyConvention,
    pub threshold: ThresholdSearch,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            drive: DriveChoice::ThresholdMargin {
                margin: 0.98,
                reference: ThresholdReference::AtDetuning,
            },
            detuning: DetuningChoice::FromInputs,
            policy: BranchPolicy::PlusOnly,
            energy_convention: EnergyConvention::HGamma,
            threshold: ThresholdSearch::default(),
        }
    }
}

/// Result of [`design_cooling`], in internal units unless suffixed `_hz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoolingReport {
    pub delta: f64,
    pub ej: f64,
    pub phi0: f64,
    /// Threshold used to set the drive, when a margin was requested.
    pub ej_bif: Option<f64>,
    pub fixed_point: FixedPoint,
    pub params: UniversalParams,
    pub mech: MechanicalMode,
    pub gamma_opt: f64,
    /// `None` outside the cooling regime.
    pub nbar_r: Option<f64>,
    pub nbar_min: Option<f64>,
    pub ep_gap: f64,
    pub zero_heating: ZeroHeating,
    /// Cavity linewidth `gamma / 2 pi` used for the SI columns.
    pub gamma_hz: f64,
    /// `Gamma_opt / 2 pi` in Hz.
    pub gamma_opt_hz: f64,
}

impl CoolingReport {
    /// Re-derives `nbar_min` from the other fields.
    pub fn check_consistency(&self) -> Result<()> {
        let (Some(nr), Some(nmin)) = (self.nbar_r, self.nbar_min) else {
            return Ok(());
        };
        let again = min_phonons(self.gamma_opt, self.mech.gamma_m, nr, self.mech.nbar_t)?;
        if (again - nmin).abs() <= 1e-12 * nmin.abs().max(1.0) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "report inconsistent: nbar_min {nmin} vs recomputed {again}"
            )))
        }
    }
}

fn threshold(phi0: f64, delta: f64, opts: &DesignOptions) -> Result<f64> {
    bifurcation_threshold_with(
        &ModelDescriptor::josephson(delta, 0.0, phi0),
        1.0,
        &opts.threshold,
    )
}

/// Runs the design pipeline on SI inputs.
pub fn design_cooling(inputs: &DesignInputs, opts: &DesignOptions) -> Result<CoolingReport> {
    inputs.validate()?;
    let mech = inputs.mechanics()?;
    let phi0 = inputs.phi0;
    let search = opts.threshold.search;

    if let DriveChoice::ThresholdMargin { margin, .. } = opts.drive {
        if !(margin > 0.0 && margin < 1.0) {
            return Err(Error::invalid(format!("margin must lie in (0, 1), got {margin}")));
        }
    }
    let resonance_bif = match opts.drive {
        DriveChoice::ThresholdMargin {
            reference: ThresholdReference::Resonance,
            ..
        } => Some(threshold(phi0, 0.0, opts)?),
        _ => None,
    };
    // (drive, threshold used) at a detuning
    let drive_at = |delta: f64| -> Result<(f64, Option<f64>)> {
        match opts.drive {
            DriveChoice::FromInputs => Ok((inputs.ej(opts.energy_convention), None)),
            DriveChoice::Internal { ej } => Ok((ej, None)),
            DriveChoice::ThresholdMargin { margin, reference } => {
                let bif = match reference {
                    ThresholdReference::Resonance => resonance_bif.expect("computed above"),
                    ThresholdReference::AtDetuning => threshold(phi0, delta, opts)?,
                };
                Ok((margin * bif, Some(bif)))
            }
        }
    };

    let delta = match opts.detuning {
        DetuningChoice::FromInputs => inputs.delta(),
        DetuningChoice::Optimize { min, max } => {
            if !(min.is_finite() && max.is_finite() && min < max) {
                return Err(Error::invalid(format!("invalid detuning range [{min}, {max}]")));
            }
            let objective = |d: f64| {
                drive_at(d)
                    .ok()
                    .and_then(|(ej, _)| {
                        best_damping(
                            &ModelDescriptor::josephson(d, ej, phi0),
                            &mech,
                            1.0,
                            opts.policy,
                            &search,
                        )
                    })
                    .unwrap_or(f64::NEG_INFINITY)
            };
            let (d, g) = maximize_on_interval(objective, min, max, 401, 1e-6);
            if !(g > 0.0) {
                return Err(Error::NoCoolingInRange);
            }
            d
        }
    };

    let (ej, ej_bif) = drive_at(delta)?;
    let model = ModelDescriptor::josephson(delta, ej, phi0);
    let (fixed_point, params) = admitted_points(&model, 1.0, opts.policy, &search)?
        .into_iter()
        .max_by(|a, b| {
            optomechanical_damping(&a.1, mech.g0, mech.omega_m).total_cmp(&optomechanical_damping(
                &b.1,
                mech.g0,
                mech.omega_m,
            ))
        })
        .ok_or_else(|| Error::NoConvergence("no fixed point admitted by the branch policy".into()))?;

    let gamma_opt = optomechanical_damping(&params, mech.g0, mech.omega_m);
    let nbar_r = residual_phonons(&params, mech.omega_m).ok();
    let nbar_min = match nbar_r {
        Some(nr) if gamma_opt > 0.0 => Some(min_phonons(gamma_opt, mech.gamma_m, nr, mech.nbar_t)?),
        _ => None,
    };
    let report = CoolingReport {
        delta,
        ej,
        phi0,
        ej_bif,
        fixed_point,
        params,
        mech,
        gamma_opt,
        nbar_r,
        nbar_min,
        ep_gap: exceptional_point_gap(&params),
        zero_heating: zero_heating_diagnostics(&params),
        gamma_hz: inputs.gamma_hz,
        gamma_opt_hz: gamma_opt * inputs.gamma_hz,
    };
    report.check_consistency()?;
    Ok(report)
}
