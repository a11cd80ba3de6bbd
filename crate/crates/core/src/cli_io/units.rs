//! Laboratory units to internal units.
//!
//! Frequencies are ordinary frequencies (`Hz`, `kHz`, `MHz`, `GHz`); the
//! angular value is `2 pi f`. Internal frequencies are angular frequencies
//! divided by the angular cavity linewidth, so the `2 pi` cancels and
//! `f / f_gamma` is computed directly. Energies accept `ueV`/`μeV`/`meV`/`eV`
//! or the dimensionless suffix `*hgamma`.

use crate::sweep::EnergyConvention;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitKind {
    Frequency,
    Energy,
}

/// A number with an optional unit as written in a configuration file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    /// No unit: already in internal units.
    Bare(f64),
    /// Ordinary frequency in Hz.
    Hertz(f64),
    /// Energy in eV.
    ElectronVolts(f64),
    /// Energy in units of `hbar gamma`.
    HbarGamma(f64),
}

fn frequency_scale(unit: &str) -> Option<f64> {
    match unit {
        "Hz" => Some(1.0),
        "kHz" => Some(1e3),
        "MHz" => Some(1e6),
        "GHz" => Some(1e9),
        _ => None,
    }
}

fn energy_scale(unit: &str) -> Option<f64> {
    match unit {
        "eV" => Some(1.0),
        "meV" => Some(1e-3),
        "ueV" | "μeV" | "µeV" => Some(1e-6),
        _ => None,
    }
}

/// Splits `"302 kHz"` into number and unit and checks the unit against `kind`.
pub fn parse_quantity(text: &str, kind: Option<UnitKind>) -> Result<Quantity, String> {
    let text = text.trim();
    let (num, unit) = match text.find(|c: char| c.is_whitespace() || c == '*') {
        Some(i) => (&text[..i], text[i..].trim()),
        None => (text, ""),
    };
    let value: f64 = num.parse().map_err(|_| format!("'{num}' is not a number"))?;
    if !value.is_finite() {
        return Err(format!("'{num}' is not finite"));
    }
    if unit.is_empty() {
        return Ok(Quantity::Bare(value));
    }
    match kind {
        Some(UnitKind::Frequency) => frequency_scale(unit)
            .map(|s| Quantity::Hertz(value * s))
            .ok_or_else(|| format!("unknown frequency unit '{unit}' (expected Hz, kHz, MHz or GHz)")),
        Some(UnitKind::Energy) if unit == "*hgamma" => Ok(Quantity::HbarGamma(value)),
        Some(UnitKind::Energy) => energy_scale(unit)
            .map(|s| Quantity::ElectronVolts(value * s))
            .ok_or_else(|| format!("unknown energy unit '{unit}' (expected ueV, meV, eV or *hgamma)")),
        None => Err(format!("unit '{unit}' not allowed here (value is dimensionless)")),
    }
}

pub fn frequency_to_internal(hz: f64, gamma_hz: f64) -> f64 {
    hz / gamma_hz
}

pub fn internal_to_frequency(value: f64, gamma_hz: f64) -> f64 {
    value * gamma_hz
}

pub fn energy_to_internal(ev: f64, gamma_hz: f64, convention: EnergyConvention) -> f64 {
    convention.to_internal(ev, gamma_hz)
}

pub fn internal_to_energy(value: f64, gamma_hz: f64, convention: EnergyConvention) -> f64 {
    convention.to_ev(value, gamma_hz)
}

/// Resolves a parsed quantity to internal units. `gamma_hz` is needed only
/// for SI values.
pub fn to_internal(q: Quantity, gamma_hz: Option<f64>, convention: EnergyConvention) -> Result<f64, String> {
    let need = || gamma_hz.ok_or_else(|| "value has SI units but [cavity] gamma is not set".to_string());
    Ok(match q {
        Quantity::Bare(v) | Quantity::HbarGamma(v) => v,
        Quantity::Hertz(f) => frequency_to_internal(f, need()?),
        Quantity::ElectronVolts(e) => energy_to_internal(e, need()?, convention),
    })
}
