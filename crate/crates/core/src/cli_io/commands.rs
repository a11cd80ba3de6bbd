//! Command dispatch: a [`RunSpec`] in, a [`Table`] out.

use thiserror::Error;

use super::config::{Command, ConfigError, RunSpec, SpectrumMethod, SpectrumSpec};
use crate::cavity::{find_fixed_points, ModelDescriptor, SearchSpec};
use crate::error::Error;
use crate::semiclassical::{
    damping_via_asymmetry, min_phonons, optimal_damping_frequency, optomechanical_damping,
    photon_number_spectrum, residual_phonons, spectrum_via_transform, universal_params, MechanicalMode,
};
use crate::sweep::{
    design_cooling, figure_dataset, optimize_detuning, run_sweep, BranchPolicy, DesignInputs, DesignOptions,
    DriveChoice, EnergyConvention,
};
use crate::table::{Cell, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration errors, 3 for solver failures, 4 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Engine(Error::NoConvergence(_) | Error::NoBifurcation { .. }) => 3,
            CliError::Engine(_) | CliError::Io(_) => 4,
        }
    }
}

fn need<T: Copy>(v: Option<T>, section: &str, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| {
        CliError::Config(ConfigError::MissingKey {
            section: section.into(),
            key: key.into(),
        })
    })
}

fn model_of(spec: &RunSpec) -> Result<ModelDescriptor, CliError> {
    need(spec.model, "model", "kind")
}

fn mech_of(spec: &RunSpec) -> Result<MechanicalMode, CliError> {
    need(spec.mech, "mechanics", "omega_m")
}

fn points_with_params(
    spec: &RunSpec,
    default_policy: BranchPolicy,
) -> Result<Vec<(crate::FixedPoint, crate::UniversalParams)>, CliError> {
    let model = model_of(spec)?;
    let policy = spec.policy.unwrap_or(default_policy);
    let pts = find_fixed_points(&model, 1.0, &SearchSpec::default())?;
    pts.into_iter()
        .filter(|p| policy.admits(p))
        .map(|p| Ok((p, universal_params(&model, &p, 1.0)?)))
        .collect()
}

fn grid(s: &SpectrumSpec) -> Vec<f64> {
    let last = (s.points - 1) as f64;
    (0..s.points)
        .map(|i| s.omega_min + (s.omega_max - s.omega_min) * i as f64 / last)
        .collect()
}

/// Runs the command of `spec` and returns its result table.
pub fn execute(spec: &RunSpec) -> Result<Table, CliError> {
    match spec.command {
        Command::FixedPoints => {
            let mut t = Table::new(&[
                "branch", "stable", "A0", "theta0", "n", "re_alpha", "im_alpha", "dtilde", "r1", "r2",
            ]);
            for (fp, up) in points_with_params(spec, BranchPolicy::All)? {
                let a = fp.alpha();
                t.push_row(vec![
                    fp.branch.to_string().into(),
                    (if fp.stable { "true" } else { "false" }).into(),
                    fp.a0.into(),
                    fp.theta0.into(),
                    fp.n.into(),
                    a.re.into(),
                    a.im.into(),
                    up.dtilde.into(),
                    up.r1.into(),
                    up.r2.into(),
                ])?;
            }
            Ok(t)
        }
        Command::Spectrum => {
            let s = spec.spectrum.unwrap_or_default();
            let omegas = grid(&s);
            let mut t = Table::new(&["omega_over_gamma", "branch", "snn_times_gamma"]);
            for (fp, up) in points_with_params(spec, BranchPolicy::StableOnly)? {
                let values = match s.method {
                    SpectrumMethod::ClosedForm => {
                        omegas.iter().map(|&w| photon_number_spectrum(&up, w)).collect()
                    }
                    SpectrumMethod::Transform => spectrum_via_transform(&up, &omegas)?,
                };
                for (&w, v) in omegas.iter().zip(values) {
                    t.push_row(vec![w.into(), fp.branch.to_string().into(), v.into()])?;
                }
            }
            Ok(t)
        }
        Command::Damping => {
            let mech = mech_of(spec)?;
            let mut t = Table::new(&[
                "branch",
                "omega_m_over_gamma",
                "gamma_opt_over_gamma",
                "gamma_opt_asymmetry",
                "omega_opt_over_gamma",
                "omega_cool_over_gamma",
            ]);
            for (fp, up) in points_with_params(spec, BranchPolicy::StableOnly)? {
                t.push_row(vec![
                    fp.branch.to_string().into(),
                    mech.omega_m.into(),
                    optomechanical_damping(&up, mech.g0, mech.omega_m).into(),
                    damping_via_asymmetry(&up, mech.g0, mech.omega_m).into(),
                    (up.r2 - up.dtilde).into(),
                    optimal_damping_frequency(&up).into(),
                ])?;
            }
            Ok(t)
        }
        Command::Phonons => {
            let mech = mech_of(spec)?;
            let mut t = Table::new(&[
                "branch",
                "omega_m_over_gamma",
                "gamma_opt_over_gamma",
                "nbar_r",
                "nbar_min",
                "status",
            ]);
            for (fp, up) in points_with_params(spec, BranchPolicy::StableOnly)? {
                let g = optomechanical_damping(&up, mech.g0, mech.omega_m);
                let nr = residual_phonons(&up, mech.omega_m);
                let (nr_cell, nmin, status) = match nr {
                    Ok(nr) => match min_phonons(g, mech.gamma_m, nr, mech.nbar_t) {
                        Ok(m) => (Cell::Num(nr), Cell::Num(m), "ok".to_string()),
                        Err(e) => (Cell::Num(nr), Cell::Empty, crate::sweep::status_of(&e)),
                    },
                    Err(e) => (Cell::Empty, Cell::Empty, crate::sweep::status_of(&e)),
                };
                t.push_row(vec![
                    fp.branch.to_string().into(),
                    mech.omega_m.into(),
                    g.into(),
                    nr_cell,
                    nmin,
                    status.into(),
                ])?;
            }
            Ok(t)
        }
        Command::Sweep => {
            let s = spec.sweep.as_ref().ok_or_else(|| ConfigError::MissingKey {
                section: "sweep".into(),
                key: "axis1".into(),
            })?;
            Ok(run_sweep(&spec.sweep_grid_from(s), &s.outputs)?)
        }
        Command::Optimize => {
            let model = model_of(spec)?;
            let mech = mech_of(spec)?;
            let range = need(spec.optimize, "optimize", "delta_min")?;
            let policy = spec.policy.unwrap_or(BranchPolicy::PlusOnly);
            let opt = optimize_detuning(
                &model,
                &mech,
                1.0,
                (range.min, range.max),
                policy,
                &SearchSpec::default(),
            )?;
            let mut t = Table::new(&["delta_star_over_gamma", "gamma_opt_star_over_gamma"]);
            t.push_row(vec![opt.delta_star.into(), opt.gamma_opt_star.into()])?;
            Ok(t)
        }
        Command::Design => design(spec),
        Command::Figure => {
            let f = spec.figure.as_ref().ok_or_else(|| ConfigError::MissingKey {
                section: "figure".into(),
                key: "id".into(),
            })?;
            let mut params = f.params.clone();
            if params.mech.is_none() {
                params.mech = spec.mech;
            }
            Ok(figure_dataset(f.id, &params)?)
        }
    }
}

fn design(spec: &RunSpec) -> Result<Table, CliError> {
    let model = model_of(spec)?;
    let mech = mech_of(spec)?;
    let gamma_hz = need(spec.gamma_hz, "cavity", "gamma")?;
    let ModelDescriptor::Josephson { delta, ej, phi0 } = model else {
        return Err(ConfigError::Invalid("design needs a josephson model".into()).into());
    };
    let d = need(spec.design, "design", "drive")?;
    let inputs = DesignInputs {
        omega_m_hz: mech.omega_m * gamma_hz,
        gamma_m_hz: mech.gamma_m * gamma_hz,
        gamma_hz,
        g0_hz: mech.g0 * gamma_hz,
        ej_ev: EnergyConvention::HGamma.to_ev(ej, gamma_hz),
        phi0,
        delta_hz: delta * gamma_hz,
        nbar_t: mech.nbar_t,
    };
    let opts = DesignOptions {
        drive: match d.drive {
            DriveChoice::FromInputs => DriveChoice::Internal { ej },
            other => other,
        },
        detuning: d.detuning,
        policy: spec.policy.unwrap_or(BranchPolicy::PlusOnly),
        energy_convention: spec.energy_convention,
        ..DesignOptions::default()
    };
    let r = design_cooling(&inputs, &opts)?;
    let mut t = Table::new(&[
        "delta_over_gamma",
        "ej_over_hgamma",
        "phi0",
        "ej_bif_over_hgamma",
        "branch",
        "A0",
        "theta0",
        "n",
        "dtilde",
        "r1",
        "r2",
        "gamma_opt_over_gamma",
        "gamma_opt_hz",
        "nbar_r",
        "nbar_min",
        "ep_gap",
        "r1_offset",
        "omega_opt_over_gamma",
    ]);
    t.push_row(vec![
        r.delta.into(),
        r.ej.into(),
        r.phi0.into(),
        r.ej_bif.into(),
        r.fixed_point.branch.to_string().into(),
        r.fixed_point.a0.into(),
        r.fixed_point.theta0.into(),
        r.fixed_point.n.into(),
        r.params.dtilde.into(),
        r.params.r1.into(),
        r.params.r2.into(),
        r.gamma_opt.into(),
        r.gamma_opt_hz.into(),
        r.nbar_r.into(),
        r.nbar_min.into(),
        r.ep_gap.into(),
        r.zero_heating.r1_offset.into(),
        r.zero_heating.omega_opt.into(),
    ])?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli_io::config::parse_config;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(ConfigError::Invalid("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(Error::NoConvergence("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(Error::NoBifurcation { cap: 1.0 }).exit_code(), 3);
        assert_eq!(CliError::from(Error::Domain("x".into())).exit_code(), 4);
    }

    #[test]
    fn fixed_points_of_undriven_cavity() {
        let spec =
            parse_config("[run]\ncommand = fixed-points\n[model]\nkind = linear\ndelta = 0\ndrive = 0\n")
                .unwrap();
        let t = execute(&spec).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.column("n").unwrap()[0], Some(0.0));
    }
}
