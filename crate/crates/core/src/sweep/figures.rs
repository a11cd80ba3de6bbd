//! Datasets behind the semiclassical figure panels.
//!
//! Every table carries a `branch` label (`mono`, `plus`, `minus`,
//! `unstable`) and a `status` column so that bistable windows and failed
//! points stay visible.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{admitted_points, status_of, BranchPolicy};
use crate::cavity::{bifurcation_threshold, FixedPoint, ModelDescriptor, SearchSpec};
use crate::error::{Error, Result};
use crate::semiclassical::{
    exceptional_point_gap, fluctuation_eigenvalues, min_phonons, optimal_damping_frequency,
    optomechanical_damping, photon_number_spectrum, residual_phonons, MechanicalMode, UniversalParams,
};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FigureId {
    F1b,
    F1c,
    F1d,
    F1e,
    F2a,
    F2b,
    F3a,
    F3b,
    F3c,
    F3d,
    F4a,
    F4b,
    F4c,
    F4d,
}

impl FigureId {
    pub const ALL: [FigureId; 14] = [
        FigureId::F1b,
        FigureId::F1c,
        FigureId::F1d,
        FigureId::F1e,
        FigureId::F2a,
        FigureId::F2b,
        FigureId::F3a,
        FigureId::F3b,
        FigureId::F3c,
        FigureId::F3d,
        FigureId::F4a,
        FigureId::F4b,
        FigureId::F4c,
        FigureId::F4d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::F1b => "1b",
            FigureId::F1c => "1c",
            FigureId::F1d => "1d",
            FigureId::F1e => "1e",
            FigureId::F2a => "2a",
            FigureId::F2b => "2b",
            FigureId::F3a => "3a",
            FigureId::F3b => "3b",
            FigureId::F3c => "3c",
            FigureId::F3d => "3d",
            FigureId::F4a => "4a",
            FigureId::F4b => "4b",
            FigureId::F4c => "4c",
            FigureId::F4d => "4d",
        }
    }

    /// Column names of the dataset.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            FigureId::F1b | FigureId::F1c | FigureId::F1d => &[
                "ej_over_hgamma",
                "delta_over_gamma",
                "branch",
                "A0",
                "theta0",
                "n",
                "status",
            ],
            FigureId::F1e => &[
                "delta_over_gamma",
                "ej_over_hgamma",
                "branch",
                "re_alpha",
                "im_alpha",
                "A0",
                "theta0",
                "status",
            ],
            FigureId::F2a | FigureId::F2b => &[
                "ej_over_ebif",
                "ej_over_hgamma",
                "delta_over_gamma",
                "branch",
                "r1_over_gamma",
                "r2_over_gamma",
                "dtilde_over_gamma",
                "r1_offset",
                "omega_opt_over_gamma",
                "status",
            ],
            FigureId::F3a | FigureId::F3b => &[
                "ej_over_hgamma",
                "delta_over_gamma",
                "branch",
                "n",
                "omega_over_gamma",
                "gamma_opt_over_g0sq",
                "nbar_r",
                "status",
            ],
            FigureId::F3c | FigureId::F3d => &[
                "ej_over_hgamma",
                "delta_over_gamma",
                "branch",
                "lambda_plus_re",
                "lambda_plus_im",
                "lambda_minus_re",
                "lambda_minus_im",
                "ep_gap",
                "eigen_real",
                "status",
            ],
            FigureId::F4a | FigureId::F4b => &[
                "omega_over_gamma",
                "delta_over_gamma",
                "ej_over_hgamma",
                "branch",
                "theta0",
                "snn_times_gamma",
                "status",
            ],
            FigureId::F4c | FigureId::F4d => &[
                "omega_m_over_gamma",
                "distance_over_hgamma",
                "delta_star_over_gamma",
                "ej_over_hgamma",
                "branch",
                "gamma_opt_over_gamma",
                "nbar_r",
                "nbar_min",
                "status",
            ],
        }
    }
}

impl FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown figure id '{s}'")))
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Optional overrides; `None` selects the panel default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FigureParams {
    pub phi0: Option<f64>,
    /// Points along the main axis.
    pub points: Option<usize>,
    /// Detunings (panels with one curve per detuning, or the single detuning of 3x/4a/4b).
    pub deltas: Option<Vec<f64>>,
    /// Drives `E_J*/hbar gamma` (1d), drive ratios to threshold (4a/4b) or
    /// distances to threshold (4c/4d).
    pub drives: Option<Vec<f64>>,
    /// Upper end of the drive axis (1b, 1c, 1e, 3x) or of the ratio axis (2x).
    pub axis_max: Option<f64>,
    /// Mechanical parameters for 4c/4d (`omega_m` is swept).
    pub mech: Option<MechanicalMode>,
}

fn values(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn log_values(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

type RowFn<'a> = dyn Fn(&FixedPoint, &UniversalParams) -> Vec<Cell> + Sync + 'a;

/// One block of rows per `(prefix, model)` job, evaluated in parallel and
/// emitted in job order. `row` yields the cells between `branch` and `status`.
fn branch_rows(
    table: &mut Table,
    jobs: &[(Vec<Cell>, ModelDescriptor)],
    policy: BranchPolicy,
    n_cells: usize,
    row: &RowFn<'_>,
) -> Result<()> {
    let search = SearchSpec::default();
    let blocks: Vec<Vec<Vec<Cell>>> = jobs
        .par_iter()
        .map(
            |(prefix, model)| match admitted_points(model, 1.0, policy, &search) {
                Ok(pts) => pts
                    .iter()
                    .map(|(fp, up)| {
                        let mut r = prefix.clone();
                        r.push(Cell::Text(fp.branch.to_string()));
                        r.extend(row(fp, up));
                        r.push(Cell::Text("ok".into()));
                        r
                    })
                    .collect(),
                Err(e) => {
                    let mut r = prefix.clone();
                    r.push(Cell::Empty);
                    r.extend((0..n_cells).map(|_| Cell::Empty));
                    r.push(Cell::Text(status_of(&e)));
                    vec![r]
                }
            },
        )
        .collect();
    for r in blocks.into_iter().flatten() {
        table.push_row(r)?;
    }
    Ok(())
}

/// Builds the dataset of one figure panel.
pub fn figure_dataset(id: FigureId, params: &FigureParams) -> Result<Table> {
    let mut table = Table::new(id.columns());
    match id {
        FigureId::F1b | FigureId::F1c => {
            let phi0 = params.phi0.unwrap_or(0.06);
            let deltas = params.deltas.clone().unwrap_or_else(|| vec![-0.4, 0.0, 0.4]);
            let drives = values(
                0.0,
                params.axis_max.unwrap_or(1500.0),
                params.points.unwrap_or(301),
            );
            let jobs: Vec<_> = drives
                .iter()
                .flat_map(|&e| {
                    deltas.iter().map(move |&d| {
                        (
                            vec![Cell::Num(e), Cell::Num(d)],
                            ModelDescriptor::josephson(d, e, phi0),
                        )
                    })
                })
                .collect();
            branch_rows(&mut table, &jobs, BranchPolicy::All, 3, &|fp, _| {
                vec![fp.a0.into(), fp.theta0.into(), fp.n.into()]
            })?;
        }
        FigureId::F1d => {
            let phi0 = params.phi0.unwrap_or(0.06);
            let drives = params
                .drives
                .clone()
                .unwrap_or_else(|| vec![100.0, 200.0, 300.0, 404.40, 750.0]);
            let deltas = values(-1.0, 1.0, params.points.unwrap_or(401));
            let jobs: Vec<_> = drives
                .iter()
                .flat_map(|&e| {
                    deltas.iter().map(move |&d| {
                        (
                            vec![Cell::Num(e), Cell::Num(d)],
                            ModelDescriptor::josephson(d, e, phi0),
                        )
                    })
                })
                .collect();
            branch_rows(&mut table, &jobs, BranchPolicy::All, 3, &|fp, _| {
                vec![fp.a0.into(), fp.theta0.into(), fp.n.into()]
            })?;
        }
        FigureId::F1e => {
            let phi0 = params.phi0.unwrap_or(0.06);
            let deltas = params
                .deltas
                .clone()
                .unwrap_or_else(|| vec![-0.4, -0.2, 0.0, 0.2, 0.4]);
            let drives = values(
                0.0,
                params.axis_max.unwrap_or(1500.0),
                params.points.unwrap_or(151),
            );
            let jobs: Vec<_> = deltas
                .iter()
                .flat_map(|&d| {
                    drives.iter().map(move |&e| {
                        (
                            vec![Cell::Num(d), Cell::Num(e)],
                            ModelDescriptor::josephson(d, e, phi0),
                        )
                    })
                })
                .collect();
            branch_rows(&mut table, &jobs, BranchPolicy::All, 4, &|fp, _| {
                let a = fp.alpha();
                vec![a.re.into(), a.im.into(), fp.a0.into(), fp.theta0.into()]
            })?;
        }
        FigureId::F2a | FigureId::F2b => {
            let phi0 = params.phi0.unwrap_or(0.06);
            let deltas = params
                .deltas
                .clone()
                .unwrap_or_else(|| vec![0.0, -0.02, -0.05, -0.1]);
            let bif = bifurcation_threshold(&ModelDescriptor::josephson(0.0, 0.0, phi0), 1.0)?;
            let ratios = values(0.05, params.axis_max.unwrap_or(3.0), params.points.unwrap_or(200));
            let jobs: Vec<_> = deltas
                .iter()
                .flat_map(|&d| {
                    ratios.iter().map(move |&x| {
                        let e = x * bif;
                        (
                            vec![Cell::Num(x), Cell::Num(e), Cell::Num(d)],
                            ModelDescriptor::josephson(d, e, phi0),
                        )
                    })
                })
                .collect();
            branch_rows(&mut table, &jobs, BranchPolicy::PlusOnly, 5, &|_, up| {
                vec![
                    up.r1.into(),
                    up.r2.into(),
                    up.dtilde.into(),
                    (up.r1 + 0.5 * up.gamma).into(),
                    (up.r2 - up.dtilde).into(),
                ]
            })?;
        }
        FigureId::F3a | FigureId::F3b | FigureId::F3c | FigureId::F3d => {
            let phi0 = params.phi0.unwrap_or(0.06);
            let default_delta = if matches!(id, FigureId::F3a | FigureId::F3c) {
                0.0
            } else {
                -0.07
            };
            let deltas = params.deltas.clone().unwrap_or_else(|| vec![default_delta]);
            let drives = values(
                0.0,
                params.axis_max.unwrap_or(1500.0),
                params.points.unwrap_or(301),
            );
            let jobs: Vec<_> = deltas
                .iter()
                .flat_map(|&d| {
                    drives.iter().map(move |&e| {
                        (
                            vec![Cell::Num(e), Cell::Num(d)],
                            ModelDescriptor::josephson(d, e, phi0),
                        )
                    })
                })
                .collect();
            if matches!(id, FigureId::F3a | FigureId::F3b) {
                branch_rows(&mut table, &jobs, BranchPolicy::StableOnly, 4, &|fp, up| {
                    let w = optimal_damping_frequency(up);
                    vec![
                        fp.n.into(),
                        w.into(),
                        optomechanical_damping(up, 1.0, w).into(),
                        residual_phonons(up, w).ok().into(),
                    ]
                })?;
            } else {
                branch_rows(&mut table, &jobs, BranchPolicy::StableOnly, 7, &|_, up| {
                    let (lp, lm) = fluctuation_eigenvalues(up);
                    let gap = exceptional_point_gap(up);
                    vec![
                        lp.re.into(),
                        lp.im.into(),
                        lm.re.into(),
                        lm.im.into(),
                        gap.into(),
                        (if gap >= 0.0 { 1.0 } else { 0.0 }).into(),
                    ]
                })?;
            }
        }
        FigureId::F4a | FigureId::F4b => {
            let phi0 = params.phi0.unwrap_or(0.2);
            let delta = params
                .deltas
                .as_ref()
                .and_then(|d| d.first().copied())
                .unwrap_or(-0.07);
            let ratio = params
                .drives
                .as_ref()
                .and_then(|d| d.first().copied())
                .unwrap_or(if id == FigureId::F4a { 0.92 } else { 2.06 });
            let bif = bifurcation_threshold(&ModelDescriptor::josephson(delta, 0.0, phi0), 1.0)?;
            let ej = ratio * bif;
            let model = ModelDescriptor::josephson(delta, ej, phi0);
            let omegas = values(-3.0, 3.0, params.points.unwrap_or(601));
            for (fp, up) in admitted_points(&model, 1.0, BranchPolicy::StableOnly, &SearchSpec::default())? {
                for &w in &omegas {
                    table.push_row(vec![
                        w.into(),
                        delta.into(),
                        ej.into(),
                        Cell::Text(fp.branch.to_string()),
                        fp.theta0.into(),
                        photon_number_spectrum(&up, w).into(),
                        "ok".into(),
                    ])?;
                }
            }
        }
        FigureId::F4c | FigureId::F4d => cooling_map(&mut table, id == FigureId::F4c, params)?,
    }
    Ok(table)
}

/// `(delta, ej, fixed point, universal parameters)` of one operating point.
type Candidate = (f64, f64, FixedPoint, UniversalParams);

/// Minimum phonon number versus `omega_m` at fixed distance to threshold,
/// with the detuning chosen on a grid to maximise `Gamma_opt(omega_m)`.
fn cooling_map(table: &mut Table, negative: bool, params: &FigureParams) -> Result<()> {
    let phi0 = params.phi0.unwrap_or(0.06);
    let mech = match params.mech {
        Some(m) => m,
        None => {
            let d = super::DesignInputs::reference_device();
            d.mechanics()?
        }
    };
    let distances = params.drives.clone().unwrap_or_else(|| {
        if negative {
            vec![-40.0, -10.0, 10.0, 40.0]
        } else {
            vec![10.0, 40.0]
        }
    });
    let (lo, hi) = if negative { (-0.5, -1e-3) } else { (1e-3, 0.5) };
    let deltas = values(lo, hi, 101);
    let omegas = log_values(0.05, 5.0, params.points.unwrap_or(41));
    let search = SearchSpec::default();

    let thresholds: Vec<Option<f64>> = deltas
        .par_iter()
        .map(|&d| bifurcation_threshold(&ModelDescriptor::josephson(d, 0.0, phi0), 1.0).ok())
        .collect();

    for &dist in &distances {
        // Admitted fixed points for every detuning on the grid.
        let candidates: Vec<Vec<Candidate>> = deltas
            .par_iter()
            .zip(&thresholds)
            .map(|(&d, bif)| {
                let Some(bif) = bif else { return Vec::new() };
                let ej = bif + dist;
                if ej <= 0.0 {
                    return Vec::new();
                }
                let model = ModelDescriptor::josephson(d, ej, phi0);
                admitted_points(&model, 1.0, BranchPolicy::PlusOnly, &search)
                    .map(|v| v.into_iter().map(|(fp, up)| (d, ej, fp, up)).collect())
                    .unwrap_or_default()
            })
            .collect();

        for &wm in &omegas {
            let mut best: Option<(f64, &Candidate)> = None;
            for c in candidates.iter().flatten() {
                let g = optomechanical_damping(&c.3, mech.g0, wm);
                if best.is_none_or(|(bg, _)| g > bg) {
                    best = Some((g, c));
                }
            }
            match best {
                Some((g, (d, ej, fp, up))) if g > 0.0 => {
                    let nr = residual_phonons(up, wm).ok();
                    let nmin = nr.and_then(|nr| min_phonons(g, mech.gamma_m, nr, mech.nbar_t).ok());
                    table.push_row(vec![
                        wm.into(),
                        dist.into(),
                        (*d).into(),
                        (*ej).into(),
                        Cell::Text(fp.branch.to_string()),
                        g.into(),
                        nr.into(),
                        nmin.into(),
                        "ok".into(),
                    ])?;
                }
                _ => {
                    table.push_row(vec![
                        wm.into(),
                        dist.into(),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        "no_cooling".into(),
                    ])?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.as_str().parse::<FigureId>().unwrap(), id);
        }
        assert!("5a".parse::<FigureId>().is_err());
    }

    #[test]
    fn small_figure_tables_have_documented_columns() {
        let params = FigureParams {
            points: Some(5),
            ..FigureParams::default()
        };
        for id in [FigureId::F1b, FigureId::F2a, FigureId::F3c] {
            let t = figure_dataset(id, &params).unwrap();
            assert_eq!(t.columns, id.columns());
            assert!(!t.is_empty());
            assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
        }
    }
}
