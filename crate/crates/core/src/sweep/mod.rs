//! Parameter sweeps, detuning optimisation, the cooling-design pipeline and
//! figure datasets.

mod design;
mod figures;
mod optimize;

pub use design::{
    design_cooling, CoolingReport, DesignInputs, DesignOptions, DetuningChoice, DriveChoice,
    EnergyConvention, ThresholdReference,
};
pub use figures::{figure_dataset, FigureId, FigureParams};
pub use optimize::{maximize_on_interval, optimize_detuning, DetuningOptimum};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{find_fixed_points, Branch, FixedPoint, ModelDescriptor, SearchSpec};
use crate::error::{Error, Result};
use crate::semiclassical::{
    exceptional_point_gap, fluctuation_eigenvalues, min_phonons, optomechanical_damping, residual_phonons,
    universal_params, MechanicalMode, UniversalParams,
};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Delta,
    Ej,
    Phi0,
    OmegaM,
}

impl AxisName {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Delta => "delta",
            AxisName::Ej => "ej",
            AxisName::Phi0 => "phi0",
            AxisName::OmegaM => "omega_m",
        }
    }
}

impl FromStr for AxisName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(AxisName::Delta),
            "ej" => Ok(AxisName::Ej),
            "phi0" => Ok(AxisName::Phi0),
            "omega_m" => Ok(AxisName::OmegaM),
            _ => Err(Error::invalid(format!(
                "unknown axis '{s}' (expected delta, ej, phi0 or omega_m)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "lin" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            _ => Err(Error::invalid(format!(
                "unknown scale '{s}' (expected linear or log)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn linear(name: AxisName, min: f64, max: f64, count: usize) -> Self {
        Axis {
            name,
            min,
            max,
            count,
            scale: Scale::Linear,
        }
    }

    pub fn log(name: AxisName, min: f64, max: f64, count: usize) -> Self {
        Axis {
            name,
            min,
            max,
            count,
            scale: Scale::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::invalid(format!(
                "axis {} needs at least 2 points",
                self.name.as_str()
            )));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::invalid(format!(
                "axis {} range is not finite",
                self.name.as_str()
            )));
        }
        if self.scale == Scale::Log && !(self.min > 0.0 && self.max > 0.0) {
            return Err(Error::invalid(format!(
                "log axis {} needs a positive range",
                self.name.as_str()
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + (self.max - self.min) * t,
                    Scale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// Which fixed points of a parameter point enter a table or an optimisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchPolicy {
    All,
    StableOnly,
    /// Stable points on the monostable or positive-phase branch.
    PlusOnly,
}

impl BranchPolicy {
    pub fn admits(self, fp: &FixedPoint) -> bool {
        match self {
            BranchPolicy::All => true,
            BranchPolicy::StableOnly => fp.stable,
            BranchPolicy::PlusOnly => fp.stable && matches!(fp.branch, Branch::Mono | Branch::Plus),
        }
    }
}

impl FromStr for BranchPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(BranchPolicy::All),
            "stable_only" => Ok(BranchPolicy::StableOnly),
            "plus_only" => Ok(BranchPolicy::PlusOnly),
            _ => Err(Error::invalid(format!(
                "unknown branch policy '{s}' (expected all, stable_only or plus_only)"
            ))),
        }
    }
}

/// Per-fixed-point output columns of [`run_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    A0,
    Theta0,
    N,
    Dtilde,
    R1,
    R2,
    LambdaPlusRe,
    LambdaPlusIm,
    LambdaMinusRe,
    LambdaMinusIm,
    EpGap,
    OmegaOpt,
    R1Offset,
    GammaOpt,
    NbarR,
    NbarMin,
}

impl Quantity {
    pub const ALL: [Quantity; 16] = [
        Quantity::A0,
        Quantity::Theta0,
        Quantity::N,
        Quantity::Dtilde,
        Quantity::R1,
        Quantity::R2,
        Quantity::LambdaPlusRe,
        Quantity::LambdaPlusIm,
        Quantity::LambdaMinusRe,
        Quantity::LambdaMinusIm,
        Quantity::EpGap,
        Quantity::OmegaOpt,
        Quantity::R1Offset,
        Quantity::GammaOpt,
        Quantity::NbarR,
        Quantity::NbarMin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::A0 => "A0",
            Quantity::Theta0 => "theta0",
            Quantity::N => "n",
            Quantity::Dtilde => "dtilde",
            Quantity::R1 => "r1",
            Quantity::R2 => "r2",
            Quantity::LambdaPlusRe => "lambda_plus_re",
            Quantity::LambdaPlusIm => "lambda_plus_im",
            Quantity::LambdaMinusRe => "lambda_minus_re",
            Quantity::LambdaMinusIm => "lambda_minus_im",
            Quantity::EpGap => "ep_gap",
            Quantity::OmegaOpt => "omega_opt",
            Quantity::R1Offset => "r1_offset",
            Quantity::GammaOpt => "gamma_opt",
            Quantity::NbarR => "nbar_r",
            Quantity::NbarMin => "nbar_min",
        }
    }

    pub fn needs_mechanics(self) -> bool {
        matches!(self, Quantity::GammaOpt | Quantity::NbarR | Quantity::NbarMin)
    }

    /// Value at one fixed point; `None` where undefined (e.g. `nbar_r` outside
    /// the cooling regime).
    pub fn evaluate(
        self,
        fp: &FixedPoint,
        up: &UniversalParams,
        mech: Option<&MechanicalMode>,
    ) -> Option<f64> {
        let (lp, lm) = fluctuation_eigenvalues(up);
        match self {
            Quantity::A0 => Some(fp.a0),
            Quantity::Theta0 => Some(fp.theta0),
            Quantity::N => Some(fp.n),
            Quantity::Dtilde => Some(up.dtilde),
            Quantity::R1 => Some(up.r1),
            Quantity::R2 => Some(up.r2),
            Quantity::LambdaPlusRe => Some(lp.re),
            Quantity::LambdaPlusIm => Some(lp.im),
            Quantity::LambdaMinusRe => Some(lm.re),
            Quantity::LambdaMinusIm => Some(lm.im),
            Quantity::EpGap => Some(exceptional_point_gap(up)),
            Quantity::OmegaOpt => Some(up.r2 - up.dtilde),
            Quantity::R1Offset => Some(up.r1 + 0.5 * up.gamma),
            Quantity::GammaOpt => mech.map(|m| optomechanical_damping(up, m.g0, m.omega_m)),
            Quantity::NbarR => mech.and_then(|m| residual_phonons(up, m.omega_m).ok()),
            Quantity::NbarMin => mech.and_then(|m| {
                let g = optomechanical_damping(up, m.g0, m.omega_m);
                let nr = residual_phonons(up, m.omega_m).ok()?;
                min_phonons(g, m.gamma_m, nr, m.nbar_t).ok()
            }),
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .iter()
            .copied()
            .find(|q| q.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown quantity '{s}'")))
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A one- or two-axis sweep around a base model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axes: Vec<Axis>,
    pub model: ModelDescriptor,
    pub mech: Option<MechanicalMode>,
    pub gamma: f64,
    pub policy: BranchPolicy,
    pub search: SearchSpec,
}

impl SweepGrid {
    pub fn new(model: ModelDescriptor, axes: Vec<Axis>) -> Self {
        SweepGrid {
            axes,
            model,
            mech: None,
            gamma: 1.0,
            policy: BranchPolicy::StableOnly,
            search: SearchSpec::default(),
        }
    }

    pub fn validate(&self, outputs: &[Quantity]) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::invalid(format!(
                "a sweep needs 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(Error::invalid("sweep axes must differ"));
        }
        for axis in &self.axes {
            axis.validate()?;
            if axis.name == AxisName::Phi0 && self.model.phi0().is_none() {
                return Err(Error::invalid("phi0 axis requires the josephson model"));
            }
            if axis.name == AxisName::OmegaM && self.mech.is_none() {
                return Err(Error::invalid("omega_m axis requires a mechanical mode"));
            }
        }
        if self.mech.is_none() {
            if let Some(q) = outputs.iter().find(|q| q.needs_mechanics()) {
                return Err(Error::invalid(format!("output {q} requires a mechanical mode")));
            }
        }
        self.model.validate()
    }

    fn point(&self, values: &[f64]) -> Result<(ModelDescriptor, Option<MechanicalMode>)> {
        let mut model = self.model;
        let mut mech = self.mech;
        for (axis, &v) in self.axes.iter().zip(values) {
            match axis.name {
                AxisName::Delta => model = model.with_delta(v),
                AxisName::Ej => model = model.with_drive(v),
                AxisName::Phi0 => model = model.with_phi0(v)?,
                AxisName::OmegaM => {
                    if let Some(m) = mech.as_mut() {
                        m.omega_m = v;
                    }
                }
            }
        }
        Ok((model, mech))
    }
}

/// Status column text for an error.
pub fn status_of(err: &Error) -> String {
    let kind = match err {
        Error::Domain(_) => "domain_error",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::NoConvergence(_) => "no_convergence",
        Error::NoBifurcation { .. } => "no_bifurcation",
        Error::NotCooling(_) => "not_cooling",
        Error::Unstable(_) => "unstable",
        Error::GridTooCoarse { .. } => "grid_too_coarse",
        Error::NoCoolingInRange => "no_cooling_in_range",
    };
    kind.to_string()
}

/// Admitted fixed points with their universal parameters, ordered by branch
/// label and then by descending photon number.
pub(crate) fn admitted_points(
    model: &ModelDescriptor,
    gamma: f64,
    policy: BranchPolicy,
    search: &SearchSpec,
) -> Result<Vec<(FixedPoint, UniversalParams)>> {
    let mut pts: Vec<FixedPoint> = find_fixed_points(model, gamma, search)?
        .into_iter()
        .filter(|p| policy.admits(p))
        .collect();
    pts.sort_by(|a, b| a.branch.cmp(&b.branch).then(b.n.total_cmp(&a.n)));
    pts.into_iter()
        .map(|fp| Ok((fp, universal_params(model, &fp, gamma)?)))
        .collect()
}

/// Evaluates `outputs` on every grid point and admitted branch.
///
/// Columns: the axis names, `branch`, the requested quantities, `status`.
/// Rows are ordered by grid index (first axis outermost) and then by branch.
/// A point whose fixed-point solve fails keeps a single row with empty
/// values and the error kind in `status`.
pub fn run_sweep(grid: &SweepGrid, outputs: &[Quantity]) -> Result<Table> {
    grid.validate(outputs)?;
    let mut columns: Vec<String> = grid.axes.iter().map(|a| a.name.as_str().to_string()).collect();
    columns.push("branch".into());
    columns.extend(outputs.iter().map(|q| q.as_str().to_string()));
    columns.push("status".into());

    let axis_values: Vec<Vec<f64>> = grid.axes.iter().map(Axis::values).collect();
    let points: Vec<Vec<f64>> = match axis_values.as_slice() {
        [a] => a.iter().map(|&x| vec![x]).collect(),
        [a, b] => a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| vec![x, y]))
            .collect(),
        _ => unreachable!("validated above"),
    };

    let blocks: Vec<Vec<Vec<Cell>>> = points
        .par_iter()
        .map(|values| {
            let prefix: Vec<Cell> = values.iter().map(|&v| Cell::Num(v)).collect();
            let failed = |err: &Error| {
                let mut row = prefix.clone();
                row.push(Cell::Empty);
                row.extend(outputs.iter().map(|_| Cell::Empty));
                row.push(Cell::Text(status_of(err)));
                vec![row]
            };
            let (model, mech) = match grid.point(values) {
                Ok(p) => p,
                Err(e) => return failed(&e),
            };
            match admitted_points(&model, grid.gamma, grid.policy, &grid.search) {
                Ok(pts) => pts
                    .iter()
                    .map(|(fp, up)| {
                        let mut row = prefix.clone();
                        row.push(Cell::Text(fp.branch.to_string()));
                        row.extend(
                            outputs
                                .iter()
                                .map(|q| Cell::from(q.evaluate(fp, up, mech.as_ref()))),
                        );
                        row.push(Cell::Text("ok".into()));
                        row
                    })
                    .collect(),
                Err(e) => failed(&e),
            }
        })
        .collect();

    let mut table = Table::new(&columns);
    for row in blocks.into_iter().flatten() {
        table.push_row(row)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values() {
        let a = Axis::linear(AxisName::Ej, 0.0, 1.0, 5);
        assert_eq!(a.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let l = Axis::log(AxisName::OmegaM, 0.1, 10.0, 3);
        let v = l.values();
        assert!((v[1] - 1.0).abs() < 1e-15 && (v[2] - 10.0).abs() < 1e-14);
        assert!(Axis::linear(AxisName::Ej, 0.0, 1.0, 1).validate().is_err());
        assert!(Axis::log(AxisName::Ej, 0.0, 1.0, 3).validate().is_err());
    }

    #[test]
    fn undriven_point_gives_empty_cavity() {
        let grid = SweepGrid::new(
            ModelDescriptor::josephson(0.0, 0.0, 0.06),
            vec![Axis::linear(AxisName::Ej, 0.0, 0.0, 2)],
        );
        let t = run_sweep(&grid, &[Quantity::N]).unwrap();
        assert_eq!(t.columns, vec!["ej", "branch", "n", "status"]);
        assert_eq!(t.len(), 2);
        assert_eq!(t.rows[0][2], Cell::Num(0.0));
        assert_eq!(t.rows[0][1], Cell::Text("mono".into()));
    }

    #[test]
    fn malformed_grids_fail() {
        let m = ModelDescriptor::linear(0.0, 1.0);
        let grid = SweepGrid::new(m, vec![]);
        assert!(run_sweep(&grid, &[Quantity::N]).is_err());
        let grid = SweepGrid::new(m, vec![Axis::linear(AxisName::Phi0, 0.01, 0.1, 3)]);
        assert!(run_sweep(&grid, &[Quantity::N]).is_err());
        let grid = SweepGrid::new(m, vec![Axis::linear(AxisName::Delta, -1.0, 1.0, 3)]);
        assert!(run_sweep(&grid, &[Quantity::GammaOpt]).is_err());
    }

    #[test]
    fn bad_points_keep_a_status_row() {
        // The amplitude bracket exceeds the Bessel range for large phi0.
        let grid = SweepGrid::new(
            ModelDescriptor::josephson(0.0, 10.0, 0.06),
            vec![Axis::linear(AxisName::Phi0, 0.06, 0.9, 2)],
        );
        let mut grid = grid;
        grid.search.a_max = Some(30.0);
        let t = run_sweep(&grid, &[Quantity::N]).unwrap();
        assert_eq!(t.rows[0].last(), Some(&Cell::Text("ok".into())));
        assert_eq!(
            t.rows.last().unwrap().last(),
            Some(&Cell::Text("domain_error".into()))
        );
    }

    #[test]
    fn names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(q.as_str().parse::<Quantity>().unwrap(), q);
        }
        assert_eq!(
            "plus_only".parse::<BranchPolicy>().unwrap(),
            BranchPolicy::PlusOnly
        );
        assert!("omega".parse::<AxisName>().is_err());
    }
}
