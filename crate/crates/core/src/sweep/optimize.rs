use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{admitted_points, BranchPolicy};
use crate::cavity::{ModelDescriptor, SearchSpec};
use crate::error::{Error, Result};
use crate::semiclassical::{optomechanical_damping, MechanicalMode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningOptimum {
    pub delta_star: f64,
    pub gamma_opt_star: f64,
}

const SCAN_POINTS: usize = 401;

/// Maximises `f` on `[lo, hi]`: a `points`-point scan followed by
/// golden-section refinement around the best sample until the bracket is
/// narrower than `tol`. Non-finite values count as `-inf`.
pub fn maximize_on_interval<F>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64 + Sync,
{
    let g = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let points = points.max(2);
    let xs: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let vals: Vec<f64> = xs.par_iter().map(|&x| g(x)).collect();
    let mut best = 0;
    for i in 1..points {
        if vals[i] > vals[best] {
            best = i;
        }
    }
    let (mut a, mut b) = (xs[best.saturating_sub(1)], xs[(best + 1).min(points - 1)]);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = g(x2);
        }
    }
    let xm = 0.5 * (a + b);
    let fm = g(xm);
    if fm >= vals[best] {
        (xm, fm)
    } else {
        (xs[best], vals[best])
    }
}

/// Best `Gamma_opt(omega_m)` over the fixed points admitted by `policy`.
pub(crate) fn best_damping(
    model: &ModelDescriptor,
    mech: &MechanicalMode,
    gamma: f64,
    policy: BranchPolicy,
    search: &SearchSpec,
) -> Option<f64> {
    let pts = admitted_points(model, gamma, policy, search).ok()?;
    pts.iter()
        .map(|(_, up)| optomechanical_damping(up, mech.g0, mech.omega_m))
        .max_by(f64::total_cmp)
}

/// Detuning in `range` that maximises `Gamma_opt(omega_m)` at the drive of `model`.
pub fn optimize_detuning(
    model: &ModelDescriptor,
    mech: &MechanicalMode,
    gamma: f64,
    range: (f64, f64),
    policy: BranchPolicy,
    search: &SearchSpec,
) -> Result<DetuningOptimum> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid(format!("invalid detuning range [{lo}, {hi}]")));
    }
    model.validate()?;
    mech.validate()?;
    let objective =
        |d: f64| best_damping(&model.with_delta(d), mech, gamma, policy, search).unwrap_or(f64::NEG_INFINITY);
    let (delta_star, gamma_opt_star) = maximize_on_interval(objective, lo, hi, SCAN_POINTS, 1e-6 * gamma);
    if !(gamma_opt_star > 0.0) {
        return Err(Error::NoCoolingInRange);
    }
    Ok(DetuningOptimum {
        delta_star,
        gamma_opt_star,
    })
}
