//! Classical fixed points `dH/dalpha* = i gamma alpha / 2` and drive thresholds
//! for bistability.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{hamiltonian_derivatives, ModelDescriptor};
use crate::error::{Error, Result};
use crate::semiclassical::{fluctuation_eigenvalues, params_at};
use crate::specfun::{self, MAX_ARGUMENT};

/// Label of a fixed point within the solution set at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// The only stable solution.
    Mono,
    /// Stable solution with positive phase in a bistable set.
    Plus,
    /// Stable solution with negative phase in a bistable set.
    Minus,
    Unstable,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Mono => "mono",
            Branch::Plus => "plus",
            Branch::Minus => "minus",
            Branch::Unstable => "unstable",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One classical steady state `alpha0 = a0 exp(-i theta0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub a0: f64,
    /// Phase in `(-pi, pi]`.
    pub theta0: f64,
    /// Photon number `a0^2`.
    pub n: f64,
    pub branch: Branch,
    pub stable: bool,
}

impl FixedPoint {
    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.a0, -self.theta0)
    }
}

/// Controls for [`find_fixed_points`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    /// Upper end of the amplitude bracket (Josephson). `None` selects
    /// `1.5 * 4 / (2 phi0)`.
    pub a_max: Option<f64>,
    /// Number of uniform brackets scanned on `[0, a_max]`.
    pub brackets: usize,
    pub dedup_tol: f64,
    /// Maximum allowed `|dH/dalpha* - i gamma alpha/2|`, relative to the
    /// largest term of the fixed-point equation (at least `hbar gamma`).
    pub residual_tol: f64,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            a_max: None,
            brackets: 400,
            dedup_tol: 1e-8,
            residual_tol: 1e-10,
        }
    }
}

/// Magnitude of the largest term in `dH/dalpha* = i gamma alpha / 2`.
fn equation_scale(model: &ModelDescriptor, a: f64, gamma: f64) -> f64 {
    let drive = match *model {
        ModelDescriptor::Linear { drive, .. } => drive.abs(),
        ModelDescriptor::Kerr { drive, kerr, .. } => drive.abs() + kerr.abs() * a * a * a,
        ModelDescriptor::Josephson { ej, phi0, .. } => ej.abs() * phi0,
    };
    1f64.max(drive).max(model.delta().abs() * a).max(0.5 * gamma * a)
}

/// Default amplitude bracket for the Josephson model.
pub fn default_a_max(phi0: f64) -> f64 {
    1.5 * 4.0 / (2.0 * phi0)
}

/// All classical fixed points of `model`, sorted by descending photon number.
pub fn find_fixed_points(
    model: &ModelDescriptor,
    gamma: f64,
    search: &SearchSpec,
) -> Result<Vec<FixedPoint>> {
    model.validate()?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
    }
    let raw = match *model {
        ModelDescriptor::Josephson { delta, ej, phi0 } => {
            josephson_candidates(delta, ej, phi0, gamma, search)?
        }
        ModelDescriptor::Linear { delta, drive } => kerr_candidates(delta, drive, 0.0, gamma),
        ModelDescriptor::Kerr { delta, drive, kerr } => kerr_candidates(delta, drive, kerr, gamma),
    };

    let mut points = Vec::with_capacity(raw.len());
    for (a0, theta0) in dedup(raw, search.dedup_tol) {
        let alpha = Complex64::from_polar(a0, -theta0);
        let d = hamiltonian_derivatives(model, alpha)?;
        let residual = (d.d1 - Complex64::i() * 0.5 * gamma * alpha).norm();
        let limit = search.residual_tol * equation_scale(model, a0, gamma);
        if !(residual <= limit) {
            return Err(Error::NoConvergence(format!(
                "fixed point at A0={a0}, theta0={theta0} has residual {residual:e} > {limit:e}"
            )));
        }
        let up = params_at(model, a0, theta0, gamma)?;
        let (lp, lm) = fluctuation_eigenvalues(&up);
        let stable = lp.re.max(lm.re) < 0.0;
        points.push(FixedPoint {
            a0,
            theta0,
            n: a0 * a0,
            branch: Branch::Unstable,
            stable,
        });
    }

    let stable_count = points.iter().filter(|p| p.stable).count();
    for p in &mut points {
        p.branch = if !p.stable {
            Branch::Unstable
        } else if stable_count < 2 || p.theta0.abs() < 1e-10 {
            Branch::Mono
        } else if p.theta0 > 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        };
    }
    points.sort_by(|a, b| {
        b.n.partial_cmp(&a.n)
            .unwrap_or(Ordering::Equal)
            .then(b.theta0.partial_cmp(&a.theta0).unwrap_or(Ordering::Equal))
    });
    Ok(points)
}

fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

fn dedup(mut raw: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    raw.iter_mut().for_each(|p| p.1 = wrap_phase(p.1));
    raw.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    });
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
    for p in raw {
        let dup = out.iter().any(|q| {
            let dth = wrap_phase(p.1 - q.1).abs();
            (p.0 - q.0).abs() <= tol && dth <= tol
        });
        if !dup {
            out.push(p);
        }
    }
    out
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
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

/// Minimises `f` on `[lo, hi]` by golden-section search.
fn golden_min<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Roots of `f` on sorted `nodes`: sign changes between neighbours, plus
/// close root pairs hidden inside a bracket, detected at local extrema that
/// approach zero.
fn scan_roots<F: Fn(f64) -> f64>(f: &F, nodes: &[f64]) -> Vec<f64> {
    let vals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..nodes.len() {
        if vals[i] == 0.0 {
            roots.push(nodes[i]);
            continue;
        }
        if i + 1 < nodes.len() && vals[i + 1] != 0.0 && (vals[i] < 0.0) != (vals[i + 1] < 0.0) {
            roots.push(bisect(f, nodes[i], nodes[i + 1]));
        }
        if i > 0 && i + 1 < nodes.len() {
            let (a, b, c) = (vals[i - 1], vals[i], vals[i + 1]);
            let same = (a < 0.0) == (b < 0.0) && (b < 0.0) == (c < 0.0) && a != 0.0 && c != 0.0;
            if same && b.abs() <= a.abs() && b.abs() <= c.abs() {
                let s = b.signum();
                let g = |x: f64| s * f(x);
                let (lo, hi) = (nodes[i - 1], nodes[i + 1]);
                let xm = golden_min(&g, lo, hi, 1e-13 * hi.abs().max(1.0));
                let fm = g(xm);
                if fm < 0.0 {
                    roots.push(bisect(f, lo, xm));
                    roots.push(bisect(f, xm, hi));
                } else if fm == 0.0 {
                    roots.push(xm);
                }
            }
        }
    }
    roots
}

struct JosephsonSystem {
    delta: f64,
    c: f64,
    phi0: f64,
    gamma: f64,
}

impl JosephsonSystem {
    fn b_pm(&self, a: f64) -> (f64, f64) {
        let x = 2.0 * self.phi0 * a;
        let j0 = specfun::jn(0, x);
        let j2 = specfun::jn(2, x);
        (j0 + j2, j0 - j2)
    }

    /// `theta` eliminated: `(gamma A B-)^2 + (2 delta A B+)^2 - (2 C B+ B-)^2`.
    fn reduced(&self, a: f64) -> f64 {
        let (bp, bm) = self.b_pm(a);
        let t1 = self.gamma * a * bm;
        let t2 = 2.0 * self.delta * a * bp;
        let t3 = 2.0 * self.c * bp * bm;
        t1 * t1 + t2 * t2 - t3 * t3
    }

    /// Amplitude and phase equations (the phase one multiplied by `A`).
    fn residuals(&self, a: f64, theta: f64) -> (f64, f64) {
        let (bp, bm) = self.b_pm(a);
        let (s, c) = theta.sin_cos();
        (
            -0.5 * self.gamma * a + self.c * c * bp,
            -self.delta * a - self.c * s * bm,
        )
    }

    fn polish(&self, mut a: f64, mut theta: f64) -> (f64, f64) {
        let norm = |r: (f64, f64)| r.0.hypot(r.1);
        let mut res = self.residuals(a, theta);
        for _ in 0..30 {
            if norm(res) == 0.0 {
                break;
            }
            let x = 2.0 * self.phi0 * a;
            let [j0, j1, j2, j3] = specfun::j0123(x);
            let (bp, bm) = (j0 + j2, j0 - j2);
            let dbp = -self.phi0 * (j1 + j3);
            let dbm = -self.phi0 * (3.0 * j1 - j3);
            let (s, c) = theta.sin_cos();
            let j11 = -0.5 * self.gamma + self.c * c * dbp;
            let j12 = -self.c * s * bp;
            let j21 = -self.delta - self.c * s * dbm;
            let j22 = -self.c * c * bm;
            let det = j11 * j22 - j12 * j21;
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let da = -(res.0 * j22 - j12 * res.1) / det;
            let dt = -(j11 * res.1 - j21 * res.0) / det;
            let (na, nt) = (a + da, theta + dt);
            if !(na >= 0.0) || 2.0 * self.phi0 * na > MAX_ARGUMENT {
                break;
            }
            let nres = self.residuals(na, nt);
            if norm(nres) < norm(res) {
                a = na;
                theta = nt;
                res = nres;
            } else {
                break;
            }
        }
        (a, theta)
    }
}

fn josephson_candidates(
    delta: f64,
    ej: f64,
    phi0: f64,
    gamma: f64,
    search: &SearchSpec,
) -> Result<Vec<(f64, f64)>> {
    if ej == 0.0 {
        return Ok(vec![(0.0, 0.0)]);
    }
    let a_max = search.a_max.unwrap_or_else(|| default_a_max(phi0));
    let x_star = specfun::first_j1_maximum();
    if !(a_max >= 1.2 * x_star / (2.0 * phi0)) {
        return Err(Error::invalid(format!(
            "amplitude bracket {a_max} must reach 1.2 x*/(2 phi0) = {}",
            1.2 * x_star / (2.0 * phi0)
        )));
    }
    if 2.0 * phi0 * a_max > MAX_ARGUMENT {
        return Err(Error::domain(format!(
            "amplitude bracket {a_max} gives Bessel argument beyond {MAX_ARGUMENT}"
        )));
    }
    if search.brackets < 2 {
        return Err(Error::invalid("need at least 2 brackets"));
    }

    let sys = JosephsonSystem {
        delta,
        c: 0.5 * ej * phi0,
        phi0,
        gamma,
    };
    let x_max = 2.0 * phi0 * a_max;
    let stationary: Vec<f64> = specfun::j1_stationary_points()
        .iter()
        .copied()
        .filter(|&x| x <= x_max)
        .map(|x| x / (2.0 * phi0))
        .collect();
    let uniform = (0..=search.brackets).map(|i| a_max * i as f64 / search.brackets as f64);

    let mut candidates = Vec::new();
    if delta == 0.0 {
        // sin(theta) = 0 branches: gamma A = +/- 2 C B+(A).
        let nodes: Vec<f64> = uniform.collect();
        for (sign, theta) in [(1.0, 0.0), (-1.0, PI)] {
            let h = |a: f64| gamma * a - sign * 2.0 * sys.c * sys.b_pm(a).0;
            for a in scan_roots(&h, &nodes) {
                if a > 0.0 {
                    candidates.push((a, theta));
                }
            }
        }
        // B- = 0 branches with cos(theta) = gamma A / (2 C B+).
        for &a in &stationary {
            let (bp, _) = sys.b_pm(a);
            let cos = gamma * a / (2.0 * sys.c * bp);
            if cos.abs() <= 1.0 {
                let theta = cos.acos();
                candidates.push((a, theta));
                candidates.push((a, -theta));
            }
        }
    } else {
        let mut nodes: Vec<f64> = uniform.chain(stationary.iter().copied()).collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        nodes.dedup();
        let g = |a: f64| sys.reduced(a);
        for a in scan_roots(&g, &nodes) {
            if !(a > 0.0) {
                continue;
            }
            let (bp, bm) = sys.b_pm(a);
            let f = 2.0 * sys.c * bp * bm;
            if f == 0.0 {
                continue;
            }
            let s = f.signum();
            let theta = (s * (-2.0 * delta * a * bp)).atan2(s * (gamma * a * bm));
            candidates.push((a, theta));
        }
    }
    Ok(candidates.into_iter().map(|(a, t)| sys.polish(a, t)).collect())
}

/// Real roots of `p(n) = K^2 n^3 + 2 delta K n^2 + (delta^2 + gamma^2/4) n - eps^2`
/// with `n >= 0`, converted to `alpha0 = -eps / (delta + K n + i gamma/2)` and
/// polished by 2-D Newton on `dH/dalpha* = i gamma alpha / 2`.
fn kerr_candidates(delta: f64, drive: f64, kerr: f64, gamma: f64) -> Vec<(f64, f64)> {
    if drive == 0.0 {
        return vec![(0.0, 0.0)];
    }
    let c1 = delta * delta + 0.25 * gamma * gamma;
    let eps2 = drive * drive;
    let mut photon_numbers = Vec::new();
    if kerr == 0.0 {
        photon_numbers.push(eps2 / c1);
    } else {
        let k2 = kerr * kerr;
        let p = |n: f64| ((k2 * n + 2.0 * delta * kerr) * n + c1) * n - eps2;
        // p' = 3 K^2 n^2 + 4 delta K n + c1
        let qa = 3.0 * k2;
        let qb = 4.0 * delta * kerr;
        let disc = qb * qb - 4.0 * qa * c1;
        let mut nodes = vec![0.0];
        if disc > 0.0 {
            let sq = disc.sqrt();
            let mut crit = [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)];
            crit.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
            nodes.extend(crit.iter().copied().filter(|&n| n > 0.0));
        }
        let bound = 1.0 + (2.0 * delta * kerr).abs().max(c1).max(eps2) / k2;
        nodes.push(bound);
        for w in nodes.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let (plo, phi) = (p(lo), p(hi));
            if phi == 0.0 {
                photon_numbers.push(hi);
            } else if (plo < 0.0) != (phi < 0.0) {
                photon_numbers.push(bisect(&p, lo, hi));
            }
        }
    }

    photon_numbers
        .into_iter()
        .map(|n| {
            let alpha = -drive / Complex64::new(delta + kerr * n, 0.5 * gamma);
            let alpha = kerr_newton(delta, drive, kerr, gamma, alpha);
            (alpha.norm(), -alpha.arg())
        })
        .collect()
}

fn kerr_newton(delta: f64, drive: f64, kerr: f64, gamma: f64, mut alpha: Complex64) -> Complex64 {
    let half_gamma = Complex64::new(0.0, 0.5 * gamma);
    let residual = |a: Complex64| a * (-delta - kerr * a.norm_sqr()) - half_gamma * a - drive;
    let mut res = residual(alpha);
    for _ in 0..30 {
        if res.norm() == 0.0 {
            break;
        }
        // dF = p dalpha + q dalpha*
        let p = -delta - 2.0 * kerr * alpha.norm_sqr() - half_gamma;
        let q = -kerr * alpha * alpha;
        // Solve p z + q z* = -F for z.
        let det = p.norm_sqr() - q.norm_sqr();
        if det == 0.0 {
            break;
        }
        let rhs = -res;
        let z = (p.conj() * rhs - q * rhs.conj()) / det;
        let next = alpha + z;
        let nres = residual(next);
        if nres.norm() < res.norm() {
            alpha = next;
            res = nres;
        } else {
            break;
        }
    }
    alpha
}

/// Controls for [`bifurcation_threshold_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSearch {
    /// Largest drive tried before giving up.
    pub drive_cap: f64,
    /// Relative width of the final bisection bracket.
    pub rel_width: f64,
    pub search: SearchSpec,
}

impl Default for ThresholdSearch {
    fn default() -> Self {
        ThresholdSearch {
            drive_cap: 1e6,
            rel_width: 1e-6,
            search: SearchSpec::default(),
        }
    }
}

/// Smallest Josephson drive `E_J*` (units of `hbar gamma`) with at least two
/// stable fixed points. The drive stored in `model` is ignored.
pub fn bifurcation_threshold(model: &ModelDescriptor, gamma: f64) -> Result<f64> {
    bifurcation_threshold_with(model, gamma, &ThresholdSearch::default())
}

pub fn bifurcation_threshold_with(
    model: &ModelDescriptor,
    gamma: f64,
    opts: &ThresholdSearch,
) -> Result<f64> {
    if !matches!(model, ModelDescriptor::Josephson { .. }) {
        return Err(Error::invalid(
            "bifurcation threshold is defined for the josephson model",
        ));
    }
    let stable_count = |ej: f64| -> Result<usize> {
        let pts = find_fixed_points(&model.with_drive(ej), gamma, &opts.search)?;
        Ok(pts.iter().filter(|p| p.stable).count())
    };

    let mut lo = 0.0;
    let mut hi = 1.0_f64.min(opts.drive_cap);
    loop {
        if stable_count(hi)? >= 2 {
            break;
        }
        if hi >= opts.drive_cap {
            return Err(Error::NoBifurcation { cap: opts.drive_cap });
        }
        lo = hi;
        hi = (2.0 * hi).min(opts.drive_cap);
    }
    while hi - lo > opts.rel_width * hi {
        let mid = 0.5 * (lo + hi);
        if stable_count(mid)? >= 2 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(model: ModelDescriptor) -> Vec<FixedPoint> {
        find_fixed_points(&model, 1.0, &SearchSpec::default()).unwrap()
    }

    #[test]
    fn undriven_josephson_has_origin_only() {
        let pts = solve(ModelDescriptor::josephson(0.3, 0.0, 0.06));
        assert_eq!(pts.len(), 1);
        assert_eq!((pts[0].a0, pts[0].theta0), (0.0, 0.0));
        assert_eq!(pts[0].branch, Branch::Mono);
        assert!(pts[0].stable);
    }

    #[test]
    fn weak_josephson_drive_is_linear_response() {
        let pts = solve(ModelDescriptor::josephson(0.0, 10.0, 0.06));
        assert_eq!(pts.len(), 1);
        let p = pts[0];
        assert_eq!(p.theta0, 0.0);
        assert_eq!(p.branch, Branch::Mono);
        // gamma A^2 = E J1(2 phi0 A); the Bessel correction at x = 0.072 is below 1e-3.
        assert!((p.a0 - 0.6).abs() < 1e-3);
        assert!((p.a0 * p.a0 - 10.0 * specfun::jn(1, 0.12 * p.a0)).abs() < 1e-12);
    }

    #[test]
    fn strong_resonant_drive_is_bistable() {
        let (ej, phi0) = (750.0, 0.06);
        let pts = solve(ModelDescriptor::josephson(0.0, ej, phi0));
        assert_eq!(pts.len(), 3);
        let xs = specfun::first_j1_maximum();
        let a_star = xs / (2.0 * phi0);
        let bplus = specfun::jn(0, xs) + specfun::jn(2, xs);
        let theta = (a_star / (ej * phi0 * bplus)).acos();
        let plus = pts.iter().find(|p| p.branch == Branch::Plus).unwrap();
        let minus = pts.iter().find(|p| p.branch == Branch::Minus).unwrap();
        assert!((a_star - 15.34).abs() < 0.01);
        assert!((plus.a0 - a_star).abs() < 1e-10 && (minus.a0 - a_star).abs() < 1e-10);
        assert!((plus.theta0 - theta).abs() < 1e-10);
        assert!((minus.theta0 + theta).abs() < 1e-10);
        let middle = pts.iter().find(|p| p.branch == Branch::Unstable).unwrap();
        assert_eq!(middle.theta0, 0.0);
        assert!(!middle.stable);
    }

    #[test]
    fn kerr_bistability_gives_three_roots() {
        // |delta| > sqrt(3)/2 gamma with a drive inside the hysteresis window.
        let m = ModelDescriptor::kerr(-3.0, 4.0, 0.1);
        let pts = solve(m);
        assert_eq!(pts.len(), 3, "{pts:?}");
        assert_eq!(pts.iter().filter(|p| p.stable).count(), 2);
    }

    #[test]
    fn linear_fixed_point_closed_form() {
        let (delta, eps) = (-0.8, 2.0);
        let pts = solve(ModelDescriptor::linear(delta, eps));
        assert_eq!(pts.len(), 1);
        let expected = -eps / Complex64::new(delta, 0.5);
        assert!((pts[0].alpha() - expected).norm() < 1e-12);
        assert!((pts[0].n - eps * eps / (delta * delta + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_bracket() {
        let spec = SearchSpec {
            a_max: Some(5.0),
            ..SearchSpec::default()
        };
        let m = ModelDescriptor::josephson(0.0, 100.0, 0.06);
        assert!(matches!(
            find_fixed_points(&m, 1.0, &spec),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn scan_finds_close_root_pair() {
        // Two roots 1e-4 apart inside one bracket of width 0.1.
        let f = |x: f64| (x - 0.53) * (x - 0.5301);
        let nodes: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let roots = scan_roots(&f, &nodes);
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!((roots[0] - 0.53).abs() < 1e-12);
        assert!((roots[1] - 0.5301).abs() < 1e-12);
    }

    #[test]
    fn threshold_requires_josephson() {
        assert!(bifurcation_threshold(&ModelDescriptor::linear(0.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn threshold_cap_error() {
        let opts = ThresholdSearch {
            drive_cap: 50.0,
            ..ThresholdSearch::default()
        };
        let m = ModelDescriptor::josephson(0.0, 0.0, 0.06);
        assert!(matches!(
            bifurcation_threshold_with(&m, 1.0, &opts),
            Err(Error::NoBifurcation { .. })
        ));
    }
}
