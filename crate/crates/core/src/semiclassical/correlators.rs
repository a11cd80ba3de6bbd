//! Time-domain fluctuation correlators and the numerical Fourier transform
//! that cross-checks the closed-form photon-number spectrum.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{exceptional_point_gap, fluctuation_eigenvalues, UniversalParams};
use crate::error::{Error, Result};

type C = Complex64;
type Mat2 = [[C; 2]; 2];

/// Values of the four elementary correlators `S_1..S_4` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub s1: C,
    pub s2: C,
    pub s3: C,
    pub s4: C,
}

impl CorrelatorSet {
    pub fn sum(&self) -> C {
        self.s1 + self.s2 + self.s3 + self.s4
    }
}

fn require_stable(up: &UniversalParams) -> Result<()> {
    let max_re = up.max_decay_real();
    let d0 = up.dtilde * up.dtilde - up.r_norm_sqr() + 0.25 * up.gamma * up.gamma;
    if max_re < 0.0 && d0 > 0.0 {
        Ok(())
    } else {
        Err(Error::Unstable(max_re))
    }
}

/// Equal-time correlators from the closed-form steady state.
pub fn correlator_initial_conditions(up: &UniversalParams) -> Result<CorrelatorSet> {
    require_stable(up)?;
    let r = up.r();
    let rr = up.r_norm_sqr();
    let s2 = 0.5 * rr / (up.dtilde * up.dtilde - rr + 0.25 * up.gamma * up.gamma);
    let s1 = r * (1.0 + 2.0 * s2) / C::new(up.gamma, -2.0 * up.dtilde);
    Ok(CorrelatorSet {
        s1,
        s2: C::new(s2, 0.0),
        s3: C::new(1.0 + s2, 0.0),
        s4: s1.conj(),
    })
}

/// Equal-time correlators by solving the 3x3 steady-state system
/// `0 = M s + (r, 0, r*)` for `s = (S_1, S_2, S_4)` directly.
pub fn steady_state_by_elimination(up: &UniversalParams) -> Result<CorrelatorSet> {
    require_stable(up)?;
    let r = up.r();
    let g = up.gamma;
    let dt = up.dtilde;
    let zero = C::new(0.0, 0.0);
    let m = [
        [C::new(-g, 2.0 * dt), 2.0 * r, zero],
        [r.conj(), C::new(-g, 0.0), r],
        [zero, 2.0 * r.conj(), C::new(-g, -2.0 * dt)],
    ];
    let rhs = [-r, zero, -r.conj()];
    let s = solve3(m, rhs).ok_or_else(|| Error::Unstable(up.max_decay_real()))?;
    Ok(CorrelatorSet {
        s1: s[0],
        s2: s[1],
        s3: 1.0 + s[1],
        s4: s[2],
    })
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[C; 3]; 3], mut b: [C; 3]) -> Option<[C; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[pivot][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, &v) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                *x -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [C::new(0.0, 0.0); 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// `exp(M t)` for `M = [[i dtilde - gamma/2, r], [r*, -i dtilde - gamma/2]]`.
///
/// With `N = M + gamma/2` one has `N^2 = q` (`q = |r|^2 - dtilde^2`), so
/// `exp(N t) = c(t) + d(t) N`. Small `|q| t^2` uses the power series, which
/// also covers the exceptional point where `d(t) = t`.
fn propagator(up: &UniversalParams, t: f64) -> Mat2 {
    let q = exceptional_point_gap(up);
    let half = 0.5 * up.gamma;
    let x = q * t * t;
    let (c, d) = if x.abs() < 1.0 {
        let damp = (-half * t).exp();
        let mut ct = 1.0;
        let mut dt = t;
        let mut c = ct;
        let mut d = dt;
        for k in 1..40 {
            let kf = k as f64;
            ct *= x / ((2.0 * kf - 1.0) * (2.0 * kf));
            dt *= x / ((2.0 * kf) * (2.0 * kf + 1.0));
            c += ct;
            d += dt;
            if ct.abs() < 1e-18 * c.abs() && dt.abs() < 1e-18 * d.abs() {
                break;
            }
        }
        (c * damp, d * damp)
    } else if q > 0.0 {
        let s = q.sqrt();
        let grow = ((s - half) * t).exp();
        let decay = ((-s - half) * t).exp();
        (0.5 * (grow + decay), 0.5 * (grow - decay) / s)
    } else {
        let w = (-q).sqrt();
        let damp = (-half * t).exp();
        let (sn, cs) = (w * t).sin_cos();
        (cs * damp, sn / w * damp)
    };
    let n = [
        [C::new(0.0, up.dtilde), up.r()],
        [up.r().conj(), C::new(0.0, -up.dtilde)],
    ];
    [[c + d * n[0][0], d * n[0][1]], [d * n[1][0], c + d * n[1][1]]]
}

fn apply(m: &Mat2, v: [C; 2]) -> [C; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Correlators `S_1..S_4` at time `t >= 0`.
pub fn correlators_time(up: &UniversalParams, t: f64) -> Result<CorrelatorSet> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("time must be >= 0, got {t}")));
    }
    let init = correlator_initial_conditions(up)?;
    if t == 0.0 {
        return Ok(init);
    }
    let p = propagator(up, t);
    let [s1, s2] = apply(&p, [init.s1, init.s2]);
    let [s3, s4] = apply(&p, [init.s3, init.s4]);
    Ok(CorrelatorSet { s1, s2, s3, s4 })
}

/// Integration horizon in units of `1/gamma`.
const HORIZON: f64 = 40.0;

/// Photon-number spectrum `S_nn(omega) * gamma` obtained by numerically
/// Fourier transforming `n * sum_i S_i(t)`, extended to negative times by
/// complex conjugation.
///
/// The half-line integral uses the trapezoid rule on `[0, 40/gamma]` with
/// Euler-Maclaurin end corrections and the exponential tail beyond the
/// horizon, both evaluated from the exact propagator.
pub fn spectrum_via_transform(up: &UniversalParams, omega_grid: &[f64]) -> Result<Vec<f64>> {
    require_stable(up)?;
    let limit = up.gamma / 20.0;
    for w in omega_grid.windows(2) {
        let spacing = (w[1] - w[0]).abs();
        if spacing > limit * (1.0 + 1e-9) {
            return Err(Error::GridTooCoarse { spacing, limit });
        }
    }
    if omega_grid.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("non-finite frequency in grid"));
    }

    let (lp, _) = fluctuation_eigenvalues(up);
    let dt_max = (0.01 / up.gamma).min(0.1 / lp.im.abs().max(up.gamma));
    let horizon = HORIZON / up.gamma;
    let steps = (horizon / dt_max).ceil() as usize;
    let dt = horizon / steps as f64;

    let init = correlator_initial_conditions(up)?;
    let v0 = [init.s1 + init.s3, init.s2 + init.s4];
    let samples: Vec<C> = (0..=steps)
        .map(|k| {
            let x = apply(&propagator(up, k as f64 * dt), v0);
            x[0] + x[1]
        })
        .collect();
    let x_end = apply(&propagator(up, horizon), v0);

    let m = [
        [C::new(-0.5 * up.gamma, up.dtilde), up.r()],
        [up.r().conj(), C::new(-0.5 * up.gamma, -up.dtilde)],
    ];

    Ok(omega_grid
        .par_iter()
        .map(|&omega| {
            let k = [
                [m[0][0] + C::new(0.0, omega), m[0][1]],
                [m[1][0], m[1][1] + C::new(0.0, omega)],
            ];
            let sum1 = |v: [C; 2]| v[0] + v[1];
            // f^(j)(t) = 1^T K^j x(t) exp(i omega t)
            let deriv = |x: [C; 2], order: usize, phase: C| {
                let mut y = x;
                for _ in 0..order {
                    y = apply(&k, y);
                }
                sum1(y) * phase
            };
            let phase_end = C::from_polar(1.0, omega * horizon);
            let one = C::new(1.0, 0.0);

            let mut acc = 0.5 * (samples[0] + samples[steps] * phase_end);
            let step = C::from_polar(1.0, omega * dt);
            let mut rot = one;
            for (i, s) in samples.iter().enumerate().take(steps).skip(1) {
                rot = if i % 256 == 0 {
                    C::from_polar(1.0, omega * dt * i as f64)
                } else {
                    rot * step
                };
                acc += s * rot;
            }
            let mut integral = acc * dt;
            let h2 = dt * dt;
            integral -= h2 / 12.0 * (deriv(x_end, 1, phase_end) - deriv(v0, 1, one));
            integral += h2 * h2 / 720.0 * (deriv(x_end, 3, phase_end) - deriv(v0, 3, one));

            let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
            let kinv_x = [
                (k[1][1] * x_end[0] - k[0][1] * x_end[1]) / det,
                (-k[1][0] * x_end[0] + k[0][0] * x_end[1]) / det,
            ];
            integral -= sum1(kinv_x) * phase_end;

            2.0 * up.n * integral.re * up.gamma
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiclassical::photon_number_spectrum;

    fn up(dtilde: f64, r1: f64, r2: f64, n: f64) -> UniversalParams {
        UniversalParams::new(dtilde, r1, r2, 1.0, n).unwrap()
    }

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn vacuum_initial_conditions() {
        let s = correlator_initial_conditions(&up(0.4, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(s.s1, C::new(0.0, 0.0));
        assert_eq!(s.s2, C::new(0.0, 0.0));
        assert_eq!(s.s3, C::new(1.0, 0.0));
        assert_eq!(s.s4, C::new(0.0, 0.0));
    }

    #[test]
    fn quarter_squeezing_example() {
        let s = correlator_initial_conditions(&up(0.0, 0.25, 0.0, 1.0)).unwrap();
        assert!((s.s2.re - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(s.s3 - s.s2, C::new(1.0, 0.0));
    }

    #[test]
    fn elimination_matches_closed_form() {
        for p in [
            up(0.3, 0.2, -0.1, 1.0),
            up(-1.2, 0.4, 0.9, 1.0),
            up(0.0, 0.45, 0.0, 1.0),
        ] {
            let a = correlator_initial_conditions(&p).unwrap();
            let b = steady_state_by_elimination(&p).unwrap();
            for (x, y) in [(a.s1, b.s1), (a.s2, b.s2), (a.s3, b.s3), (a.s4, b.s4)] {
                assert!(close(x, y, 1e-12), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn unstable_parameters_are_rejected() {
        let p = up(0.0, 0.6, 0.0, 1.0);
        assert!(matches!(
            correlator_initial_conditions(&p),
            Err(Error::Unstable(_))
        ));
        assert!(correlators_time(&p, 1.0).is_err());
        assert!(spectrum_via_transform(&p, &[0.0]).is_err());
    }

    #[test]
    fn decoupled_propagation() {
        let p = up(0.7, 0.0, 0.0, 1.0);
        let t = 2.3;
        let s = correlators_time(&p, t).unwrap();
        let expect = C::new(-0.5 * t, 0.7 * t).exp();
        assert!(close(s.s3, expect, 1e-14));
        assert_eq!(s.s1, C::new(0.0, 0.0));
        assert_eq!(s.s2, C::new(0.0, 0.0));
        assert_eq!(s.s4, C::new(0.0, 0.0));
    }

    #[test]
    fn time_zero_is_initial_condition() {
        let p = up(0.1, 0.3, 0.2, 1.0);
        assert_eq!(
            correlators_time(&p, 0.0).unwrap(),
            correlator_initial_conditions(&p).unwrap()
        );
    }

    #[test]
    fn propagator_is_continuous_across_branches() {
        // Series and closed forms meet at |q| t^2 = 1; also the exceptional point.
        for p in [
            up(0.1, 0.3, 0.2, 1.0),
            up(0.4, 0.1, 0.0, 1.0),
            up(0.3, 0.3, 0.0, 1.0),
        ] {
            let q = exceptional_point_gap(&p);
            if q == 0.0 {
                let m = propagator(&p, 3.0);
                let damp = (-1.5f64).exp();
                assert!((m[0][1] - damp * 3.0 * p.r()).norm() < 1e-14);
                continue;
            }
            let t = 1.0 / q.abs().sqrt();
            let a = propagator(&p, t * (1.0 - 1e-12));
            let b = propagator(&p, t * (1.0 + 1e-12));
            for i in 0..2 {
                for j in 0..2 {
                    assert!((a[i][j] - b[i][j]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn correlators_decay() {
        let p = up(0.2, 0.3, -0.1, 1.0);
        let s = correlators_time(&p, 20.0).unwrap();
        let bound = 10.0 * (20.0 * p.max_decay_real()).exp();
        for v in [s.s1, s.s2, s.s3, s.s4] {
            assert!(v.norm() < bound);
        }
    }

    #[test]
    fn transform_matches_closed_form() {
        let p = up(-0.3, -0.2, 0.35, 4.0);
        let grid: Vec<f64> = (0..=120).map(|i| -3.0 + 0.05 * i as f64).collect();
        let num = spectrum_via_transform(&p, &grid).unwrap();
        for (w, s) in grid.iter().zip(&num) {
            let exact = photon_number_spectrum(&p, *w);
            assert!((s - exact).abs() <= 1e-3 * exact, "omega={w}: {s} vs {exact}");
        }
    }

    #[test]
    fn linear_peak_location() {
        let p = up(0.6, 0.0, 0.0, 1.0);
        let grid: Vec<f64> = (0..=120).map(|i| -3.0 + 0.05 * i as f64).collect();
        let num = spectrum_via_transform(&p, &grid).unwrap();
        let (imax, _) = num.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        assert!((grid[imax] + 0.6).abs() < 1e-9);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let p = up(0.1, 0.0, 0.0, 1.0);
        assert!(matches!(
            spectrum_via_transform(&p, &[0.0, 0.1]),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
