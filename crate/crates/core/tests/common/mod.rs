#![allow(dead_code)]

use optocool::UniversalParams;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random stable universal parameters with `gamma = 1`, kept at least
/// `margin` away from the instability boundary `max Re(lambda) = 0`.
pub fn stable_params(rng: &mut ChaCha8Rng, margin: f64) -> UniversalParams {
    loop {
        let dtilde = rng.gen_range(-3.0..3.0);
        let r1 = rng.gen_range(-2.0..2.0);
        let r2 = rng.gen_range(-2.0..2.0);
        let n = 10f64.powf(rng.gen_range(-1.0..3.0));
        let up = UniversalParams::new(dtilde, r1, r2, 1.0, n).unwrap();
        if up.max_decay_real() < -margin {
            return up;
        }
    }
}

/// Like [`stable_params`] but with `r2 - dtilde > 0`.
pub fn cooling_params(rng: &mut ChaCha8Rng, margin: f64) -> UniversalParams {
    loop {
        let up = stable_params(rng, margin);
        if up.r2 - up.dtilde > 1e-3 {
            return up;
        }
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
