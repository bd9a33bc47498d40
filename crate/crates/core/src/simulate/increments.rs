use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::index::StableIndex;

/// Sampler for increments of `L` over a fixed step, normalized so that
/// `E[exp(-q L_1)] = exp(q^alpha)`.
#[derive(Debug, Clone, Copy)]
pub struct StableIncrements {
    alpha: f64,
    dt: f64,
    scale: f64,
    shift: f64,
    power: f64,
}

impl StableIncrements {
    pub fn new(alpha: StableIndex, dt: f64) -> Self {
        let a = alpha.alpha();
        let step = dt.powf(1.0 / a);
        if alpha.is_brownian() {
            return StableIncrements {
                alpha: a,
                dt,
                scale: step * 2f64.sqrt(),
                shift: 0.0,
                power: 0.0,
            };
        }
        // Chambers-Mallows-Stuck for skewness 1 and scale (-cos(pi alpha / 2))^(1/alpha).
        let tan = (PI * a / 2.0).tan();
        let sigma = (-(PI * a / 2.0).cos()).powf(1.0 / a);
        let norm = (1.0 + tan * tan).powf(1.0 / (2.0 * a));
        StableIncrements {
            alpha: a,
            dt,
            scale: step * sigma * norm,
            shift: tan.atan() / a,
            power: (1.0 - a) / a,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.power == 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            return self.scale * z;
        }
        let v = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
        let w: f64 = Exp1.sample(rng);
        let a = self.alpha * (v + self.shift);
        let cv = v.cos();
        self.scale * a.sin() / cv.powf(1.0 / self.alpha) * ((v - a).cos() / w).powf(self.power)
    }
}

/// One increment of `L` over `dt`.
pub fn stable_increment<R: Rng + ?Sized>(alpha: StableIndex, dt: f64, rng: &mut R) -> f64 {
    StableIncrements::new(alpha, dt).sample(rng)
}
