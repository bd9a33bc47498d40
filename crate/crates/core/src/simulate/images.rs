//! Per-sample images: the Laplace transform in time of the time function
//! whose value at `t` is recovered from `E[exp(-t^((1+alpha)/alpha) A)]`.

use crate::error::{invalid, Result};
use crate::index::StableIndex;
use crate::inversion::Law;
use crate::quad::integrate_to_infinity;

const TOL: f64 = 1e-10;

/// Contribution of one area sample to the image of `law` at `lambda`.
pub fn image_of_area(law: Law, alpha: StableIndex, lambda: f64, area: f64) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    if !(area > 0.0 && area.is_finite()) {
        return Err(invalid(format!("area must be positive, got {area}")));
    }
    let a = alpha.alpha();
    let r = (a + 1.0) / a;
    let q = match law {
        Law::Excursion => integrate_to_infinity(
            |t: f64| {
                if t == 0.0 {
                    return area;
                }
                let tr = t.powf(r);
                (-lambda * t).exp() * -(-tr * area).exp_m1() / tr
            },
            0.0,
            1.0,
            TOL,
            400,
        )?,
        // t = v^(alpha/(alpha-1)) absorbs the t^(-1/alpha) singularity.
        Law::Meander => {
            let p = a / (a - 1.0);
            integrate_to_infinity(
                |v: f64| p * (-lambda * v.powf(p) - area * v.powf(p * r)).exp(),
                0.0,
                1.0,
                TOL,
                400,
            )?
        }
        Law::Conditioned => {
            integrate_to_infinity(|t: f64| (-lambda * t - area * t.powf(r)).exp(), 0.0, 1.0, TOL, 400)?
        }
    };
    Ok(q.value)
}

/// Image contributions of a batch of areas.
pub fn image_samples(law: Law, alpha: StableIndex, lambda: f64, areas: &[f64]) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    areas.par_iter().map(|&x| image_of_area(law, alpha, lambda, x)).collect()
}
