use crate::error::{invalid, Error, Result};
use crate::index::StableIndex;

/// Points `(x, P(X > x))` of the (weighted) empirical survival function at
/// the sample values, largest first.
pub fn survival_curve(samples: &[f64], weights: Option<&[f64]>) -> Vec<(f64, f64)> {
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    idx.sort_by(|&a, &b| samples[b].total_cmp(&samples[a]));
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let total: f64 = (0..samples.len()).map(w).sum();
    let mut above = 0.0;
    idx.into_iter()
        .map(|i| {
            above += w(i);
            (samples[i], above / total)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub slope: f64,
    pub points: usize,
}

/// Exceedances required at the bottom of the fitted decade.
const MIN_EXCEEDANCES: f64 = 100.0;

/// Least-squares slope of `fy(P)` against `ln x` over the lowest decade of
/// survival probability that still has [`MIN_EXCEEDANCES`] effective points above it.
fn decade_fit(samples: &[f64], weights: Option<&[f64]>, fy: impl Fn(f64) -> f64) -> Result<TailFit> {
    let n_eff = match weights {
        None => samples.len() as f64,
        Some(w) => {
            if w.len() != samples.len() {
                return Err(invalid("weights and samples differ in length"));
            }
            let sw: f64 = w.iter().sum();
            let sw2: f64 = w.iter().map(|v| v * v).sum();
            sw * sw / sw2
        }
    };
    let p_lo = MIN_EXCEEDANCES / n_eff;
    let p_hi = 10.0 * p_lo;
    if p_hi >= 0.5 {
        return Err(Error::InsufficientTail(format!(
            "effective sample size {n_eff:.0} leaves no decade of tail"
        )));
    }
    let pts: Vec<(f64, f64)> = survival_curve(samples, weights)
        .into_iter()
        .filter(|&(x, p)| x > 0.0 && p >= p_lo && p <= p_hi)
        .map(|(x, p)| (x.ln(), fy(p)))
        .collect();
    if pts.len() < 10 {
        return Err(Error::InsufficientTail(format!("{} points in the fitted decade", pts.len())));
    }
    let m = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientTail("tail samples are tied".into()));
    }
    Ok(TailFit {
        slope: sxy / sxx,
        points: pts.len(),
    })
}

/// Smallest sample accepted by [`excursion_tail_slope`].
pub const MIN_TAIL_SAMPLES: usize = 100_000;

/// Slope of `ln(-ln P(A > x))` against `ln x`; compare with `alpha/(alpha-1)`.
pub fn excursion_tail_slope(_alpha: StableIndex, samples: &[f64]) -> Result<TailFit> {
    if samples.len() < MIN_TAIL_SAMPLES {
        return Err(Error::InsufficientTail(format!(
            "{} samples, need {MIN_TAIL_SAMPLES}",
            samples.len()
        )));
    }
    decade_fit(samples, None, |p| (-p.ln()).ln())
}

/// Log-log slope of `P(A_me > x)`; compare with `-alpha`.
pub fn meander_tail_slope(alpha: StableIndex, samples: &[f64]) -> Result<TailFit> {
    alpha.require_strict()?;
    decade_fit(samples, None, f64::ln)
}

/// Log-log slope of the weighted `P(A_up > x)`; compare with `1 - alpha`.
pub fn conditioned_tail_slope(alpha: StableIndex, samples: &[f64], weights: &[f64]) -> Result<TailFit> {
    alpha.require_strict()?;
    decade_fit(samples, Some(weights), f64::ln)
}
