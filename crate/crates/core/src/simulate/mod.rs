//! Monte Carlo for the spectrally positive stable process `L` normalized by
//! `E[exp(-q L_t)] = exp(t q^alpha)`.
//!
//! Work is split into fixed-size chunks, each driven by its own ChaCha stream
//! derived from `(seed, chunk index)`, and chunk results are merged in order,
//! so estimates do not depend on the thread count.

mod images;
mod increments;
mod paths;
mod tails;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;

use crate::coeffs::gamma::gamma;
use crate::error::{invalid, Error, Result};
use crate::index::StableIndex;

pub use images::{image_of_area, image_samples};
pub use increments::{stable_increment, StableIncrements};
pub use paths::{
    sample_excursion, sample_excursion_with, sample_killed, sample_meander, sample_meander_with, BridgeWindow,
    PathSample,
};
pub use tails::{conditioned_tail_slope, excursion_tail_slope, meander_tail_slope, survival_curve, TailFit};

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Distance to `target` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.stderr == 0.0 {
            return if self.mean == target { 0.0 } else { f64::INFINITY };
        }
        (self.mean - target) / self.stderr
    }

    /// z-score of the difference of two independent estimates.
    pub fn z_against(&self, other: &McEstimate) -> f64 {
        let se = self.stderr.hypot(other.stderr);
        if se == 0.0 {
            return 0.0;
        }
        (self.mean - other.mean) / se
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub parallel: bool,
    pub chunk_size: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            seed: DEFAULT_SEED,
            parallel: true,
            chunk_size: 2048,
        }
    }
}

impl McConfig {
    pub fn with_seed(seed: u64) -> Self {
        McConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn sequential(self) -> Self {
        McConfig {
            parallel: false,
            ..self
        }
    }

    /// Runs `work(rng, count)` on consecutive chunks covering `n` items and
    /// returns the per-chunk results in chunk order.
    fn chunked<T, F>(&self, n: usize, work: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
    {
        if self.chunk_size == 0 {
            return Err(invalid("chunk_size must be positive"));
        }
        let chunks = n.div_ceil(self.chunk_size);
        let run = |c: usize| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(c as u64);
            let count = self.chunk_size.min(n - c * self.chunk_size);
            work(&mut rng, count)
        };
        if self.parallel {
            (0..chunks).into_par_iter().map(run).collect()
        } else {
            (0..chunks).map(run).collect()
        }
    }

    fn sample_vec<F>(&self, n: usize, draw: F) -> Result<Vec<f64>>
    where
        F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
    {
        let parts = self.chunked(n, |rng, count| (0..count).map(|_| draw(rng)).collect::<Result<Vec<f64>>>())?;
        Ok(parts.concat())
    }
}

/// Mean and standard error of `values`.
pub fn estimate(values: &[f64], seed: u64) -> McEstimate {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n.max(1) as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    McEstimate {
        mean,
        stderr: (var / n.max(1) as f64).sqrt(),
        n,
        seed,
    }
}

/// `E[exp(-s X)]` from samples of `X`.
pub fn laplace_estimate(values: &[f64], s: f64, seed: u64) -> McEstimate {
    let e: Vec<f64> = values.iter().map(|v| (-s * v).exp()).collect();
    estimate(&e, seed)
}

/// Self-normalized weighted mean of `values`, its delta-method standard
/// error, and the effective sample size.
pub fn weighted_estimate(values: &[f64], weights: &[f64], seed: u64) -> (McEstimate, f64) {
    let sw: f64 = weights.iter().sum();
    let sw2: f64 = weights.iter().map(|w| w * w).sum();
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / sw;
    let var = values
        .iter()
        .zip(weights)
        .map(|(v, w)| (w * (v - mean)).powi(2))
        .sum::<f64>()
        / (sw * sw);
    let ess = if sw2 > 0.0 { sw * sw / sw2 } else { 0.0 };
    (
        McEstimate {
            mean,
            stderr: var.sqrt(),
            n: values.len(),
            seed,
        },
        ess,
    )
}

/// First-order gap between the minimum of `L` over `[0, 1]` and the minimum
/// of its skeleton on a grid of mesh `dt`: `-zeta(1 - 1/alpha) E[L_1^-] dt^(1/alpha)`.
pub fn grid_gap(alpha: StableIndex, dt: f64) -> f64 {
    let a = alpha.alpha();
    let zeta = Float::with_val(64, 1.0 - 1.0 / a).zeta().to_f64();
    let negative_part = gamma(1.0 - 1.0 / a) * (std::f64::consts::PI / a).sin() / std::f64::consts::PI;
    -zeta * negative_part * dt.powf(1.0 / a)
}

/// Both sides of the distributional identity between the area of `L` over
/// `[0, 1]` and `(1 + alpha)^(-1/alpha) L_1`, as Laplace transforms at `q`.
/// Smallest step count (at least 100) whose [`grid_gap`] is at most `max_gap`.
pub fn steps_for_gap(alpha: StableIndex, max_gap: f64) -> Result<usize> {
    if !(max_gap > 0.0 && max_gap.is_finite()) {
        return Err(invalid("max_gap must be positive"));
    }
    // grid_gap is c dt^(1/alpha)
    let c = grid_gap(alpha, 1.0);
    let n = (c / max_gap).powf(alpha.alpha()).ceil() as usize;
    let mut n = n.max(100);
    while grid_gap(alpha, 1.0 / n as f64) > max_gap {
        n += 1;
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaIdentity {
    pub q: f64,
    pub path_side: McEstimate,
    pub scaled_side: McEstimate,
}

impl AreaIdentity {
    pub fn z_score(&self) -> f64 {
        self.path_side.z_against(&self.scaled_side)
    }
}

pub fn area_identity_check(
    alpha: StableIndex,
    n_samples: usize,
    n_steps: usize,
    qs: &[f64],
    mc: &McConfig,
) -> Result<Vec<AreaIdentity>> {
    if n_samples < 1000 {
        return Err(invalid("area_identity_check needs at least 1000 samples"));
    }
    paths::check_steps(n_steps)?;
    let inc = StableIncrements::new(alpha, 1.0 / n_steps as f64);
    let unit = StableIncrements::new(alpha, 1.0);
    let scale = alpha.one_plus().powf(-1.0 / alpha.alpha());
    let pairs = mc.chunked(n_samples, |rng, count| {
        Ok((0..count)
            .map(|_| (paths::free_area(&inc, n_steps, rng).0, scale * unit.sample(rng)))
            .collect::<Vec<_>>())
    })?;
    let (areas, scaled): (Vec<f64>, Vec<f64>) = pairs.concat().into_iter().unzip();
    Ok(qs
        .iter()
        .map(|&q| AreaIdentity {
            q,
            path_side: laplace_estimate(&areas, q, mc.seed),
            scaled_side: laplace_estimate(&scaled, q, mc.seed),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageConfig {
    pub dt: f64,
    pub horizon: f64,
    /// Raise the barrier by [`grid_gap`] to offset crossings missed between grid points.
    pub gap_correction: bool,
    /// Largest tolerated total bound from paths alive at the horizon, in standard errors.
    pub horizon_tolerance: f64,
}

impl Default for PassageConfig {
    fn default() -> Self {
        PassageConfig {
            dt: 1e-3,
            horizon: 50.0,
            gap_correction: true,
            horizon_tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageEstimate {
    pub estimate: McEstimate,
    /// Paths still above zero at the horizon.
    pub horizon_paths: usize,
    /// Upper bound on the part of the mean carried by those paths.
    pub horizon_bound: f64,
}

/// `E_z[exp(-lambda T_0 - mu int_0^T_0 L)]` by simulation.
pub fn first_passage_functional(
    alpha: StableIndex,
    z: f64,
    lambda: f64,
    mu: f64,
    n_samples: usize,
    cfg: &PassageConfig,
    mc: &McConfig,
) -> Result<PassageEstimate> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(invalid(format!("starting level must be positive, got {z}")));
    }
    if !(lambda >= 0.0 && mu >= 0.0) {
        return Err(invalid("lambda and mu must be non-negative"));
    }
    if !(cfg.dt > 0.0 && cfg.horizon > cfg.dt) {
        return Err(invalid("need 0 < dt < horizon"));
    }
    if n_samples < 2 {
        return Err(invalid("need at least two samples"));
    }
    let inc = StableIncrements::new(alpha, cfg.dt);
    let gap = if cfg.gap_correction { grid_gap(alpha, cfg.dt) } else { 0.0 };
    let outcomes = mc.chunked(n_samples, |rng, count| {
        Ok((0..count)
            .map(|_| paths::passage(&inc, z, lambda, mu, cfg.horizon, gap, rng))
            .collect::<Vec<_>>())
    })?;
    let mut values = Vec::with_capacity(n_samples);
    let mut horizon_paths = 0;
    let mut horizon_sum = 0.0;
    for o in outcomes.into_iter().flatten() {
        match o {
            paths::Passage::Settled(v) => values.push(v),
            paths::Passage::Horizon(bound) => {
                horizon_paths += 1;
                horizon_sum += bound;
                values.push(0.0);
            }
        }
    }
    let est = estimate(&values, mc.seed);
    let horizon_bound = horizon_sum / n_samples as f64;
    if horizon_bound > cfg.horizon_tolerance * est.stderr.max(f64::EPSILON) {
        return Err(Error::HorizonExceeded {
            absorbed: n_samples - horizon_paths,
            total: n_samples,
        });
    }
    Ok(PassageEstimate {
        estimate: est,
        horizon_paths,
        horizon_bound,
    })
}

/// Excursion areas, each raised by [`grid_gap`].
pub fn excursion_areas(
    alpha: StableIndex,
    n_samples: usize,
    n_steps: usize,
    window: BridgeWindow,
    mc: &McConfig,
) -> Result<Vec<f64>> {
    paths::check_steps(n_steps)?;
    let gap = grid_gap(alpha, 1.0 / n_steps as f64);
    mc.sample_vec(n_samples, |rng| {
        Ok(sample_excursion_with(alpha, n_steps, window, rng)?.area + gap)
    })
}

/// Meander areas, each raised by [`grid_gap`].
pub fn meander_areas(alpha: StableIndex, n_samples: usize, n_steps: usize, mc: &McConfig) -> Result<Vec<f64>> {
    paths::check_steps(n_steps)?;
    let gap = grid_gap(alpha, 1.0 / n_steps as f64);
    mc.sample_vec(n_samples, |rng| Ok(sample_meander(alpha, n_steps, rng)?.area + gap))
}

/// Areas of unconditioned paths from `x0` with their h-transform weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAreas {
    pub areas: Vec<f64>,
    pub weights: Vec<f64>,
}

impl WeightedAreas {
    pub fn ess(&self) -> f64 {
        let sw: f64 = self.weights.iter().sum();
        let sw2: f64 = self.weights.iter().map(|w| w * w).sum();
        if sw2 > 0.0 {
            sw * sw / sw2
        } else {
            0.0
        }
    }

    pub fn laplace(&self, s: f64, seed: u64) -> McEstimate {
        let e: Vec<f64> = self.areas.iter().map(|a| (-s * a).exp()).collect();
        weighted_estimate(&e, &self.weights, seed).0
    }
}

/// Smallest effective sample size accepted from weighted samples.
pub const MIN_ESS: f64 = 100.0;

fn conditioned_paths<T, F>(
    alpha: StableIndex,
    x0: f64,
    n_steps: usize,
    n_samples: usize,
    mc: &McConfig,
    map: F,
) -> Result<Vec<(T, f64)>>
where
    T: Send,
    F: Fn(PathSample) -> T + Sync,
{
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(invalid(format!("x0 must be positive, got {x0}")));
    }
    paths::check_steps(n_steps)?;
    // Killing the skeleton at 0 acts like killing L at -gap, whose harmonic function is x + gap.
    let gap = grid_gap(alpha, 1.0 / n_steps as f64);
    let parts = mc.chunked(n_samples, |rng, count| {
        let mut out = Vec::new();
        for _ in 0..count {
            let mut p = sample_killed(alpha, x0, n_steps, rng)?;
            if p.t_hit.is_none() {
                let w = (p.values[n_steps] + gap) / (x0 + gap);
                p.area += gap;
                out.push((map(p), w));
            }
        }
        Ok(out)
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Areas under the law of `L` conditioned to stay positive, as weighted
/// survivors among `n_samples` paths from `x0`.
pub fn conditioned_areas(
    alpha: StableIndex,
    x0: f64,
    n_samples: usize,
    n_steps: usize,
    mc: &McConfig,
) -> Result<WeightedAreas> {
    let pairs = conditioned_paths(alpha, x0, n_steps, n_samples, mc, |p| p.area)?;
    let (areas, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let w = WeightedAreas { areas, weights };
    let ess = w.ess();
    if ess < MIN_ESS {
        return Err(Error::DegenerateWeights { ess, min: MIN_ESS });
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionedEstimate {
    /// Self-normalized estimate of the conditioned expectation.
    pub estimate: McEstimate,
    /// Plain mean of the weights over all paths, 1 in expectation.
    pub weight_mean: McEstimate,
    pub ess: f64,
}

/// `E^up[functional]` on `[0, 1]` from paths started at `x0`, weighted by
/// the harmonic function at time 1. The functional sees gap-corrected areas.
pub fn sample_conditioned_weighted<F>(
    alpha: StableIndex,
    x0: f64,
    n_steps: usize,
    n_samples: usize,
    functional: F,
    mc: &McConfig,
) -> Result<ConditionedEstimate>
where
    F: Fn(&PathSample) -> f64 + Sync,
{
    let pairs = conditioned_paths(alpha, x0, n_steps, n_samples, mc, |p| functional(&p))?;
    let (values, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (est, ess) = weighted_estimate(&values, &weights, mc.seed);
    if ess < MIN_ESS {
        return Err(Error::DegenerateWeights { ess, min: MIN_ESS });
    }
    let mut all = weights;
    all.resize(n_samples, 0.0);
    Ok(ConditionedEstimate {
        estimate: est,
        weight_mean: estimate(&all, mc.seed),
        ess,
    })
}

/// Samples of `L_dt`, for checking the normalization.
pub fn increments(alpha: StableIndex, dt: f64, n_samples: usize, mc: &McConfig) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt must be positive"));
    }
    let inc = StableIncrements::new(alpha, dt);
    mc.sample_vec(n_samples, |rng| Ok(inc.sample(rng)))
}

#[cfg(test)]
mod tests;
