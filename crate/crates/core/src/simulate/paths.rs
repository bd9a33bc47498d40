use rand::Rng;

use super::increments::StableIncrements;
use crate::error::{invalid, Error, Result};
use crate::index::StableIndex;

/// Skeleton of `L` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub dt: f64,
    pub values: Vec<f64>,
    /// First grid time at which the skeleton is `<= 0`, interpolated within the last step.
    pub t_hit: Option<f64>,
    /// Left-endpoint Riemann sum up to `min(t_hit, horizon)`.
    pub area: f64,
}

/// Pinning tolerance for bridges and the number of tries allowed per sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeWindow {
    /// Accepted endpoints satisfy `|L_1| <= epsilon`.
    pub epsilon: f64,
    pub max_attempts: u64,
}

impl Default for BridgeWindow {
    fn default() -> Self {
        BridgeWindow {
            epsilon: 0.05,
            max_attempts: 100_000,
        }
    }
}

pub(crate) fn check_steps(n_steps: usize) -> Result<()> {
    if n_steps < 100 {
        return Err(invalid(format!("n_steps must be at least 100, got {n_steps}")));
    }
    Ok(())
}

fn left_sum(values: &[f64], dt: f64) -> f64 {
    values[..values.len() - 1].iter().sum::<f64>() * dt
}

/// Normalized excursion of length one: a pinned bridge rotated at its minimum.
pub fn sample_excursion<R: Rng + ?Sized>(alpha: StableIndex, n_steps: usize, rng: &mut R) -> Result<PathSample> {
    sample_excursion_with(alpha, n_steps, BridgeWindow::default(), rng)
}

pub fn sample_excursion_with<R: Rng + ?Sized>(
    alpha: StableIndex,
    n_steps: usize,
    window: BridgeWindow,
    rng: &mut R,
) -> Result<PathSample> {
    check_steps(n_steps)?;
    if !(window.epsilon > 0.0) {
        return Err(invalid("bridge window must be positive"));
    }
    let dt = 1.0 / n_steps as f64;
    let inc = StableIncrements::new(alpha, dt);
    let mut steps = vec![0.0; n_steps];
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        if attempts > window.max_attempts {
            return Err(Error::RejectionBudgetExceeded { attempts: attempts - 1, accepted: 0 });
        }
        let mut total = 0.0;
        for s in steps.iter_mut() {
            *s = inc.sample(rng);
            total += *s;
        }
        // Gaussian increments minus their mean are an exact discrete bridge.
        if alpha.is_brownian() || total.abs() <= window.epsilon {
            let drift = total / n_steps as f64;
            steps.iter_mut().for_each(|s| *s -= drift);
            break;
        }
    }
    let mut bridge = Vec::with_capacity(n_steps + 1);
    let mut level = 0.0;
    bridge.push(0.0);
    for s in &steps {
        level += s;
        bridge.push(level);
    }
    bridge[n_steps] = 0.0;
    let (k, &low) = bridge[..n_steps]
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("bridge has at least one point");
    let values: Vec<f64> = (0..=n_steps).map(|j| bridge[(k + j) % n_steps] - low).collect();
    let area = left_sum(&values, dt);
    Ok(PathSample {
        dt,
        values,
        t_hit: None,
        area,
    })
}

/// Random-walk meander on `[0, 1]`: started at 0 and kept iff every later value is positive.
pub fn sample_meander<R: Rng + ?Sized>(alpha: StableIndex, n_steps: usize, rng: &mut R) -> Result<PathSample> {
    sample_meander_with(alpha, n_steps, 10_000_000, rng)
}

pub fn sample_meander_with<R: Rng + ?Sized>(
    alpha: StableIndex,
    n_steps: usize,
    max_attempts: u64,
    rng: &mut R,
) -> Result<PathSample> {
    check_steps(n_steps)?;
    let dt = 1.0 / n_steps as f64;
    let inc = StableIncrements::new(alpha, dt);
    let mut values = Vec::with_capacity(n_steps + 1);
    for _ in 0..max_attempts {
        values.clear();
        values.push(0.0);
        let mut level = 0.0;
        let mut alive = true;
        for _ in 0..n_steps {
            level += inc.sample(rng);
            if level <= 0.0 {
                alive = false;
                break;
            }
            values.push(level);
        }
        if alive {
            let area = left_sum(&values, dt);
            return Ok(PathSample {
                dt,
                values,
                t_hit: None,
                area,
            });
        }
    }
    Err(Error::RejectionBudgetExceeded {
        attempts: max_attempts,
        accepted: 0,
    })
}

/// Path from `x0` on `[0, 1]` without conditioning, stopped at the first
/// non-positive grid value.
pub fn sample_killed<R: Rng + ?Sized>(alpha: StableIndex, x0: f64, n_steps: usize, rng: &mut R) -> Result<PathSample> {
    check_steps(n_steps)?;
    let dt = 1.0 / n_steps as f64;
    let inc = StableIncrements::new(alpha, dt);
    let mut values = Vec::with_capacity(n_steps + 1);
    values.push(x0);
    let mut level = x0;
    let mut area = 0.0;
    for i in 0..n_steps {
        let next = level + inc.sample(rng);
        if next <= 0.0 {
            let frac = level / (level - next);
            area += level * frac * dt;
            values.push(next);
            return Ok(PathSample {
                dt,
                values,
                t_hit: Some((i as f64 + frac) * dt),
                area,
            });
        }
        area += level * dt;
        level = next;
        values.push(level);
    }
    Ok(PathSample {
        dt,
        values,
        t_hit: None,
        area,
    })
}

/// Outcome of one first-passage path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Passage {
    /// `exp(-lambda T_0 - mu area)` for an absorbed path, or a path whose
    /// discount fell below the cutoff.
    Settled(f64),
    /// Value at the horizon, an upper bound on the true contribution.
    Horizon(f64),
}

/// Discount below which a path stops contributing.
const DISCOUNT_CUTOFF: f64 = 40.0;

/// First passage below zero from `z`, with the barrier raised by `gap` to
/// compensate for crossings between grid points.
pub(crate) fn passage<R: Rng + ?Sized>(
    inc: &StableIncrements,
    z: f64,
    lambda: f64,
    mu: f64,
    horizon: f64,
    gap: f64,
    rng: &mut R,
) -> Passage {
    let dt = inc.dt();
    let max_steps = (horizon / dt).ceil() as u64;
    let mut level = z;
    let mut area = 0.0;
    for i in 0..max_steps {
        if level <= gap {
            return Passage::Settled((-lambda * i as f64 * dt - mu * area).exp());
        }
        let next = level + inc.sample(rng);
        if next <= gap {
            let frac = (level - gap) / (level - next);
            let t = (i as f64 + frac) * dt;
            area += level * frac * dt;
            return Passage::Settled((-lambda * t - mu * area).exp());
        }
        area += level * dt;
        level = next;
        let discount = lambda * (i + 1) as f64 * dt + mu * area;
        if discount > DISCOUNT_CUTOFF {
            return Passage::Settled(0.0);
        }
    }
    Passage::Horizon((-lambda * horizon - mu * area).exp())
}

/// Path on `[0, 1]` from zero; returns the left-endpoint area and `L_1`.
pub(crate) fn free_area<R: Rng + ?Sized>(inc: &StableIncrements, n_steps: usize, rng: &mut R) -> (f64, f64) {
    let mut level = 0.0;
    let mut sum = 0.0;
    for _ in 0..n_steps {
        sum += level;
        level += inc.sample(rng);
    }
    (sum * inc.dt(), level)
}
