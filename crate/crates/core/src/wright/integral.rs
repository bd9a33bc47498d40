//! Quadrature routes: the damped-cosine integral along the positive axis and
//! the same contour integral rotated onto the ray `arg z = pi/(1+alpha)`,
//! which still decays at `alpha = 2`.

use std::f64::consts::PI;

use super::WrightFn;
use crate::error::{Error, Result};
use crate::index::StableIndex;
use crate::quad::{integrate_panels, Quad};

/// Below this value of `sin(pi alpha / 2)` the damped-cosine integrand decays
/// too slowly and the ray form is used instead.
pub(crate) const MIN_DAMPING: f64 = 0.1;

/// Smallest `R` beyond which `r^k exp(log_env(r))` stays below `floor` and keeps decreasing.
fn truncation<F: Fn(f64) -> f64>(log_env: F, k: i32, floor: f64) -> f64 {
    let log_floor = floor.ln();
    let weight = |r: f64| log_env(r) + if k > 0 { k as f64 * r.max(1e-300).ln() } else { 0.0 };
    let mut r = 0.5;
    for _ in 0..200 {
        let here = weight(r) + (r + 1.0).ln();
        let ahead = weight(1.1 * r);
        if here < log_floor && ahead < weight(r) {
            return r;
        }
        r *= 1.25;
    }
    r
}

/// `Phi` or `Phi'` from the integral along the positive real axis.
pub(crate) fn damped_cosine(alpha: StableIndex, x: f64, derivative: bool, tol: f64, max_segments: usize) -> Result<Quad> {
    let a = alpha.alpha();
    let damping = (PI * a / 2.0).sin();
    if damping < MIN_DAMPING {
        return Err(Error::QuadratureFailure(format!(
            "damping sin(pi alpha/2) = {damping:.3e} too small for the axis integral"
        )));
    }
    let twist = (PI * a / 2.0).cos();
    let op = alpha.one_plus();
    let z_max = truncation(|z| -damping * z.powf(op) / op, i32::from(derivative), tol * 1e-2);
    let freq = x.abs() + twist.abs() * z_max.powf(a) + 1.0;
    let width = (PI / (4.0 * freq)).min(z_max / 4.0);
    let q = integrate_panels(
        |z| {
            let u = z.powf(op) / op;
            let env = (-damping * u).exp();
            if derivative {
                env * z * (twist * u - z * x).sin()
            } else {
                env * (twist * u - z * x).cos()
            }
        },
        0.0,
        z_max,
        width,
        tol * PI * 0.5,
        max_segments,
    )?;
    Ok(Quad {
        value: q.value / PI,
        error: q.error / PI + tol * 0.01,
    })
}

/// Any of the four functions from the rotated-ray integral.
pub(crate) fn ray(alpha: StableIndex, x: f64, f: WrightFn, tol: f64, max_segments: usize) -> Result<Quad> {
    let op = alpha.one_plus();
    let theta = PI / op;
    let (st, ct) = theta.sin_cos();
    let k = i32::from(f.is_derivative());
    let r_max = truncation(|r| -r.powf(op) / op - x * r * ct, k, tol * 1e-2);
    let freq = x.abs() * st + 1.0;
    let width = (PI / (4.0 * freq)).min(r_max / 4.0);
    // Phi = Im, Psi = Re of omega^(1+k) e^{-i x r sin(theta)}; derivatives carry -r.
    let phase0 = theta * (1 + k) as f64;
    let q = integrate_panels(
        |r| {
            let env = (-r.powf(op) / op - x * r * ct).exp();
            let ph = phase0 - x * r * st;
            let v = match f {
                WrightFn::Phi | WrightFn::PhiPrime => ph.sin(),
                WrightFn::Psi | WrightFn::PsiPrime => ph.cos(),
            };
            if k == 1 {
                -r * env * v
            } else {
                env * v
            }
        },
        0.0,
        r_max,
        width,
        tol * PI * 0.5,
        max_segments,
    )?;
    Ok(Quad {
        value: q.value / PI,
        error: q.error / PI + tol * 0.01,
    })
}

const AIRY_TOL: f64 = 1e-14;
const AIRY_SEGMENTS: usize = 20_000;

fn airy_ray<F: Fn(f64) -> f64>(x: f64, integrand: F) -> Result<f64> {
    let r_max = truncation(|r| -r * r * r / 3.0 - 0.5 * x * r, 1, AIRY_TOL * 1e-3);
    let width = (PI / (4.0 * (x.abs() * 0.75f64.sqrt() + 1.0))).min(r_max / 8.0);
    let q = integrate_panels(integrand, 0.0, r_max, width, AIRY_TOL, AIRY_SEGMENTS).map_err(|e| {
        Error::NonConvergence {
            what: "wright::airy_reference",
            detail: e.to_string(),
        }
    })?;
    Ok(q.value / PI)
}

/// `Ai(x)` by quadrature of the cubic-exponential contour integral rotated onto
/// `arg z = pi/3`. Shares no code with the series or asymptotic routes.
pub fn airy_reference(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(crate::error::invalid("airy_reference needs finite x"));
    }
    let s = 0.75f64.sqrt();
    airy_ray(x, |r| (-r * r * r / 3.0 - 0.5 * x * r).exp() * (PI / 3.0 - x * r * s).sin())
}

/// `Ai'(x)` by the same rotated quadrature.
pub fn airy_prime_reference(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(crate::error::invalid("airy_prime_reference needs finite x"));
    }
    let s = 0.75f64.sqrt();
    airy_ray(x, |r| -r * (-r * r * r / 3.0 - 0.5 * x * r).exp() * (2.0 * PI / 3.0 - x * r * s).sin())
}

/// `int_x^inf Ai` by integrating the rotated representation in `x` first.
pub fn airy_tail_integral(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(crate::error::invalid("airy_tail_integral needs finite x"));
    }
    let s = 0.75f64.sqrt();
    let inner = airy_ray(x, |r| {
        if r == 0.0 {
            return x * s;
        }
        (-r * r * r / 3.0 - 0.5 * x * r).exp() * (x * r * s).sin() / r
    })?;
    Ok(1.0 / 3.0 - inner)
}
