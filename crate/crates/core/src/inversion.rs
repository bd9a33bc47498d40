//! Numerical inversion of the single Laplace transforms in time that encode
//! the area laws, giving `s -> E[exp(-s A)]` and density estimates.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::Float;

use crate::error::{invalid, Error, Result};
use crate::index::StableIndex;
use crate::mp::MpComplex;
use crate::wright;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Law {
    Excursion,
    Meander,
    Conditioned,
}

impl Law {
    pub const ALL: [Law; 3] = [Law::Excursion, Law::Meander, Law::Conditioned];

    pub fn tag(self) -> &'static str {
        match self {
            Law::Excursion => "ex",
            Law::Meander => "me",
            Law::Conditioned => "up",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Law {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex" | "excursion" => Ok(Law::Excursion),
            "me" | "meander" => Ok(Law::Meander),
            "up" | "conditioned" => Ok(Law::Conditioned),
            other => Err(invalid(format!("unknown law {other:?}; expected ex, me or up"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Gaver-Stehfest weights on real nodes `k ln2 / t`.
    RealNode,
    /// Trapezoidal rule on a parabolic Bromwich contour.
    DeformedContour,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InversionConfig {
    pub method: Method,
    pub node_count: usize,
    /// Mantissa for the weighted sums; 0 picks it from `node_count`.
    pub precision_bits: u32,
    /// Bound on the real part of the image's singularities.
    pub singularity_abscissa: f64,
    /// Largest accepted change, relative to `max(|value|, 1e-3)`, between `node_count` and its double.
    pub tolerance: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            method: Method::RealNode,
            node_count: 40,
            precision_bits: 0,
            singularity_abscissa: 0.0,
            tolerance: 1e-6,
        }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(invalid("node_count must be at least 8"));
        }
        if self.method == Method::RealNode && self.node_count % 2 == 1 {
            return Err(invalid("real-node summation needs an even node_count"));
        }
        if self.singularity_abscissa > 0.0 {
            return Err(invalid("the images here have no singularities in the right half-plane"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        Ok(())
    }

    fn bits(&self, nodes: usize) -> u32 {
        if self.precision_bits > 0 {
            return self.precision_bits;
        }
        match self.method {
            // ~2.2 M digits for M = nodes/2
            Method::RealNode => (2.2 * (nodes / 2) as f64 * 3.33).ceil() as u32 + 48,
            Method::DeformedContour => 96,
        }
    }
}

/// An inverted value and the change observed when the node count doubles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inverted {
    pub value: f64,
    pub abs_error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceCurve {
    pub law: Law,
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Stehfest weights `V_1..=V_N` for `N = 2M`, exact in rationals then rounded.
fn stehfest_weights(nodes: usize, bits: u32) -> Vec<Float> {
    use rug::{Integer, Rational};
    let m = nodes / 2;
    let fact = |n: usize| Integer::from(Integer::factorial(n as u32));
    (1..=nodes)
        .map(|k| {
            let mut v = Rational::new();
            for j in k.div_ceil(2)..=k.min(m) {
                let num = Integer::from(Integer::u_pow_u(j as u32, m as u32)) * fact(2 * j);
                let den = fact(m - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k);
                v += Rational::from((num, den));
            }
            if (k + m) % 2 == 1 {
                v = -v;
            }
            Float::with_val(bits, &v)
        })
        .collect()
}

/// `log2 |lambda|^(1+1/alpha)`: bits lost to cancellation in the images.
fn cancellation_bits(alpha: StableIndex, lambda_max: f64) -> u32 {
    (lambda_max.max(1.0).log2() * (1.0 + 1.0 / alpha.alpha())).ceil() as u32 + 8
}

/// Image of `law` at a real MPFR point.
fn image_real(law: Law, alpha: StableIndex, lambda: &Float, rel_bits: u32) -> Float {
    let bits = lambda.prec();
    let q = wright::quartet_mp(alpha, lambda, rel_bits);
    let a = alpha.alpha();
    let ld = Float::with_val(bits, &q.phi_prime / &q.phi);
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    match law {
        Law::Excursion => {
            let g = Float::with_val(bits, -1.0 / a).gamma();
            let root = Float::with_val(bits, lambda.ln_ref()) / a;
            g * (ld + root.exp())
        }
        Law::Meander => {
            let g = Float::with_val(bits, 1.0 - 1.0 / a).gamma();
            let h = Float::with_val(bits, &q.psi_prime - Float::with_val(bits, &ld * &q.psi)) * &pi;
            g * h
        }
        Law::Conditioned => {
            let h = Float::with_val(bits, &q.psi_prime - Float::with_val(bits, &ld * &q.psi)) * &pi;
            -(Float::with_val(bits, lambda * &h) + ld)
        }
    }
}

/// Image of `law` at a complex MPFR point.
fn image_complex(law: Law, alpha: StableIndex, lambda: &MpComplex, rel_bits: u32) -> MpComplex {
    let bits = lambda.prec();
    let q = wright::quartet_mp_complex(alpha, lambda, rel_bits);
    let a = alpha.alpha();
    let ld = q.phi_prime.div(&q.phi);
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let h = || q.psi_prime.sub(&ld.mul(&q.psi)).scale(&pi);
    match law {
        Law::Excursion => {
            let g = Float::with_val(bits, -1.0 / a).gamma();
            ld.add(&lambda.powf(1.0 / a)).scale(&g)
        }
        Law::Meander => {
            let g = Float::with_val(bits, 1.0 - 1.0 / a).gamma();
            h().scale(&g)
        }
        Law::Conditioned => {
            let minus = Float::with_val(bits, -1);
            lambda.mul(&h()).add(&ld).scale(&minus)
        }
    }
}

/// Inverse transform of the image at time `t` by Gaver-Stehfest.
fn stehfest(law: Law, alpha: StableIndex, t: &Float, nodes: usize, bits: u32) -> Float {
    let weights = stehfest_weights(nodes, bits);
    let ln2 = Float::with_val(bits, rug::float::Constant::Log2);
    let step = Float::with_val(bits, &ln2 / t);
    let lambda_max = step.to_f64() * nodes as f64;
    let rel_bits = bits + cancellation_bits(alpha, lambda_max);
    let mut sum = Float::new(bits + 32);
    for (k, v) in weights.iter().enumerate() {
        let lambda = Float::with_val(rel_bits + 32, &step * (k as u32 + 1));
        let img = image_real(law, alpha, &lambda, rel_bits);
        sum += Float::with_val(bits + 32, v * &img);
    }
    Float::with_val(bits, sum * step)
}

/// Inverse transform at `t` on the parabola `lambda(u) = N/t (0.1309 - 0.1194 u^2 + 0.25 i u)`.
fn parabola(law: Law, alpha: StableIndex, t: f64, nodes: usize, bits: u32) -> Float {
    let n = nodes as f64;
    let h = 2.0 * PI / n;
    let mut sum = Float::new(bits);
    // Conjugate symmetry: sum the upper half and take twice the imaginary part.
    for k in 0..nodes / 2 {
        let u = (k as f64 + 0.5) * h;
        let z = MpComplex::from_parts(
            Float::with_val(bits, n * (0.1309 - 0.1194 * u * u)),
            Float::with_val(bits, n * 0.25 * u),
        );
        let dz = MpComplex::from_parts(Float::with_val(bits, -n * 0.2388 * u), Float::with_val(bits, n * 0.25));
        let tt = Float::with_val(bits, t);
        let lambda = MpComplex::from_parts(Float::with_val(bits, &z.re / &tt), Float::with_val(bits, &z.im / &tt));
        let img = image_complex(law, alpha, &lambda, bits);
        let ez = Float::with_val(bits, z.re.exp_ref());
        let (s, c) = Float::with_val(bits, &z.im).sin_cos(Float::new(bits));
        let e = MpComplex::from_parts(Float::with_val(bits, &ez * &c), Float::with_val(bits, &ez * &s));
        let term = e.mul(&img).mul(&dz);
        sum += &term.im;
    }
    let scale = Float::with_val(bits, h / (PI * t));
    sum * scale
}

/// The inverted time function at `t` (before mapping to the area transform).
fn time_function(law: Law, alpha: StableIndex, t: &Float, nodes: usize, cfg: &InversionConfig) -> Float {
    let bits = cfg.bits(nodes);
    match cfg.method {
        Method::RealNode => stehfest(law, alpha, &Float::with_val(bits, t), nodes, bits),
        Method::DeformedContour => parabola(law, alpha, t.to_f64(), nodes, bits),
    }
}

/// `E[exp(-s A)]` from the inverted time function at `t = s^(alpha/(alpha+1))`.
fn area_transform(law: Law, alpha: StableIndex, s: &Float, nodes: usize, cfg: &InversionConfig) -> Float {
    let bits = cfg.bits(nodes).max(s.prec());
    let a = alpha.alpha();
    let t = Float::with_val(bits, s.ln_ref()) * (a / (a + 1.0));
    let t = t.exp();
    let k = time_function(law, alpha, &t, nodes, cfg);
    match law {
        Law::Excursion => 1 - Float::with_val(bits, s * &k),
        Law::Meander => {
            let w = Float::with_val(bits, t.ln_ref()) / a;
            k * w.exp()
        }
        Law::Conditioned => k,
    }
}

fn check(s: f64, cfg: &InversionConfig) -> Result<()> {
    cfg.validate()?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid(format!("s must be positive, got {s}")));
    }
    Ok(())
}

/// `E[exp(-s A_law)]` with the change under doubling of the node count.
pub fn invert(law: Law, alpha: StableIndex, s: f64, cfg: &InversionConfig) -> Result<Inverted> {
    check(s, cfg)?;
    let n = cfg.node_count;
    let sf = Float::with_val(cfg.bits(2 * n), s);
    let coarse = area_transform(law, alpha, &sf, n, cfg).to_f64();
    let fine = area_transform(law, alpha, &sf, 2 * n, cfg).to_f64();
    if !(coarse.is_finite() && fine.is_finite()) {
        return Err(Error::InversionUnstable(format!("non-finite value at s = {s}")));
    }
    let diff = (fine - coarse).abs();
    if diff > cfg.tolerance * fine.abs().max(1e-3) {
        return Err(Error::InversionUnstable(format!(
            "{law} at s = {s}: {coarse} with {n} nodes, {fine} with {}",
            2 * n
        )));
    }
    Ok(Inverted {
        value: fine,
        abs_error_estimate: diff,
    })
}

/// `E[exp(-s A)]` at a single node count, with no stability check.
pub fn invert_once(law: Law, alpha: StableIndex, s: f64, cfg: &InversionConfig) -> Result<f64> {
    check(s, cfg)?;
    let sf = Float::with_val(cfg.bits(cfg.node_count), s);
    Ok(area_transform(law, alpha, &sf, cfg.node_count, cfg).to_f64())
}

pub fn invert_excursion(alpha: StableIndex, s: f64, cfg: &InversionConfig) -> Result<f64> {
    invert(Law::Excursion, alpha, s, cfg).map(|r| r.value)
}

pub fn invert_meander(alpha: StableIndex, s: f64, cfg: &InversionConfig) -> Result<f64> {
    invert(Law::Meander, alpha, s, cfg).map(|r| r.value)
}

pub fn invert_conditioned(alpha: StableIndex, s: f64, cfg: &InversionConfig) -> Result<f64> {
    invert(Law::Conditioned, alpha, s, cfg).map(|r| r.value)
}

/// Geometric grid of `n` points on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && n >= 1) {
        return Err(invalid("grid needs 0 < lo <= hi and n >= 1"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    Ok((0..n).map(|i| lo * (r * i as f64).exp()).collect())
}

/// The area transform of `law` on a grid of `s`, evaluated in parallel.
pub fn laplace_curve(law: Law, alpha: StableIndex, s_grid: &[f64], cfg: &InversionConfig) -> Result<LaplaceCurve> {
    let results: Result<Vec<Inverted>> = s_grid.par_iter().map(|&s| invert(law, alpha, s, cfg)).collect();
    let results = results?;
    Ok(LaplaceCurve {
        law,
        s_grid: s_grid.to_vec(),
        values: results.iter().map(|r| r.value).collect(),
        errors: results.iter().map(|r| r.abs_error_estimate).collect(),
    })
}

/// Outer node count for the second inversion in `s`.
const DENSITY_OUTER_NODES: usize = 14;

/// Density of `A_law` at `x` by a second Gaver-Stehfest inversion in `s`.
/// Offered for `alpha` in `[1.3, 2]` only.
pub fn density_estimate(law: Law, alpha: StableIndex, x: f64, cfg: &InversionConfig) -> Result<f64> {
    cfg.validate()?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(invalid(format!("x must be positive, got {x}")));
    }
    if alpha.alpha() < 1.3 {
        return Err(invalid("density_estimate is offered for alpha in [1.3, 2] only"));
    }
    let inner = InversionConfig {
        method: Method::RealNode,
        ..cfg.clone()
    };
    let outer = DENSITY_OUTER_NODES;
    let bits = inner.bits(inner.node_count);
    let weights = stehfest_weights(outer, bits);
    let ln2 = Float::with_val(bits, rug::float::Constant::Log2);
    let step = Float::with_val(bits, &ln2 / x);
    let terms: Vec<Float> = weights
        .par_iter()
        .enumerate()
        .map(|(k, v)| {
            let s = Float::with_val(bits, &step * (k as u32 + 1));
            let lt = area_transform(law, alpha, &s, inner.node_count, &inner);
            Float::with_val(bits, v * &lt)
        })
        .collect();
    let mut sum = Float::new(bits);
    for t in terms {
        sum += t;
    }
    let d = (sum * step).to_f64();
    if !d.is_finite() {
        return Err(Error::InversionUnstable(format!("density of {law} at x = {x}")));
    }
    Ok(d.max(0.0))
}
