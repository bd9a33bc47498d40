//! Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals, panelled
//! integration for oscillatory integrands, and semi-infinite tails.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// An integral value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Rule {
    q: Quad,
    // The estimate is at the roundoff floor and cannot shrink under bisection.
    at_floor: bool,
}

impl Quad {
    fn add(self, other: Quad) -> Quad {
        Quad {
            value: self.value + other.value,
            error: self.error + other.error,
        }
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Rule {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    let mut abs = kron.abs();
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * h;
    let raw = ((kron - gauss) * h).abs();
    // QUADPACK-style error scaling, floored by roundoff on the absolute integrand.
    let scaled = if raw > 0.0 {
        raw * (200.0 * raw / (abs * h.abs()).max(f64::MIN_POSITIVE)).powf(1.5).min(1.0)
    } else {
        0.0
    };
    let round = 50.0 * f64::EPSILON * abs * h.abs();
    Rule {
        q: Quad {
            value,
            error: scaled.max(round),
        },
        at_floor: scaled <= round,
    }
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    q: Quad,
    at_floor: bool,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.q.error == other.q.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.q.error.total_cmp(&other.q.error)
    }
}

/// Globally adaptive integration of `f` over `[a, b]` to `max(abs_tol, rel_tol |I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<Quad> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureFailure(format!("non-finite limits [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quad { value: 0.0, error: 0.0 });
    }
    let first_rule = kronrod(&mut f, a, b);
    let first = first_rule.q;
    if !first.value.is_finite() {
        return Err(Error::QuadratureFailure(format!("non-finite integrand on [{a}, {b}]")));
    }
    let mut total = first;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, q: first, at_floor: first_rule.at_floor });
    let mut segments = 1;
    while total.error > abs_tol.max(rel_tol * total.value.abs()) {
        if segments >= max_segments {
            return Err(Error::QuadratureFailure(format!(
                "error {:.3e} above tolerance after {segments} segments on [{a}, {b}]",
                total.error
            )));
        }
        let worst = heap.pop().expect("heap holds every segment");
        let mid = 0.5 * (worst.a + worst.b);
        if worst.at_floor || mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution; accept what we have.
            heap.push(worst);
            break;
        }
        let lr = kronrod(&mut f, worst.a, mid);
        let rr = kronrod(&mut f, mid, worst.b);
        let (left, right) = (lr.q, rr.q);
        if !(left.value.is_finite() && right.value.is_finite()) {
            return Err(Error::QuadratureFailure("non-finite integrand".into()));
        }
        total.value += left.value + right.value - worst.q.value;
        total.error += left.error + right.error - worst.q.error;
        heap.push(Segment { a: worst.a, b: mid, q: left, at_floor: lr.at_floor });
        heap.push(Segment { a: mid, b: worst.b, q: right, at_floor: rr.at_floor });
        segments += 1;
    }
    // Re-sum to shed the drift of incremental updates.
    let resummed = heap.iter().fold(Quad { value: 0.0, error: 0.0 }, |acc, s| acc.add(s.q));
    Ok(resummed)
}

/// Splits `[a, b]` into panels of width at most `width` and integrates each
/// adaptively, sharing the tolerance between panels.
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    width: f64,
    abs_tol: f64,
    max_segments: usize,
) -> Result<Quad> {
    let panels = (((b - a) / width).ceil() as usize).max(1);
    if panels > max_segments {
        return Err(Error::QuadratureFailure(format!(
            "{panels} panels needed on [{a}, {b}], budget {max_segments}"
        )));
    }
    let h = (b - a) / panels as f64;
    let per_panel = abs_tol / panels as f64;
    let budget = (max_segments / panels).max(8);
    let mut total = Quad { value: 0.0, error: 0.0 };
    for i in 0..panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == panels { b } else { lo + h };
        total = total.add(integrate(&mut f, lo, hi, per_panel, 0.0, budget)?);
    }
    Ok(total)
}

/// Integrates over `[a, inf)` by doubling panels until a panel contributes less than the tolerance.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    initial_width: f64,
    abs_tol: f64,
    max_segments: usize,
) -> Result<Quad> {
    let mut lo = a;
    let mut width = initial_width;
    let mut total = Quad { value: 0.0, error: 0.0 };
    for _ in 0..200 {
        let q = integrate(&mut f, lo, lo + width, abs_tol * 0.1, 0.0, max_segments)?;
        total = total.add(q);
        lo += width;
        if q.value.abs() < abs_tol * 0.1 && f(lo).abs() * width < abs_tol * 0.1 {
            return Ok(total);
        }
        width *= 2.0;
    }
    Err(Error::QuadratureFailure(format!("tail beyond {lo} did not decay")))
}
