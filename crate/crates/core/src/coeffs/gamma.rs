//! Gamma function in double precision (Lanczos below 10, Stirling above) and
//! thin wrappers over MPFR for the extended-precision paths.

use std::f64::consts::PI;

use rug::Float;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// B_{2k} / (2k (2k-1)) for the Stirling tail.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `sin(pi x)` with the argument reduced exactly, so it stays accurate near integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    // r in [-1, 1]
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * r).sin()
}

fn lanczos_positive(x: f64) -> f64 {
    // valid for x >= 0.5
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

fn stirling_ln(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr
}

/// Euler's Gamma function. Returns `NaN` at the poles.
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() || is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma(1.0 - x));
    }
    if x == x.floor() && x <= 30.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    if x < 10.0 {
        lanczos_positive(x)
    } else if x > 171.7 {
        f64::INFINITY
    } else {
        stirling_ln(x).exp()
    }
}

/// `ln |Gamma(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return (PI / sin_pi(x).abs()).ln() - ln_gamma(1.0 - x);
    }
    if x < 10.0 {
        lanczos_positive(x).ln()
    } else {
        stirling_ln(x)
    }
}

/// Sign of `Gamma(x)`; zero at the poles.
pub fn gamma_sign(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else if x > 0.0 {
        1.0
    } else if (x.floor() as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `1 / Gamma(x)`, which is entire: zero at the nonpositive integers.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else if x > 171.0 {
        gamma_sign(x) * (-ln_gamma(x)).exp()
    } else {
        1.0 / gamma(x)
    }
}

/// Pochhammer symbol `(x)_n = x (x+1) ... (x+n-1)`, with `(x)_0 = 1`.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + k as f64))
}

/// MPFR Gamma at the precision of `x`.
pub fn gamma_mp(x: &Float) -> Float {
    x.clone().gamma()
}

/// Reciprocal Gamma in extended precision, exactly zero at the poles.
pub fn rgamma_mp(x: &Float) -> Float {
    if x.is_integer() && *x <= 0 {
        return Float::new(x.prec());
    }
    let g = x.clone().gamma();
    Float::with_val(x.prec(), 1) / g
}

/// `Gamma(m + 1/2) / sqrt(pi) = (2m)! / (4^m m!)` as an exact rational.
pub fn half_integer_gamma_over_sqrt_pi(m: u32) -> rug::Rational {
    let mut num = rug::Integer::from(1);
    // (1/2)(3/2)...(m - 1/2) = (1*3*...*(2m-1)) / 2^m
    for k in 0..m {
        num *= 2 * k + 1;
    }
    rug::Rational::from((num, rug::Integer::from(1) << m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn known_values() {
        assert!(rel(gamma(0.5), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(1.0 / 3.0), 2.678_938_534_707_747_6) < 1e-14);
        assert!(rel(gamma(2.0 / 3.0), 1.354_117_939_426_400_4) < 1e-14);
        assert_eq!(gamma(5.0), 24.0);
        assert!(rel(gamma(-0.5), -2.0 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma(-2.0 / 3.0), -4.018_407_802_061_621_5) < 1e-13);
        assert!(rel(gamma(25.3), 1.622_777_117_670_872_9e24) < 1e-13);
        assert!(gamma(-3.0).is_nan());
    }

    #[test]
    fn agrees_with_mpfr() {
        for i in 1..400 {
            let x = -7.3 + 0.0743 * i as f64;
            if is_nonpositive_integer(x) {
                continue;
            }
            let reference = gamma_mp(&Float::with_val(128, x)).to_f64();
            assert!(rel(gamma(x), reference) < 5e-14, "x={x}");
            assert!((ln_gamma(x) - reference.abs().ln()).abs() < 1e-13 * reference.abs().ln().abs().max(1.0));
            assert_eq!(gamma_sign(x), reference.signum());
        }
    }

    #[test]
    fn reciprocal_vanishes_at_poles() {
        assert_eq!(rgamma(-4.0), 0.0);
        assert_eq!(rgamma(0.0), 0.0);
        assert!(rgamma_mp(&Float::with_val(64, -2)).is_zero());
        assert!(rel(rgamma(0.25), 1.0 / gamma(0.25)) < 1e-15);
    }

    #[test]
    fn half_integer_rationals() {
        // Gamma(7/2)/sqrt(pi) = 15/8
        assert_eq!(half_integer_gamma_over_sqrt_pi(3), rug::Rational::from((15, 8)));
        assert_eq!(half_integer_gamma_over_sqrt_pi(0), rug::Rational::from(1));
    }

    #[test]
    fn pochhammer_basic() {
        assert_eq!(pochhammer(0.5, 0), 1.0);
        assert_eq!(pochhammer(0.5, 3), 0.5 * 1.5 * 2.5);
    }
}
