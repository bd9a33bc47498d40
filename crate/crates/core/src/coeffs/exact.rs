//! Exact rational evaluation of `B_{n,k}` and `c_p` for rational `alpha`.
//! `Gamma(m + 1/2)` is reduced to `sqrt(pi)` times a rational, so every `c_p`
//! is rational whenever `alpha` is.

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::gamma::half_integer_gamma_over_sqrt_pi;
use crate::error::{invalid, Result};

/// Parses a decimal literal such as `2`, `1.5`, `-0.125`, `3e-2` or `7/5` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if t.is_empty() || t.len() > 64 {
        return Err(invalid(format!("not a rational literal: {text:?}")));
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: Integer = parse_integer(num)?;
        let d: Integer = parse_integer(den)?;
        if d == 0 {
            return Err(invalid("zero denominator"));
        }
        return Ok(Rational::from((n, d)));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..]
                .parse()
                .map_err(|_| invalid(format!("bad exponent in {text:?}")))?;
            if e.unsigned_abs() > 400 {
                return Err(invalid("exponent out of range"));
            }
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(invalid(format!("not a rational literal: {text:?}")));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(invalid(format!("not a rational literal: {text:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = Integer::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10)
        .map_err(|_| invalid(format!("not a rational literal: {text:?}")))?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = Integer::from(10);
    Ok(if scale >= 0 {
        Rational::from(num * Integer::from(ten.pow(scale as u32)))
    } else {
        Rational::from((num, Integer::from(ten.pow((-scale) as u32))))
    })
}

fn parse_integer(s: &str) -> Result<Integer> {
    let s = s.trim();
    let body = s.strip_prefix('-').unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid(format!("not an integer: {s:?}")));
    }
    Integer::from_str_radix(s, 10).map_err(|_| invalid(format!("not an integer: {s:?}")))
}

fn check_alpha(alpha: &Rational) -> Result<()> {
    if *alpha <= 1 || *alpha > 2 {
        return Err(invalid("stability index must lie in (1, 2]"));
    }
    Ok(())
}

/// Scaled triangle `B_{n,k}/n!` for `n <= n_max`.
fn scaled_triangle(alpha: &Rational, n_max: usize) -> Vec<Vec<Rational>> {
    let mut b: Vec<Vec<Rational>> = (0..=n_max).map(|n| vec![Rational::new(); n + 1]).collect();
    let two_minus_a = Rational::from(2) - alpha;
    let mut poch = Rational::from(1);
    let mut fact = Integer::from(6);
    for n in 1..=n_max {
        b[n][1] = Rational::from(&poch / &fact);
        poch *= Rational::from(&two_minus_a + (n as u32 - 1));
        fact *= n as u32 + 3;
    }
    for n in 2..=n_max {
        for k in 1..n {
            let mut s = Rational::new();
            for l in k..n {
                s += Rational::from(&b[n - l][1] * &b[l][k]);
            }
            b[n][k + 1] = s / (k as u32 + 1);
        }
    }
    b
}

fn factorial(n: usize) -> Integer {
    Integer::from(Integer::factorial(n as u32))
}

/// Exact `B_{n,k}`.
pub fn bell_b(alpha: &Rational, n: usize, k: usize) -> Result<Rational> {
    check_alpha(alpha)?;
    if n < 1 || k < 1 || k > n {
        return Err(invalid(format!("B_(n,k) needs 1 <= k <= n, got n={n}, k={k}")));
    }
    let b = scaled_triangle(alpha, n);
    Ok(Rational::from(&b[n][k] * factorial(n)))
}

/// Exact `B_{n,k}` for `1 <= k <= n <= n_max`; row `n` is indexed by `k` with entry 0 unused.
pub fn bell_triangle(alpha: &Rational, n_max: usize) -> Result<Vec<Vec<Rational>>> {
    check_alpha(alpha)?;
    let mut b = scaled_triangle(alpha, n_max);
    let mut fact = Integer::from(1);
    for (n, row) in b.iter_mut().enumerate().skip(1) {
        fact *= n as u32;
        for v in row.iter_mut() {
            *v *= &fact;
        }
    }
    Ok(b)
}

/// Exact `c_0, ..., c_order`.
pub fn c_coefficients(alpha: &Rational, order: usize) -> Result<Vec<Rational>> {
    check_alpha(alpha)?;
    let b = scaled_triangle(alpha, 2 * order);
    let two_am1 = (Rational::from(alpha - 1u32)) * 2u32;
    let two_over_a = Rational::from(2) / alpha.clone();
    let mut out = vec![Rational::from(1)];
    for p in 1..=order {
        let mut s = Rational::new();
        let mut pow = two_am1.clone();
        for k in 1..=2 * p {
            if b[2 * p][k] != 0 {
                let g = half_integer_gamma_over_sqrt_pi((p + k) as u32);
                s += Rational::from(&b[2 * p][k] * &g) * &pow;
            }
            pow *= &two_am1;
        }
        let mut pref = Rational::from(1);
        for _ in 0..p {
            pref *= &two_over_a;
        }
        out.push(s * pref);
    }
    Ok(out)
}

/// Exact `c_p`.
pub fn c_p(alpha: &Rational, p: usize) -> Result<Rational> {
    Ok(c_coefficients(alpha, p)?.pop().expect("non-empty"))
}

/// Exact `d_0, ..., d_order`.
pub fn d_coefficients(alpha: &Rational, order: usize) -> Result<Vec<Rational>> {
    let c = c_coefficients(alpha, order)?;
    let mut d = vec![Rational::from(1)];
    for p in 1..=order {
        let fac = (Rational::from(alpha + 1u32) * (2 * p as u32 - 1) - 2u32) / (Rational::from(alpha * 2u32));
        d.push(Rational::from(&c[p] - Rational::from(&c[p - 1] * &fac)));
    }
    Ok(d)
}

/// Brownian closed form `Gamma(3n + 1/2) / ((2n)! sqrt(pi) 9^n)`.
pub fn brownian_c(n: usize) -> Rational {
    let g = half_integer_gamma_over_sqrt_pi(3 * n as u32);
    g / (factorial(2 * n) * Integer::from(Integer::u_pow_u(9, n as u32)))
}
