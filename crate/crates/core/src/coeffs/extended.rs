//! MPFR versions of the coefficient families, used by the oracle paths, the
//! extended-precision large-x expansions and the moment recurrences beyond order 15.

use rug::ops::Pow;
use rug::Float;

use super::gamma::{gamma_mp, rgamma_mp};
use crate::index::StableIndex;

#[derive(Debug, Clone)]
pub struct ExtendedCoefficients {
    alpha: Float,
    bits: u32,
    c: Vec<Float>,
    d: Vec<Float>,
}

impl ExtendedCoefficients {
    /// `c_p`, `d_p` for `p <= order` at `bits` of mantissa.
    pub fn build(alpha: StableIndex, order: usize, bits: u32) -> Self {
        let a = Float::with_val(bits, alpha.alpha());
        let f = |x: f64| Float::with_val(bits, x);
        let n_max = 2 * order;

        let mut b: Vec<Vec<Float>> = (0..=n_max).map(|n| vec![f(0.0); n + 1]).collect();
        let two_minus_a = f(2.0) - &a;
        let mut poch = f(1.0);
        let mut fact = f(6.0);
        for n in 1..=n_max {
            b[n][1] = Float::with_val(bits, &poch / &fact);
            poch *= Float::with_val(bits, &two_minus_a + (n as f64 - 1.0));
            fact *= n as f64 + 3.0;
        }
        for n in 2..=n_max {
            for k in 1..n {
                let mut s = f(0.0);
                for l in k..n {
                    s += Float::with_val(bits, &b[n - l][1] * &b[l][k]);
                }
                b[n][k + 1] = s / (k as f64 + 1.0);
            }
        }

        let sqrt_pi = Float::with_val(bits, rug::float::Constant::Pi).sqrt();
        let two_am1: Float = Float::with_val(bits, &a - 1.0) * 2.0;
        let two_over_a = Float::with_val(bits, 2.0 / &a);
        let mut c = vec![f(1.0); order + 1];
        for p in 1..=order {
            let mut s = f(0.0);
            let mut pow = two_am1.clone();
            for k in 1..=2 * p {
                if !b[2 * p][k].is_zero() {
                    let g = gamma_mp(&f(p as f64 + k as f64 + 0.5));
                    s += Float::with_val(bits, &b[2 * p][k] * &g) * &pow;
                }
                pow *= &two_am1;
            }
            let pref = Float::with_val(bits, (&two_over_a).pow(p as u32)) / &sqrt_pi;
            c[p] = s * pref;
        }
        let mut d = vec![f(1.0); order + 1];
        for p in 1..=order {
            let fac = (Float::with_val(bits, &a + 1.0) * (2.0 * p as f64 - 1.0) - 2.0) / Float::with_val(bits, &a * 2.0);
            d[p] = Float::with_val(bits, &c[p] - Float::with_val(bits, &c[p - 1] * &fac));
        }
        ExtendedCoefficients { alpha: a, bits, c, d }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn c(&self) -> &[Float] {
        &self.c
    }

    pub fn d(&self) -> &[Float] {
        &self.d
    }

    /// `Omega_1..=Omega_order`.
    pub fn omega(&self, order: usize) -> Vec<Float> {
        let bits = self.bits;
        let a = &self.alpha;
        let mut omega: Vec<Float> = Vec::with_capacity(order);
        for n in 1..=order.min(self.c.len() - 1 + 1) {
            let fac = (Float::with_val(bits, a + 1.0) * (2.0 * n as f64 - 1.0) - 2.0) / Float::with_val(bits, a * 2.0);
            let mut v = Float::with_val(bits, &self.c[n - 1] * &fac);
            for k in 1..n {
                v -= Float::with_val(bits, &omega[k - 1] * &self.c[n - k]);
            }
            omega.push(v);
        }
        omega
    }

    /// `Delta_1..=Delta_order`.
    pub fn delta(&self, order: usize) -> Vec<Float> {
        let bits = self.bits;
        let a = &self.alpha;
        let ap1 = Float::with_val(bits, a + 1.0);
        let arg = |num: Float| Float::with_val(bits, num / &ap1);
        let ga = gamma_mp(&arg(a.clone()));
        let rg_am1 = rgamma_mp(&arg(Float::with_val(bits, a - 1.0)));
        let pref = Float::with_val(bits, 1.0 + Float::with_val(bits, 1.0 / a))
            * gamma_mp(&Float::with_val(bits, -1.0 / Float::with_val(bits, a.clone())));
        let mut delta: Vec<Float> = Vec::with_capacity(order);
        for n in 1..=order {
            let nf = n as f64;
            let t1 = Float::with_val(bits, &ga * rgamma_mp(&arg(Float::with_val(bits, a - (1.0 + nf)))));
            let t2 = Float::with_val(bits, &ga * &ga) * &rg_am1 * rgamma_mp(&arg(Float::with_val(bits, a - nf)));
            let mut v = Float::with_val(bits, &pref * Float::with_val(bits, t1 - t2));
            let mut binom = rug::Integer::from(1);
            for k in 1..n {
                binom *= n - k + 1;
                binom /= k;
                let rg = rgamma_mp(&arg(Float::with_val(bits, a - k as f64)));
                let t = Float::with_val(bits, &delta[n - k - 1] * &ga) * rg * &binom;
                v -= t;
            }
            delta.push(v);
        }
        delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_double_table() {
        let s = StableIndex::new(1.5).unwrap();
        let ext = ExtendedCoefficients::build(s, 20, 200);
        let dbl = super::super::CoefficientTable::build(s, 20, super::super::Precision::Double).unwrap();
        for p in 0..=20 {
            let e = ext.c()[p].to_f64();
            assert!(((dbl.c()[p] - e) / e).abs() < 1e-12, "p={p}");
            let e = ext.d()[p].to_f64();
            assert!(((dbl.d()[p] - e) / e).abs() < 1e-11, "d p={p}");
        }
    }

    #[test]
    fn brownian_c1_is_five_over_48() {
        let s = StableIndex::new(2.0).unwrap();
        let ext = ExtendedCoefficients::build(s, 3, 256);
        let want = Float::with_val(256, 5) / 48;
        let diff = Float::with_val(256, &ext.c()[1] - &want).abs();
        assert!(diff < Float::with_val(256, 1e-70));
    }
}
