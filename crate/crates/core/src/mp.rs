//! Minimal complex arithmetic over MPFR floats. rug's own complex type needs
//! libmpc, which is not assumed to be present.

use num_complex::Complex64;
use rug::Float;

#[derive(Debug, Clone, PartialEq)]
pub struct MpComplex {
    pub re: Float,
    pub im: Float,
}

impl MpComplex {
    pub fn zero(bits: u32) -> Self {
        MpComplex {
            re: Float::new(bits),
            im: Float::new(bits),
        }
    }

    pub fn from_c64(bits: u32, z: Complex64) -> Self {
        MpComplex {
            re: Float::with_val(bits, z.re),
            im: Float::with_val(bits, z.im),
        }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        MpComplex { re, im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(&self, other: &MpComplex) -> MpComplex {
        let b = self.prec();
        MpComplex {
            re: Float::with_val(b, &self.re + &other.re),
            im: Float::with_val(b, &self.im + &other.im),
        }
    }

    pub fn sub(&self, other: &MpComplex) -> MpComplex {
        let b = self.prec();
        MpComplex {
            re: Float::with_val(b, &self.re - &other.re),
            im: Float::with_val(b, &self.im - &other.im),
        }
    }

    pub fn mul(&self, other: &MpComplex) -> MpComplex {
        let b = self.prec();
        let rr = Float::with_val(b, &self.re * &other.re);
        let ii = Float::with_val(b, &self.im * &other.im);
        let ri = Float::with_val(b, &self.re * &other.im);
        let ir = Float::with_val(b, &self.im * &other.re);
        MpComplex {
            re: rr - ii,
            im: ri + ir,
        }
    }

    pub fn scale(&self, k: &Float) -> MpComplex {
        let b = self.prec();
        MpComplex {
            re: Float::with_val(b, &self.re * k),
            im: Float::with_val(b, &self.im * k),
        }
    }

    pub fn div(&self, other: &MpComplex) -> MpComplex {
        let b = self.prec();
        let den = Float::with_val(b, other.re.clone().square() + other.im.clone().square());
        let re = Float::with_val(b, &self.re * &other.re) + Float::with_val(b, &self.im * &other.im);
        let im = Float::with_val(b, &self.im * &other.re) - Float::with_val(b, &self.re * &other.im);
        MpComplex {
            re: re / &den,
            im: im / &den,
        }
    }

    pub fn abs(&self) -> Float {
        let b = self.prec();
        Float::with_val(b, self.re.clone().square() + self.im.clone().square()).sqrt()
    }

    /// Principal `z^p` for real `p`.
    pub fn powf(&self, p: f64) -> MpComplex {
        let b = self.prec();
        if self.re.is_zero() && self.im.is_zero() {
            return MpComplex::zero(b);
        }
        let r = self.abs();
        let arg = Float::with_val(b, self.im.atan2_ref(&self.re));
        let rp = r.ln() * p;
        let rp = rp.exp();
        let ang = arg * p;
        let (s, c) = ang.sin_cos(Float::new(b));
        MpComplex {
            re: Float::with_val(b, &rp * &c),
            im: Float::with_val(b, &rp * &s),
        }
    }
}
