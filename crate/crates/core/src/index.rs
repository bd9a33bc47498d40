use std::fmt;

use crate::error::{invalid, Result};

/// Stability index `alpha` of a spectrally positive stable process, restricted to `(1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableIndex {
    alpha: f64,
}

impl StableIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 || alpha > 2.0 {
            return Err(invalid(format!("stability index must lie in (1, 2], got {alpha}")));
        }
        Ok(StableIndex { alpha })
    }

    /// Same as [`StableIndex::new`] but additionally rejects the Brownian endpoint.
    pub fn new_strict(alpha: f64) -> Result<Self> {
        let s = Self::new(alpha)?;
        s.require_strict()?;
        Ok(s)
    }

    pub fn require_strict(&self) -> Result<()> {
        if self.alpha >= 2.0 {
            return Err(invalid("this quantity requires 1 < alpha < 2"));
        }
        Ok(())
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `1 + alpha`
    #[inline]
    pub fn one_plus(&self) -> f64 {
        1.0 + self.alpha
    }

    /// `alpha / (1 + alpha)`
    #[inline]
    pub fn ratio(&self) -> f64 {
        self.alpha / (1.0 + self.alpha)
    }

    /// `1 / (1 + alpha)`
    #[inline]
    pub fn inv_one_plus(&self) -> f64 {
        1.0 / (1.0 + self.alpha)
    }

    /// `1 + 1/alpha`, the self-similarity exponent of the area.
    #[inline]
    pub fn area_exponent(&self) -> f64 {
        1.0 + 1.0 / self.alpha
    }

    pub fn is_brownian(&self) -> bool {
        self.alpha == 2.0
    }

    /// Bit pattern of alpha, used as a memoization key.
    pub(crate) fn key(&self) -> u64 {
        self.alpha.to_bits()
    }
}

impl TryFrom<f64> for StableIndex {
    type Error = crate::error::Error;

    fn try_from(alpha: f64) -> Result<Self> {
        StableIndex::new(alpha)
    }
}

impl fmt::Display for StableIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.alpha)
    }
}
