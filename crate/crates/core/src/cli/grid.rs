//! `lo:hi:n` grids, or a single value.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad grid {text:?}: {reason}")]
pub struct GridError {
    pub text: String,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

pub fn parse_grid(text: &str) -> Result<Grid, GridError> {
    let err = |reason| GridError {
        text: text.to_string(),
        reason,
    };
    let num = |s: &str| -> Result<f64, GridError> {
        let v: f64 = s.trim().parse().map_err(|_| err("expected numbers"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err("bounds must be finite"))
        }
    };
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [x] => {
            let x = num(x)?;
            Grid { lo: x, hi: x, n: 1 }
        }
        [lo, hi, n] => {
            let n: usize = n.trim().parse().map_err(|_| err("point count must be a positive integer"))?;
            Grid {
                lo: num(lo)?,
                hi: num(hi)?,
                n,
            }
        }
        _ => return Err(err("expected lo:hi:n or a single value")),
    };
    if grid.n == 0 || grid.n > MAX_GRID_POINTS {
        return Err(err("point count must lie in 1..=100000"));
    }
    if grid.hi < grid.lo || (grid.n == 1 && grid.hi != grid.lo) {
        return Err(err("need lo <= hi, and lo == hi for a single point"));
    }
    Ok(grid)
}

impl Grid {
    pub fn linear(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let h = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| if i + 1 == self.n { self.hi } else { self.lo + h * i as f64 }).collect()
    }

    /// Log-spaced points; needs `lo > 0`.
    pub fn geometric(&self) -> Option<Vec<f64>> {
        if self.lo <= 0.0 {
            return None;
        }
        let mut g = crate::inversion::geometric_grid(self.lo, self.hi, self.n).ok()?;
        if let Some(last) = g.last_mut() {
            *last = self.hi;
        }
        Some(g)
    }
}

impl FromStr for Grid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, GridError> {
        parse_grid(s)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}
