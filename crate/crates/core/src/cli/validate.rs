//! Closed-form values against independent routes and Monte Carlo.

use std::f64::consts::PI;

use crate::coeffs::{self, Precision};
use crate::error::Result;
use crate::index::StableIndex;
use crate::inversion::{self, InversionConfig, Law};
use crate::simulate::{self, BridgeWindow, McConfig, McEstimate, PassageConfig};
use crate::transforms;
use crate::wright::{self, EvalConfig, Route, WrightFn};

use super::output::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// `|computed - reference| / stderr` below the bound.
    ZScore(f64),
    Absolute(f64),
    Relative(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub stderr: Option<f64>,
    pub criterion: Criterion,
}

impl Check {
    fn exact(name: impl Into<String>, computed: f64, reference: f64, criterion: Criterion) -> Self {
        Check {
            name: name.into(),
            computed,
            reference,
            stderr: None,
            criterion,
        }
    }

    fn mc(name: impl Into<String>, est: McEstimate, reference: f64) -> Self {
        Check {
            name: name.into(),
            computed: est.mean,
            reference,
            stderr: Some(est.stderr),
            criterion: Criterion::ZScore(3.0),
        }
    }

    /// z-score, absolute or relative difference, matching the criterion.
    pub fn score(&self) -> f64 {
        let diff = self.computed - self.reference;
        match self.criterion {
            Criterion::ZScore(_) => diff / self.stderr.unwrap_or(f64::NAN),
            Criterion::Absolute(_) => diff.abs(),
            Criterion::Relative(_) => diff.abs() / self.reference.abs(),
        }
    }

    pub fn limit(&self) -> f64 {
        match self.criterion {
            Criterion::ZScore(l) | Criterion::Absolute(l) | Criterion::Relative(l) => l,
        }
    }

    pub fn passed(&self) -> bool {
        self.score().abs() < self.limit()
    }
}

/// Sample sizes for one run of the suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSize {
    pub passage_paths: usize,
    pub passage_dt: f64,
    pub free_paths: usize,
    pub excursions: usize,
    pub meanders: usize,
    pub conditioned_paths: usize,
}

impl SuiteSize {
    pub fn quick() -> Self {
        SuiteSize {
            passage_paths: 10_000,
            passage_dt: 1e-2,
            free_paths: 10_000,
            excursions: 4_000,
            meanders: 10_000,
            conditioned_paths: 2_000_000,
        }
    }

    pub fn full() -> Self {
        SuiteSize {
            passage_paths: 100_000,
            passage_dt: 1e-3,
            free_paths: 100_000,
            excursions: 100_000,
            meanders: 100_000,
            conditioned_paths: 10_000_000,
        }
    }
}

/// Grid gap at which excursion and meander grids are set.
pub const AREA_GAP: f64 = 0.02;
const CONDITIONED_STEPS: usize = 1000;
const CONDITIONED_START: f64 = 0.01;

fn deterministic(alpha: StableIndex) -> Result<Vec<Check>> {
    let cfg = EvalConfig::default();
    let mut out = Vec::new();
    for f in [WrightFn::Phi, WrightFn::Psi, WrightFn::PhiPrime] {
        let s = wright::evaluate_route(f, alpha, 1.0, Route::Series, &cfg)?;
        let q = wright::evaluate_route(f, alpha, 1.0, Route::Quadrature, &cfg)?;
        out.push(Check::exact(
            format!("{} series vs quadrature at x=1", f.name()),
            s.value,
            q.value,
            Criterion::Absolute(1e-8),
        ));
    }
    out.push(Check::exact(
        "mean excursion area from moment recurrence",
        coeffs::moment_ex(alpha, 1, Precision::Auto)?,
        transforms::mean_ex(alpha),
        Criterion::Relative(1e-12),
    ));
    out.push(Check::exact(
        "second excursion moment from moment recurrence",
        coeffs::moment_ex(alpha, 2, Precision::Auto)?,
        transforms::second_moment_ex(alpha),
        Criterion::Relative(1e-12),
    ));
    if alpha.is_brownian() {
        out.push(Check::exact(
            "phi at index 2 vs Airy quadrature at x=1",
            wright::phi(alpha, 1.0, &cfg)?.value,
            wright::airy_reference(1.0)?,
            Criterion::Absolute(1e-10),
        ));
        let [ai, dai, psi, dpsi] = wright::quartet_f64(alpha, 1.0)?;
        out.push(Check::exact(
            "Airy Wronskian against the tail integral at 1",
            PI * (dpsi * ai - dai * psi),
            wright::airy_tail_integral(1.0)?,
            Criterion::Absolute(1e-8),
        ));
    }
    Ok(out)
}

/// Runs the suite; each Monte Carlo check draws from its own seed offset.
pub fn run_suite(alpha: StableIndex, size: SuiteSize, seed: u64) -> Result<Vec<Check>> {
    let mut out = deterministic(alpha)?;
    let mc = |k: u64| McConfig::with_seed(seed.wrapping_add(k));
    let inv = InversionConfig::default();

    let (z, lambda, mu) = (1.0, 0.5, 1.0);
    let pcfg = PassageConfig {
        dt: size.passage_dt,
        ..Default::default()
    };
    let passage = simulate::first_passage_functional(alpha, z, lambda, mu, size.passage_paths, &pcfg, &mc(1))?;
    out.push(Check::mc(
        "first-passage functional at z=1 lambda=0.5 mu=1",
        passage.estimate,
        transforms::joint_laplace_t0_area(alpha, z, lambda, mu)?,
    ));

    let increments = simulate::increments(alpha, 1.0, size.free_paths, &mc(2))?;
    out.push(Check::mc(
        "increment Laplace transform at q=1",
        simulate::laplace_estimate(&increments, 1.0, seed),
        1f64.exp(),
    ));
    for p in simulate::area_identity_check(alpha, size.free_paths, 400, &[0.5, 1.0], &mc(3))? {
        out.push(Check {
            name: format!("area of L on [0,1] vs scaled L_1 at q={}", p.q),
            computed: p.path_side.mean,
            reference: p.scaled_side.mean,
            stderr: Some(p.path_side.stderr.hypot(p.scaled_side.stderr)),
            criterion: Criterion::ZScore(3.0),
        });
    }

    let area_steps = simulate::steps_for_gap(alpha, AREA_GAP)?;
    let ex = simulate::excursion_areas(alpha, size.excursions, area_steps, BridgeWindow::default(), &mc(4))?;
    out.push(Check::mc(
        "excursion area mean",
        simulate::estimate(&ex, seed),
        transforms::mean_ex(alpha),
    ));
    out.push(Check::mc(
        "excursion area Laplace transform at s=1",
        simulate::laplace_estimate(&ex, 1.0, seed),
        inversion::invert_excursion(alpha, 1.0, &inv)?,
    ));
    out.push(Check::mc(
        "excursion image at lambda=1",
        simulate::estimate(&simulate::image_samples(Law::Excursion, alpha, 1.0, &ex)?, seed),
        transforms::theorem1_alt_rhs(alpha, 1.0)?,
    ));
    let p = coeffs::neg_moment_exponent(alpha, 1);
    let powers: Vec<f64> = ex.iter().map(|a| a.powf(p)).collect();
    out.push(Check::mc(
        "excursion fractional moment from the negative-moment recurrence",
        simulate::estimate(&powers, seed),
        coeffs::neg_moment_ex(alpha, 1, Precision::Auto)?,
    ));

    let me = simulate::meander_areas(alpha, size.meanders, area_steps, &mc(5))?;
    out.push(Check::mc(
        "meander area mean",
        simulate::estimate(&me, seed),
        transforms::mean_meander(alpha),
    ));
    out.push(Check::mc(
        "meander area Laplace transform at s=1",
        simulate::laplace_estimate(&me, 1.0, seed),
        inversion::invert_meander(alpha, 1.0, &inv)?,
    ));
    out.push(Check::mc(
        "meander image at lambda=1",
        simulate::estimate(&simulate::image_samples(Law::Meander, alpha, 1.0, &me)?, seed),
        transforms::theorem2_rhs(alpha, 1.0)?,
    ));

    let up = simulate::conditioned_areas(alpha, CONDITIONED_START, size.conditioned_paths, CONDITIONED_STEPS, &mc(6))?;
    out.push(Check::mc(
        "conditioned area Laplace transform at s=1",
        up.laplace(1.0, seed),
        inversion::invert_conditioned(alpha, 1.0, &inv)?,
    ));
    let images = simulate::image_samples(Law::Conditioned, alpha, 1.0, &up.areas)?;
    out.push(Check::mc(
        "conditioned image at lambda=1",
        simulate::weighted_estimate(&images, &up.weights, seed).0,
        transforms::theorem3_rhs(alpha, 1.0)?,
    ));
    Ok(out)
}

pub fn report(checks: &[Check]) -> Table {
    let mut t = Table::new(&["check", "computed", "reference", "stderr", "score", "limit", "status"]);
    for c in checks {
        t.push(vec![
            c.name.clone(),
            num(c.computed),
            num(c.reference),
            c.stderr.map(num).unwrap_or_default(),
            num(c.score()),
            num(c.limit()),
            if c.passed() { "pass" } else { "FAIL" }.to_string(),
        ]);
    }
    t
}
