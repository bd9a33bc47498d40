use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::*;
use crate::transforms;

fn idx(a: f64) -> StableIndex {
    StableIndex::new(a).unwrap()
}

/// Asymptotic p-value of the two-sample Kolmogorov-Smirnov statistic.
fn ks_p_value(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let lambda = d * (n * m / (n + m)).sqrt();
    let q: f64 = (1..100)
        .map(|k| {
            let k = k as f64;
            2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    q.clamp(0.0, 1.0)
}

#[test]
fn brownian_increments_have_variance_two() {
    let x = increments(idx(2.0), 1.0, 100_000, &McConfig::default()).unwrap();
    let mean = estimate(&x, 0);
    assert!(mean.z_score(0.0).abs() < 3.0, "{mean:?}");
    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    let var = estimate(&sq, 0);
    assert!(var.z_score(2.0).abs() < 3.0, "{var:?}");
}

#[test]
fn laplace_transform_of_increments() {
    let x = increments(idx(1.5), 1.0, 200_000, &McConfig::default()).unwrap();
    for q in [0.5f64, 1.0] {
        let e = laplace_estimate(&x, q, 0);
        assert!(e.z_score(q.powf(1.5).exp()).abs() < 3.0, "q={q}: {e:?}");
    }
}

#[test]
fn strict_stability_scaling() {
    let a = idx(1.5);
    let small = increments(a, 0.01, 10_000, &McConfig::with_seed(1)).unwrap();
    let unit: Vec<f64> = increments(a, 1.0, 10_000, &McConfig::with_seed(2))
        .unwrap()
        .into_iter()
        .map(|v| v * 0.01f64.powf(1.0 / 1.5))
        .collect();
    let p = ks_p_value(small, unit);
    assert!(p > 0.01, "p = {p}");
}

#[test]
fn no_negative_jumps() {
    let dt = 1e-3;
    let a = idx(1.5);
    let x = increments(a, dt, 200_000, &McConfig::default()).unwrap();
    let scale = dt.powf(1.0 / 1.5);
    for k in [3.0, 6.0] {
        let up = x.iter().filter(|v| **v > k * scale).count();
        let down = x.iter().filter(|v| **v < -k * scale).count();
        assert!(up > 20 * down.max(1), "k={k}: up {up}, down {down}");
    }
    let far_down = x.iter().filter(|v| **v < -8.0 * scale).count();
    assert_eq!(far_down, 0);
}

#[test]
fn deterministic_across_thread_modes() {
    let a = idx(1.5);
    let par = McConfig::with_seed(7);
    let seq = par.sequential();
    let x = meander_areas(a, 3000, 100, &par).unwrap();
    let y = meander_areas(a, 3000, 100, &seq).unwrap();
    assert_eq!(x, y);
    let ex = estimate(&x, 7);
    let ey = estimate(&y, 7);
    assert!((ex.mean - ey.mean).abs() < 1e-12);
    let other = meander_areas(a, 3000, 100, &McConfig::with_seed(8)).unwrap();
    assert_ne!(x, other);
}

#[test]
fn area_identity_brownian() {
    let r = area_identity_check(idx(2.0), 20_000, 400, &[0.5, 1.0], &McConfig::default()).unwrap();
    for p in &r {
        assert!(p.z_score().abs() < 3.0, "{p:?}");
        let target = (p.q * p.q / 3.0).exp();
        assert!(p.scaled_side.z_score(target).abs() < 3.0, "{p:?}");
        assert!(p.path_side.z_score(target).abs() < 3.0, "{p:?}");
    }
}

#[test]
fn passage_from_near_zero_is_immediate() {
    let cfg = PassageConfig::default();
    let e = first_passage_functional(idx(1.5), 0.01, 0.5, 1.0, 2000, &cfg, &McConfig::default()).unwrap();
    assert!(e.estimate.mean > 0.98, "{e:?}");
    assert!(e.estimate.z_score(1.0).abs() < 3.0 || 1.0 - e.estimate.mean < 0.02);
}

#[test]
fn passage_grid_refinement() {
    let a = idx(2.0);
    let target = transforms::joint_laplace_t0_area(a, 1.0, 0.5, 1.0).unwrap();
    let mut prev: Option<McEstimate> = None;
    for dt in [1e-2, 1e-3] {
        let cfg = PassageConfig { dt, ..Default::default() };
        let e = first_passage_functional(a, 1.0, 0.5, 1.0, 20_000, &cfg, &McConfig::default()).unwrap().estimate;
        assert!(e.z_score(target).abs() < 3.0, "dt={dt}: {e:?} vs {target}");
        if let Some(p) = prev {
            assert!((e.mean - p.mean).abs() < 2.0 * e.stderr, "{p:?} -> {e:?}");
        }
        prev = Some(e);
    }
}

#[test]
fn rejects_bad_passage_input() {
    let cfg = PassageConfig::default();
    let mc = McConfig::default();
    assert!(first_passage_functional(idx(1.5), 0.0, 0.0, 1.0, 10, &cfg, &mc).is_err());
    assert!(first_passage_functional(idx(1.5), 1.0, -1.0, 1.0, 10, &cfg, &mc).is_err());
}

#[test]
fn excursion_skeleton_is_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for a in [1.5, 2.0] {
        for _ in 0..200 {
            let p = sample_excursion(idx(a), 200, &mut rng).unwrap();
            assert_eq!(p.values[0], 0.0);
            assert_eq!(p.values.len(), 201);
            assert!(p.values[1..200].iter().all(|v| *v > 0.0));
            assert!(p.area > 0.0);
        }
    }
    assert!(sample_excursion(idx(1.5), 50, &mut rng).is_err());
}

#[test]
fn excursion_means() {
    let mc = McConfig::default();
    let ex = excursion_areas(idx(2.0), 100_000, 400, BridgeWindow::default(), &mc).unwrap();
    let e = estimate(&ex, mc.seed);
    assert!(e.z_score(std::f64::consts::PI.sqrt() / 2.0).abs() < 3.0, "{e:?}");
    let ex = excursion_areas(idx(1.5), 10_000, 100, BridgeWindow::default(), &mc).unwrap();
    let e = estimate(&ex, mc.seed);
    let target = 0.25 * crate::coeffs::gamma::gamma(1.0 / 3.0);
    assert!((target - transforms::mean_ex(idx(1.5))).abs() < 1e-12);
    assert!(e.z_score(target).abs() < 3.0, "{e:?}");
}

#[test]
fn rejection_budget_is_reported() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tight = BridgeWindow { epsilon: 1e-9, max_attempts: 10 };
    assert!(matches!(
        sample_excursion_with(idx(1.5), 100, tight, &mut rng),
        Err(Error::RejectionBudgetExceeded { .. })
    ));
    assert!(matches!(
        sample_meander_with(idx(1.5), 1000, 1, &mut rng).map(|_| ()),
        Err(Error::RejectionBudgetExceeded { .. }) | Ok(())
    ));
}

#[test]
fn meander_brownian_mean() {
    let mc = McConfig::default();
    let me = meander_areas(idx(2.0), 10_000, 1000, &mc).unwrap();
    let e = estimate(&me, mc.seed);
    let brownian = 3.0 * std::f64::consts::PI.sqrt() / 4.0;
    assert!((transforms::mean_meander(idx(2.0)) - brownian).abs() < 1e-12);
    assert!(e.z_score(brownian).abs() < 3.0, "{e:?}");
}

#[test]
fn meander_laplace_matches_inversion() {
    // the area has infinite variance below index 2, so compare transforms instead of means
    let mc = McConfig::default();
    let me = meander_areas(idx(1.5), 10_000, 1000, &mc).unwrap();
    let e = laplace_estimate(&me, 1.0, mc.seed);
    let target = crate::inversion::invert_meander(idx(1.5), 1.0, &Default::default()).unwrap();
    assert!(e.z_score(target).abs() < 3.0, "{e:?} vs {target}");
}

#[test]
fn meander_paths_stay_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p = sample_meander(idx(1.5), 100, &mut rng).unwrap();
    assert_eq!(p.values[0], 0.0);
    assert!(p.values[1..].iter().all(|v| *v > 0.0));
}

#[test]
fn conditioned_normalization() {
    let e = sample_conditioned_weighted(idx(1.5), 0.01, 200, 200_000, |_| 1.0, &McConfig::default()).unwrap();
    assert!((e.estimate.mean - 1.0).abs() < 1e-12);
    assert!(e.ess >= MIN_ESS);
    assert!(e.weight_mean.mean > 0.5 && e.weight_mean.mean < 1.5, "{e:?}");
}

#[test]
fn conditioned_brownian_matches_bessel() {
    // Under index 2 the conditioned process is sqrt(2) times a three-dimensional Bessel process.
    let n = 1000;
    let dt = 1.0 / n as f64;
    let mc = McConfig::default();
    let bessel = mc
        .sample_vec(20_000, |rng| {
            let mut w = [0.0f64; 3];
            let mut area = 0.0;
            for _ in 0..n {
                area += (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt() * dt;
                for c in w.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *c += (2.0 * dt).sqrt() * z;
                }
            }
            Ok((-area).exp())
        })
        .unwrap();
    let oracle = estimate(&bessel, mc.seed);
    let weighted = sample_conditioned_weighted(idx(2.0), 0.01, 1000, 400_000, |p| (-p.area).exp(), &mc).unwrap();
    assert!(weighted.estimate.z_against(&oracle).abs() < 3.0, "{weighted:?} vs {oracle:?}");
}

#[test]
fn degenerate_weights_are_reported() {
    let r = conditioned_areas(idx(1.5), 1e-4, 2000, 100, &McConfig::default());
    assert!(matches!(r, Err(Error::DegenerateWeights { .. })), "{r:?}");
}

#[test]
fn tail_fits_need_data_and_strict_index() {
    let few = vec![1.0; 1000];
    assert!(matches!(excursion_tail_slope(idx(1.5), &few), Err(Error::InsufficientTail(_))));
    assert!(meander_tail_slope(idx(2.0), &few).is_err());
    assert!(conditioned_tail_slope(idx(2.0), &few, &few).is_err());
    // exact Pareto tail
    let pareto: Vec<f64> = (1..=20_000).map(|i| (i as f64 / 20_001.0).powf(-1.0 / 1.5)).collect();
    let fit = meander_tail_slope(idx(1.5), &pareto).unwrap();
    assert!((fit.slope + 1.5).abs() < 0.02, "{fit:?}");
}

#[test]
fn grid_gap_brownian_constant() {
    // -zeta(1/2) / sqrt(2 pi), scaled by the standard deviation sqrt(2)
    let beta = 1.460_354_508_809_586_8 / (2.0 * std::f64::consts::PI).sqrt();
    let g = grid_gap(idx(2.0), 1e-2);
    assert!((g - beta * 2f64.sqrt() * 0.1).abs() < 1e-12, "{g}");
}


#[test]
fn image_of_small_area() {
    use crate::inversion::Law;
    let a = idx(1.5);
    let v = image_of_area(Law::Conditioned, a, 2.0, 1e-12).unwrap();
    assert!((v - 0.5).abs() < 1e-8, "{v}");
    // meander: int t^(-1/alpha) e^(-t) dt = Gamma(1 - 1/alpha)
    let v = image_of_area(Law::Meander, a, 1.0, 1e-12).unwrap();
    assert!((v - crate::coeffs::gamma::gamma(1.0 / 3.0)).abs() < 1e-7, "{v}");
    // excursion: int (1 - e^(-c t^r))/t^r dt -> c/lambda for small c
    let v = image_of_area(Law::Excursion, a, 2.0, 1e-6).unwrap();
    assert!((v - 0.5e-6).abs() < 1e-11, "{v}");
    assert!(image_of_area(Law::Excursion, a, -1.0, 1.0).is_err());
}

#[test]
fn brownian_excursion_image() {
    use crate::inversion::Law;
    let a = idx(2.0);
    let mc = McConfig::default();
    let areas = excursion_areas(a, 20_000, 400, BridgeWindow::default(), &mc).unwrap();
    for lambda in [0.5, 2.0] {
        let e = estimate(&image_samples(Law::Excursion, a, lambda, &areas).unwrap(), mc.seed);
        let target = transforms::theorem1_alt_rhs(a, lambda).unwrap();
        assert!(e.z_score(target).abs() < 3.0, "lambda={lambda}: {e:?} vs {target}");
    }
}

#[test]
fn steps_for_gap_bounds_the_gap() {
    for a in [1.2, 1.5, 2.0] {
        let n = steps_for_gap(idx(a), 0.02).unwrap();
        assert!(grid_gap(idx(a), 1.0 / n as f64) <= 0.02);
        assert!(n == 100 || grid_gap(idx(a), 1.0 / (n - 1) as f64) > 0.02);
    }
    assert!(steps_for_gap(idx(1.5), 0.0).is_err());
}
