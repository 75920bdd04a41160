mod common;

use kolmo_core::kernels::{cov_cn, KernelConfig};
use kolmo_core::sampler::*;
use kolmo_core::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

const SIGMAS: f64 = 4.5;

#[test]
fn same_seed_same_paths() {
    let grid = PathGrid::uniform(16).unwrap();
    for method in [Method::Spectral, Method::Pathwise] {
        let a = sample(method, 5, &grid, 50, 99).unwrap();
        let b = sample(method, 5, &grid, 50, 99).unwrap();
        let c = sample(method, 5, &grid, 50, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.path(0), c.path(0));
        assert_eq!(a.paths(), 50);
        assert_eq!(a.path(3).len(), 17);
    }
}

#[test]
fn paths_vanish_at_both_ends() {
    let grid = PathGrid::uniform(64).unwrap();
    for method in [Method::Spectral, Method::Pathwise] {
        let ens = sample(method, 3, &grid, 200, 5).unwrap();
        for i in 0..ens.paths() {
            let p = ens.path(i);
            assert_eq!(p[0], 0.0);
            assert!(p[64].abs() < 1e-12, "{method:?}: endpoint {}", p[64]);
        }
    }
}

#[test]
fn spectral_covariance_within_standard_errors() {
    let n = 3;
    let grid = PathGrid::from_times(vec![0.0, 0.2, 0.45, 0.7, 1.0]).unwrap();
    let ens = sample_spectral(n, &grid, 40_000, 17).unwrap();
    let cfg = KernelConfig::new(n).unwrap();
    for i in 1..4 {
        for j in 1..4 {
            let e = covariance_estimate(&ens, i, j);
            let target = common::cov_f64(n, grid.times()[i], grid.times()[j]);
            assert!(e.within(target, SIGMAS), "({i},{j}): {} ± {} vs {target}", e.value, e.se);
            assert!((target - cov_cn(grid.times()[i], grid.times()[j], &cfg).unwrap()).abs() < 1e-14);
        }
    }
}

#[test]
fn pathwise_coefficients_are_orthogonal() {
    let ens = sample_pathwise(3, &PathGrid::uniform(256).unwrap(), 20_000, 3).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            let e = coefficient_covariance(&ens, a, b).unwrap();
            let target = if a == b { 1.0 / (2 * a + 1) as f64 } else { 0.0 };
            assert!(e.within(target, SIGMAS), "({a},{b}): {} ± {}", e.value, e.se);
        }
    }
    assert!(ens.coefficient_column(3).is_none());
    let spectral = sample_spectral(3, &PathGrid::uniform(4).unwrap(), 10, 3).unwrap();
    assert!(coefficient_covariance(&spectral, 0, 0).is_none());
}

#[test]
fn fluctuation_rows() {
    let grid = PathGrid::from_times(vec![0.0, 0.25, 0.5, 1.0]).unwrap();
    let ens = sample_spectral(32, &grid, 30_000, 8).unwrap();
    let rows = fluctuation_stats(&ens).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows[1..3] {
        assert!(r.emp_var.within(r.analytic, SIGMAS));
        assert!((r.analytic - r.semicircle).abs() < 0.02);
    }
    assert_eq!(rows[0].analytic.abs(), 0.0);
}

#[test]
fn jitter_and_errors() {
    let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
    let l = factor_with_jitter(&singular).unwrap();
    assert!((&l * l.transpose() - &singular).abs().max() < 1e-6);
    let negative = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(matches!(factor_with_jitter(&negative), Err(Error::IllConditioned { .. })));
    let grid = PathGrid::uniform(4).unwrap();
    assert!(sample_spectral(0, &grid, 10, 1).is_err());
    assert!(sample_pathwise(2, &grid, 0, 1).is_err());
}

#[test]
fn correlation_is_bounded() {
    let ens = sample_spectral(2, &PathGrid::uniform(8).unwrap(), 2000, 4).unwrap();
    for i in 0..=8 {
        for j in 0..=8 {
            assert!(correlation(&ens, i, j).abs() <= 1.0 + 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn pairwise_sum_is_accurate(v in proptest::collection::vec(-1e6f64..1e6, 0..3000)) {
        let exact: f64 = {
            let mut s = kolmo_core::kernels::CompensatedSum::default();
            for &x in &v { s.add(x); }
            s.value()
        };
        let scale: f64 = v.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!((pairwise_sum(&v) - exact).abs() <= 1e-13 * scale);
    }

    #[test]
    fn mean_of_constant(c in -10.0f64..10.0, r in 2usize..200) {
        let e = mean_estimate(&vec![c; r]);
        prop_assert!((e.value - c).abs() <= 1e-12 * c.abs().max(1.0));
        prop_assert!(e.se <= 1e-12);
    }
}
