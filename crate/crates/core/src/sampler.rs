//! Monte Carlo loops and fluctuation processes on a time grid.
//!
//! Randomness comes from ChaCha20 with one stream per path index: path `i`
//! of a run with seed `s` is always drawn from `ChaCha20Rng::seed_from_u64(s)`
//! with `set_stream(i)`, whatever the thread schedule.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{cov_cn, KernelConfig};
use crate::legendre::antiderivatives_unchecked;

/// Diagonal jitter levels tried, in order, when factorizing a covariance.
pub const JITTER_LEVELS: [f64; 5] = [0.0, 1e-15, 1e-14, 1e-13, 1e-12];

#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    times: Vec<f64>,
}

impl PathGrid {
    /// `t_j = j/m`, `j = 0..=m`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("grid needs at least one interval".into()));
        }
        let times = (0..=m).map(|j| if j == m { 1.0 } else { j as f64 / m as f64 }).collect();
        Ok(Self { times })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times[0] != 0.0 || *times.last().unwrap() != 1.0 {
            return Err(Error::InvalidArgument("grid must start at 0 and end at 1".into()));
        }
        if times.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::InvalidArgument("grid times must be strictly increasing".into()));
        }
        Ok(Self { times })
    }

    /// Number of intervals `M`.
    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spectral,
    Pathwise,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Pathwise => "pathwise",
        }
    }
}

/// `R` sampled loops, stored row-major as `R × (M + 1)` values.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopEnsemble {
    pub n: usize,
    pub grid: PathGrid,
    pub seed: u64,
    pub method: Method,
    paths: Vec<f64>,
    /// Pathwise only: `ξ_n = ∫_0^1 Q_n dB` per path, `R × N`.
    coefficients: Option<Vec<f64>>,
}

impl LoopEnsemble {
    pub fn paths(&self) -> usize {
        self.paths.len() / self.width()
    }

    fn width(&self) -> usize {
        self.grid.times.len()
    }

    pub fn path(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.paths[i * w..(i + 1) * w]
    }

    /// Values of all paths at grid index `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.paths.chunks_exact(self.width()).map(|p| p[j]).collect()
    }

    pub fn coefficient_column(&self, n: usize) -> Option<Vec<f64>> {
        let c = self.coefficients.as_ref()?;
        (n < self.n).then(|| c.chunks_exact(self.n).map(|row| row[n]).collect())
    }
}

fn path_rng(seed: u64, index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn check_counts(n: usize, r: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if r == 0 {
        return Err(Error::InvalidArgument("path count R must be at least 1".into()));
    }
    Ok(())
}

/// Lower Cholesky factor of `cov`, adding the smallest jitter from
/// [`JITTER_LEVELS`] that makes the factorization succeed.
pub fn factor_with_jitter(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    for &jitter in &JITTER_LEVELS {
        let mut m = cov.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += jitter;
        }
        if let Some(ch) = Cholesky::new(m) {
            return Ok(ch.l());
        }
    }
    Err(Error::IllConditioned { jitter: *JITTER_LEVELS.last().unwrap() })
}

/// Draws by factorizing the covariance `C_N` on the interior grid points.
pub fn sample_spectral(n: usize, grid: &PathGrid, r: usize, seed: u64) -> Result<LoopEnsemble> {
    check_counts(n, r)?;
    let cfg = KernelConfig::new(n)?;
    let interior = &grid.times[1..grid.times.len() - 1];
    let d = interior.len();
    let entries: Vec<f64> = (0..d * d)
        .into_par_iter()
        .map(|ij| cov_cn(interior[ij / d], interior[ij % d], &cfg))
        .collect::<Result<_>>()?;
    let l = if d > 0 { factor_with_jitter(&DMatrix::from_row_slice(d, d, &entries))? } else { DMatrix::zeros(0, 0) };

    let width = d + 2;
    let mut paths = vec![0.0; r * width];
    paths.par_chunks_mut(width).enumerate().for_each(|(i, row)| {
        let mut rng = path_rng(seed, i);
        let z = DVector::from_iterator(d, (0..d).map(|_| StandardNormal.sample(&mut rng)));
        let x = &l * z;
        row[1..=d].copy_from_slice(x.as_slice());
    });
    Ok(LoopEnsemble { n, grid: grid.clone(), seed, method: Method::Spectral, paths, coefficients: None })
}

/// Draws through `L_t = B_t - Σ_{n<N} (2n+1)·J_n(t)·ξ_n`, with
/// `ξ_n ≈ Σ_j Q_n(t_j)·(B_{t_{j+1}} - B_{t_j})` (left endpoints).
pub fn sample_pathwise(n: usize, grid: &PathGrid, r: usize, seed: u64) -> Result<LoopEnsemble> {
    check_counts(n, r)?;
    let times = &grid.times;
    let m = grid.intervals();
    let mut buf = Vec::new();
    // q[j*n + k] = Q_k(t_j) for left endpoints, jw[j*n + k] = (2k+1)·J_k(t_j)
    let mut q = vec![0.0; m * n];
    let mut jw = vec![0.0; times.len() * n];
    for (j, &t) in times.iter().enumerate() {
        let x = 2.0 * t - 1.0;
        antiderivatives_unchecked(n - 1, x, &mut buf);
        for k in 0..n {
            jw[j * n + k] = (2 * k + 1) as f64 * 0.5 * buf[k];
        }
        if j < m {
            let (mut p0, mut p1) = (1.0, x);
            for k in 0..n {
                q[j * n + k] = p0;
                let kf = (k + 1) as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
        }
    }
    let sd: Vec<f64> = times.windows(2).map(|w| (w[1] - w[0]).sqrt()).collect();

    let width = times.len();
    let mut paths = vec![0.0; r * width];
    let mut coeffs = vec![0.0; r * n];
    paths
        .par_chunks_mut(width)
        .zip(coeffs.par_chunks_mut(n))
        .enumerate()
        .for_each(|(i, (row, xi))| {
            let mut rng = path_rng(seed, i);
            let mut b = 0.0;
            for j in 0..m {
                let z: f64 = StandardNormal.sample(&mut rng);
                let db = sd[j] * z;
                for k in 0..n {
                    xi[k] += q[j * n + k] * db;
                }
                b += db;
                row[j + 1] = b;
            }
            for j in 0..width {
                let corr: f64 = (0..n).map(|k| jw[j * n + k] * xi[k]).sum();
                row[j] -= corr;
            }
            row[0] = 0.0;
        });
    Ok(LoopEnsemble {
        n,
        grid: grid.clone(),
        seed,
        method: Method::Pathwise,
        paths,
        coefficients: Some(coeffs),
    })
}

pub fn sample(method: Method, n: usize, grid: &PathGrid, r: usize, seed: u64) -> Result<LoopEnsemble> {
    match method {
        Method::Spectral => sample_spectral(n, grid, r, seed),
        Method::Pathwise => sample_pathwise(n, grid, r, seed),
    }
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// Whether `target` lies within `k` standard errors.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.se
    }
}

/// Mean of `v` with SE from the sample variance.
pub fn mean_estimate(v: &[f64]) -> Estimate {
    let r = v.len() as f64;
    let mean = pairwise_sum(v) / r;
    let sq: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (r - 1.0).max(1.0);
    Estimate { value: mean, se: (var / r).sqrt() }
}

/// `E[XY]` for zero-mean `X, Y`: the product mean, with SE
/// `√((mean((xy)²) - mean(xy)²)/R)`.
pub fn product_moment(x: &[f64], y: &[f64]) -> Estimate {
    assert_eq!(x.len(), y.len());
    let r = x.len() as f64;
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let c = pairwise_sum(&xy) / r;
    let sq: Vec<f64> = xy.iter().map(|v| v * v).collect();
    let m4 = pairwise_sum(&sq) / r;
    Estimate { value: c, se: ((m4 - c * c).max(0.0) / r).sqrt() }
}

pub fn covariance_estimate(ens: &LoopEnsemble, i: usize, j: usize) -> Estimate {
    product_moment(&ens.column(i), &ens.column(j))
}

pub fn correlation(ens: &LoopEnsemble, i: usize, j: usize) -> f64 {
    let (x, y) = (ens.column(i), ens.column(j));
    let c = product_moment(&x, &y).value;
    let vx = product_moment(&x, &x).value;
    let vy = product_moment(&y, &y).value;
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    c / (vx * vy).sqrt()
}

/// `E[ξ_a ξ_b]` from a pathwise ensemble; ideally `δ_{ab}/(2a + 1)`.
pub fn coefficient_covariance(ens: &LoopEnsemble, a: usize, b: usize) -> Option<Estimate> {
    Some(product_moment(&ens.coefficient_column(a)?, &ens.coefficient_column(b)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationRow {
    pub n: usize,
    pub t: f64,
    /// Empirical `Var(√N·L_t)`.
    pub emp_var: Estimate,
    /// `N·C_N(t, t)`.
    pub analytic: f64,
    /// `√(t(1-t))/π`.
    pub semicircle: f64,
}

pub fn fluctuation_stats(ens: &LoopEnsemble) -> Result<Vec<FluctuationRow>> {
    let cfg = KernelConfig::new(ens.n)?;
    let nf = ens.n as f64;
    ens.grid
        .times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let col = ens.column(j);
            let e = product_moment(&col, &col);
            Ok(FluctuationRow {
                n: ens.n,
                t,
                emp_var: Estimate { value: nf * e.value, se: nf * e.se },
                analytic: nf * cov_cn(t, t, &cfg)?,
                semicircle: (t * (1.0 - t)).max(0.0).sqrt() / std::f64::consts::PI,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert_eq!(PathGrid::uniform(4).unwrap().times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(PathGrid::from_times(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(PathGrid::from_times(vec![0.1, 1.0]).is_err());
        assert!(PathGrid::uniform(0).is_err());
    }

    #[test]
    fn seed_determinism() {
        let g = PathGrid::uniform(8).unwrap();
        for method in [Method::Spectral, Method::Pathwise] {
            let a = sample(method, 3, &g, 50, 11).unwrap();
            let b = sample(method, 3, &g, 50, 11).unwrap();
            let c = sample(method, 3, &g, 50, 12).unwrap();
            assert_eq!(a, b);
            assert_ne!(a.paths, c.paths);
        }
    }

    #[test]
    fn pinned_start() {
        let g = PathGrid::uniform(4).unwrap();
        let e = sample_spectral(2, &g, 10, 1).unwrap();
        for i in 0..e.paths() {
            assert_eq!(e.path(i)[0], 0.0);
            assert_eq!(e.path(i)[4], 0.0);
        }
    }

    #[test]
    fn bridge_midpoint_variance() {
        let g = PathGrid::uniform(2).unwrap();
        let e = sample_spectral(1, &g, 20_000, 5).unwrap();
        let v = covariance_estimate(&e, 1, 1);
        assert!(v.within(0.25, 4.0), "{v:?}");
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
    }
}
