//! Covariance kernels of the step-`N` loop.
//!
//! With `J_n(s) = ∫_0^s Q_n = A_n(2s - 1)/2`:
//!
//! ```text
//! C_N(s, t) = min(s, t) - Σ_{n<N} (2n + 1)·J_n(s)·J_n(t)
//! R_N(x, y) = N·(min(1 + x, 1 + y) - Σ_{n<N} (2n + 1)/2·A_n(x)·A_n(y))
//! S_N(x)    = R_N(x, x)
//! ```
//!
//! The Christoffel–Darboux quantities `D_{n+1}(x, y) = I_{n+1}(x)I_n(y) - I_n(x)I_{n+1}(y)`
//! are exposed as verification oracles.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{check_symmetric_interval, check_unit_interval, Error, Result};
use crate::legendre::{antiderivatives_unchecked, legendre_pair_unchecked, ExactLegendre};
use crate::poly::{rat, rat_int, RationalPoly};


/// Number of terms kept by [`r_n_tail_cd`] beyond `N`.
pub const TAIL_TERMS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelConfig {
    pub n: usize,
    /// Evaluate through exact rationals (the `f64` inputs are converted exactly).
    pub exact: bool,
}

impl KernelConfig {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        Ok(Self { n, exact: false })
    }

    pub fn exact(n: usize) -> Result<Self> {
        Ok(Self { exact: true, ..Self::new(n)? })
    }
}

/// Kahan–Babuška compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn compensated(terms: impl Iterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    terms.for_each(|v| acc.add(v));
    acc.value()
}

/// `Σ_{n<N} (2n + 1)·A_n(x)·A_n(y)`.
fn legendre_cross_sum(n: usize, x: f64, y: f64) -> f64 {
    let mut ax = Vec::with_capacity(n);
    let mut ay = Vec::with_capacity(n);
    antiderivatives_unchecked(n - 1, x, &mut ax);
    antiderivatives_unchecked(n - 1, y, &mut ay);
    let terms = ax
        .iter()
        .zip(&ay)
        .enumerate()
        .map(|(k, (a, b))| (2 * k + 1) as f64 * a * b);
    compensated(terms)
}

fn to_rational(name: &str, v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::Domain(format!("{name}={v} is not finite")))
}

pub fn cov_cn(s: f64, t: f64, cfg: &KernelConfig) -> Result<f64> {
    check_unit_interval("s", s)?;
    check_unit_interval("t", t)?;
    if cfg.exact {
        let v = cov_cn_exact(&to_rational("s", s)?, &to_rational("t", t)?, cfg.n)?;
        return Ok(crate::poly::rational_to_f64(&v));
    }
    Ok(s.min(t) - 0.25 * legendre_cross_sum(cfg.n, 2.0 * s - 1.0, 2.0 * t - 1.0))
}

pub fn r_n(x: f64, y: f64, cfg: &KernelConfig) -> Result<f64> {
    check_symmetric_interval("x", x)?;
    check_symmetric_interval("y", y)?;
    if cfg.exact {
        let v = r_n_exact(&to_rational("x", x)?, &to_rational("y", y)?, cfg.n)?;
        return Ok(crate::poly::rational_to_f64(&v));
    }
    let n = cfg.n as f64;
    Ok(n * ((1.0 + x).min(1.0 + y) - 0.5 * legendre_cross_sum(cfg.n, x, y)))
}

pub fn s_n_diag(x: f64, n: usize) -> Result<f64> {
    r_n(x, x, &KernelConfig::new(n)?)
}

/// `dS_N/dx = -N·P_{N-1}(x)·P_N(x)`.
pub fn dsn_dx(x: f64, n: usize) -> Result<f64> {
    check_symmetric_interval("x", x)?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let (p_prev, p) = legendre_pair_unchecked(n, x);
    Ok(-(n as f64) * p_prev * p)
}

/// `A_0(x), ..., A_{n_max}(x)` over the rationals, by recurrence.
pub fn antiderivatives_exact(n_max: usize, x: &BigRational) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(BigRational::one() + x);
    if n_max == 0 {
        return out;
    }
    let i1 = (x * x - BigRational::one()) * rat(1, 2);
    let i2 = x * &i1;
    out.push(i1);
    if n_max == 1 {
        return out;
    }
    out.push(i2);
    for n in 2..n_max {
        let ni = n as i64;
        let next = (rat_int(2 * ni + 1) * x * &out[n] - rat_int(ni - 1) * &out[n - 1]) / rat_int(ni + 2);
        out.push(next);
    }
    out
}

fn cross_sum_exact(n: usize, x: &BigRational, y: &BigRational) -> BigRational {
    let ax = antiderivatives_exact(n - 1, x);
    let ay = antiderivatives_exact(n - 1, y);
    ax.iter()
        .zip(&ay)
        .enumerate()
        .fold(BigRational::zero(), |acc, (k, (a, b))| acc + rat_int(2 * k as i64 + 1) * a * b)
}

fn rational_min(a: &BigRational, b: &BigRational) -> BigRational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn cov_cn_exact(s: &BigRational, t: &BigRational, n: usize) -> Result<BigRational> {
    let (zero, one) = (BigRational::zero(), BigRational::one());
    if *s < zero || *s > one || *t < zero || *t > one {
        return Err(Error::Domain(format!("({s}, {t}) is outside the unit square")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let x = s * rat_int(2) - &one;
    let y = t * rat_int(2) - &one;
    Ok(rational_min(s, t) - cross_sum_exact(n, &x, &y) * rat(1, 4))
}

pub fn r_n_exact(x: &BigRational, y: &BigRational, n: usize) -> Result<BigRational> {
    let one = BigRational::one();
    if x.abs_gt_one() || y.abs_gt_one() {
        return Err(Error::Domain(format!("({x}, {y}) is outside [-1, 1]²")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let m = rational_min(&(&one + x), &(&one + y));
    Ok((m - cross_sum_exact(n, x, y) * rat(1, 2)) * rat_int(n as i64))
}

trait AbsGtOne {
    fn abs_gt_one(&self) -> bool;
}

impl AbsGtOne for BigRational {
    fn abs_gt_one(&self) -> bool {
        *self > BigRational::one() || *self < -BigRational::one()
    }
}

/// `S_N` as an exact polynomial in `x`; bounded by the exact-polynomial cap.
pub fn s_n_exact_poly(n: usize) -> Result<RationalPoly> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let table = ExactLegendre::global();
    let mut sum = RationalPoly::zero();
    for k in 0..n {
        let a = table.antiderivative(k)?;
        sum = &sum + &(&a * &a).scale(&rat(2 * k as i64 + 1, 2));
    }
    let lin = RationalPoly::from_i64(&[(1, 1), (1, 1)]);
    Ok((&lin - &sum).scale(&rat_int(n as i64)))
}

/// Limit density `S(x) = √(1 - x²)/π`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SemicircleDensity;

impl SemicircleDensity {
    pub fn value(&self, x: f64) -> Result<f64> {
        check_symmetric_interval("x", x)?;
        Ok((1.0 - x * x).max(0.0).sqrt() / PI)
    }

    /// Variance `√(t(1 - t))/π` of the fluctuation limit at time `t`.
    pub fn variance(&self, t: f64) -> Result<f64> {
        check_unit_interval("t", t)?;
        Ok((t * (1.0 - t)).max(0.0).sqrt() / PI)
    }
}

fn check_cd_index(n: i64) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!(
            "Christoffel-Darboux index n={n} must be at least 1"
        )));
    }
    Ok(n as usize)
}

/// `D_{n+1}(x, y)` by definition and by the one-step recursion started at
/// `D_2 = (x - y)·I_1(x)·I_1(y)`.
pub fn cd_pair(n: i64, x: f64, y: f64) -> Result<(f64, f64)> {
    let n = check_cd_index(n)?;
    check_symmetric_interval("x", x)?;
    check_symmetric_interval("y", y)?;
    let mut ix = Vec::new();
    let mut iy = Vec::new();
    antiderivatives_unchecked(n + 1, x, &mut ix);
    antiderivatives_unchecked(n + 1, y, &mut iy);
    let direct = ix[n + 1] * iy[n] - ix[n] * iy[n + 1];
    let mut d = 0.0;
    for m in 1..=n {
        let mf = m as f64;
        d = ((x - y) * (2.0 * mf + 1.0) * ix[m] * iy[m] + (mf - 1.0) * d) / (mf + 2.0);
    }
    Ok((direct, d))
}

pub fn cd_pair_exact(n: i64, x: &BigRational, y: &BigRational) -> Result<(BigRational, BigRational)> {
    let n = check_cd_index(n)?;
    let ix = antiderivatives_exact(n + 1, x);
    let iy = antiderivatives_exact(n + 1, y);
    let direct = &ix[n + 1] * &iy[n] - &ix[n] * &iy[n + 1];
    let diff = x - y;
    let mut d = BigRational::zero();
    for m in 1..=n {
        let mi = m as i64;
        d = (&diff * rat_int(2 * mi + 1) * &ix[m] * &iy[m] + rat_int(mi - 1) * d) / rat_int(mi + 2);
    }
    Ok((direct, d))
}

/// `(x - y)·Σ_{n=1}^{N} (2n + 1)·I_n(x)·I_n(y) == N·D_{N+1} + 2·Σ_{n=1}^{N} D_{n+1}`,
/// decided in exact arithmetic.
pub fn cd_sum_check(n_steps: usize, x: &BigRational, y: &BigRational) -> Result<bool> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let ix = antiderivatives_exact(n_steps + 1, x);
    let iy = antiderivatives_exact(n_steps + 1, y);
    let d = |m: usize| &ix[m + 1] * &iy[m] - &ix[m] * &iy[m + 1];
    let lhs = (1..=n_steps).fold(BigRational::zero(), |acc, m| {
        acc + rat_int(2 * m as i64 + 1) * &ix[m] * &iy[m]
    }) * (x - y);
    let rhs = d(n_steps) * rat_int(n_steps as i64)
        + (1..=n_steps).fold(BigRational::zero(), |acc, m| acc + d(m)) * rat_int(2);
    Ok(lhs == rhs)
}

/// `R_N(x, y)` from the Christoffel–Darboux form of the tail
/// `N/(2(x - y))·(2·Σ_{n>=N} D_{n+1} - (N - 1)·D_N)`, truncated after
/// [`TAIL_TERMS`] terms.
pub fn r_n_tail_cd(x: f64, y: f64, n: usize) -> Result<f64> {
    check_symmetric_interval("x", x)?;
    check_symmetric_interval("y", y)?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if x == y {
        return Err(Error::Domain("the tail form needs x != y".into()));
    }
    let top = n + TAIL_TERMS + 1;
    let mut ix = Vec::with_capacity(top + 1);
    let mut iy = Vec::with_capacity(top + 1);
    antiderivatives_unchecked(top, x, &mut ix);
    antiderivatives_unchecked(top, y, &mut iy);
    let d = |m: usize| ix[m + 1] * iy[m] - ix[m] * iy[m + 1];
    let mut acc = CompensatedSum::default();
    for m in n..=n + TAIL_TERMS {
        acc.add(2.0 * d(m));
    }
    if n >= 2 {
        acc.add(-((n - 1) as f64) * d(n - 1));
    }
    Ok(n as f64 / (2.0 * (x - y)) * acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecorrRow {
    pub n: usize,
    pub beta: f64,
    pub t: f64,
    pub value: f64,
}

/// Rows `(N, β, t, N·C_N(s, s + N^{-β}·t))`.
pub fn decorrelation_scan(s: f64, t_offsets: &[f64], beta: f64, n_list: &[usize]) -> Result<Vec<DecorrRow>> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s={s} must lie in (0, 1)")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("beta={beta} must lie in (0, 1)")));
    }
    let jobs: Vec<(usize, f64)> = n_list
        .iter()
        .flat_map(|&n| t_offsets.iter().map(move |&t| (n, t)))
        .collect();
    jobs.par_iter()
        .map(|&(n, t)| {
            let cfg = KernelConfig::new(n)?;
            let shifted = s + (n as f64).powf(-beta) * t;
            if !(0.0..=1.0).contains(&shifted) {
                return Err(Error::Domain(format!(
                    "shifted point {shifted} for N={n}, t={t} leaves [0, 1]"
                )));
            }
            Ok(DecorrRow { n, beta, t, value: n as f64 * cov_cn(s, shifted, &cfg)? })
        })
        .collect()
}

/// Which kernel a grid evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    C,
    R,
    S,
}

/// Inclusive equispaced grid of `m` points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, m: usize) -> Result<Vec<f64>> {
    match m {
        0 => Err(Error::InvalidArgument("grid needs at least one point".into())),
        1 => Ok(vec![lo]),
        _ => Ok((0..m)
            .map(|i| if i == m - 1 { hi } else { lo + (hi - lo) * i as f64 / (m - 1) as f64 })
            .collect()),
    }
}

/// Kernel values on an `m`-point grid, in parallel. Rows are `(s, t, value)`
/// for `C` (on `[0,1]²`) and `R` (on `[-1,1]²`), and `(x, x, value)` for `S`.
pub fn kernel_grid(kind: KernelKind, cfg: &KernelConfig, m: usize) -> Result<Vec<(f64, f64, f64)>> {
    match kind {
        KernelKind::C => {
            let g = linspace(0.0, 1.0, m)?;
            square(&g).par_iter().map(|&(s, t)| Ok((s, t, cov_cn(s, t, cfg)?))).collect()
        }
        KernelKind::R => {
            let g = linspace(-1.0, 1.0, m)?;
            square(&g).par_iter().map(|&(x, y)| Ok((x, y, r_n(x, y, cfg)?))).collect()
        }
        KernelKind::S => {
            let g = linspace(-1.0, 1.0, m)?;
            g.par_iter().map(|&x| Ok((x, x, r_n(x, x, cfg)?))).collect()
        }
    }
}

fn square(g: &[f64]) -> Vec<(f64, f64)> {
    g.iter().flat_map(|&a| g.iter().map(move |&b| (a, b))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_bridge_at_n1() {
        let cfg = KernelConfig::new(1).unwrap();
        assert!((cov_cn(0.5, 0.5, &cfg).unwrap() - 0.25).abs() < 1e-15);
        assert!((cov_cn(0.3, 0.7, &cfg).unwrap() - 0.09).abs() < 1e-15);
    }

    #[test]
    fn boundary_and_small_values() {
        assert_eq!(r_n(1.0, 1.0, &KernelConfig::new(9).unwrap()).unwrap().abs(), 0.0);
        assert!(s_n_diag(-1.0, 17).unwrap().abs() < 1e-14);
        assert!((s_n_diag(0.0, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!(dsn_dx(0.0, 7).unwrap().abs() < 1e-15);
        assert!((dsn_dx(1.0, 10).unwrap() + 10.0).abs() < 1e-12);
    }

    #[test]
    fn exact_matches_float() {
        let f = cov_cn(0.375, 0.625, &KernelConfig::new(12).unwrap()).unwrap();
        let e = cov_cn(0.375, 0.625, &KernelConfig::exact(12).unwrap()).unwrap();
        assert!((f - e).abs() < 1e-14);
    }

    #[test]
    fn cd_examples() {
        assert_eq!(cd_pair(1, 0.3, 0.3).unwrap(), (0.0, 0.0));
        let (a, b) = cd_pair(5, 1.0, 0.2).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15);
        let (a, b) = cd_pair_exact(2, &rat(1, 2), &rat(-1, 2)).unwrap();
        assert_eq!(a, b);
        assert!(cd_sum_check(3, &rat(1, 2), &rat(-1, 3)).unwrap());
        assert!(cd_pair(0, 0.1, 0.2).is_err());
    }

    #[test]
    fn domain_errors() {
        let cfg = KernelConfig::new(3).unwrap();
        assert!(matches!(cov_cn(1.5, 0.0, &cfg), Err(Error::Domain(_))));
        assert!(matches!(r_n(0.0, -1.1, &cfg), Err(Error::Domain(_))));
        assert!(KernelConfig::new(0).is_err());
    }

    #[test]
    fn grid_includes_endpoints() {
        let g = linspace(0.0, 1.0, 5).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
