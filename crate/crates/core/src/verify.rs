//! Invariant suites shared by `verify-all` and the acceptance tests.
//!
//! Each check returns a [`Check`] carrying a pass flag and a short detail
//! line. Tolerances that come from calibration runs are the `pub const`s below.

use std::f64::consts::PI;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Result;
use crate::hankel::{v1_inverse_closed, v_matrix, HankelSystem};
use crate::kernels::{cd_sum_check, cov_cn, cov_cn_exact, dsn_dx, r_n, r_n_tail_cd, s_n_diag, KernelConfig};
use crate::legendre::{DarbouxApproximant, JacobiFamily};
use crate::moments::{
    b_closed, b_recursed, catalan, idat0_check, moment_oracle, moment_recursed, pfd_coeffs_by_solve,
    recursion_is_regular, semicircle_even_moment, sn_even_moment_exact, sn_even_moment_tail,
    sn_moment_gap_constant, sn_odd_moment_exact, CoeffTable, MomentKey,
};
use crate::poly::{rat, rat_int, rational_to_f64};
use crate::sampler::{coefficient_covariance, covariance_estimate, sample_pathwise, sample_spectral, PathGrid};

/// `|S_N(x) - S(x)|` allowed at `N = 2000`.
pub const SEMICIRCLE_TOL: f64 = 0.02;
/// `|N·C_N(1/2,1/2) - 1/(2π)|` allowed at `N = 2000`.
pub const DIAGONAL_LIMIT_TOL: f64 = 0.02;
/// Bounds on `n^{3/2}·max|P_n(cos θ) - main term|` over `θ ∈ [π/6, 5π/6]`.
pub const DARBOUX_BOUND_LEGENDRE: f64 = 0.40;
pub const DARBOUX_BOUND_INTEGRAL: f64 = 0.22;
/// Largest allowed ratio between the scaled errors at different `n`.
pub const DARBOUX_SPREAD: f64 = 1.25;
pub const DARBOUX_POINTS: usize = 2001;
pub const DERIVATIVE_REL_TOL: f64 = 1e-5;
pub const R2C_TOL_PER_N: f64 = 1e-9;
pub const TAIL_CD_TOL: f64 = 1e-6;
/// Standard-error multiple for Monte Carlo comparisons.
pub const MC_SIGMAS: f64 = 4.0;
pub const MC_SEED: u64 = 20_240_611;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Exact,
    Numeric,
    Statistical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn timed(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Check { name: name.to_string(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// `pfd_eval(a, k, n) == moment_oracle(n - a, n + a, k)` for `a <= 4`, `k <= 6`, `n ∈ a+1..=a+20`.
pub fn pfd_equivalence() -> Check {
    timed("partial fractions equal oracle moments", || {
        let table = CoeffTable::shared();
        let mut count = 0;
        for a in 0..=4i64 {
            for k in 0..=6u32 {
                for n in a + 1..=a + 20 {
                    let oracle = moment_oracle(MomentKey::new(n - a, n + a, k))?;
                    if !oracle.is_real() || table.pfd_eval(a, k, n)? != oracle.re {
                        return Ok((false, format!("mismatch at a={a}, k={k}, n={n}")));
                    }
                    count += 1;
                }
            }
        }
        Ok((true, format!("{count} moments agree")))
    })
}

/// The coefficient recursion agrees with the linear solve on oracle moments.
pub fn coefficient_routes() -> Check {
    timed("coefficient recursion equals linear solve", || {
        let table = CoeffTable::shared();
        for a in 0..=4u32 {
            for k in 0..=6u32 {
                if table.coeffs(a as i64, k)? != pfd_coeffs_by_solve(a, k)?.as_slice() {
                    return Ok((false, format!("mismatch at a={a}, k={k}")));
                }
            }
        }
        Ok((true, "a <= 4, k <= 6".into()))
    })
}

/// Bound relations between coefficient rows for `a, c ∈ 1..=6`, `k <= 6`.
pub fn bound_relations() -> Check {
    timed("coefficient bound relations", || {
        let table = CoeffTable::shared();
        for k in 0..=6 {
            for a in 1..=6 {
                if !table.bound_residual(a, k)?.is_zero() {
                    return Ok((false, format!("bound relation fails at a={a}, k={k}")));
                }
                for c in 1..=6 {
                    if !table.swap_residual(a, c, k)?.is_zero() {
                        return Ok((false, format!("swap relation fails at a={a}, c={c}, k={k}")));
                    }
                }
            }
        }
        Ok((true, "a, c <= 6, k <= 6".into()))
    })
}

/// The four-term recursion agrees with the oracle wherever it is regular.
pub fn recursion_equivalence() -> Check {
    timed("moment recursion equals oracle", || {
        let (mut done, mut skipped) = (0, 0);
        for p in -6..=6i64 {
            for q in -6..=6i64 {
                for k in 1..=4u32 {
                    if !recursion_is_regular(p, q, k) {
                        skipped += 1;
                        continue;
                    }
                    let key = MomentKey::new(p, q, k);
                    if moment_recursed(key)? != moment_oracle(key)? {
                        return Ok((false, format!("mismatch at p={p}, q={q}, k={k}")));
                    }
                    done += 1;
                }
            }
        }
        Ok((true, format!("{done} keys agree, {skipped} singular keys refused")))
    })
}

/// `B` from the table, the closed form and the recursion agree for `a, k <= 8`;
/// `B_{0,k} = 4^{-k}·C_k` for `k <= 10`.
pub fn catalan_identities() -> Check {
    timed("B sums and Catalan numbers", || {
        let table = CoeffTable::shared();
        for a in 0..=8i64 {
            for k in 0..=8u32 {
                let from_table = table.b_sum(a, k)?;
                if from_table != b_closed(a, k) || from_table != b_recursed(a, k) {
                    return Ok((false, format!("B mismatch at a={a}, k={k}")));
                }
            }
        }
        for k in 0..=10u32 {
            let expect = BigRational::from_integer(catalan(k)) / BigRational::from_integer(num_bigint::BigInt::from(4u32).pow(k));
            if b_closed(0, k) != expect || table.b_sum(0, k)? != expect {
                return Ok((false, format!("B_(0,{k}) is not 4^-k C_k")));
            }
        }
        Ok((true, "a, k <= 8; Catalan k <= 10".into()))
    })
}

pub fn idat0_identities() -> Check {
    timed("weighted coefficient identity", || {
        let bad: Vec<u32> = (0..=12).filter(|&k| !idat0_check(k)).collect();
        Ok((bad.is_empty(), if bad.is_empty() { "k <= 12".into() } else { format!("fails at k in {bad:?}") }))
    })
}

/// Even moments of `S_N` equal their telescoped form and approach the semicircle moments;
/// odd moments vanish.
pub fn moment_limits() -> Check {
    timed("moments of S_N", || {
        let mut worst = 0.0f64;
        for k in 0..=4u32 {
            let limit = semicircle_even_moment(k);
            let ck = sn_moment_gap_constant(k);
            for n in [50u32, 100, 200] {
                let exact = sn_even_moment_exact(k, n);
                let tail = sn_even_moment_tail(k, n);
                if exact != tail {
                    return Ok((false, format!("tail formula differs at k={k}, N={n}")));
                }
                let gap = &exact - &limit;
                let bound = &ck / rat_int(n as i64);
                let abs_gap = if gap < BigRational::zero() { -gap } else { gap };
                if abs_gap > bound {
                    return Ok((false, format!("gap exceeds c_k/N at k={k}, N={n}")));
                }
                worst = worst.max(rational_to_f64(&abs_gap) * n as f64);
                if !sn_odd_moment_exact(k, n).is_zero() {
                    return Ok((false, format!("odd moment nonzero at k={k}, N={n}")));
                }
            }
        }
        Ok((true, format!("max N·|gap| = {worst:.6}")))
    })
}

/// Hankel covariance equals the Legendre-form covariance on the `1/8` grid.
pub fn representation_equivalence() -> Check {
    timed("Hankel and Legendre covariances agree", || {
        for n in 1..=8usize {
            let sys = HankelSystem::build(n)?;
            for i in 0..=8 {
                for j in 0..=8 {
                    let (s, t) = (rat(i, 8), rat(j, 8));
                    if sys.cross_covariance(&s, &t)? != cov_cn_exact(&s, &t, n)? {
                        return Ok((false, format!("mismatch at N={n}, s={s}, t={t}")));
                    }
                }
            }
        }
        Ok((true, "N <= 8, 81 points each".into()))
    })
}

pub fn hankel_inverse() -> Check {
    timed("closed-form Hankel inverse", || {
        for n in 1..=12 {
            if !v_matrix(n, &rat(1, 1)).mul(&v1_inverse_closed(n)).is_identity() {
                return Ok((false, format!("V(1)·V(1)^-1 != I at N={n}")));
            }
        }
        Ok((true, "N <= 12".into()))
    })
}

/// Rational test pairs for the Christoffel–Darboux sums.
pub fn cd_pairs() -> Vec<(BigRational, BigRational)> {
    [(1, 2, -1, 3), (9, 10, 1, 10), (-3, 4, 2, 5), (1, 7, 1, 7), (1, 1, -1, 1), (0, 1, 5, 8), (-7, 9, -1, 9), (2, 3, 3, 5), (-1, 2, 1, 2), (11, 13, -12, 13)]
        .iter()
        .map(|&(a, b, c, d)| (rat(a, b), rat(c, d)))
        .collect()
}

pub fn christoffel_darboux() -> Check {
    timed("Christoffel-Darboux sums", || {
        for (x, y) in cd_pairs() {
            for n in 1..=40 {
                if !cd_sum_check(n, &x, &y)? {
                    return Ok((false, format!("fails at N={n}, x={x}, y={y}")));
                }
            }
        }
        Ok((true, "N <= 40 at 10 pairs".into()))
    })
}

pub const SEMICIRCLE_NS: [usize; 4] = [250, 500, 1000, 2000];

/// `|S_N(x) - S(x)|` decreases in `N` at `x ∈ {0, ±1/2}` and is small at `N = 2000`.
pub fn semicircle_pointwise() -> Check {
    timed("S_N approaches the semicircle", || {
        let mut detail = Vec::new();
        let mut passed = true;
        for x in [-0.5f64, 0.0, 0.5] {
            let target = (1.0 - x * x).sqrt() / PI;
            let errs: Vec<f64> = SEMICIRCLE_NS
                .iter()
                .map(|&n| s_n_diag(x, n).map(|v| (v - target).abs()))
                .collect::<Result<_>>()?;
            let monotone = errs.windows(2).all(|w| w[1] < w[0]);
            passed &= monotone && errs[3] <= SEMICIRCLE_TOL;
            detail.push(format!("x={x}: {:.2e}", errs[3]));
        }
        Ok((passed, format!("errors at N=2000: {}", detail.join(", "))))
    })
}

/// `dS_N/dx` against central differences on a 33-point grid. Errors are
/// relative to `max |dS_N/dx|` over the grid, which has zeros on it.
pub fn derivative_identity() -> Check {
    timed("derivative of S_N", || {
        let mut worst = 0.0f64;
        for n in [50usize, 200, 500] {
            let h = 3e-4 / n as f64;
            let xs: Vec<f64> = (0..33).map(|j| -0.9 + 1.8 * j as f64 / 32.0).collect();
            let exact: Vec<f64> = xs.iter().map(|&x| dsn_dx(x, n)).collect::<Result<_>>()?;
            let scale = exact.iter().fold(0.0f64, |m, d| m.max(d.abs()));
            for (&x, d) in xs.iter().zip(&exact) {
                let fd = (s_n_diag(x + h, n)? - s_n_diag(x - h, n)?) / (2.0 * h);
                worst = worst.max((fd - d).abs() / scale);
            }
        }
        Ok((worst <= DERIVATIVE_REL_TOL, format!("max relative error {worst:.2e}")))
    })
}

pub const DARBOUX_NS: [u32; 4] = [50, 100, 200, 400];

/// Scaled Darboux errors stay bounded and do not grow across `n`.
pub fn darboux_asymptotics() -> Check {
    timed("Darboux error term", || {
        let mut detail = Vec::new();
        let mut passed = true;
        for (family, bound) in [
            (JacobiFamily::Legendre, DARBOUX_BOUND_LEGENDRE),
            (JacobiFamily::Integral, DARBOUX_BOUND_INTEGRAL),
        ] {
            let errs: Vec<f64> = DARBOUX_NS
                .iter()
                .map(|&n| {
                    DarbouxApproximant::for_family(family, n, PI / 6.0, 5.0 * PI / 6.0)?
                        .max_scaled_error(DARBOUX_POINTS)
                })
                .collect::<Result<_>>()?;
            let hi = errs.iter().cloned().fold(0.0, f64::max);
            let lo = errs.iter().cloned().fold(f64::INFINITY, f64::min);
            passed &= hi <= bound && hi <= DARBOUX_SPREAD * lo;
            detail.push(format!("{family:?}: {}", errs.iter().map(|e| format!("{e:.3}")).collect::<Vec<_>>().join(" ")));
        }
        Ok((passed, detail.join("; ")))
    })
}

pub const DECORR_NS: [usize; 3] = [100, 400, 1600];

/// `|N·C_N(1/2, 1/2 + N^{-1/2})|` decreases across `N`.
pub fn decorrelation() -> Check {
    timed("decorrelation at scale N^-1/2", || {
        let vals: Vec<f64> = DECORR_NS
            .iter()
            .map(|&n| {
                let cfg = KernelConfig::new(n)?;
                Ok(n as f64 * cov_cn(0.5, 0.5 + (n as f64).powf(-0.5), &cfg)?)
            })
            .collect::<Result<_>>()?;
        let passed = vals.windows(2).all(|w| w[1].abs() < w[0].abs());
        Ok((passed, format!("values {}", vals.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(", "))))
    })
}

/// `R_N(2s-1, 2t-1) = 2N·C_N(s, t)` on a 21×21 grid.
pub fn rescaling_consistency() -> Check {
    timed("R_N and C_N consistency", || {
        let mut worst = 0.0f64;
        for n in [1usize, 4, 16, 64] {
            let cfg = KernelConfig::new(n)?;
            for i in 0..=20 {
                for j in 0..=20 {
                    let (s, t) = (i as f64 / 20.0, j as f64 / 20.0);
                    let d = (r_n(2.0 * s - 1.0, 2.0 * t - 1.0, &cfg)? - 2.0 * n as f64 * cov_cn(s, t, &cfg)?).abs();
                    worst = worst.max(d / n as f64);
                }
            }
        }
        Ok((worst <= R2C_TOL_PER_N, format!("max |diff|/N = {worst:.2e}")))
    })
}

/// Christoffel–Darboux tail form of `R_N` against the finite sum.
pub fn tail_equivalence() -> Check {
    timed("Christoffel-Darboux tail form", || {
        let mut worst = 0.0f64;
        for n in [1usize, 10, 100] {
            let cfg = KernelConfig::new(n)?;
            for (x, y) in [(0.3, -0.4), (0.7, 0.1), (-0.8, 0.5)] {
                worst = worst.max((r_n_tail_cd(x, y, n)? - r_n(x, y, &cfg)?).abs());
            }
        }
        Ok((worst <= TAIL_CD_TOL, format!("max difference {worst:.2e}")))
    })
}

pub const MC_SPECTRAL_PATHS: usize = 100_000;
pub const MC_PATHWISE_PATHS: usize = 10_000;
pub const MC_PATHWISE_STEPS: usize = 1024;

/// Spectral draws match `C_4` on the `1/8` grid, and pathwise draws match the
/// spectral ones.
pub fn monte_carlo_law() -> Check {
    timed("Monte Carlo covariance", || {
        let n = 4;
        let cfg = KernelConfig::new(n)?;
        let coarse = PathGrid::uniform(8)?;
        let spectral = sample_spectral(n, &coarse, MC_SPECTRAL_PATHS, MC_SEED)?;
        let fine = PathGrid::uniform(MC_PATHWISE_STEPS)?;
        let pathwise = sample_pathwise(n, &fine, MC_PATHWISE_PATHS, MC_SEED + 1)?;
        let stride = MC_PATHWISE_STEPS / 8;
        let (mut worst_analytic, mut worst_methods) = (0.0f64, 0.0f64);
        for i in 1..8 {
            for j in i..8 {
                let (s, t) = (coarse.times()[i], coarse.times()[j]);
                let sp = covariance_estimate(&spectral, i, j);
                let pw = covariance_estimate(&pathwise, i * stride, j * stride);
                worst_analytic = worst_analytic.max((sp.value - cov_cn(s, t, &cfg)?).abs() / sp.se);
                let combined = (sp.se * sp.se + pw.se * pw.se).sqrt();
                worst_methods = worst_methods.max((sp.value - pw.value).abs() / combined);
            }
        }
        let mut worst_coeff = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let e = coefficient_covariance(&pathwise, a, b).expect("pathwise ensemble keeps coefficients");
                let target = if a == b { 1.0 / (2 * a + 1) as f64 } else { 0.0 };
                worst_coeff = worst_coeff.max((e.value - target).abs() / e.se);
            }
        }
        let passed = worst_analytic <= MC_SIGMAS && worst_methods <= MC_SIGMAS && worst_coeff <= MC_SIGMAS;
        Ok((
            passed,
            format!(
                "max deviation in SE: spectral vs C_N {worst_analytic:.2}, pathwise vs spectral {worst_methods:.2}, coefficients {worst_coeff:.2}"
            ),
        ))
    })
}

pub const FLUCT_NS: [usize; 3] = [16, 64, 256];
pub const FLUCT_PATHS: usize = 100_000;

/// `Var(√N·L_{1/2})` tracks `N·C_N(1/2,1/2)`, which approaches `1/(2π)`.
pub fn fluctuation_trend() -> Check {
    timed("fluctuation variance at t = 1/2", || {
        let grid = PathGrid::from_times(vec![0.0, 0.5, 1.0])?;
        let mut worst = 0.0f64;
        for (idx, &n) in FLUCT_NS.iter().enumerate() {
            let ens = sample_spectral(n, &grid, FLUCT_PATHS, MC_SEED + 10 + idx as u64)?;
            let e = covariance_estimate(&ens, 1, 1);
            let analytic = cov_cn(0.5, 0.5, &KernelConfig::new(n)?)?;
            worst = worst.max((e.value - analytic).abs() / e.se);
        }
        let at_2000 = 2000.0 * cov_cn(0.5, 0.5, &KernelConfig::new(2000)?)?;
        let gap = (at_2000 - 0.5 / PI).abs();
        Ok((
            worst <= MC_SIGMAS && gap <= DIAGONAL_LIMIT_TOL,
            format!("max deviation {worst:.2} SE; |N·C_N - 1/(2π)| = {gap:.2e} at N=2000"),
        ))
    })
}

pub fn suite(level: Level) -> Vec<fn() -> Check> {
    let mut v: Vec<fn() -> Check> = vec![
        pfd_equivalence,
        coefficient_routes,
        bound_relations,
        recursion_equivalence,
        catalan_identities,
        idat0_identities,
        moment_limits,
        representation_equivalence,
        hankel_inverse,
        christoffel_darboux,
    ];
    if level >= Level::Numeric {
        v.extend([
            semicircle_pointwise as fn() -> Check,
            derivative_identity,
            darboux_asymptotics,
            decorrelation,
            rescaling_consistency,
            tail_equivalence,
        ]);
    }
    if level >= Level::Statistical {
        v.extend([monte_carlo_law as fn() -> Check, fluctuation_trend]);
    }
    v
}

pub fn run(level: Level) -> Vec<Check> {
    suite(level).into_iter().map(|f| f()).collect()
}
