//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails. Run with
//! `cargo test -p kolmo-core --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::{q, Q};
use kolmo_core::hankel::{cross_covariance, v1_inverse_closed};
use kolmo_core::kernels::{cov_cn, dsn_dx, s_n_diag, KernelConfig};
use kolmo_core::moments::{sn_even_moment_exact, sn_moment_gap_constant, sn_odd_moment_exact, CoeffTable};
use kolmo_core::verify::{self, Check};
use num_bigint::BigInt;
use num_traits::{One, Zero};

const SCALAR_AGREEMENT: f64 = 1e-9;
const DARBOUX_LEADING_SPREAD: f64 = 1.25;
const DARBOUX_LEADING_BOUND: f64 = 0.5;

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_check(c: Check) -> Outcome {
    Outcome { passed: c.passed, detail: c.detail }
}

fn and(a: Outcome, b: Outcome) -> Outcome {
    Outcome { passed: a.passed && b.passed, detail: format!("{}; {}", a.detail, b.detail) }
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn pfd_equivalence() -> Outcome {
    let table = CoeffTable::shared();
    let integrals: Vec<common::Poly> = (0..=28).map(|n| if n == 0 { Vec::new() } else { common::integral(n) }).collect();
    let mut failures = Vec::new();
    for a in 0..=4usize {
        for k in 0..=6usize {
            for n in a + 1..=a + 20 {
                let (p, qq) = (n - a, n + a);
                let reference = common::moment(&common::mul(&integrals[p], &integrals[qq]), 2 * k) * q((p + qq + 1) as i64, 1);
                if table.pfd_eval(a as i64, k as u32, n as i64).ok() != Some(reference) {
                    failures.push((a, k, n));
                }
            }
        }
    }
    let own = outcome(failures.is_empty(), format!("reference integrals: {} mismatches", failures.len()));
    and(from_check(verify::pfd_equivalence()), own)
}

fn catalan_identities() -> Outcome {
    let table = CoeffTable::shared();
    let b = |a: i64, k: u32| table.b_sum(a.abs(), k).expect("table covers the range");
    let mut ok = true;
    for k in 0..=10u32 {
        let four_k = Q::from_integer(BigInt::from(4u32).pow(k));
        ok &= b(0, k) * &four_k == Q::from_integer(common::catalan(k as u64));
    }
    for k in 0..8u32 {
        for a in 0..=8i64 {
            let stencil = (b(a - 1, k) + b(a, k) * q(2, 1) + b(a + 1, k)) * q(1, 4);
            ok &= b(a, k + 1) == stencil;
        }
    }
    let own = outcome(ok, "Catalan numbers and (1,2,1) stencil on table sums");
    and(from_check(verify::catalan_identities()), own)
}

fn moment_limits() -> Outcome {
    let n = 50usize;
    let poly = common::s_n_poly(n);
    let mut ok = true;
    for k in 0..=4usize {
        let even = common::moment(&poly, 2 * k);
        ok &= even == sn_even_moment_exact(k as u32, n as u32);
        ok &= common::moment(&poly, 2 * k + 1).is_zero();
        ok &= sn_odd_moment_exact(k as u32, n as u32).is_zero();
        let limit = Q::from_integer(common::catalan(k as u64)) / Q::from_integer(BigInt::from(4u32).pow(k as u32)) * q(1, 2);
        ok &= common::abs(&(even - limit)) <= sn_moment_gap_constant(k as u32) / q(n as i64, 1);
    }
    let own = outcome(ok, "reference polynomial S_50 moments agree");
    and(from_check(verify::moment_limits()), own)
}

fn representation_equivalence() -> Outcome {
    let mut ok = true;
    for n in 1..=8usize {
        for i in 0..=8 {
            for j in 0..=8 {
                let (s, t) = (q(i, 8), q(j, 8));
                ok &= cross_covariance(n, &s, &t).ok() == Some(common::cov(n, &s, &t));
            }
        }
    }
    let own = outcome(ok, "Hankel covariance equals reference Legendre sum");
    and(from_check(verify::representation_equivalence()), own)
}

fn hankel_inverse() -> Outcome {
    let mut ok = true;
    for n in 1..=12usize {
        let fact = |m: usize| Q::from_integer((1..=m as u64).fold(BigInt::one(), |acc, v| acc * v));
        let v: Vec<Vec<Q>> = (0..n)
            .map(|k| (0..n).map(|l| if l % 2 == 0 { Q::one() } else { -Q::one() } / fact(k + l + 1)).collect())
            .collect();
        let inv = v1_inverse_closed(n);
        for i in 0..n {
            for j in 0..n {
                let entry = (0..n).fold(Q::zero(), |acc, m| acc + &v[i][m] * &inv[(m, j)]);
                ok &= entry == if i == j { Q::one() } else { Q::zero() };
            }
        }
    }
    let own = outcome(ok, "reference product with V(1) is the identity");
    and(from_check(verify::hankel_inverse()), own)
}

fn christoffel_darboux() -> Outcome {
    let top = 41;
    let polys: Vec<common::Poly> = (0..=top).map(|n| if n == 0 { Vec::new() } else { common::integral(n) }).collect();
    let mut ok = true;
    for (x, y) in verify::cd_pairs() {
        let ix: Vec<Q> = (0..=top).map(|n| if n == 0 { Q::zero() } else { common::eval(&polys[n], &x) }).collect();
        let iy: Vec<Q> = (0..=top).map(|n| if n == 0 { Q::zero() } else { common::eval(&polys[n], &y) }).collect();
        let d = |m: usize| &ix[m + 1] * &iy[m] - &ix[m] * &iy[m + 1];
        let mut weighted = Q::zero();
        let mut boundary = Q::zero();
        for n in 1..=40usize {
            weighted += q(2 * n as i64 + 1, 1) * &ix[n] * &iy[n];
            boundary += d(n);
            ok &= &weighted * (&x - &y) == d(n) * q(n as i64, 1) + &boundary * q(2, 1);
        }
    }
    let own = outcome(ok, "identity holds on reference polynomials");
    and(from_check(verify::christoffel_darboux()), own)
}

fn semicircle_pointwise() -> Outcome {
    let mut worst = 0.0f64;
    for &n in &verify::SEMICIRCLE_NS {
        for x in [-0.5, 0.0, 0.5] {
            let lib = s_n_diag(x, n).unwrap_or(f64::NAN);
            worst = worst.max((lib - common::s_n_f64(n, x)).abs());
        }
    }
    let own = outcome(worst <= SCALAR_AGREEMENT, format!("reference S_N agreement {worst:.1e}"));
    and(from_check(verify::semicircle_pointwise()), own)
}

fn derivative_identity() -> Outcome {
    let mut worst = 0.0f64;
    for n in [50usize, 200, 500] {
        for j in 0..33 {
            let x = -0.9 + 1.8 * j as f64 / 32.0;
            let p = common::legendre_f64(n, x);
            let reference = -(n as f64) * p[n - 1] * p[n];
            worst = worst.max((dsn_dx(x, n).unwrap_or(f64::NAN) - reference).abs());
        }
    }
    let own = outcome(worst <= SCALAR_AGREEMENT, format!("closed form agreement {worst:.1e}"));
    and(from_check(verify::derivative_identity()), own)
}

fn monte_carlo_law() -> Outcome {
    from_check(verify::monte_carlo_law())
}

fn fluctuation_trend() -> Outcome {
    let reference = 2000.0 * common::cov_f64(2000, 0.5, 0.5);
    let lib = 2000.0 * cov_cn(0.5, 0.5, &KernelConfig::new(2000).expect("N >= 1")).unwrap_or(f64::NAN);
    let gap = (reference - 0.5 / PI).abs();
    let own = outcome(
        gap <= verify::DIAGONAL_LIMIT_TOL && (reference - lib).abs() <= SCALAR_AGREEMENT * 2000.0,
        format!("reference N·C_N(1/2,1/2) = {reference:.6} at N=2000"),
    );
    and(from_check(verify::fluctuation_trend()), own)
}

fn darboux_asymptotics() -> Outcome {
    let points = 2001;
    let errs: Vec<f64> = verify::DARBOUX_NS
        .iter()
        .map(|&n| {
            let n = n as usize;
            (0..points)
                .map(|j| {
                    let theta = PI / 6.0 + (2.0 * PI / 3.0) * j as f64 / (points - 1) as f64;
                    let p = common::legendre_f64(n, theta.cos())[n];
                    let main = (2.0 / (PI * n as f64 * theta.sin())).sqrt() * ((n as f64 + 0.5) * theta - PI / 4.0).cos();
                    (n as f64).powf(1.5) * (p - main).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let hi = errs.iter().cloned().fold(0.0, f64::max);
    let lo = errs.iter().cloned().fold(f64::INFINITY, f64::min);
    let own = outcome(
        hi <= DARBOUX_LEADING_BOUND && hi <= DARBOUX_LEADING_SPREAD * lo,
        format!("leading-term reference {}", errs.iter().map(|e| format!("{e:.3}")).collect::<Vec<_>>().join(" ")),
    );
    and(from_check(verify::darboux_asymptotics()), own)
}

fn decorrelation() -> Outcome {
    let vals: Vec<f64> = verify::DECORR_NS
        .iter()
        .map(|&n| n as f64 * common::cov_f64(n, 0.5, 0.5 + (n as f64).powf(-0.5)))
        .collect();
    let own = outcome(
        vals.windows(2).all(|w| w[1].abs() < w[0].abs()),
        format!("reference values {}", vals.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(", ")),
    );
    and(from_check(verify::decorrelation()), own)
}

fn main() -> ExitCode {
    let criteria: [(&str, f64, fn() -> Outcome); 12] = [
        ("exact partial-fraction equivalence", 60.0, pfd_equivalence),
        ("Catalan identities", 5.0, catalan_identities),
        ("moment limits", 60.0, moment_limits),
        ("representation equivalence", 30.0, representation_equivalence),
        ("Hankel inverse", 10.0, hankel_inverse),
        ("Christoffel-Darboux", 30.0, christoffel_darboux),
        ("semicircle pointwise", 60.0, semicircle_pointwise),
        ("derivative identity", 10.0, derivative_identity),
        ("Monte Carlo law", 300.0, monte_carlo_law),
        ("fluctuation trend", 300.0, fluctuation_trend),
        ("Darboux asymptotics", 30.0, darboux_asymptotics),
        ("decorrelation", 30.0, decorrelation),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let passed = out.passed && secs <= *budget;
        failed += usize::from(!passed);
        println!(
            "{} {:>2} {name} ({secs:.2}s of {budget:.0}s): {}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            out.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
