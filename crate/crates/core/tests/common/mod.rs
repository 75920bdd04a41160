//! Reference implementations used only by tests. Built from textbook
//! formulas, independent of the library's recurrences and tables.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;
pub type Poly = Vec<Q>;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `P_n(x) = 2^{-n} Σ_j (-1)^j C(n, j) C(2n - 2j, n) x^{n - 2j}`.
pub fn legendre(n: usize) -> Poly {
    let mut c = vec![Q::zero(); n + 1];
    let scale = BigInt::from(2u32).pow(n as u32);
    for j in 0..=n / 2 {
        let v = binom(n as u64, j as u64) * binom((2 * n - 2 * j) as u64, n as u64);
        let v = if j % 2 == 0 { v } else { -v };
        c[n - 2 * j] = Q::new(v, scale.clone());
    }
    c
}

pub fn add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Q::zero(); a.len().max(b.len())];
    for (i, v) in a.iter().enumerate() {
        out[i] += v;
    }
    for (i, v) in b.iter().enumerate() {
        out[i] += v;
    }
    out
}

pub fn scale(a: &Poly, c: &Q) -> Poly {
    a.iter().map(|v| v * c).collect()
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn eval(a: &Poly, x: &Q) -> Q {
    a.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

/// `∫_{-1}^{1} x^j·a(x) dx`.
pub fn moment(a: &Poly, j: usize) -> Q {
    a.iter()
        .enumerate()
        .filter(|(i, _)| (i + j).is_multiple_of(2))
        .fold(Q::zero(), |acc, (i, c)| acc + c * q(2, (i + j + 1) as i64))
}

/// `I_n = (P_{n+1} - P_{n-1})/(2n + 1)` for `n >= 1`.
pub fn integral(n: usize) -> Poly {
    assert!(n >= 1);
    scale(&add(&legendre(n + 1), &scale(&legendre(n - 1), &q(-1, 1))), &q(1, 2 * n as i64 + 1))
}

/// `A_0 = 1 + x`, `A_n = I_n`.
pub fn antiderivative(n: usize) -> Poly {
    if n == 0 {
        vec![q(1, 1), q(1, 1)]
    } else {
        integral(n)
    }
}

/// `m_{p,q}^k = (p + q + 1)∫ x^{2k} I_p I_q` for `p, q >= 1`.
pub fn moment_pq(p: usize, qq: usize, k: usize) -> Q {
    moment(&mul(&integral(p), &integral(qq)), 2 * k) * q((p + qq + 1) as i64, 1)
}

/// `S_N(x) = N·(1 + x - Σ_{n<N} (2n+1)/2·A_n(x)²)`.
pub fn s_n_poly(n_steps: usize) -> Poly {
    let mut sum: Poly = vec![q(1, 1), q(1, 1)];
    for n in 0..n_steps {
        let a = antiderivative(n);
        sum = add(&sum, &scale(&mul(&a, &a), &q(-(2 * n as i64 + 1), 2)));
    }
    scale(&sum, &q(n_steps as i64, 1))
}

/// `C_N(s, t) = (min(1+x, 1+y) - Σ_{n<N} (2n+1)/2·A_n(x)A_n(y))/2` with `x = 2s - 1`, `y = 2t - 1`.
pub fn cov(n_steps: usize, s: &Q, t: &Q) -> Q {
    let two = q(2, 1);
    let (x, y) = (&two * s - Q::one(), &two * t - Q::one());
    let m = if x < y { &x + Q::one() } else { &y + Q::one() };
    let mut acc = m;
    for n in 0..n_steps {
        let a = antiderivative(n);
        acc -= q(2 * n as i64 + 1, 2) * eval(&a, &x) * eval(&a, &y);
    }
    acc / two
}

pub fn catalan(k: u64) -> BigInt {
    binom(2 * k, k) / BigInt::from(k + 1)
}

pub fn abs(v: &Q) -> Q {
    v.abs()
}

/// Bonnet recurrence in `f64`, returning `P_0..=P_n`.
pub fn legendre_f64(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0, x];
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0) * x * p[m] - mf * p[m - 1]) / (mf + 1.0);
        p.push(next);
    }
    p.truncate(n + 1);
    p
}

/// `S_N(x)` in `f64` from the Bonnet values.
pub fn s_n_f64(n_steps: usize, x: f64) -> f64 {
    let p = legendre_f64(n_steps + 1, x);
    let mut acc = 1.0 + x - 0.5 * (1.0 + x) * (1.0 + x);
    for n in 1..n_steps {
        let i = (p[n + 1] - p[n - 1]) / (2 * n + 1) as f64;
        acc -= (2 * n + 1) as f64 / 2.0 * i * i;
    }
    n_steps as f64 * acc
}

/// `C_N(s, t)` in `f64`.
pub fn cov_f64(n_steps: usize, s: f64, t: f64) -> f64 {
    let (x, y) = (2.0 * s - 1.0, 2.0 * t - 1.0);
    let px = legendre_f64(n_steps + 1, x);
    let py = legendre_f64(n_steps + 1, y);
    let a = |p: &[f64], z: f64, n: usize| if n == 0 { 1.0 + z } else { (p[n + 1] - p[n - 1]) / (2 * n + 1) as f64 };
    let mut acc = (1.0 + x).min(1.0 + y);
    for n in 0..n_steps {
        acc -= (2 * n + 1) as f64 / 2.0 * a(&px, x, n) * a(&py, y, n);
    }
    acc / 2.0
}

pub fn semicircle(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt() / std::f64::consts::PI
}
