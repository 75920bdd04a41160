//! Exact moment analysis of the diagonal kernel `S_N`.
//!
//! The central objects are the moments
//! `m_{p,q}^k = (p + q + 1)·∫_{-1}^{1} x^{2k}·I_p(x)·I_q(x) dx`
//! and the partial-fraction coefficients `b_{a,k}^l` for which
//!
//! ```text
//! m_{n-a,n+a}^k = Σ_l b_{a,k}^l / (2n - 2l - 1) - Σ_l b_{a,k}^l / (2n + 2l + 3).
//! ```
//!
//! Three independent routes produce moment values: direct expansion and
//! integration of exact polynomials ([`moment_oracle`]), the four-term
//! recursion in `k` ([`moment_recursed`]) and evaluation of the partial
//! fractions ([`CoeffTable::pfd_eval`]). The coefficients themselves come
//! from a recursion over `k` ([`CoeffTable::new`]) and can be cross-checked
//! against a linear solve on oracle values ([`pfd_coeffs_by_solve`]).

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::legendre::ExactLegendre;
use crate::linalg::RationalMatrix;
use crate::poly::{binomial, rat, rat_int, GaussRational, RationalPoly};

/// Default largest `k` (and `a`) covered by the shared coefficient table.
pub const DEFAULT_MAX_ORDER: u32 = 12;
pub const DEFAULT_MAX_SHIFT: u32 = 12;

/// Index of a moment `m_{p,q}^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MomentKey {
    pub p: i64,
    pub q: i64,
    pub k: u32,
}

impl MomentKey {
    pub fn new(p: i64, q: i64, k: u32) -> Self {
        Self { p, q, k }
    }
}

/// `m_{p,q}^k` by expanding `x^{2k}·I_p·I_q` and integrating term by term.
///
/// Complex in general; real whenever `p + q` is even.
pub fn moment_oracle(key: MomentKey) -> Result<GaussRational> {
    moment_oracle_with(ExactLegendre::global(), key)
}

pub fn moment_oracle_with(table: &ExactLegendre, key: MomentKey) -> Result<GaussRational> {
    let ip = table.i(key.p)?;
    let iq = table.i(key.q)?;
    let prod = &ip * &iq;
    let j = 2 * key.k as usize;
    let integral = GaussRational::new(prod.re.moment(j), prod.im.moment(j));
    Ok(integral.scale(&rat_int(key.p + key.q + 1)))
}

/// Whether [`moment_recursed`] can evaluate `m_{p,q}^k` without hitting a
/// zero denominator `p' + q' + 3` or `p' + q' - 1`.
///
/// Every node of the recursion tree at depth `d` has `p' + q' = p + q + 2j`
/// with `|j| <= d`, and only nodes with `k' >= 1` divide. So the key is refused
/// exactly when `p + q` is odd and lies within `2(k - 1)` of `-3` or `1`.
pub fn recursion_is_regular(p: i64, q: i64, k: u32) -> bool {
    if k == 0 {
        return true;
    }
    let s = p + q;
    if s.rem_euclid(2) == 0 {
        return true;
    }
    let reach = 2 * (k as i64 - 1);
    (s + 3).abs() > reach && (s - 1).abs() > reach
}

/// `m_{p,q}^k` through the four-term recursion in `k`, grounded at `k = 0`
/// by [`moment_oracle`].
pub fn moment_recursed(key: MomentKey) -> Result<GaussRational> {
    let mut memo = HashMap::new();
    recurse_moment(key.p, key.q, key.k, &mut memo)
}

fn recurse_moment(
    p: i64,
    q: i64,
    k: u32,
    memo: &mut HashMap<(i64, i64, u32), GaussRational>,
) -> Result<GaussRational> {
    if k == 0 {
        return moment_oracle(MomentKey::new(p, q, 0));
    }
    if let Some(v) = memo.get(&(p, q, k)) {
        return Ok(v.clone());
    }
    let s = p + q;
    if s + 3 == 0 || s - 1 == 0 {
        return Err(Error::SingularDenominator { p, q, k });
    }
    let d = (2 * p + 1) * (2 * q + 1);
    let c1 = rat((s + 1) * (p + 2) * (q + 2), d * (s + 3));
    let c2 = rat((s + 1) * (p - 1) * (q - 1), d * (s - 1));
    let c3 = rat((p + 2) * (q - 1), d);
    let c4 = rat((p - 1) * (q + 2), d);
    let terms = [
        (c1, p + 1, q + 1),
        (c2, p - 1, q - 1),
        (c3, p + 1, q - 1),
        (c4, p - 1, q + 1),
    ];
    let mut acc = GaussRational::zero();
    for (c, pp, qq) in terms {
        let m = recurse_moment(pp, qq, k - 1, memo)?;
        acc = &acc + &m.scale(&c);
    }
    memo.insert((p, q, k), acc.clone());
    Ok(acc)
}

/// Partial-fraction coefficients `b_{a,k}^l` for `0 <= a <= a_max`,
/// `0 <= k <= k_max`, generated by the recursion over `k`.
///
/// Only `a >= 0` is stored; negative shifts reuse `b_{-a,k} = b_{a,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    a_max: u32,
    k_max: u32,
    // rows[k][a] holds b_{a,k}^0 ..= b_{a,k}^k
    rows: Vec<Vec<Vec<BigRational>>>,
}

impl CoeffTable {
    pub fn new(a_max: u32, k_max: u32) -> Self {
        let width = |k: u32| (a_max + k_max - k) as usize + 1;
        let mut rows: Vec<Vec<Vec<BigRational>>> = Vec::with_capacity(k_max as usize + 1);
        let mut row0 = vec![vec![BigRational::zero()]; width(0)];
        row0[0][0] = BigRational::one();
        if row0.len() > 1 {
            row0[1][0] = rat(-1, 2);
        }
        rows.push(row0);
        for k in 1..=k_max {
            let prev = &rows[k as usize - 1];
            let row: Vec<Vec<BigRational>> = (0..width(k))
                .map(|a| next_coefficients(prev, a as i64, k as i64))
                .collect();
            rows.push(row);
        }
        Self { a_max, k_max, rows }
    }

    /// Shared table with the default caps, built on first use.
    pub fn shared() -> &'static CoeffTable {
        static TABLE: OnceLock<CoeffTable> = OnceLock::new();
        TABLE.get_or_init(|| CoeffTable::new(DEFAULT_MAX_SHIFT, DEFAULT_MAX_ORDER))
    }

    pub fn a_max(&self) -> u32 {
        self.a_max
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    fn check(&self, a: i64, k: u32) -> Result<()> {
        if k > self.k_max {
            return Err(Error::Capacity {
                what: "coefficient order k",
                needed: k as usize,
                cap: self.k_max as usize,
            });
        }
        if a.unsigned_abs() > self.a_max as u64 {
            return Err(Error::Capacity {
                what: "coefficient shift |a|",
                needed: a.unsigned_abs() as usize,
                cap: self.a_max as usize,
            });
        }
        Ok(())
    }

    /// `b_{a,k}^0 ..= b_{a,k}^k`.
    pub fn coeffs(&self, a: i64, k: u32) -> Result<&[BigRational]> {
        self.check(a, k)?;
        Ok(&self.rows[k as usize][a.unsigned_abs() as usize])
    }

    /// Evaluates the partial fractions at `n`, i.e. `m_{n-a,n+a}^k`.
    pub fn pfd_eval(&self, a: i64, k: u32, n: i64) -> Result<BigRational> {
        let b = self.coeffs(a, k)?;
        Ok(b.iter().enumerate().fold(BigRational::zero(), |acc, (l, c)| {
            let l = l as i64;
            acc + c * (rat(1, 2 * n - 2 * l - 1) - rat(1, 2 * n + 2 * l + 3))
        }))
    }

    /// `B_{a,k} = Σ_l (l + 1)·b_{a,k}^l`.
    pub fn b_sum(&self, a: i64, k: u32) -> Result<BigRational> {
        let b = self.coeffs(a, k)?;
        Ok(b.iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (l, c)| acc + c * rat_int(l as i64 + 1)))
    }

    /// `b_{0,k}^{a-1} + 2a·Σ_l b_{a,k}^l/(l+1)`, which must vanish for `a >= 1`.
    pub fn bound_residual(&self, a: u32, k: u32) -> Result<BigRational> {
        let b0 = coeff_at(self.coeffs(0, k)?, a as i64 - 1);
        let s = self
            .coeffs(a as i64, k)?
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (l, c)| acc + c / rat_int(l as i64 + 1));
        Ok(b0 + s * rat_int(2 * a as i64))
    }

    /// `b_{c,k}^{a-1}/a - b_{a,k}^{c-1}/c` for `a, c >= 1`.
    pub fn swap_residual(&self, a: u32, c: u32, k: u32) -> Result<BigRational> {
        let lhs = coeff_at(self.coeffs(c as i64, k)?, a as i64 - 1) / rat_int(a as i64);
        let rhs = coeff_at(self.coeffs(a as i64, k)?, c as i64 - 1) / rat_int(c as i64);
        Ok(lhs - rhs)
    }

    /// Canonical JSON: rationals as `["num", "den"]` decimal-string pairs.
    pub fn to_json(&self) -> Value {
        let mut rows = Vec::new();
        for k in 0..=self.k_max {
            for a in 0..=self.a_max {
                let b = &self.rows[k as usize][a as usize];
                rows.push(json!({ "a": a, "k": k, "b": rationals_to_json(b) }));
            }
        }
        json!({
            "schema_version": 1,
            "meta": { "kind": "pfd_coefficients", "a_max": self.a_max, "k_max": self.k_max },
            "rows": rows,
        })
    }
}

fn coeff_at(b: &[BigRational], l: i64) -> BigRational {
    if l < 0 {
        return BigRational::zero();
    }
    b.get(l as usize).cloned().unwrap_or_else(BigRational::zero)
}

/// Row `k` of the coefficient recursion for shift `a >= 0`, reading row
/// `k - 1` from `prev`. Entries outside the stored range count as zero.
fn next_coefficients(prev: &[Vec<BigRational>], a: i64, k: i64) -> Vec<BigRational> {
    let p = |aa: i64, l: i64| -> BigRational {
        if l < 0 || l > k - 1 {
            return BigRational::zero();
        }
        prev.get(aa.unsigned_abs() as usize)
            .map(|row| coeff_at(row, l))
            .unwrap_or_else(BigRational::zero)
    };
    // Σ_{l in range, l != skip} (l + 1)·b_{aa,k-1}^l / den(l)
    let weighted = |aa: i64, from: i64, skip: Option<i64>, den: &dyn Fn(i64) -> i64| {
        (from..k).filter(|&l| Some(l) != skip).fold(BigRational::zero(), |acc, l| {
            acc + p(aa, l) * rat(l + 1, den(l))
        })
    };

    (0..=k)
        .map(|l| {
            if l == 0 && a != 1 {
                let den = (a - 1) * (a + 1);
                let tail = (0..k).fold(BigRational::zero(), |acc, j| acc + p(a, j) / rat_int(j + 1));
                rat((2 * a - 5) * (2 * a + 5), 32 * den) * p(a, 1)
                    - rat((2 * a + 1) * (2 * a - 1), 8 * den) * tail
                    + rat((2 * a - 5) * (2 * a - 1), 16 * den) * p(a - 1, 0)
                    + rat((2 * a + 1) * (2 * a + 5), 16 * den) * p(a + 1, 0)
            } else if l == 0 {
                // a == 1: coefficient of 1/(2n - 1) in the Laurent expansion at n = 1/2
                let s1 = (2..k).fold(BigRational::zero(), |acc, l| {
                    acc + p(1, l) * rat(5 * l * l + 10 * l + 27, 16 * (l - 1) * (l + 1) * (l + 3))
                });
                let s0 = weighted(0, 1, None, &|l| l * (l + 2));
                let s2 = weighted(2, 1, None, &|l| l * (l + 2));
                rat(9, 16) * p(1, 0) + rat(103, 256) * p(1, 1) - s1 + rat(5, 32) * p(0, 0)
                    - rat(3, 16) * s0
                    + rat(29, 32) * p(2, 0)
                    + rat(21, 16) * s2
            } else if a >= 2 && l == a - 1 {
                // coefficient of 1/(2n - 2a + 1) in the Laurent expansion at n = a - 1/2
                let same = (0..k).filter(|&j| j != a && j != a - 2).fold(BigRational::zero(), |acc, j| {
                    let num = -3 * a * (j + 1) * (9 * a * a - j * j - 2 * j - 6);
                    let den = 8 * (a - 1) * (a + 1) * (a - j) * (a + j) * (a - j - 2) * (a + j + 2);
                    acc + p(a, j) * rat(num, den)
                });
                let side = |aa: i64, sign: i64| {
                    (0..k).filter(|&j| j != a - 1).fold(BigRational::zero(), |acc, j| {
                        acc + p(aa, j) * rat(j + 1, (a - j - 1) * (a + j + 1))
                    }) * rat(3 * (4 * a - 3 * sign), 16 * a)
                };
                let a2 = a * a;
                same + p(a, a) * rat(28 * a2 * a2 + 27 * a2 * a + 11 * a2 - 24 * a - 18, 64 * a * (a - 1) * (a + 1) * (a + 1))
                    + p(a, a - 2) * rat(28 * a2 * a2 - 27 * a2 * a + 11 * a2 + 24 * a - 18, 64 * a * (a - 1) * (a - 1) * (a + 1))
                    + side(a - 1, 1)
                    - side(a + 1, -1)
                    + p(a - 1, a - 1) * rat(8 * a2 - 12 * a + 9, 32 * a2)
                    + p(a + 1, a - 1) * rat(8 * a2 + 12 * a + 9, 32 * a2)
            } else {
                let den = 16 * (l - a + 1) * (l + a + 1);
                rat((l + 1) * (2 * l - 2 * a + 5) * (2 * l + 2 * a + 5), den * (l + 2)) * p(a, l + 1)
                    + rat((l + 1) * (2 * l - 2 * a - 1) * (2 * l + 2 * a - 1), den * l) * p(a, l - 1)
                    + rat((2 * l - 2 * a + 5) * (2 * l + 2 * a - 1), den) * p(a - 1, l)
                    + rat((2 * l - 2 * a - 1) * (2 * l + 2 * a + 5), den) * p(a + 1, l)
            }
        })
        .collect()
}

/// `b_{a,k}^0 ..= b_{a,k}^k` from the shared table, or from a freshly built
/// table when `(a, k)` lies beyond the default caps.
pub fn pfd_coeffs(a: u32, k: u32) -> Vec<BigRational> {
    let shared = CoeffTable::shared();
    match shared.coeffs(a as i64, k) {
        Ok(b) => b.to_vec(),
        Err(_) => CoeffTable::new(a, k)
            .coeffs(a as i64, k)
            .expect("freshly built table covers (a, k)")
            .to_vec(),
    }
}

/// `m_{n-a,n+a}^k` via partial fractions.
pub fn pfd_eval(a: i64, k: u32, n: i64) -> BigRational {
    let b = pfd_coeffs(a.unsigned_abs() as u32, k);
    b.iter().enumerate().fold(BigRational::zero(), |acc, (l, c)| {
        let l = l as i64;
        acc + c * (rat(1, 2 * n - 2 * l - 1) - rat(1, 2 * n + 2 * l + 3))
    })
}

/// Independent route to `b_{a,k}`: solve the `(k+1)×(k+1)` system that
/// matches the partial-fraction form to [`moment_oracle`] values at
/// `n = a + 1 ..= a + k + 1`.
pub fn pfd_coeffs_by_solve(a: u32, k: u32) -> Result<Vec<BigRational>> {
    let size = k as usize + 1;
    let ns: Vec<i64> = (0..size).map(|i| a as i64 + 1 + i as i64).collect();
    let m = RationalMatrix::from_fn(size, size, |i, l| {
        let (n, l) = (ns[i], l as i64);
        rat(1, 2 * n - 2 * l - 1) - rat(1, 2 * n + 2 * l + 3)
    });
    let rhs = ns
        .iter()
        .map(|&n| {
            let v = moment_oracle(MomentKey::new(n - a as i64, n + a as i64, k))?;
            if !v.is_real() {
                return Err(Error::Invariant(format!(
                    "moment m_{{{},{}}}^{k} is not real",
                    n - a as i64,
                    n + a as i64
                )));
            }
            Ok(v.re)
        })
        .collect::<Result<Vec<_>>>()?;
    m.solve(&rhs)
        .ok_or_else(|| Error::Invariant(format!("partial-fraction system for a={a}, k={k} is singular")))
}

pub fn catalan(k: u32) -> BigInt {
    binomial(2 * k as i64, k as i64) / BigInt::from(k + 1)
}

fn quarter_pow(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(4u32).pow(k))
}

/// Closed form of `B_{a,k}` in terms of central binomials.
pub fn b_closed(a: i64, k: u32) -> BigRational {
    let a = a.abs();
    if a == 0 && k == 0 {
        return BigRational::one();
    }
    let n = 2 * k as i64;
    let c = |j: i64| BigRational::from_integer(binomial(n, j));
    let kk = k as i64;
    (c(kk + a) - (c(kk + a - 1) + c(kk + a + 1)) * rat(1, 2)) * quarter_pow(k)
}

/// `B_{a,k}` by the `(1/4, 1/2, 1/4)` recursion in `k` from the `k = 0` row
/// `{B_{0,0} = 1, B_{±1,0} = -1/2, 0 otherwise}`.
pub fn b_recursed(a: i64, k: u32) -> BigRational {
    let a = a.unsigned_abs() as usize;
    let width = a + k as usize + 2;
    let mut row = vec![BigRational::zero(); width];
    row[0] = BigRational::one();
    row[1] = rat(-1, 2);
    let quarter = rat(1, 4);
    let half = rat(1, 2);
    for _ in 0..k {
        let at = |v: &[BigRational], i: i64| -> BigRational {
            v.get(i.unsigned_abs() as usize).cloned().unwrap_or_else(BigRational::zero)
        };
        row = (0..width as i64)
            .map(|i| &quarter * at(&row, i - 1) + &half * at(&row, i) + &quarter * at(&row, i + 1))
            .collect();
    }
    row[a].clone()
}

/// Even moment `(1/2)·4^{-k}·C_k` of the semicircle `√(1 - x²)/π`.
pub fn semicircle_even_moment(k: u32) -> BigRational {
    BigRational::from_integer(catalan(k)) * quarter_pow(k) * rat(1, 2)
}

/// `∫ x^{2k}·S_N(x) dx`, exactly, using partial fractions for every
/// `m_{n,n}^k` (no polynomial degree cap).
pub fn sn_even_moment_exact(k: u32, n_steps: u32) -> BigRational {
    sn_even_moment_with(&pfd_coeffs(0, k), k, n_steps)
}

fn sn_even_moment_with(b0: &[BigRational], k: u32, n_steps: u32) -> BigRational {
    let k = k as i64;
    let mut sum = BigRational::zero();
    for n in 1..n_steps as i64 {
        for (l, c) in b0.iter().enumerate() {
            let l = l as i64;
            sum += c * (rat(1, 2 * n - 2 * l - 1) - rat(1, 2 * n + 2 * l + 3));
        }
    }
    (rat(1, 2 * k + 1) - rat(1, 2 * k + 3) - sum * rat(1, 2)) * rat_int(n_steps as i64)
}

/// The same moment in telescoped form,
/// `(N/2)·Σ_l Σ_{n=1}^{2l+2} b_{0,k}^l / (2N + 2n - 2l - 3)`.
pub fn sn_even_moment_tail(k: u32, n_steps: u32) -> BigRational {
    let b0 = pfd_coeffs(0, k);
    let big_n = n_steps as i64;
    let mut sum = BigRational::zero();
    for (l, c) in b0.iter().enumerate() {
        let l = l as i64;
        for n in 1..=2 * l + 2 {
            sum += c * rat(1, 2 * big_n + 2 * n - 2 * l - 3);
        }
    }
    sum * rat(big_n, 2)
}

/// Bound constant `c_k = (1/2)·Σ_l |b_{0,k}^l|·(l + 1)(2l + 1)` such that
/// `|∫ x^{2k} S_N - (1/2)4^{-k}C_k| <= c_k / N` whenever `N >= 2k + 1`.
pub fn sn_moment_gap_constant(k: u32) -> BigRational {
    pfd_coeffs(0, k)
        .iter()
        .enumerate()
        .fold(BigRational::zero(), |acc, (l, c)| {
            let l = l as i64;
            acc + c.abs() * rat_int((l + 1) * (2 * l + 1))
        })
        * rat(1, 2)
}

/// `∫ x^{2k+1}·S_N(x) dx`, exactly.
///
/// The `I_n²` summands are even functions and contribute nothing; what is
/// left are the odd moments of `1 + x` and `(1 + x)²/2`, which cancel.
pub fn sn_odd_moment_exact(k: u32, n_steps: u32) -> BigRational {
    let lin = RationalPoly::from_i64(&[(1, 1), (1, 1)]);
    let sq = &lin * &lin;
    let j = 2 * k as usize + 1;
    (lin.moment(j) - sq.moment(j) * rat(1, 2)) * rat_int(n_steps as i64)
}

/// `Σ_l (1/(2l+1) + 1/(2l+3))·b_{0,k}^l == 2/(2k+1) - 2/(2k+3)`.
pub fn idat0_check(k: u32) -> bool {
    let b0 = pfd_coeffs(0, k);
    let lhs = b0.iter().enumerate().fold(BigRational::zero(), |acc, (l, c)| {
        let l = l as i64;
        acc + c * (rat(1, 2 * l + 1) + rat(1, 2 * l + 3))
    });
    let k = k as i64;
    lhs == rat(2, 2 * k + 1) - rat(2, 2 * k + 3)
}

pub(crate) fn rationals_to_json(v: &[BigRational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

pub(crate) fn rational_to_json(r: &BigRational) -> Value {
    json!([r.numer().to_string(), r.denom().to_string()])
}
