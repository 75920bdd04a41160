//! Factorial Hankel representation of the step-`N` loop, in exact arithmetic.
//!
//! `V(t)_{kl} = (-1)^{l-1}·t^{k+l-1}/(k+l-1)!`, `U(r)_k = r^{k-1}/(k-1)!` and
//! `A` is the nilpotent subdiagonal shift. The loop is
//! `Z_t = B_t - Σ_l α_l(t)·B_1^{N,l}` with `α_l(t) = (V(t)·V(1)^{-1})_{1l}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::poly::{binomial, factorial, rat_int, RationalPoly};

pub const DEFAULT_CAP: usize = 16;

fn sign(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn inv_factorial(n: usize) -> BigRational {
    BigRational::new(BigInt::one(), factorial(n as u64))
}

fn check_unit(name: &str, t: &BigRational) -> Result<()> {
    if *t < BigRational::zero() || *t > BigRational::one() {
        return Err(Error::Domain(format!("{name}={t} is outside [0, 1]")));
    }
    Ok(())
}

/// `V(t)` evaluated at a rational `t`.
pub fn v_matrix(n: usize, t: &BigRational) -> RationalMatrix {
    RationalMatrix::from_fn(n, n, |k, l| {
        let e = k + l + 1;
        BigRational::from_integer(sign(l as i64)) * num_traits::pow(t.clone(), e) * inv_factorial(e)
    })
}

/// `V(1)^{-1}` from the closed binomial formula.
pub fn v1_inverse_closed(n: usize) -> RationalMatrix {
    let ni = n as i64;
    RationalMatrix::from_fn(n, n, |k0, l0| {
        let (k, l) = (k0 as i64 + 1, l0 as i64 + 1);
        let inner = (0..k).fold(BigInt::zero(), |acc, m| {
            acc + binomial(ni - k + m, l - 1) * binomial(ni + m - 1, m)
        });
        BigRational::from_integer(
            sign(ni + l)
                * factorial(k as u64 - 1)
                * factorial(l as u64)
                * binomial(ni - 1, k - 1)
                * binomial(ni + l - 1, l)
                * inner,
        )
    })
}

/// `α_l` (for `l = 1..=N`) from the closed binomial formula.
pub fn alphas_closed(n: usize) -> Vec<RationalPoly> {
    let ni = n as i64;
    (1..=ni)
        .map(|l| {
            let mut coeffs = vec![BigRational::zero(); n + 1];
            for k in 1..=ni {
                let inner = (0..k).fold(BigInt::zero(), |acc, m| {
                    acc + binomial(ni - k + m, l - 1) * binomial(ni + m - 1, m)
                });
                coeffs[k as usize] = BigRational::from_integer(
                    sign(ni + k + l + 1)
                        * factorial(l as u64 - 1)
                        * binomial(ni, k)
                        * binomial(ni + l - 1, l - 1)
                        * inner,
                );
            }
            RationalPoly::from_coeffs(coeffs)
        })
        .collect()
}

/// `α_l` as the first row of `V(t)·V(1)^{-1}`, expanded in powers of `t`.
pub fn alphas_matrix_route(v1inv: &RationalMatrix) -> Vec<RationalPoly> {
    let n = v1inv.rows();
    (0..n)
        .map(|l| {
            let mut coeffs = vec![BigRational::zero(); n + 1];
            for j in 0..n {
                // V(t)_{1,j+1} = (-1)^j t^{j+1} / (j+1)!
                coeffs[j + 1] =
                    BigRational::from_integer(sign(j as i64)) * inv_factorial(j + 1) * &v1inv[(j, l)];
            }
            RationalPoly::from_coeffs(coeffs)
        })
        .collect()
}

/// Nilpotent subdiagonal shift `A`.
pub fn shift_matrix(n: usize) -> RationalMatrix {
    RationalMatrix::from_fn(n, n, |k, l| if k == l + 1 { BigRational::one() } else { BigRational::zero() })
}

/// `e^A` with entries `1/(k - l)!` on and below the diagonal.
pub fn exp_a(n: usize) -> RationalMatrix {
    RationalMatrix::from_fn(n, n, |k, l| if k >= l { inv_factorial(k - l) } else { BigRational::zero() })
}

/// `e^{rA}` by the terminating power series `Σ_{j<N} (rA)^j / j!`.
pub fn exp_series(n: usize, r: &BigRational) -> RationalMatrix {
    let ra = shift_matrix(n).scale(r);
    let mut term = RationalMatrix::identity(n);
    let mut sum = RationalMatrix::identity(n);
    for j in 1..n.max(1) {
        term = term.mul(&ra).scale(&BigRational::new(BigInt::one(), BigInt::from(j)));
        sum = sum.add(&term);
    }
    sum
}

/// `U(r) = e^{rA}·E`, i.e. `r^{k-1}/(k-1)!`.
pub fn u_vector(n: usize, r: &BigRational) -> Vec<BigRational> {
    (0..n).map(|k| num_traits::pow(r.clone(), k) * inv_factorial(k)).collect()
}

/// `w(t)_l = E[B_t·B_1^{N,l}] = (1 - (1 - t)^l)/l!`.
pub fn w_vector(n: usize, t: &BigRational) -> Vec<BigRational> {
    let one = BigRational::one();
    let u = &one - t;
    (1..=n)
        .map(|l| (&one - num_traits::pow(u.clone(), l)) * inv_factorial(l))
        .collect()
}

/// `E[B_1^{N,k}·B_1^{N,m}] = 1/((k + m - 1)·(k - 1)!·(m - 1)!)`.
pub fn w_matrix_direct(n: usize) -> RationalMatrix {
    RationalMatrix::from_fn(n, n, |k, m| {
        inv_factorial(k) * inv_factorial(m) / rat_int((k + m + 1) as i64)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HankelSystem {
    n: usize,
    v1: RationalMatrix,
    v1inv: RationalMatrix,
    alphas: Vec<RationalPoly>,
    exp_a: RationalMatrix,
    w: RationalMatrix,
}

/// Outcome of one invariant checked while building a [`HankelSystem`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HankelCheck {
    pub name: &'static str,
    pub passed: bool,
}

impl HankelSystem {
    pub fn build(n: usize) -> Result<Self> {
        Self::build_with_cap(n, DEFAULT_CAP)
    }

    pub fn build_with_cap(n: usize, cap: usize) -> Result<Self> {
        let (sys, checks) = Self::build_unchecked(n, cap)?;
        if let Some(c) = checks.iter().find(|c| !c.passed) {
            return Err(Error::Invariant(format!("Hankel system N={n}: {} failed", c.name)));
        }
        Ok(sys)
    }

    /// Builds the system and reports every construction invariant without
    /// failing on violations.
    pub fn build_unchecked(n: usize, cap: usize) -> Result<(Self, Vec<HankelCheck>)> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if n > cap {
            return Err(Error::Capacity { what: "Hankel size N", needed: n, cap });
        }
        let v1 = v_matrix(n, &BigRational::one());
        let v1inv = v1_inverse_closed(n);
        let alphas = alphas_closed(n);
        let exp_a = exp_a(n);
        let w = v1.mul(&exp_a.transpose());
        let gauss = v1.inverse();

        let checks = vec![
            HankelCheck { name: "V(1) * V(1)^-1 = I", passed: v1.mul(&v1inv).is_identity() },
            HankelCheck {
                name: "closed inverse equals Gauss-Jordan inverse",
                passed: gauss.as_ref() == Some(&v1inv),
            },
            HankelCheck { name: "alpha closed form equals row 1 of V(t) V(1)^-1", passed: alphas == alphas_matrix_route(&v1inv) },
            HankelCheck {
                name: "deg alpha_l <= N",
                passed: alphas.iter().all(|a| a.degree().is_none_or(|d| d <= n)),
            },
            HankelCheck { name: "e^A equals truncated series", passed: exp_a == exp_series(n, &BigRational::one()) },
            HankelCheck { name: "V(1) (e^A)^T equals direct B_1 covariance", passed: w == w_matrix_direct(n) },
        ];
        Ok((Self { n, v1, v1inv, alphas, exp_a, w }, checks))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn v1(&self) -> &RationalMatrix {
        &self.v1
    }

    pub fn v1_inverse(&self) -> &RationalMatrix {
        &self.v1inv
    }

    pub fn alphas(&self) -> &[RationalPoly] {
        &self.alphas
    }

    pub fn exp_a(&self) -> &RationalMatrix {
        &self.exp_a
    }

    /// Covariance `W = V(1)·(e^A)^T` of `B_1^N`.
    pub fn w_matrix(&self) -> &RationalMatrix {
        &self.w
    }

    /// `α_l(t)` for `1 <= l <= N`.
    pub fn alpha_eval(&self, l: usize, t: &BigRational) -> Result<BigRational> {
        if l == 0 || l > self.n {
            return Err(Error::Index { index: l, max: self.n });
        }
        check_unit("t", t)?;
        Ok(self.alphas[l - 1].eval(t))
    }

    fn alpha_vector(&self, t: &BigRational) -> Vec<BigRational> {
        self.alphas.iter().map(|a| a.eval(t)).collect()
    }

    /// `Cov(Z_s, Z_t) = min(s,t) - α(s)·w(t) - α(t)·w(s) + α(s)ᵀ·W·α(t)`.
    pub fn cross_covariance(&self, s: &BigRational, t: &BigRational) -> Result<BigRational> {
        check_unit("s", s)?;
        check_unit("t", t)?;
        let (a_s, a_t) = (self.alpha_vector(s), self.alpha_vector(t));
        let (w_s, w_t) = (w_vector(self.n, s), w_vector(self.n, t));
        let dot = |a: &[BigRational], b: &[BigRational]| {
            a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
        };
        let w_at: Vec<BigRational> = (0..self.n).map(|i| dot(self.w.row(i), &a_t)).collect();
        let m = if s <= t { s.clone() } else { t.clone() };
        Ok(m - dot(&a_s, &w_t) - dot(&a_t, &w_s) + dot(&a_s, &w_at))
    }

    /// The α polynomials as JSON coefficient arrays (`["num", "den"]`, ascending powers).
    pub fn alphas_json(&self) -> Value {
        let polys: Vec<Value> = self
            .alphas
            .iter()
            .enumerate()
            .map(|(i, p)| json!({ "l": i + 1, "coeffs": crate::moments::rationals_to_json(p.coeffs()) }))
            .collect();
        Value::Array(polys)
    }
}

pub fn cross_covariance(n: usize, s: &BigRational, t: &BigRational) -> Result<BigRational> {
    HankelSystem::build(n)?.cross_covariance(s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn step_one_is_the_bridge() {
        let sys = HankelSystem::build(1).unwrap();
        assert_eq!(sys.v1()[(0, 0)], rat(1, 1));
        assert_eq!(sys.v1_inverse()[(0, 0)], rat(1, 1));
        assert_eq!(sys.alpha_eval(1, &rat(1, 3)).unwrap(), rat(1, 3));
        assert_eq!(sys.cross_covariance(&rat(1, 4), &rat(3, 4)).unwrap(), rat(1, 16));
    }

    #[test]
    fn step_two_matrices() {
        let sys = HankelSystem::build(2).unwrap();
        let expect = [[rat(1, 1), rat(-1, 2)], [rat(1, 2), rat(-1, 6)]];
        for k in 0..2 {
            for l in 0..2 {
                assert_eq!(sys.v1()[(k, l)], expect[k][l]);
            }
        }
        assert!(sys.v1().mul(sys.v1_inverse()).is_identity());
    }

    #[test]
    fn pinned_ends_and_index_errors() {
        let sys = HankelSystem::build(5).unwrap();
        assert_eq!(sys.cross_covariance(&rat(0, 1), &rat(2, 7)).unwrap(), rat(0, 1));
        assert_eq!(sys.cross_covariance(&rat(3, 8), &rat(1, 1)).unwrap(), rat(0, 1));
        assert_eq!(sys.alpha_eval(3, &rat(0, 1)).unwrap(), rat(0, 1));
        assert!(matches!(sys.alpha_eval(6, &rat(1, 2)), Err(Error::Index { .. })));
        assert!(matches!(HankelSystem::build(17), Err(Error::Capacity { .. })));
    }

    #[test]
    fn u_is_first_column_of_exponential() {
        let r = rat(2, 3);
        let e = exp_series(4, &r);
        let u = u_vector(4, &r);
        for k in 0..4 {
            assert_eq!(e[(k, 0)], u[k]);
        }
    }
}
