//! Legendre polynomials `P_n`, their integrals `I_n`, the shifted family
//! `Q_n(t) = P_n(2t - 1)` and Darboux asymptotic approximants.
//!
//! Both families are indexed by all integers. For negative indices the
//! convention `P_{-n-1} = i·P_n` applies, and `I_n` is defined for every `n`
//! by `(2n + 1)·I_n = P_{n+1} - P_{n-1}`. For `n >= 1` this is the integral of
//! `P_n` from `-1`, while `I_0(x) = x - i` and `I_{-1}(x) = i·x - 1`.
//!
//! Floating-point evaluation always runs the three-term recurrence. The
//! monomial coefficients held by [`ExactLegendre`] are for exact rational work
//! only; evaluating them in `f64` is hopeless beyond degree ~30.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{check_symmetric_interval, check_unit_interval, Error, Result};
use crate::poly::{rat, GaussRationalPoly, RationalPoly};

/// `P_n(x)` for `n >= 0` by upward Bonnet recurrence. No domain check.
pub(crate) fn legendre_unchecked(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for k in 1..n {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `(P_{n-1}(x), P_n(x))` for `n >= 1`.
pub(crate) fn legendre_pair_unchecked(n: usize, x: f64) -> (f64, f64) {
    debug_assert!(n >= 1);
    let (mut prev, mut cur) = (1.0, x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

/// Antiderivatives `A_n(x) = ∫_{-1}^x P_n` for `n = 0..=n_max`.
///
/// `A_0 = 1 + x` and `A_n = I_n` for `n >= 1`; the latter run through
/// `(n + 2)·I_{n+1} = (2n + 1)·x·I_n - (n - 1)·I_{n-1}` started from
/// `I_1 = (x² - 1)/2`, `I_2 = x·I_1`.
pub(crate) fn antiderivatives_unchecked(n_max: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0 + x);
    if n_max == 0 {
        return;
    }
    let i1 = 0.5 * (x * x - 1.0);
    out.push(i1);
    if n_max == 1 {
        return;
    }
    out.push(x * i1);
    for n in 2..n_max {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * x * out[n] - (nf - 1.0) * out[n - 1]) / (nf + 2.0);
        out.push(next);
    }
}

pub fn antiderivatives(n_max: usize, x: f64) -> Result<Vec<f64>> {
    check_symmetric_interval("x", x)?;
    let mut out = Vec::with_capacity(n_max + 1);
    antiderivatives_unchecked(n_max, x, &mut out);
    Ok(out)
}

/// `P_n(x)` for any integer `n`; negative indices are purely imaginary.
pub fn eval_p(n: i64, x: f64) -> Result<Complex64> {
    check_symmetric_interval("x", x)?;
    Ok(p_complex(n, x))
}

fn p_complex(n: i64, x: f64) -> Complex64 {
    if n >= 0 {
        Complex64::new(legendre_unchecked(n as usize, x), 0.0)
    } else {
        Complex64::new(0.0, legendre_unchecked((-n - 1) as usize, x))
    }
}

/// `I_n(x)` for any integer `n`.
pub fn eval_i(n: i64, x: f64) -> Result<Complex64> {
    check_symmetric_interval("x", x)?;
    if n >= 1 {
        let mut buf = Vec::with_capacity(n as usize + 1);
        antiderivatives_unchecked(n as usize, x, &mut buf);
        return Ok(Complex64::new(buf[n as usize], 0.0));
    }
    let denom = (2 * n + 1) as f64;
    Ok((p_complex(n + 1, x) - p_complex(n - 1, x)) / denom)
}

/// Shifted Legendre polynomial `Q_n(t) = P_n(2t - 1)` on `[0, 1]`.
pub fn eval_q(n: usize, t: f64) -> Result<f64> {
    check_unit_interval("t", t)?;
    Ok(legendre_unchecked(n, 2.0 * t - 1.0))
}

/// Memoized exact coefficients of `P_0 ..= P_cap`.
///
/// Requests whose degree exceeds the cap fail with [`Error::Capacity`].
#[derive(Debug, Clone)]
pub struct ExactLegendre {
    cap: usize,
    p: Vec<RationalPoly>,
}

impl ExactLegendre {
    pub const DEFAULT_CAP: usize = 64;

    pub fn new(cap: usize) -> Self {
        let mut p = Vec::with_capacity(cap + 1);
        p.push(RationalPoly::one());
        if cap >= 1 {
            p.push(RationalPoly::x());
        }
        for n in 1..cap {
            let a = p[n].mul_x().scale(&rat(2 * n as i64 + 1, n as i64 + 1));
            let b = p[n - 1].scale(&rat(n as i64, n as i64 + 1));
            p.push(&a - &b);
        }
        Self { cap, p }
    }

    /// Shared table with [`Self::DEFAULT_CAP`], built on first use.
    pub fn global() -> &'static ExactLegendre {
        static TABLE: OnceLock<ExactLegendre> = OnceLock::new();
        TABLE.get_or_init(|| ExactLegendre::new(Self::DEFAULT_CAP))
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check(&self, what: &'static str, degree: usize) -> Result<()> {
        if degree > self.cap {
            return Err(Error::Capacity {
                what,
                needed: degree,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Real Legendre polynomial `P_n`, `n >= 0`.
    pub fn p_real(&self, n: usize) -> Result<&RationalPoly> {
        self.check("Legendre degree", n)?;
        Ok(&self.p[n])
    }

    pub fn p(&self, n: i64) -> Result<GaussRationalPoly> {
        if n >= 0 {
            Ok(GaussRationalPoly::real(self.p_real(n as usize)?.clone()))
        } else {
            Ok(GaussRationalPoly::imaginary(
                self.p_real((-n - 1) as usize)?.clone(),
            ))
        }
    }

    pub fn i(&self, n: i64) -> Result<GaussRationalPoly> {
        let needed = if n >= 0 { n + 1 } else { -n } as usize;
        self.check("Legendre degree", needed)?;
        let diff = &self.p(n + 1)? - &self.p(n - 1)?;
        Ok(diff.scale(&rat(1, 2 * n + 1)))
    }

    /// Real integral polynomial `I_n`, `n >= 1`.
    pub fn i_real(&self, n: usize) -> Result<RationalPoly> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "I_0 is complex; use ExactLegendre::i".into(),
            ));
        }
        self.check("Legendre degree", n + 1)?;
        let diff = &self.p[n + 1] - &self.p[n - 1];
        Ok(diff.scale(&rat(1, 2 * n as i64 + 1)))
    }

    /// Exact antiderivative `∫_{-1}^x P_n`, i.e. `1 + x` at `n = 0`.
    pub fn antiderivative(&self, n: usize) -> Result<RationalPoly> {
        if n == 0 {
            Ok(RationalPoly::from_i64(&[(1, 1), (1, 1)]))
        } else {
            self.i_real(n)
        }
    }
}

/// Exact `P_n` for any integer `n` from the shared table.
pub fn exact_p(n: i64) -> Result<GaussRationalPoly> {
    ExactLegendre::global().p(n)
}

/// Exact `I_n` for any integer `n` from the shared table.
pub fn exact_i(n: i64) -> Result<GaussRationalPoly> {
    ExactLegendre::global().i(n)
}

/// Jacobi polynomial `P_{n+1}^{(-1,-1)} = (n/2)·I_n`, exact.
pub fn jacobi_from_i(n: usize) -> Result<RationalPoly> {
    if n == 0 {
        return Err(Error::InvalidArgument("jacobi_from_i needs n >= 1".into()));
    }
    let i = ExactLegendre::global().i_real(n)?;
    Ok(i.scale(&rat(n as i64, 2)))
}

/// The two Jacobi families for which a reference value can be computed:
/// `(α, β) = (0, 0)` (Legendre) and `(-1, -1)` (scaled integrals).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobiFamily {
    Legendre,
    Integral,
}

impl JacobiFamily {
    pub fn parameters(self) -> (Rational64, Rational64) {
        match self {
            JacobiFamily::Legendre => (Rational64::zero(), Rational64::zero()),
            JacobiFamily::Integral => (Rational64::from(-1), Rational64::from(-1)),
        }
    }

    fn from_parameters(alpha: Rational64, beta: Rational64) -> Option<Self> {
        [JacobiFamily::Legendre, JacobiFamily::Integral]
            .into_iter()
            .find(|f| f.parameters() == (alpha, beta))
    }

    /// `P_n^{(α,β)}(x)` in floating point via the three-term recurrences.
    pub fn value(self, n: usize, x: f64) -> f64 {
        match self {
            JacobiFamily::Legendre => legendre_unchecked(n, x),
            // P_1^{(-1,-1)} vanishes identically.
            JacobiFamily::Integral if n <= 1 => {
                if n == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            JacobiFamily::Integral => {
                let m = n - 1;
                let mut buf = Vec::with_capacity(n);
                antiderivatives_unchecked(m, x, &mut buf);
                0.5 * m as f64 * buf[m]
            }
        }
    }
}

/// Main term of the Darboux formula for `P_n^{(α,β)}(cos θ)` on a closed
/// window `[theta_min, theta_max]` kept away from `{0, π}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxApproximant {
    pub alpha: Rational64,
    pub beta: Rational64,
    pub n: u32,
    pub theta_min: f64,
    pub theta_max: f64,
    family: JacobiFamily,
}

impl DarbouxApproximant {
    pub const DEFAULT_MARGIN: f64 = 1e-3;

    pub fn new(
        alpha: Rational64,
        beta: Rational64,
        n: u32,
        theta_min: f64,
        theta_max: f64,
    ) -> Result<Self> {
        Self::with_margin(alpha, beta, n, theta_min, theta_max, Self::DEFAULT_MARGIN)
    }

    pub fn for_family(family: JacobiFamily, n: u32, theta_min: f64, theta_max: f64) -> Result<Self> {
        let (alpha, beta) = family.parameters();
        Self::new(alpha, beta, n, theta_min, theta_max)
    }

    pub fn with_margin(
        alpha: Rational64,
        beta: Rational64,
        n: u32,
        theta_min: f64,
        theta_max: f64,
        margin: f64,
    ) -> Result<Self> {
        let family = JacobiFamily::from_parameters(alpha, beta).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "Darboux approximants are provided for (α, β) ∈ {{(0,0), (-1,-1)}}, got ({alpha}, {beta})"
            ))
        })?;
        if n == 0 {
            return Err(Error::InvalidArgument("Darboux approximant needs n >= 1".into()));
        }
        if !(theta_min > 0.0 && theta_min <= theta_max && theta_max < PI) {
            return Err(Error::Domain(format!(
                "need 0 < theta_min <= theta_max < π, got [{theta_min}, {theta_max}]"
            )));
        }
        if theta_min < margin || theta_max > PI - margin {
            return Err(Error::Domain(format!(
                "window [{theta_min}, {theta_max}] comes within {margin} of 0 or π"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            n,
            theta_min,
            theta_max,
            family,
        })
    }

    pub fn family(&self) -> JacobiFamily {
        self.family
    }

    fn ab(&self) -> (f64, f64) {
        let f = |r: Rational64| *r.numer() as f64 / *r.denom() as f64;
        (f(self.alpha), f(self.beta))
    }

    /// `n^{-1/2}·k(θ)·cos((n + (α+β+1)/2)·θ - (α + 1/2)·π/2)`.
    pub fn eval(&self, theta: f64) -> Result<f64> {
        if !(self.theta_min..=self.theta_max).contains(&theta) {
            return Err(Error::Domain(format!(
                "theta={theta} outside [{}, {}]",
                self.theta_min, self.theta_max
            )));
        }
        let (a, b) = self.ab();
        let n = self.n as f64;
        let k = PI.powf(-0.5) * (theta / 2.0).sin().powf(-a - 0.5) * (theta / 2.0).cos().powf(-b - 0.5);
        let phase = (n + (a + b + 1.0) / 2.0) * theta - (a + 0.5) * PI / 2.0;
        Ok(n.powf(-0.5) * k * phase.cos())
    }

    /// Reference value `P_n^{(α,β)}(cos θ)` from the recurrences.
    pub fn reference(&self, theta: f64) -> f64 {
        self.family.value(self.n as usize, theta.cos())
    }

    /// `n^{3/2}·|P_n^{(α,β)}(cos θ) - main term|`.
    pub fn scaled_error(&self, theta: f64) -> Result<f64> {
        let approx = self.eval(theta)?;
        Ok((self.n as f64).powf(1.5) * (self.reference(theta) - approx).abs())
    }

    /// Maximum scaled error over `points` equispaced angles in the window.
    pub fn max_scaled_error(&self, points: usize) -> Result<f64> {
        let points = points.max(2);
        let step = (self.theta_max - self.theta_min) / (points - 1) as f64;
        let mut worst: f64 = 0.0;
        for j in 0..points {
            let theta = if j + 1 == points {
                self.theta_max
            } else {
                self.theta_min + step * j as f64
            };
            worst = worst.max(self.scaled_error(theta)?);
        }
        Ok(worst)
    }
}
