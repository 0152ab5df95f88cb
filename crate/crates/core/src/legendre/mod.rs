//! Generalized Legendre functions in the argument `s = f_S / h_R`.
//!
//! The first-kind functions `P_n` are polynomials generated by the
//! Bonnet-like three-term recursion
//!
//! ```text
//! P_{n+1} = (2n+1)/(n+1) · s P_n / (1+μ) − n/(n+1) · (1 − μ s²/(1+μ)²) P_{n−1}
//! ```
//!
//! seeded with `P_0 = 1`, `P_1 = s/(1+μ)`. The second-kind functions are
//! `Q_n = P_n Q_0 − T_n · sqrt((1+μ)² − μ s²)`, where `T_n` obeys the same
//! recursion from `T_0 = 0`, `T_1 = 1/(1+μ)`. `Q_n` diverges logarithmically
//! on the rotation axis `|s| = sqrt(1+μ)`.

pub mod tables;

use crate::error::{Result, SosError};

/// Relative guard below `sqrt(1+μ)` at which second-kind evaluation stops.
pub const POLE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `P_n`
    First,
    /// `T_n`, the polynomial part of `Q_n`
    SecondKindPart,
}

/// A polynomial in `s`, coefficient of `s^j` at index `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenLegendrePoly {
    pub degree: usize,
    pub family: Family,
    pub coeffs: Vec<f64>,
    pub mu: f64,
}

fn recurse(n: usize, mu: f64, seed0: Vec<f64>, seed1: Vec<f64>) -> Vec<f64> {
    let m1 = 1.0 + mu;
    let q = mu / (m1 * m1);
    let mut prev = seed0;
    let mut cur = seed1;
    if n == 0 {
        prev.resize(1, 0.0);
        return prev;
    }
    for k in 1..n {
        let kf = k as f64;
        let a = (2.0 * kf + 1.0) / ((kf + 1.0) * m1);
        let b = kf / (kf + 1.0);
        let mut next = vec![0.0; k + 2];
        for (j, &c) in cur.iter().enumerate() {
            next[j + 1] += a * c;
        }
        for (j, &c) in prev.iter().enumerate() {
            next[j] -= b * c;
            next[j + 2] += b * q * c;
        }
        prev = cur;
        cur = next;
    }
    cur.resize(n + 1, 0.0);
    cur
}

/// First-kind polynomial `P_n`.
pub fn p_poly(n: usize, mu: f64) -> GenLegendrePoly {
    let m1 = 1.0 + mu;
    GenLegendrePoly { degree: n, family: Family::First, coeffs: recurse(n, mu, vec![1.0], vec![0.0, 1.0 / m1]), mu }
}

/// Polynomial part `T_n` of the second-kind function `Q_n`.
pub fn t_poly(n: usize, mu: f64) -> GenLegendrePoly {
    let m1 = 1.0 + mu;
    GenLegendrePoly {
        degree: n,
        family: Family::SecondKindPart,
        coeffs: recurse(n, mu, vec![0.0], vec![1.0 / m1, 0.0]),
        mu,
    }
}

impl GenLegendrePoly {
    /// Horner evaluation.
    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn deriv(&self, s: f64) -> f64 {
        self.coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (j, &c)| acc * s + j as f64 * c)
    }

    pub fn deriv2(&self, s: f64) -> f64 {
        self.coeffs.iter().enumerate().skip(2).rev().fold(0.0, |acc, (j, &c)| acc * s + (j * (j - 1)) as f64 * c)
    }
}

/// Free-function form of [`GenLegendrePoly::eval`].
pub fn eval_poly(p: &GenLegendrePoly, s: f64) -> f64 {
    p.eval(s)
}

/// `sqrt((1+μ)² − μ s²)`
pub fn root_factor(s: f64, mu: f64) -> f64 {
    let m1 = 1.0 + mu;
    (m1 * m1 - mu * s * s).sqrt()
}

fn pole_check(s: f64, mu: f64) -> Result<()> {
    if !(s.abs() < (1.0 + mu).sqrt() * (1.0 - POLE_GUARD)) {
        return Err(SosError::PoleDivergence { s });
    }
    Ok(())
}

/// `Q_0 = ½ ln((S + s)/(S − s))` with `S = sqrt((1+μ)² − μ s²)`.
pub fn q0(s: f64, mu: f64) -> Result<f64> {
    pole_check(s, mu)?;
    // evaluated on |s| so the result is exactly odd
    Ok(s.signum() * (s.abs() / root_factor(s, mu)).atanh())
}

/// `dQ_0/ds`
pub fn dq0(s: f64, mu: f64) -> Result<f64> {
    pole_check(s, mu)?;
    let m1 = 1.0 + mu;
    Ok(m1 / ((m1 - s * s) * root_factor(s, mu)))
}

/// `d²Q_0/ds²`
pub fn d2q0(s: f64, mu: f64) -> Result<f64> {
    pole_check(s, mu)?;
    let m1 = 1.0 + mu;
    let g = m1 - s * s;
    let r = root_factor(s, mu);
    Ok(m1 * s * ((3.0 * mu + 2.0) * m1 - 3.0 * mu * s * s) / (g * g * r * r * r))
}

/// Second-kind function `Q_n = P_n Q_0 − T_n S`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondKindFn {
    pub degree: usize,
    pub p_part: GenLegendrePoly,
    pub t_part: GenLegendrePoly,
    pub mu: f64,
}

impl SecondKindFn {
    pub fn new(n: usize, mu: f64) -> Self {
        Self { degree: n, p_part: p_poly(n, mu), t_part: t_poly(n, mu), mu }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        let q = q0(s, self.mu)?;
        Ok(self.p_part.eval(s) * q - self.t_part.eval(s) * root_factor(s, self.mu))
    }

    pub fn deriv(&self, s: f64) -> Result<f64> {
        let mu = self.mu;
        let (q, dq) = (q0(s, mu)?, dq0(s, mu)?);
        let r = root_factor(s, mu);
        let dr = -mu * s / r;
        let (p, t) = (&self.p_part, &self.t_part);
        Ok(p.deriv(s) * q + p.eval(s) * dq - t.deriv(s) * r - t.eval(s) * dr)
    }

    pub fn deriv2(&self, s: f64) -> Result<f64> {
        let mu = self.mu;
        let (q, dq, d2q) = (q0(s, mu)?, dq0(s, mu)?, d2q0(s, mu)?);
        let m1 = 1.0 + mu;
        let r = root_factor(s, mu);
        let dr = -mu * s / r;
        let d2r = -mu * m1 * m1 / (r * r * r);
        let (p, t) = (&self.p_part, &self.t_part);
        Ok(p.deriv2(s) * q + 2.0 * p.deriv(s) * dq + p.eval(s) * d2q
            - t.deriv2(s) * r
            - 2.0 * t.deriv(s) * dr
            - t.eval(s) * d2r)
    }
}

/// Second-kind function of degree `n`.
pub fn eval_q(n: usize, s: f64, mu: f64) -> Result<f64> {
    SecondKindFn::new(n, mu).eval(s)
}

/// Values `P_0(s) .. P_nmax(s)` by the value form of the recursion.
pub fn p_values(nmax: usize, s: f64, mu: f64) -> Vec<f64> {
    value_recursion(nmax, s, mu, 1.0, s / (1.0 + mu))
}

/// Values `T_0(s) .. T_nmax(s)`.
pub fn t_values(nmax: usize, s: f64, mu: f64) -> Vec<f64> {
    value_recursion(nmax, s, mu, 0.0, 1.0 / (1.0 + mu))
}

/// Values `Q_0(s) .. Q_nmax(s)`.
pub fn q_values(nmax: usize, s: f64, mu: f64) -> Result<Vec<f64>> {
    let q = q0(s, mu)?;
    let r = root_factor(s, mu);
    let p = p_values(nmax, s, mu);
    let t = t_values(nmax, s, mu);
    Ok(p.iter().zip(&t).map(|(p, t)| p * q - t * r).collect())
}

fn value_recursion(nmax: usize, s: f64, mu: f64, v0: f64, v1: f64) -> Vec<f64> {
    let m1 = 1.0 + mu;
    let damp = 1.0 - mu * s * s / (m1 * m1);
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(v0);
    if nmax >= 1 {
        out.push(v1);
    }
    for k in 1..nmax {
        let kf = k as f64;
        let next = (2.0 * kf + 1.0) / (kf + 1.0) * s / m1 * out[k] - kf / (kf + 1.0) * damp * out[k - 1];
        out.push(next);
    }
    out
}

/// Residual of the generalized Legendre equation for separation constant `k`.
pub fn ode_residual(f: f64, df: f64, d2f: f64, s: f64, k: f64, mu: f64) -> f64 {
    let m1 = 1.0 + mu;
    let s2 = s * s;
    (m1 - s2) * (m1 * m1 - mu * s2) * d2f
        + s * (-(3.0 * mu + 2.0) * m1 + 2.0 * mu * m1 * k + mu * (3.0 - 2.0 * k) * s2) * df
        + k * ((k - 2.0) * mu * s2 + m1 * k + m1 * m1) * f
}
