//! Generalized sine and cosine, the scale factor `h_R` and the solution
//! argument `s = f_S / h_R`, all as functions of the cone parameter `W`.
//!
//! Two evaluation paths are provided. [`trig_from_w`] sums the region series
//! and refuses the band around the border cone; [`trig_from_w_robust`] solves
//! a monotone closed-form relation instead and is valid for every `W`.
//! [`trig_at`] picks between them.
//!
//! Negative `W` (southern hemisphere) is handled by reflection: `f_S` and `s`
//! are odd in `W`, `f_C` and `h_R` are even.

use crate::error::{Result, SosError};
use crate::roots::solve_log_power_product;
use crate::series::{eval_series, region_of, w_border, Region, RegionClass, SeriesKind, SeriesSpec, DEFAULT_TOL};

/// Generalized trigonometric values at one cone parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigBundle {
    pub mu: f64,
    pub w: f64,
    pub h_r: f64,
    pub f_s: f64,
    pub f_c: f64,
    pub s: f64,
}

fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu >= 0.0 {
        Ok(())
    } else {
        Err(SosError::InvalidInput(format!("mu must be finite and non-negative, got {mu}")))
    }
}

fn spherical(w: f64) -> TrigBundle {
    // W = tan ν
    let (f_s, f_c) = if w.is_infinite() {
        (w.signum(), 0.0)
    } else {
        let r = w.hypot(1.0);
        (w / r, 1.0 / r)
    };
    TrigBundle { mu: 0.0, w, h_r: 1.0, f_s, f_c, s: f_s }
}

fn pole(w: f64, mu: f64) -> TrigBundle {
    let sign = w.signum();
    TrigBundle { mu, w, h_r: 1.0 / (1.0 + mu).sqrt(), f_s: sign, f_c: 0.0, s: sign * (1.0 + mu).sqrt() }
}

/// Series evaluation. Fails with `NearBorder` inside the guard band.
pub fn trig_from_w(w: f64, mu: f64, tol: f64) -> Result<TrigBundle> {
    check_mu(mu)?;
    if w.is_nan() {
        return Err(SosError::InvalidInput("W is NaN".into()));
    }
    if mu == 0.0 {
        return Ok(spherical(w));
    }
    if w.is_infinite() {
        return Ok(pole(w, mu));
    }
    let sign = if w < 0.0 { -1.0 } else { 1.0 };
    let a = w.abs();
    let sa = |arg: f64, region| eval_series(&SeriesSpec::new(arg, mu, region, SeriesKind::SA), a, tol).map(|r| r.value);
    let sc = |arg: f64, region| eval_series(&SeriesSpec::new(arg, mu, region, SeriesKind::SC), a, tol).map(|r| r.value);
    let m1 = 1.0 + mu;
    let (h2, fs2, fc2, s) = match region_of(a, mu) {
        RegionClass::NearBorder => {
            return Err(SosError::NearBorder { w, w_border: w_border(mu) });
        }
        RegionClass::SmallNu => {
            let r = Region::SmallNu;
            let h2 = sa(0.0, r)?;
            let fc2 = sa(-1.0, r)?;
            let fs2 = m1 * a * a * sa(-m1, r)?;
            let s = a * m1.sqrt() * sc(-m1, r)?.sqrt();
            (h2, fs2, fc2, s)
        }
        RegionClass::LargeNu => {
            // region-specific arguments a_large = a_small / (1+μ); the
            // prefactors W^(2a) are applied inside eval_series
            let r = Region::LargeNu;
            let h2 = sa(0.0, r)?;
            let fc2 = sa(-1.0 / m1, r)?;
            let fs2 = m1 * a * a * sa(-1.0, r)?;
            let s = m1.sqrt() * sc(-1.0, r)?.sqrt() * a;
            (h2, fs2, fc2, s)
        }
    };
    Ok(TrigBundle { mu, w, h_r: h2.sqrt(), f_s: sign * fs2.sqrt(), f_c: fc2.sqrt(), s: sign * s })
}

/// Squared quantities from `y = ln t`, where `t = f_S² / ((1+μ) f_C²)` solves
/// `t (1+t)^μ = W²`. Returns `(h_R², f_S², f_C², s²)`.
pub(crate) fn squares_from_log_t(y: f64, mu: f64) -> (f64, f64, f64, f64) {
    let m1 = 1.0 + mu;
    if y > 0.0 {
        let u = (-y).exp();
        let d = u + m1;
        ((u + 1.0) / d, m1 / d, u / d, m1 / (1.0 + u))
    } else {
        let t = y.exp();
        let d = 1.0 + m1 * t;
        ((1.0 + t) / d, m1 * t / d, 1.0 / d, m1 * t / (1.0 + t))
    }
}

/// `ln t` for the closed-form parametrization at cone parameter `|W|`.
pub(crate) fn log_t_of_w(w: f64, mu: f64) -> f64 {
    solve_log_power_product(2.0 * w.abs().ln(), mu)
}

/// Series-free evaluation, valid for every `W` including the border band.
pub fn trig_from_w_robust(w: f64, mu: f64) -> Result<TrigBundle> {
    check_mu(mu)?;
    if w.is_nan() {
        return Err(SosError::InvalidInput("W is NaN".into()));
    }
    if mu == 0.0 {
        return Ok(spherical(w));
    }
    if w.is_infinite() {
        return Ok(pole(w, mu));
    }
    if w == 0.0 {
        return Ok(TrigBundle { mu, w, h_r: 1.0, f_s: 0.0, f_c: 1.0, s: 0.0 });
    }
    let sign = w.signum();
    let (h2, fs2, fc2, s2) = squares_from_log_t(log_t_of_w(w, mu), mu);
    Ok(TrigBundle { mu, w, h_r: h2.sqrt(), f_s: sign * fs2.sqrt(), f_c: fc2.sqrt(), s: sign * s2.sqrt() })
}

/// Series where they converge comfortably, closed form in the border band.
pub fn trig_at(w: f64, mu: f64) -> Result<TrigBundle> {
    match trig_from_w(w, mu, DEFAULT_TOL) {
        Err(SosError::NearBorder { .. }) => trig_from_w_robust(w, mu),
        other => other,
    }
}

/// Cone parameter of a given solution argument `s`.
pub fn w_from_s(s: f64, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let m1 = 1.0 + mu;
    let q = s * s / m1;
    if q >= 1.0 - 2.0 * f64::EPSILON {
        return if q <= 1.0 + 4.0 * f64::EPSILON {
            Err(SosError::PoleLimit)
        } else {
            Err(SosError::InvalidInput(format!("|s| = {} exceeds sqrt(1+mu)", s.abs())))
        };
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(s.signum() * (q / (1.0 - q).powf(m1)).sqrt())
}

/// Solution argument on the reference spheroid `R = R0`.
pub fn s_on_reference(nu: f64, mu: f64) -> f64 {
    (1.0 + mu).sqrt() * nu.sin()
}

impl TrigBundle {
    pub fn h_r2(&self) -> f64 {
        self.h_r * self.h_r
    }

    /// `d h_R² / dW`
    pub fn dh_r2_dw(&self) -> f64 {
        let (hs, fs, fc) = (self.h_r2(), self.f_s * self.f_s, self.f_c * self.f_c);
        -(self.mu / (1.0 + self.mu)) * (2.0 / self.w) * hs * fs * fc
    }

    /// `d f_C² / dW`
    pub fn df_c2_dw(&self) -> f64 {
        -(2.0 / self.w) * self.h_r2() * self.f_s * self.f_s * self.f_c * self.f_c
    }

    /// `d (f_S/f_C) / dW`
    pub fn d_tan_dw(&self) -> f64 {
        self.h_r2() / self.w * (self.f_s / self.f_c)
    }

    /// `d s / dW`
    pub fn ds_dw(&self) -> f64 {
        self.f_c * self.f_c * self.s / self.w
    }

    /// `d ln(f_S/f_C) / dW`
    pub fn d_log_tan_dw(&self) -> f64 {
        self.h_r2() / self.w
    }

    /// `d/dW [W² h_R² / (2 f_S²)]`
    pub fn d_half_cot_dw(&self) -> f64 {
        self.w * self.h_r2()
    }
}
