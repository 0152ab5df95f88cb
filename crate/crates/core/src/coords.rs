//! Similar oblate spheroidal coordinates `(R, ν, λ)`.
//!
//! A point lies on the spheroid `x² + y² + (1+μ) z² = R²`; its latitude `ν` is
//! the parametric latitude where the cone through it meets the reference
//! spheroid `R = R0`. Cones are level sets of
//! `W = (R/R0)^μ sin ν / cos^(1+μ) ν`.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Result, SosError};
use crate::roots::{softplus, solve_log_power_product};
use crate::series::{raw_sum, region_of, Region, RegionClass, SeriesKind, SeriesSpec, DEFAULT_TOL};
use crate::trig::{log_t_of_w, trig_at, TrigBundle};

/// Family oblateness `μ` and reference equatorial radius `R0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub mu: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
}

impl SystemConfig {
    pub fn new(mu: f64, r0: f64) -> Result<Self> {
        let cfg = Self { mu, r0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(SosError::InvalidInput(format!("mu must be finite and >= 0, got {}", self.mu)));
        }
        if !(self.r0.is_finite() && self.r0 > 0.0) {
            return Err(SosError::InvalidInput(format!("R0 must be finite and > 0, got {}", self.r0)));
        }
        Ok(())
    }
}

/// A point in SOS coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SosPoint {
    #[serde(rename = "R")]
    pub r: f64,
    pub nu: f64,
    pub lambda: f64,
}

impl SosPoint {
    pub fn new(r: f64, nu: f64, lambda: f64) -> Self {
        Self { r, nu, lambda }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartesianPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Metric scale factors and Jacobian ratios at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricBundle {
    pub h_r: f64,
    pub h_nu: f64,
    pub jacobian: f64,
    pub jac_over_hr2: f64,
    pub jac_over_hnu2: f64,
}

/// First and second partial derivatives of `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WDerivatives {
    pub dw_dnu: f64,
    pub dw_dr: f64,
    pub d2w_dnu2: f64,
    pub d2w_dr2: f64,
}

fn check_point(r: f64, nu: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(SosError::InvalidInput(format!("R must be finite and > 0, got {r}")));
    }
    if !(nu.abs() <= FRAC_PI_2) {
        return Err(SosError::InvalidInput(format!("nu must lie in [-pi/2, pi/2], got {nu}")));
    }
    Ok(())
}

fn at_pole(nu: f64) -> bool {
    nu.abs() >= FRAC_PI_2
}

/// Cone parameter `W`. Odd in `ν`.
pub fn compute_w(r: f64, nu: f64, cfg: &SystemConfig) -> Result<f64> {
    check_point(r, nu)?;
    if at_pole(nu) {
        return Err(SosError::PoleLimit);
    }
    let mu = cfg.mu;
    Ok((r / cfg.r0).powf(mu) * nu.sin() / nu.cos().powf(1.0 + mu))
}

/// Closed-form partial derivatives of `W`.
pub fn dw(r: f64, nu: f64, cfg: &SystemConfig) -> Result<WDerivatives> {
    let w = compute_w(r, nu, cfg)?;
    let mu = cfg.mu;
    let (s, c) = nu.sin_cos();
    let scale = (r / cfg.r0).powf(mu);
    Ok(WDerivatives {
        dw_dnu: scale * (1.0 + mu * s * s) / c.powf(2.0 + mu),
        dw_dr: mu * w / r,
        d2w_dnu2: (2.0 + 3.0 * mu + mu * mu * s * s) / (c * c) * w,
        d2w_dr2: mu * (mu - 1.0) * w / (r * r),
    })
}

/// `ln ∂W/∂ν`, finite right up to the pole.
fn ln_dw_dnu(r: f64, nu: f64, cfg: &SystemConfig) -> f64 {
    let mu = cfg.mu;
    let s = nu.sin();
    mu * (r / cfg.r0).ln() + (mu * s * s).ln_1p() - (2.0 + mu) * nu.cos().ln()
}

/// Metric factors, summing the region series away from the border cone and
/// falling back to [`metrics_at_robust`] inside the guard band.
pub fn metrics_at(r: f64, nu: f64, cfg: &SystemConfig) -> Result<MetricBundle> {
    let w = compute_w(r, nu, cfg)?.abs();
    let mu = cfg.mu;
    let region = match region_of(w, mu) {
        RegionClass::NearBorder => return metrics_at_robust(r, nu, cfg),
        RegionClass::SmallNu => Region::SmallNu,
        RegionClass::LargeNu => Region::LargeNu,
    };
    let d = dw(r, nu.abs(), cfg)?.dw_dnu;
    let m1 = 1.0 + mu;
    let sq = m1.sqrt();
    let sum = |a: f64, kind| raw_sum(&SeriesSpec::new(a, mu, region, kind), w, DEFAULT_TOL).map(|x| x.value);
    let (sa, sc) = (SeriesKind::SA, SeriesKind::SC);

    let (h2, h_nu, jac, jac_hr2, jac_hnu2) = match region {
        Region::SmallNu => (
            sum(0.0, sa)?,
            r / sq * d * sum(-(mu + 2.0), sa)?.sqrt(),
            r * r / sq * d * sum(-(mu + 3.0) / 2.0, sa)?,
            r * r / sq * d * sum(-(mu + 3.0) / 2.0, sc)?,
            sq / d * sum((mu + 1.0) / 2.0, sc)?,
        ),
        Region::LargeNu => {
            let p2 = w.powf(-(2.0 + mu) / m1);
            let p3 = w.powf(-(3.0 + mu) / m1);
            (
                sum(0.0, sa)? / m1,
                r / m1 * p2 * d * sum(-(2.0 + mu) / m1, sa)?.sqrt(),
                r * r * p3 / (m1 * sq) * d * sum(-(mu + 3.0) / (2.0 * m1), sa)?,
                r * r / sq * p3 * d * sum(-(mu + 3.0) / (2.0 * m1), sc)?,
                w * sq / d * sum(0.5, sc)?,
            )
        }
    };
    Ok(MetricBundle { h_r: h2.sqrt(), h_nu, jacobian: jac, jac_over_hr2: jac_hr2, jac_over_hnu2: jac_hnu2 })
}

/// Series-free metric factors, valid at every non-polar latitude.
pub fn metrics_at_robust(r: f64, nu: f64, cfg: &SystemConfig) -> Result<MetricBundle> {
    let w = compute_w(r, nu, cfg)?.abs();
    let mu = cfg.mu;
    let m1 = 1.0 + mu;
    // ln t with t = f_S² / ((1+μ) f_C²); at the equator t = 0
    let y = if w == 0.0 { f64::NEG_INFINITY } else { log_t_of_w(w, mu) };
    let (h2, _fs2, fc2, _) = crate::trig::squares_from_log_t(y, mu);
    let ln_den = if y == f64::NEG_INFINITY { 0.0 } else { softplus(y + m1.ln()) };
    // ln(f_S / W), regular at W = 0
    let ln_fs_over_w = 0.5 * (m1.ln() - mu * softplus(y) - ln_den);
    let ln_h_nu = r.ln() + 0.5 * fc2.ln() + ln_fs_over_w + ln_dw_dnu(r, nu.abs(), cfg) - 0.5 * h2.ln() - m1.ln();
    let h_nu = ln_h_nu.exp();
    let jac = r * fc2.sqrt() * h_nu;
    Ok(MetricBundle {
        h_r: h2.sqrt(),
        h_nu,
        jacobian: jac,
        jac_over_hr2: jac / h2,
        jac_over_hnu2: r * fc2.sqrt() / h_nu,
    })
}

/// Generalized trigonometric values at an SOS point, with the pole handled
/// by its closed-form limits.
pub fn trig_at_point(r: f64, nu: f64, cfg: &SystemConfig) -> Result<TrigBundle> {
    check_point(r, nu)?;
    if at_pole(nu) {
        return trig_at(nu.signum() * f64::INFINITY, cfg.mu);
    }
    trig_at(compute_w(r, nu, cfg)?, cfg.mu)
}

/// Forward transform: `z = R s/(1+μ)` and axial distance `R f_C / h_R`.
pub fn sos_to_cartesian(p: &SosPoint, cfg: &SystemConfig) -> Result<CartesianPoint> {
    check_point(p.r, p.nu)?;
    let mu = cfg.mu;
    if at_pole(p.nu) {
        return Ok(CartesianPoint::new(0.0, 0.0, p.nu.signum() * p.r / (1.0 + mu).sqrt()));
    }
    if p.nu == 0.0 {
        let (sl, cl) = p.lambda.sin_cos();
        return Ok(CartesianPoint::new(p.r * cl, p.r * sl, 0.0));
    }
    let t = trig_at_point(p.r, p.nu, cfg)?;
    let rho = p.r * t.f_c / t.h_r;
    let (sl, cl) = p.lambda.sin_cos();
    Ok(CartesianPoint::new(rho * cl, rho * sl, p.r * t.s / (1.0 + mu)))
}

/// Inverse transform. Points on the rotation axis get `λ = 0`.
pub fn cartesian_to_sos(c: &CartesianPoint, cfg: &SystemConfig) -> Result<SosPoint> {
    if !(c.x.is_finite() && c.y.is_finite() && c.z.is_finite()) {
        return Err(SosError::InvalidInput("Cartesian coordinates must be finite".into()));
    }
    let mu = cfg.mu;
    let m1 = 1.0 + mu;
    let rho2 = c.x * c.x + c.y * c.y;
    let zz = m1 * c.z * c.z;
    let r2 = rho2 + zz;
    if r2 == 0.0 {
        return Err(SosError::DegenerateOrigin);
    }
    let r = r2.sqrt();
    let lambda = if rho2 == 0.0 { 0.0 } else { c.y.atan2(c.x) };
    if rho2 == 0.0 {
        return Ok(SosPoint::new(r, c.z.signum() * FRAC_PI_2, 0.0));
    }
    if c.z == 0.0 {
        return Ok(SosPoint::new(r, 0.0, lambda));
    }
    // (R0/R)^(2μ) W² = tan²ν (1 + tan²ν)^μ, with W² = q/(1-q)^(1+μ),
    // q = (1+μ)z²/R² and 1 - q = ρ²/R²
    let ln_k2 = (zz / r2).ln() - m1 * (rho2 / r2).ln() - 2.0 * mu * (r / cfg.r0).ln();
    let y = solve_log_power_product(ln_k2, mu);
    let nu = (0.5 * y).exp().atan();
    Ok(SosPoint::new(r, c.z.signum() * nu, lambda))
}
