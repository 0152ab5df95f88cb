//! Interior harmonic expansion
//! `V = Σ a_n R^n P_n(s) + Σ b_n R^n Q_n(s)`.
//!
//! Coefficients are stored in the scaled convention `c_n = a_n R0^n`, so that
//! evaluation only ever raises `R/R0` to the power `n`. This is also the
//! convention of the coefficient file (`"convention": "R_over_R0"`).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coords::{cartesian_to_sos, metrics_at, trig_at_point, CartesianPoint, SosPoint, SystemConfig};
use crate::error::{Result, SosError};
use crate::legendre::{p_values, q_values};
use crate::trig::s_on_reference;

/// Name of the only supported coefficient convention.
pub const CONVENTION: &str = "R_over_R0";

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution {
    cfg: SystemConfig,
    /// first-kind coefficients, scaled by `R0^n`
    a: Vec<f64>,
    /// second-kind coefficients, scaled by `R0^n`
    b: Vec<f64>,
}

/// On-disk form of a [`HarmonicSolution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientFile {
    pub mu: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    pub convention: String,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl HarmonicSolution {
    /// Build from physical coefficients, i.e. `V = Σ a_n R^n P_n(s) + ...`.
    pub fn new(a: &[f64], b: &[f64], cfg: SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let scale = |v: &[f64]| v.iter().enumerate().map(|(n, c)| c * cfg.r0.powi(n as i32)).collect();
        let sol = Self { cfg, a: scale(a), b: scale(b) };
        sol.check_finite()?;
        Ok(sol)
    }

    /// Build from coefficients already in the `(R/R0)^n` convention.
    pub fn from_scaled(a: Vec<f64>, b: Vec<f64>, cfg: SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let sol = Self { cfg, a, b };
        sol.check_finite()?;
        Ok(sol)
    }

    fn check_finite(&self) -> Result<()> {
        if self.a.iter().chain(&self.b).all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(SosError::InvalidInput("coefficients must be finite".into()))
        }
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn scaled_a(&self) -> &[f64] {
        &self.a
    }

    pub fn scaled_b(&self) -> &[f64] {
        &self.b
    }

    /// Physical first-kind coefficients `a_n`.
    pub fn a(&self) -> Vec<f64> {
        self.unscale(&self.a)
    }

    /// Physical second-kind coefficients `b_n`.
    pub fn b(&self) -> Vec<f64> {
        self.unscale(&self.b)
    }

    fn unscale(&self, v: &[f64]) -> Vec<f64> {
        v.iter().enumerate().map(|(n, c)| c / self.cfg.r0.powi(n as i32)).collect()
    }

    pub fn has_second_kind(&self) -> bool {
        self.b.iter().any(|&c| c != 0.0)
    }

    /// Value at equatorial radius `R` and solution argument `s`.
    pub fn eval_v(&self, r: f64, s: f64) -> Result<f64> {
        let mu = self.cfg.mu;
        if !(r.is_finite() && r > 0.0) {
            return Err(SosError::InvalidInput(format!("R must be finite and > 0, got {r}")));
        }
        let smax = (1.0 + mu).sqrt();
        if !(s.abs() <= smax * (1.0 + 1e-12)) {
            return Err(SosError::InvalidInput(format!("|s| = {} exceeds sqrt(1+mu)", s.abs())));
        }
        let rho = r / self.cfg.r0;
        let mut v = 0.0;
        if !self.a.is_empty() {
            let p = p_values(self.a.len() - 1, s, mu);
            let mut pow = 1.0;
            for (c, p) in self.a.iter().zip(p) {
                v += c * pow * p;
                pow *= rho;
            }
        }
        if self.has_second_kind() {
            let q = q_values(self.b.len() - 1, s, mu)?;
            let mut pow = 1.0;
            for (c, q) in self.b.iter().zip(q) {
                v += c * pow * q;
                pow *= rho;
            }
        }
        Ok(v)
    }

    /// Value at an SOS point.
    pub fn eval_v_at(&self, p: &SosPoint) -> Result<f64> {
        let t = trig_at_point(p.r, p.nu, &self.cfg)?;
        self.eval_v(p.r, t.s)
    }

    /// Value at a Cartesian point, through the inverse transform.
    pub fn eval_v_cartesian(&self, c: &CartesianPoint) -> Result<f64> {
        self.eval_v_at(&cartesian_to_sos(c, &self.cfg)?)
    }

    /// Serializable form.
    pub fn to_file(&self) -> CoefficientFile {
        CoefficientFile {
            mu: self.cfg.mu,
            r0: self.cfg.r0,
            convention: CONVENTION.to_string(),
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    pub fn from_file(f: &CoefficientFile) -> Result<Self> {
        if f.convention != CONVENTION {
            return Err(SosError::InvalidInput(format!(
                "unsupported coefficient convention {:?}, expected {CONVENTION:?}",
                f.convention
            )));
        }
        Self::from_scaled(f.a.clone(), f.b.clone(), SystemConfig::new(f.mu, f.r0)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("coefficient file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: CoefficientFile =
            serde_json::from_str(text).map_err(|e| SosError::InvalidInput(format!("coefficient file: {e}")))?;
        Self::from_file(&f)
    }
}

/// Radial separation constant paired with the angular constant `k`.
pub fn separation_check(k: f64) -> f64 {
    k * (k - 2.0)
}

/// Central-difference data at one point: the 7-point Laplacian, the gradient
/// and the centre value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilEval {
    pub laplacian: f64,
    pub gradient: [f64; 3],
    pub value: f64,
}

impl StencilEval {
    pub fn gradient_norm(&self) -> f64 {
        self.gradient.iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    /// Laplacian relative to the local field scale `|∇V|/R0 + |V|/R0²`.
    pub fn normalized(&self, r0: f64) -> f64 {
        let scale = self.gradient_norm() / r0 + self.value.abs() / (r0 * r0);
        if scale == 0.0 {
            self.laplacian.abs()
        } else {
            self.laplacian.abs() / scale
        }
    }
}

/// 7-point Cartesian stencil of `V` around `c` with spacing `h`.
pub fn fd_stencil(sol: &HarmonicSolution, c: &CartesianPoint, h: f64) -> Result<StencilEval> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(SosError::InvalidInput(format!("step must be positive, got {h}")));
    }
    let eval = |x: f64, y: f64, z: f64| {
        sol.eval_v_cartesian(&CartesianPoint::new(x, y, z)).map_err(|e| SosError::StencilOutOfDomain(e.to_string()))
    };
    let v0 = eval(c.x, c.y, c.z)?;
    let pairs = [
        (eval(c.x + h, c.y, c.z)?, eval(c.x - h, c.y, c.z)?),
        (eval(c.x, c.y + h, c.z)?, eval(c.x, c.y - h, c.z)?),
        (eval(c.x, c.y, c.z + h)?, eval(c.x, c.y, c.z - h)?),
    ];
    let mut lap = 0.0;
    let mut grad = [0.0; 3];
    for (i, (p, m)) in pairs.iter().enumerate() {
        lap += (p - v0) + (m - v0);
        grad[i] = (p - m) / (2.0 * h);
    }
    Ok(StencilEval { laplacian: lap / (h * h), gradient: grad, value: v0 })
}

/// Discrete Laplacian of the solution at `c`; tends to zero as `O(h²)`.
pub fn laplacian_residual_fd(sol: &HarmonicSolution, c: &CartesianPoint, h: f64) -> Result<f64> {
    fd_stencil(sol, c, h).map(|s| s.laplacian)
}

/// Laplacian written in SOS form,
/// `(1/J) [∂_R (J/h_R² ∂_R V) + ∂_ν (J/h_ν² ∂_ν V)]`, by conservative central
/// differences in `R` and `ν`. Uses the metric code, unlike
/// [`laplacian_residual_fd`].
pub fn laplacian_residual_sos(sol: &HarmonicSolution, p: &SosPoint, dr: f64, dnu: f64) -> Result<f64> {
    let cfg = sol.config();
    let v = |r: f64, nu: f64| sol.eval_v_at(&SosPoint::new(r, nu, p.lambda));
    let (r, nu) = (p.r, p.nu);
    let v0 = v(r, nu)?;
    let a_plus = metrics_at(r + dr / 2.0, nu, cfg)?.jac_over_hr2;
    let a_minus = metrics_at(r - dr / 2.0, nu, cfg)?.jac_over_hr2;
    let b_plus = metrics_at(r, nu + dnu / 2.0, cfg)?.jac_over_hnu2;
    let b_minus = metrics_at(r, nu - dnu / 2.0, cfg)?.jac_over_hnu2;
    let radial = (a_plus * (v(r + dr, nu)? - v0) - a_minus * (v0 - v(r - dr, nu)?)) / (dr * dr);
    let angular = (b_plus * (v(r, nu + dnu)? - v0) - b_minus * (v0 - v(r, nu - dnu)?)) / (dnu * dnu);
    Ok((radial + angular) / metrics_at(r, nu, cfg)?.jacobian)
}

/// Result of a boundary fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub solution: HarmonicSolution,
    /// Euclidean norm of the sample residual.
    pub residual_norm: f64,
    /// 2-norm condition number of the column-scaled design matrix.
    pub condition_number: f64,
    pub rank: usize,
}

/// Least-squares fit of degrees `0..=degree` to samples `(ν, V)` on the
/// reference spheroid `R = R0`.
pub fn fit_boundary(
    samples: &[(f64, f64)],
    degree: usize,
    cfg: &SystemConfig,
    include_second_kind: bool,
) -> Result<FitOutcome> {
    cfg.validate()?;
    let mu = cfg.mu;
    let per_kind = degree + 1;
    let unknowns = if include_second_kind { 2 * per_kind } else { per_kind };
    let m = samples.len();
    if m < unknowns {
        return Err(SosError::RankDeficient { rank: m, unknowns });
    }
    let mut design = DMatrix::<f64>::zeros(m, unknowns);
    let mut rhs = DVector::<f64>::zeros(m);
    for (i, &(nu, value)) in samples.iter().enumerate() {
        if !(nu.is_finite() && value.is_finite() && nu.abs() <= std::f64::consts::FRAC_PI_2) {
            return Err(SosError::InvalidInput(format!("bad sample (nu = {nu}, V = {value})")));
        }
        let s = s_on_reference(nu, mu);
        for (j, p) in p_values(degree, s, mu).into_iter().enumerate() {
            design[(i, j)] = p;
        }
        if include_second_kind {
            for (j, q) in q_values(degree, s, mu)?.into_iter().enumerate() {
                design[(i, per_kind + j)] = q;
            }
        }
        rhs[i] = value;
    }
    // unit column norms keep the condition number meaningful
    let mut col_scale = vec![1.0; unknowns];
    for (j, scale) in col_scale.iter_mut().enumerate() {
        let norm = design.column(j).norm();
        if norm > 0.0 {
            *scale = norm;
            design.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let cutoff = m.max(unknowns) as f64 * f64::EPSILON * smax;
    let rank = sv.iter().filter(|&&x| x > cutoff).count();
    if rank < unknowns {
        return Err(SosError::RankDeficient { rank, unknowns });
    }
    let x = svd.solve(&rhs, cutoff).map_err(|e| SosError::InvalidInput(format!("least-squares solve failed: {e}")))?;
    let residual_norm = (&design * &x - &rhs).norm();
    let coef: Vec<f64> = x.iter().zip(&col_scale).map(|(c, s)| c / s).collect();
    let (a, b) =
        if include_second_kind { (coef[..per_kind].to_vec(), coef[per_kind..].to_vec()) } else { (coef, Vec::new()) };
    // on R = R0 the design columns are exactly the scaled-convention basis
    Ok(FitOutcome {
        solution: HarmonicSolution::from_scaled(a, b, *cfg)?,
        residual_norm,
        condition_number: smax / smin,
        rank,
    })
}
