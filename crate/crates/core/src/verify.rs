//! Self-check suite over the identities that tie the coordinate, series,
//! Legendre and solution layers together.
//!
//! Every check reports the largest residual it saw against a fixed
//! tolerance. The suite is deterministic: sample points are fixed grids.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::coords::{
    compute_w, dw, metrics_at, sos_to_cartesian, trig_at_point, CartesianPoint, SosPoint, SystemConfig,
};
use crate::error::{Result, SosError};
use crate::legendre::{ode_residual, p_poly, t_poly, tables, SecondKindFn};
use crate::par::{map_indexed, Execution};
use crate::series::{region_of, w_border, RegionClass, DEFAULT_TOL};
use crate::solution::{fd_stencil, HarmonicSolution};
use crate::trig::{s_on_reference, trig_at, trig_from_w, trig_from_w_robust, w_from_s, TrigBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = SosError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(SosError::InvalidInput(format!("unknown level {other:?} (expected quick or full)"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Quick => "quick",
            Level::Full => "full",
        })
    }
}

impl Level {
    fn w_samples(self) -> usize {
        match self {
            Level::Quick => 40,
            Level::Full => 200,
        }
    }

    fn max_degree(self) -> usize {
        match self {
            Level::Quick => 6,
            Level::Full => 10,
        }
    }
}

/// Numeric coefficient tables (index = power of `s`) for degrees `0..=6`,
/// compared against the recursion instead of the built-in exact tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableFixture {
    pub mu: f64,
    pub first_kind: Vec<Vec<f64>>,
    pub second_kind_part: Vec<Vec<f64>>,
}

impl TableFixture {
    /// Fixture built from the exact reference tables at `mu`.
    pub fn reference(mu: f64) -> Self {
        Self {
            mu,
            first_kind: tables::FIRST_KIND.iter().map(|r| r.coefficients(mu)).collect(),
            second_kind_part: tables::SECOND_KIND_PART.iter().map(|r| r.coefficients(mu)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mu: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    pub level: Level,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verification (mu = {}, R0 = {}, level = {})", self.mu, self.r0, self.level)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<4} {:<28} max {:>10.3e}  tol {:>8.1e}  ({} samples)",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.max_residual,
                c.tolerance,
                c.samples
            )?;
        }
        write!(f, "{}", if self.passed { "all checks passed" } else { "some checks FAILED" })
    }
}

/// Running maximum of residuals; any evaluation error counts as a failure.
struct Tally {
    name: &'static str,
    tol: f64,
    max: f64,
    samples: usize,
    failed: bool,
}

impl Tally {
    fn new(name: &'static str, tol: f64) -> Self {
        Self { name, tol, max: 0.0, samples: 0, failed: false }
    }

    fn add(&mut self, r: Result<f64>) {
        self.samples += 1;
        match r {
            Ok(v) if v.is_finite() => self.max = self.max.max(v),
            _ => self.failed = true,
        }
    }

    fn finish(self) -> CheckResult {
        let max = if self.failed { f64::INFINITY } else { self.max };
        CheckResult {
            name: self.name.to_string(),
            samples: self.samples,
            max_residual: max,
            tolerance: self.tol,
            passed: !self.failed && max <= self.tol,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Cone parameters covering both regions and the border band.
fn w_sample(mu: f64, n: usize) -> Vec<f64> {
    let mut w = log_space(1e-3, 1e3, n.saturating_sub(3).max(2));
    let wb = w_border(mu);
    w.extend([0.95 * wb, wb, 1.05 * wb]);
    w
}

fn sos_sample(level: Level, r0: f64) -> Vec<(f64, f64)> {
    let k = match level {
        Level::Quick => 9,
        Level::Full => 31,
    };
    let mut out = Vec::new();
    for r in [0.3, 1.0, 2.5] {
        for i in 0..k {
            let nu = -1.5 + 3.0 * i as f64 / (k - 1) as f64;
            out.push((r * r0, nu));
        }
    }
    out
}

fn bundle_checks(mu: f64, bundles: &[Result<TrigBundle>], out: &mut Vec<CheckResult>) {
    let mut pyth = Tally::new("pythagorean", 1e-12);
    let mut hr_rel = Tally::new("scale_factor_relation", 1e-12);
    let mut tan_ratio = Tally::new("tangent_ratio", 1e-10);
    let mut power = Tally::new("power_identity", 1e-8);
    let mut inverse = Tally::new("cone_parameter_roundtrip", 1e-10);
    let m1 = 1.0 + mu;
    for b in bundles {
        let b = match b {
            Ok(b) => *b,
            Err(e) => {
                pyth.add(Err(e.clone()));
                continue;
            }
        };
        let (fs2, fc2, h2) = (b.f_s * b.f_s, b.f_c * b.f_c, b.h_r2());
        pyth.add(Ok((fs2 + fc2 - 1.0).abs()));
        if mu > 0.0 {
            hr_rel.add(Ok((fs2 - m1 * (1.0 - h2) / mu).abs().max((fc2 - (m1 * h2 - 1.0) / mu).abs())));
            let lhs = b.w.powf(-1.0 / mu) * (b.f_s / b.f_c).powf(m1 / mu);
            power.add(Ok(rel(lhs, m1.sqrt().powf(1.0 / mu) * b.s)));
        }
        tan_ratio.add(Ok(rel(fs2 / fc2, m1 * b.s * b.s / (m1 - b.s * b.s))));
        inverse.add(w_from_s(b.s, mu).map(|w| rel(w, b.w)));
    }
    out.push(pyth.finish());
    if mu > 0.0 {
        out.push(hr_rel.finish());
        out.push(power.finish());
    }
    out.push(tan_ratio.finish());
    out.push(inverse.finish());
}

fn derivative_checks(mu: f64, level: Level, out: &mut Vec<CheckResult>) {
    let mut t = Tally::new("derivative_identities", 1e-6);
    let get = |w: f64| trig_at(w, mu);
    for w in log_space(0.05, 20.0, level.w_samples() / 4) {
        let r = (|| -> Result<f64> {
            let b = get(w)?;
            let h = 1e-6 * w;
            let (p, m) = (get(w + h)?, get(w - h)?);
            let fd = |f: &dyn Fn(&TrigBundle) -> f64| (f(&p) - f(&m)) / (2.0 * h);
            let mut worst = 0.0f64;
            let mut pairs = vec![
                (b.df_c2_dw(), fd(&|x| x.f_c * x.f_c)),
                (b.d_tan_dw(), fd(&|x| x.f_s / x.f_c)),
                (b.ds_dw(), fd(&|x| x.s)),
                (b.d_log_tan_dw(), fd(&|x| (x.f_s / x.f_c).ln())),
                (b.d_half_cot_dw(), fd(&|x| x.w * x.w * x.h_r2() / (2.0 * x.f_s * x.f_s))),
            ];
            if mu > 0.0 {
                pairs.push((b.dh_r2_dw(), fd(&|x| x.h_r2())));
            }
            for (an, num) in pairs {
                worst = worst.max(rel(an, num));
            }
            Ok(worst)
        })();
        t.add(r);
    }
    out.push(t.finish());
}

fn point_checks(cfg: &SystemConfig, level: Level, out: &mut Vec<CheckResult>) {
    let mu = cfg.mu;
    let mut a38 = Tally::new("metric_product", 1e-9);
    let mut cross = Tally::new("jacobian_ratios", 1e-9);
    let mut member = Tally::new("spheroid_membership", 1e-10);
    let mut mag = Tally::new("position_magnitude", 1e-10);
    for (r, nu) in sos_sample(level, cfg.r0) {
        let p = SosPoint::new(r, nu, 0.3);
        let c = sos_to_cartesian(&p, cfg);
        let t = trig_at_point(r, nu, cfg);
        match (&c, &t) {
            (Ok(c), Ok(t)) => {
                member.add(Ok(((c.x * c.x + c.y * c.y + (1.0 + mu) * c.z * c.z) / (r * r) - 1.0).abs()));
                let want = r * r * (1.0 - mu * t.s * t.s / (1.0 + mu).powi(2));
                mag.add(Ok(rel(c.x * c.x + c.y * c.y + c.z * c.z, want)));
            }
            _ => member.add(Err(SosError::InvalidInput("transform failed".into()))),
        }
        if nu == 0.0 {
            continue;
        }
        let r38 = (|| -> Result<(f64, f64)> {
            let m = metrics_at(r, nu, cfg)?;
            let t = trig_at_point(r, nu, cfg)?;
            let d = dw(r, nu, cfg)?.dw_dnu;
            let w = compute_w(r, nu, cfg)?;
            let lhs = (m.h_r * m.h_nu * (1.0 + mu)).powi(2);
            let rhs = (t.f_c * t.f_s * r * d / w).powi(2);
            let c1 = rel(m.jac_over_hr2 * m.h_r * m.h_r, m.jacobian);
            let c2 = rel(m.jac_over_hnu2 * m.h_nu * m.h_nu, m.jacobian);
            Ok((rel(lhs, rhs), c1.max(c2)))
        })();
        match r38 {
            Ok((a, b)) => {
                a38.add(Ok(a));
                cross.add(Ok(b));
            }
            Err(e) => a38.add(Err(e)),
        }
    }
    out.extend([a38.finish(), cross.finish(), member.finish(), mag.finish()]);
}

fn reference_checks(cfg: &SystemConfig, out: &mut Vec<CheckResult>) {
    let mu = cfg.mu;
    let mut t = Tally::new("reference_spheroid", 1e-10);
    for i in 0..=20 {
        let nu = -1.5 + 3.0 * i as f64 / 20.0;
        t.add(trig_at_point(cfg.r0, nu, cfg).map(|b| (b.s - s_on_reference(nu, mu)).abs()));
    }
    out.push(t.finish());

    let mut paths = Tally::new("series_vs_closed_form", 1e-10);
    if mu > 0.0 {
        for w in log_space(1e-3, 1e3, 60) {
            if region_of(w, mu) == RegionClass::NearBorder {
                continue;
            }
            let r = trig_from_w(w, mu, DEFAULT_TOL).and_then(|a| {
                let b = trig_from_w_robust(w, mu)?;
                Ok([a.s - b.s, a.h_r - b.h_r, a.f_s - b.f_s, a.f_c - b.f_c].iter().fold(0.0f64, |m, d| m.max(d.abs())))
            });
            paths.add(r);
        }
        out.push(paths.finish());
    }
}

fn table_checks(mu: f64, fixture: Option<&TableFixture>, out: &mut Vec<CheckResult>) {
    let reference = TableFixture::reference(mu);
    let table = fixture.unwrap_or(&reference);
    let mut first = Tally::new("first_kind_table", 1e-13);
    let mut second = Tally::new("second_kind_table", 1e-13);
    let coef_err = |got: &[f64], want: Option<&Vec<f64>>| -> Result<f64> {
        let want = want.ok_or_else(|| SosError::InvalidInput("fixture is missing a degree".into()))?;
        if want.len() != got.len() {
            return Err(SosError::InvalidInput("fixture row has the wrong length".into()));
        }
        Ok(got.iter().zip(want).fold(0.0f64, |m, (g, w)| {
            let e = if *w == 0.0 { g.abs() } else { ((g - w) / w).abs() };
            m.max(e)
        }))
    };
    for n in 0..=6 {
        first.add(coef_err(&p_poly(n, mu).coeffs, table.first_kind.get(n)));
        second.add(coef_err(&t_poly(n, mu).coeffs, table.second_kind_part.get(n)));
    }
    if fixture.is_some_and(|f| f.mu != mu) {
        first.add(Err(SosError::InvalidInput("fixture mu differs from the configuration".into())));
    }
    out.extend([first.finish(), second.finish()]);
}

fn ode_checks(mu: f64, level: Level, out: &mut Vec<CheckResult>) {
    let mut first = Tally::new("ode_first_kind", 1e-8);
    let mut second = Tally::new("ode_second_kind", 1e-8);
    let smax = (1.0 + mu).sqrt();
    let norm = |r: f64, f: f64, d: f64, d2: f64| r.abs() / (1.0 + f.abs() + d.abs() + d2.abs());
    for n in 0..=level.max_degree() {
        let p = p_poly(n, mu);
        let q = SecondKindFn::new(n, mu);
        let k = n as f64;
        for i in 0..50 {
            let s = smax * (0.05 + 0.9 * i as f64 / 49.0);
            let (f, d, d2) = (p.eval(s), p.deriv(s), p.deriv2(s));
            first.add(Ok(norm(ode_residual(f, d, d2, s, k, mu), f, d, d2)));
            second.add((|| {
                let (f, d, d2) = (q.eval(s)?, q.deriv(s)?, q.deriv2(s)?);
                Ok(norm(ode_residual(f, d, d2, s, k, mu), f, d, d2))
            })());
        }
    }
    out.extend([first.finish(), second.finish()]);
}

fn harmonicity_checks(cfg: &SystemConfig, level: Level, out: &mut Vec<CheckResult>) {
    let r0 = cfg.r0;
    let points: Vec<CartesianPoint> = [(0.5, 0.2, 0.3), (0.7, -0.1, 0.2), (0.3, 0.4, -0.25), (0.6, 0.0, 0.1)]
        .iter()
        .take(match level {
            Level::Quick => 2,
            Level::Full => 4,
        })
        .map(|&(x, y, z)| CartesianPoint::new(x * r0, y * r0, z * r0))
        .collect();
    let mode = |n: usize| {
        let mut a = vec![0.0; n + 1];
        a[n] = 1.0;
        HarmonicSolution::new(&a, &[], *cfg)
    };
    // degrees up to three are reproduced exactly by the 7-point stencil
    let mut exact = Tally::new("harmonicity_exact_modes", 1e-8);
    let mut decay = Tally::new("harmonicity_decay_ratio", 0.5);
    for n in 0..=6 {
        for c in &points {
            let r = (|| -> Result<(f64, f64)> {
                let sol = mode(n)?;
                let coarse = fd_stencil(&sol, c, 1e-2 * r0)?;
                let fine = fd_stencil(&sol, c, 5e-3 * r0)?;
                Ok((fine.normalized(r0), coarse.laplacian / fine.laplacian))
            })();
            match r {
                Ok((res, _)) if n <= 3 => exact.add(Ok(res)),
                Ok((_, ratio)) => decay.add(Ok((ratio - 4.0).abs())),
                Err(e) => exact.add(Err(e)),
            }
        }
    }
    out.extend([exact.finish(), decay.finish()]);
}

/// Run the suite for one configuration. A fixture, when given, replaces
/// the built-in coefficient tables as the reference for the recursion.
pub fn run_verification(cfg: &SystemConfig, level: Level, fixture: Option<&TableFixture>) -> Result<VerifyReport> {
    cfg.validate()?;
    let mu = cfg.mu;
    let ws = w_sample(mu, level.w_samples());
    let mut bundles = map_indexed(ws.len(), Execution::default(), |i| trig_at(ws[i], mu));
    bundles.extend(ws.iter().map(|&w| trig_from_w_robust(w, mu)));

    let mut checks = Vec::new();
    bundle_checks(mu, &bundles, &mut checks);
    derivative_checks(mu, level, &mut checks);
    point_checks(cfg, level, &mut checks);
    reference_checks(cfg, &mut checks);
    table_checks(mu, fixture, &mut checks);
    ode_checks(mu, level, &mut checks);
    harmonicity_checks(cfg, level, &mut checks);
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { mu, r0: cfg.r0, level, passed, checks })
}
