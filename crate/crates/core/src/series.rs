//! Pólya–Szegő power series with generalized binomial coefficients.
//!
//! Every quantity of the similar oblate spheroidal (SOS) system reduces to one
//! of two series in a power of `W`:
//!
//! ```text
//! S_A(a) = Σ_k C(a + b k, k) x^k
//! S_C(a) = Σ_k a / (a + b k) · C(a + b k, k) x^k
//! ```
//!
//! In the small-ν region `x = W²` and `b = -μ`; in the large-ν region
//! `x = W^(-2/(1+μ))` and `b = μ/(1+μ)`. The large-ν forms additionally carry
//! the prefactors `W^(2a)/(1+μ)` (for `S_A`) and `W^(2a)` (for `S_C`).
//!
//! The two regions meet at the cone `W = W_border`, where both series have
//! their radius of convergence. Evaluation is refused on the wrong side and
//! callers are expected to avoid the guard band around the border (see
//! [`region_of`]).

use crate::error::{Result, SosError};

/// Default relative truncation tolerance.
pub const DEFAULT_TOL: f64 = 1e-14;
/// Maximum number of series terms before giving up.
pub const TERM_CAP: usize = 20_000;
/// Guard factor γ: `[γ W_border, W_border / γ]` is the near-border band.
pub const BORDER_GUARD: f64 = 0.9;

/// Number of consecutive small terms required before truncating.
const SMALL_RUN: usize = 3;

/// Which convergence region a series expansion belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    SmallNu,
    LargeNu,
}

/// Classification of a cone parameter `W` relative to the region border.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionClass {
    SmallNu,
    LargeNu,
    NearBorder,
}

impl RegionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionClass::SmallNu => "SmallNu",
            RegionClass::LargeNu => "LargeNu",
            RegionClass::NearBorder => "NearBorder",
        }
    }
}

/// The two series shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    /// `Σ C(a + b k, k) x^k`
    SA,
    /// `Σ a/(a + b k) C(a + b k, k) x^k`
    SC,
}

/// A fully specified series: parameter `a`, family oblateness `μ`, region
/// and kind. The step `b` and the power `ε` of `W` are fixed by the region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSpec {
    pub a: f64,
    pub mu: f64,
    pub region: Region,
    pub kind: SeriesKind,
}

/// Outcome of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub est_rel_error: f64,
}

impl SeriesSpec {
    pub fn new(a: f64, mu: f64, region: Region, kind: SeriesKind) -> Self {
        Self { a, mu, region, kind }
    }

    /// Step `b` of the binomial top argument `a + b k`.
    pub fn step(&self) -> f64 {
        match self.region {
            Region::SmallNu => -self.mu,
            Region::LargeNu => self.mu / (1.0 + self.mu),
        }
    }

    /// Power `ε` in the expansion variable `W^ε`.
    pub fn exponent(&self) -> f64 {
        match self.region {
            Region::SmallNu => 2.0,
            Region::LargeNu => -2.0 / (1.0 + self.mu),
        }
    }
}

/// Generalized binomial coefficient `C(alpha, k) = Π_{j<k} (alpha - j) / k!`.
///
/// Built by the ratio recurrence `C(α, j) = C(α, j-1) (α - j + 1) / j`.
pub fn gen_binom(alpha: f64, k: usize) -> f64 {
    let mut c = 1.0;
    for j in 1..=k {
        c *= (alpha - (j - 1) as f64) / j as f64;
    }
    c
}

/// Border cone `W_border = sqrt(μ^μ / (1+μ)^(1+μ))` separating the regions.
pub fn w_border(mu: f64) -> f64 {
    if mu == 0.0 {
        return 1.0;
    }
    (0.5 * (mu * mu.ln() - (1.0 + mu) * (1.0 + mu).ln())).exp()
}

/// Classify `|W|` against the border with guard factor [`BORDER_GUARD`].
pub fn region_of(w: f64, mu: f64) -> RegionClass {
    let w = w.abs();
    let border = w_border(mu);
    if w < BORDER_GUARD * border {
        RegionClass::SmallNu
    } else if w > border / BORDER_GUARD {
        RegionClass::LargeNu
    } else {
        RegionClass::NearBorder
    }
}

/// Asymptotic ratio of consecutive term magnitudes; below one inside the
/// region of convergence.
fn asymptotic_ratio(region: Region, w: f64, mu: f64) -> f64 {
    let border = w_border(mu);
    match region {
        Region::SmallNu => (w / border).powi(2),
        Region::LargeNu => (border / w).powf(2.0 / (1.0 + mu)),
    }
}

/// Coefficient-times-power product kept as `mantissa · 2^exp2` so the
/// intermediate values of long products can neither overflow nor underflow.
struct ScaledProduct {
    mant: f64,
    exp2: i32,
}

impl ScaledProduct {
    const HI: f64 = 1.0e150;
    const LO: f64 = 1.0e-150;
    // 2^498 ≈ 1e150
    const SHIFT: i32 = 498;

    fn new(v: f64) -> Self {
        let mut p = Self { mant: 1.0, exp2: 0 };
        p.mul(v);
        p
    }

    fn mul(&mut self, f: f64) {
        self.mant *= f;
        let a = self.mant.abs();
        if a > Self::HI {
            self.mant *= 2f64.powi(-Self::SHIFT);
            self.exp2 += Self::SHIFT;
        } else if a < Self::LO && a != 0.0 {
            self.mant *= 2f64.powi(Self::SHIFT);
            self.exp2 -= Self::SHIFT;
        }
    }

    fn value(&self) -> f64 {
        if self.exp2 == 0 || self.mant == 0.0 {
            return self.mant;
        }
        // split the exponent so a single powi cannot overflow on its own
        let half = self.exp2 / 2;
        self.mant * 2f64.powi(half) * 2f64.powi(self.exp2 - half)
    }
}

/// k-th term (k ≥ 1) of the raw sum, including the power `x^k`.
fn term(kind: SeriesKind, a: f64, b: f64, x: f64, k: usize) -> f64 {
    let alpha = a + b * k as f64;
    match kind {
        SeriesKind::SA => {
            let mut p = ScaledProduct::new(1.0);
            for j in 0..k {
                p.mul((alpha - j as f64) / (j + 1) as f64 * x);
            }
            p.value()
        }
        SeriesKind::SC => {
            // a/(a+bk) C(a+bk, k) = (a/k) Π_{j=1}^{k-1} (α - j)/j, finite at α = 0
            let mut p = ScaledProduct::new(a * x / k as f64);
            for j in 1..k {
                p.mul((alpha - j as f64) / j as f64 * x);
            }
            p.value()
        }
    }
}

/// The bare sum `Σ_k (...) x^k` without the large-ν prefactor.
pub(crate) fn raw_sum(spec: &SeriesSpec, w: f64, tol: f64) -> Result<SeriesResult> {
    let w = w.abs();
    let border = w_border(spec.mu);
    let inside = match spec.region {
        Region::SmallNu => w < border,
        Region::LargeNu => w > border,
    };
    if !inside {
        return Err(SosError::RegionViolation { w, w_border: border });
    }
    let x = match spec.region {
        Region::SmallNu => w * w,
        Region::LargeNu => w.powf(spec.exponent()),
    };
    let b = spec.step();
    let rho = asymptotic_ratio(spec.region, w, spec.mu);
    let tail = if rho > 0.0 { rho / (1.0 - rho) } else { 0.0 };

    if x == 0.0 || (spec.kind == SeriesKind::SC && spec.a == 0.0) {
        return Ok(SeriesResult { value: 1.0, terms_used: 1, est_rel_error: 0.0 });
    }

    let mut sum = 1.0;
    let mut run = 0;
    for k in 1..=TERM_CAP {
        let t = term(spec.kind, spec.a, b, x, k);
        sum += t;
        // with b != 0 an exactly vanishing coefficient is isolated, not a tail
        if t == 0.0 && b != 0.0 {
            continue;
        }
        let scale = sum.abs().max(f64::MIN_POSITIVE);
        // the tail beyond term k is bounded by a geometric series of ratio rho
        let est = t.abs() * tail.max(1.0) / scale;
        if t.abs() <= tol * scale && est <= tol {
            run += 1;
            if run >= SMALL_RUN {
                return Ok(SeriesResult { value: sum, terms_used: k + 1, est_rel_error: est });
            }
        } else {
            run = 0;
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(SosError::NonConvergent { w, terms: TERM_CAP })
}

/// Evaluate a series at `W` (its absolute value is used) to relative
/// tolerance `tol`. Large-ν results include the `W^(2a)` prefactors, so the
/// value is the full quantity in either region.
pub fn eval_series(spec: &SeriesSpec, w: f64, tol: f64) -> Result<SeriesResult> {
    if !(tol > 0.0) {
        return Err(SosError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if spec.mu < 0.0 || !spec.mu.is_finite() {
        return Err(SosError::InvalidInput(format!("mu must be finite and non-negative, got {}", spec.mu)));
    }
    let mut r = raw_sum(spec, w, tol)?;
    if spec.region == Region::LargeNu {
        let w = w.abs();
        let pre = if spec.a == 0.0 { 1.0 } else { (2.0 * spec.a * w.ln()).exp() };
        r.value *= match spec.kind {
            SeriesKind::SA => pre / (1.0 + spec.mu),
            SeriesKind::SC => pre,
        };
    }
    Ok(r)
}
