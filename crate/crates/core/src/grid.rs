//! Meridional-plane grids `(x, z)` in the first quadrant, in units of `R0`.

use std::fmt;
use std::str::FromStr;

use crate::coords::{cartesian_to_sos, compute_w, trig_at_point, CartesianPoint, SystemConfig};
use crate::error::{Result, SosError};
use crate::par::{map_indexed, Execution};
use crate::solution::HarmonicSolution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub nx: usize,
    pub nz: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.z_min, self.z_max].iter().all(|v| v.is_finite());
        if !finite {
            return Err(SosError::InvalidInput("grid bounds must be finite".into()));
        }
        if !(self.x_max > self.x_min && self.x_min >= 0.0) {
            return Err(SosError::InvalidInput("grid needs x_max > x_min >= 0".into()));
        }
        if !(self.z_max > self.z_min && self.z_min >= 0.0) {
            return Err(SosError::InvalidInput("grid needs z_max > z_min >= 0".into()));
        }
        if self.nx < 2 || self.nz < 2 {
            return Err(SosError::InvalidInput("grid needs at least 2 points per axis".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of the `i`-th point in row-major order, `z` outer.
    pub fn point(&self, i: usize) -> (f64, f64) {
        let (iz, ix) = (i / self.nx, i % self.nx);
        let x = self.x_min + (self.x_max - self.x_min) * ix as f64 / (self.nx - 1) as f64;
        let z = self.z_min + (self.z_max - self.z_min) * iz as f64 / (self.nz - 1) as f64;
        (x, z)
    }
}

/// Field sampled on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    S,
    V,
    HR,
    W,
}

impl FromStr for Quantity {
    type Err = SosError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s" => Ok(Quantity::S),
            "V" => Ok(Quantity::V),
            "hR" => Ok(Quantity::HR),
            "W" => Ok(Quantity::W),
            other => Err(SosError::InvalidInput(format!("unknown quantity {other:?} (expected s, V, hR or W)"))),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::S => "s",
            Quantity::V => "V",
            Quantity::HR => "hR",
            Quantity::W => "W",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub z: f64,
    /// `None` where the point has no valid value (origin, axis singularities).
    pub value: Option<f64>,
}

/// Value of `quantity` at the meridional point `(x, z)` given in units of `R0`.
pub fn point_value(
    cfg: &SystemConfig,
    quantity: Quantity,
    solution: Option<&HarmonicSolution>,
    x: f64,
    z: f64,
) -> Result<f64> {
    let p = cartesian_to_sos(&CartesianPoint::new(x * cfg.r0, 0.0, z * cfg.r0), cfg)?;
    match quantity {
        Quantity::S => Ok(trig_at_point(p.r, p.nu, cfg)?.s),
        Quantity::HR => Ok(trig_at_point(p.r, p.nu, cfg)?.h_r),
        Quantity::W => compute_w(p.r, p.nu, cfg),
        Quantity::V => {
            solution.ok_or_else(|| SosError::InvalidInput("quantity V needs coefficients".into()))?.eval_v_at(&p)
        }
    }
}

/// Evaluate `quantity` over the grid. Points are returned in row-major
/// order with `z` outer, independent of `exec`.
pub fn evaluate_grid(
    cfg: &SystemConfig,
    spec: &GridSpec,
    quantity: Quantity,
    solution: Option<&HarmonicSolution>,
    exec: Execution,
) -> Result<Vec<GridPoint>> {
    cfg.validate()?;
    spec.validate()?;
    if quantity == Quantity::V && solution.is_none() {
        return Err(SosError::InvalidInput("quantity V needs coefficients".into()));
    }
    Ok(map_indexed(spec.len(), exec, |i| {
        let (x, z) = spec.point(i);
        GridPoint { x, z, value: point_value(cfg, quantity, solution, x, z).ok() }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> GridSpec {
        GridSpec { x_min: 0.0, x_max: 1.0, z_min: 0.0, z_max: 1.0, nx: n, nz: n }
    }

    #[test]
    fn validation() {
        assert!(spec(2).validate().is_ok());
        assert!(spec(1).validate().is_err());
        assert!(GridSpec { x_min: -0.1, ..spec(3) }.validate().is_err());
        assert!(GridSpec { z_max: 0.0, ..spec(3) }.validate().is_err());
    }

    #[test]
    fn layout_is_z_outer() {
        let s = spec(3);
        assert_eq!(s.point(0), (0.0, 0.0));
        assert_eq!(s.point(1), (0.5, 0.0));
        assert_eq!(s.point(3), (0.0, 0.5));
    }

    #[test]
    fn origin_is_empty_and_equator_has_zero_w() {
        let cfg = SystemConfig::new(2.0, 1.0).unwrap();
        let g = evaluate_grid(&cfg, &spec(3), Quantity::W, None, Execution::Sequential).unwrap();
        assert_eq!(g[0].value, None);
        assert_eq!(g[2].value, Some(0.0));
        // x = 0 is the rotation axis, where W is unbounded
        assert_eq!(g[3].value, None);
    }

    #[test]
    fn constant_field() {
        let cfg = SystemConfig::new(0.5, 2.0).unwrap();
        let sol = HarmonicSolution::new(&[1.0], &[], cfg).unwrap();
        let g = evaluate_grid(&cfg, &spec(5), Quantity::V, Some(&sol), Execution::Parallel).unwrap();
        assert!(g.iter().skip(1).all(|p| p.value == Some(1.0)));
        assert!(evaluate_grid(&cfg, &spec(5), Quantity::V, None, Execution::Parallel).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let cfg = SystemConfig::new(2.0, 1.0).unwrap();
        let a = evaluate_grid(&cfg, &spec(17), Quantity::S, None, Execution::Sequential).unwrap();
        let b = evaluate_grid(&cfg, &spec(17), Quantity::S, None, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quantity_names() {
        for q in [Quantity::S, Quantity::V, Quantity::HR, Quantity::W] {
            assert_eq!(q.to_string().parse::<Quantity>().unwrap(), q);
        }
        assert!("x".parse::<Quantity>().is_err());
    }
}
