//! Harmonic functions of the Laplace equation in similar oblate spheroidal
//! (SOS) coordinates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coords;
pub mod error;
pub mod grid;
pub mod legendre;
pub mod par;
pub mod roots;
pub mod series;
pub mod solution;
pub mod trig;
pub mod verify;

pub use coords::{CartesianPoint, MetricBundle, SosPoint, SystemConfig};
pub use error::{Result, SosError};
