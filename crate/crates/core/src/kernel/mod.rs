//! Exact arithmetic for motivic coefficients and truncated series.

pub mod classes;
pub mod laurent;
pub mod series;

pub use classes::{projective_class, qgeom, sym_power_class};
pub use laurent::LaurentPoly;
pub use series::{box_points, expand_rational, ExpVec, MPoly, MSeries, Mismatch, SeriesDoc};
