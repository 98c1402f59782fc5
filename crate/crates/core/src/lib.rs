//! Exact Poincare series of multi-index filtrations on rings of plane and
//! space curve germs.

pub mod blowup;
pub mod curve;
pub mod error;
pub mod filtration;
pub mod fixtures;
pub mod formulas;
pub mod graph;
pub mod kernel;
pub mod linalg;
pub mod rational;
pub mod verify;

pub use blowup::{BlowupScript, Center, DivisorialOracle, Location, Modification, Resolution};
pub use curve::{Branch, Curve, HilbertOracle};
pub use error::{Error, Result};
pub use filtration::{HilbertFunction, SeriesKind};
pub use graph::{DualGraph, IntersectionData};
pub use rational::{QPoly, Q};
pub use kernel::{
    expand_rational, projective_class, qgeom, sym_power_class, ExpVec, LaurentPoly, MPoly,
    MSeries,
};
