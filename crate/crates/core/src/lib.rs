//! Numerical laboratory for nonlinear transversality of finite collections
//! of sets and the matching regularity properties of set-valued mappings.

pub mod certify;
pub mod corpus;
pub mod error;
pub mod gauges;
pub mod geometry;
pub mod json;
pub mod maps;
pub mod numeric;
pub mod rng;
pub mod scenes;
pub mod sets;
pub mod slopes;

pub use error::{Error, Result};
pub use gauges::Gauge;
pub use geometry::{NormSpec, Point};
pub use sets::{Scene, SetOracle};
