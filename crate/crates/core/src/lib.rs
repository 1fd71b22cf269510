//! Geodesic centers of polygonal domains with holes.

pub mod candidates;
pub mod center;
pub mod domain;
pub mod error;
pub mod farthest;
pub mod geodesic;
pub mod geom;
pub mod instances;
pub mod oracle;
pub mod pirange;
pub mod scalar;
pub mod visibility;

pub use domain::{GeneralPositionReport, PointLocation, PolygonalDomain};
pub use error::{Error, Result};
pub use scalar::{Scalar, Tolerance};

pub type Point = geom::Point<f64>;
pub type Angle = geom::Angle<f64>;
pub type DirectionRange = geom::DirectionRange<f64>;
pub type Point32 = geom::Point<f32>;
pub type Angle32 = geom::Angle<f32>;
pub type DirectionRange32 = geom::DirectionRange<f32>;
