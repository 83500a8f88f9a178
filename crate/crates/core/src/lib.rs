//! Riesz bases of exponentials for bounded regions that tile `ℝ^d` at level
//! `k` by a lattice.
//!
//! Pipeline: normalize the lattice to `ℤ^d` ([`lattice`]), cut the region
//! into cells of constant translate set ([`geometry`]), verify the tiling and
//! split it into `k` fundamental domains ([`tiling`]), pick shift vectors
//! `a_1 … a_k` making every profile matrix invertible and compute the Riesz
//! constants ([`riesz`]), then check everything on a sample grid with an
//! exactly invertible discrete model ([`transform`]).

pub mod geometry;
pub mod lattice;
pub mod report;
pub mod riesz;
pub mod scalar;
pub mod tiling;
pub mod transform;

/// Default exact scalar.
pub type Rational = num_rational::BigRational;

pub type BoxUnion = geometry::BoxUnion<Rational>;
pub type HalfOpenBox = geometry::HalfOpenBox<Rational>;
pub type Polygon2D = geometry::Polygon2D<Rational>;
pub type Region = geometry::Region<Rational>;
pub type CellComplex = geometry::CellComplex<Rational>;
pub type Lattice = lattice::Lattice<Rational>;
pub type NormalizationMap = lattice::NormalizationMap<Rational>;
pub type TranslateProfile = tiling::TranslateProfile<Rational>;
pub type ProfileSet = tiling::ProfileSet<Rational>;
pub type MultiplicityReport = tiling::MultiplicityReport<Rational>;

pub use geometry::LatticeVector;
pub use nalgebra::Complex;
pub use scalar::{ExactScalar, Real};

pub type ShiftVectors = riesz::ShiftVectors<f64>;
pub type RieszReport = riesz::RieszReport<f64>;
pub type SampleGrid = transform::SampleGrid<Rational>;
pub type GridFunction = transform::GridFunction<f64>;
pub type CoefficientArray = transform::CoefficientArray<f64>;
pub type Transform = transform::Transform<f64>;
