//! Exact rational regions: half-open box unions in any dimension and simple
//! polygons in the plane.
//!
//! Every membership test is exact. Boxes are half-open (`[lo, hi)` on each
//! axis). Polygons use the matching convention: a point belongs to the
//! polygon when the point displaced by `(ε, ε²)` lies in its interior for all
//! small `ε > 0`. Both rules are translation invariant and agree on
//! axis-aligned rectangles, so a lattice multi-tiling covers *every* point
//! exactly `k` times, not just almost every point.

mod boxes;
mod cells;
mod polygon;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::ExactScalar;

pub use boxes::{normalize_box_union, BoxUnion, HalfOpenBox};
pub use cells::{cell_decompose, Cell, CellComplex};
pub use polygon::Polygon2D;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("box is empty along axis {axis}: lo = {lo}, hi = {hi}")]
    EmptyBox { axis: usize, lo: String, hi: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("boxes {first} and {second} overlap; both contain {witness}")]
    Overlap { first: usize, second: usize, witness: String },
    #[error("region has no pieces")]
    EmptyRegion,
    #[error("polygon needs at least 3 distinct vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon edges {first} and {second} intersect")]
    SelfIntersecting { first: usize, second: usize },
    #[error("polygon has zero area")]
    ZeroArea,
}

/// Integer vector; ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn format_point<S: ExactScalar>(p: &[S]) -> String {
    let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

pub(crate) fn shift_point<S: ExactScalar>(p: &[S], t: &[i64]) -> Vec<S> {
    p.iter().zip(t).map(|(x, &ti)| x.clone() + S::from_i64(ti)).collect()
}

/// A bounded region of `ℝ^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region<S> {
    Boxes(BoxUnion<S>),
    Polygon(Polygon2D<S>),
}

impl<S: ExactScalar> Region<S> {
    pub fn dim(&self) -> usize {
        match self {
            Region::Boxes(b) => b.dim(),
            Region::Polygon(_) => 2,
        }
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> S {
        match self {
            Region::Boxes(b) => b.measure(),
            Region::Polygon(p) => p.area(),
        }
    }

    pub fn contains(&self, point: &[S]) -> bool {
        match self {
            Region::Boxes(b) => b.contains(point),
            Region::Polygon(p) => p.contains(point),
        }
    }

    /// Smallest closed axis-aligned box containing the region.
    pub fn bounding_box(&self) -> (Vec<S>, Vec<S>) {
        match self {
            Region::Boxes(b) => b.bounding_box(),
            Region::Polygon(p) => p.bounding_box(),
        }
    }

    pub fn translated(&self, t: &[i64]) -> Region<S> {
        match self {
            Region::Boxes(b) => Region::Boxes(b.translated(t)),
            Region::Polygon(p) => Region::Polygon(p.translated(t)),
        }
    }

    /// Integer vectors `t` that can possibly satisfy `x + t ∈ Ω` for some
    /// `x ∈ [0,1)^d`, as inclusive per-axis ranges.
    pub fn translate_range(&self) -> Vec<(i64, i64)> {
        let (lo, hi) = self.bounding_box();
        lo.iter().zip(&hi).map(|(l, h)| (l.floor_i64() - 1, h.ceil_i64())).collect()
    }

    /// Cut the region along the integer grid and move every piece into
    /// `[0,1)^d`; `piece + translate` is the original part of the region.
    pub fn reduce_mod_unit_lattice(&self) -> Vec<Piece<S>> {
        match self {
            Region::Boxes(b) => b.reduce_mod_unit_lattice(),
            Region::Polygon(p) => p.reduce_mod_unit_lattice(),
        }
    }
}

/// Shape of a piece or of a cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape<S> {
    Box(HalfOpenBox<S>),
    Polygon(Polygon2D<S>),
}

impl<S: ExactScalar> Shape<S> {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Box(b) => b.dim(),
            Shape::Polygon(_) => 2,
        }
    }

    pub fn measure(&self) -> S {
        match self {
            Shape::Box(b) => b.measure(),
            Shape::Polygon(p) => p.area(),
        }
    }

    pub fn contains(&self, point: &[S]) -> bool {
        match self {
            Shape::Box(b) => b.contains(point),
            Shape::Polygon(p) => p.contains(point),
        }
    }

    pub fn translated(&self, t: &[i64]) -> Shape<S> {
        match self {
            Shape::Box(b) => Shape::Box(b.translated(t)),
            Shape::Polygon(p) => Shape::Polygon(p.translated(t)),
        }
    }

    /// Outline vertices in the plane (counterclockwise); `None` unless `d = 2`.
    pub fn outline_2d(&self) -> Option<Vec<[S; 2]>> {
        match self {
            Shape::Box(b) if b.dim() == 2 => {
                let (lo, hi) = (b.lo(), b.hi());
                Some(vec![
                    [lo[0].clone(), lo[1].clone()],
                    [hi[0].clone(), lo[1].clone()],
                    [hi[0].clone(), hi[1].clone()],
                    [lo[0].clone(), hi[1].clone()],
                ])
            }
            Shape::Box(_) => None,
            Shape::Polygon(p) => Some(p.vertices().to_vec()),
        }
    }
}

/// One piece of a region reduced modulo `ℤ^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece<S> {
    pub shape: Shape<S>,
    pub translate: LatticeVector,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_fraction(n, d)
    }

    fn interval(lo: Rational, hi: Rational) -> HalfOpenBox<Rational> {
        HalfOpenBox::new(vec![lo], vec![hi]).unwrap()
    }

    #[test]
    fn region_measures() {
        let cube = HalfOpenBox::<Rational>::unit(3);
        let r = Region::Boxes(normalize_box_union(vec![cube]).unwrap());
        assert_eq!(r.measure(), q(1, 1));

        let rect = HalfOpenBox::new(vec![q(0, 1), q(0, 1)], vec![q(2, 1), q(1, 1)]).unwrap();
        let r = Region::Boxes(normalize_box_union(vec![rect]).unwrap());
        assert_eq!(r.measure(), q(2, 1));

        let poly = Polygon2D::<Rational>::from_integer_vertices(&[(0, 0), (2, 0), (2, 1), (0, 1)]).unwrap();
        assert_eq!(Region::Polygon(poly).measure(), q(2, 1));
    }

    #[test]
    fn reduce_interval_of_length_two() {
        let r = Region::Boxes(normalize_box_union(vec![interval(q(0, 1), q(2, 1))]).unwrap());
        let pieces = r.reduce_mod_unit_lattice();
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].shape, Shape::Box(interval(q(0, 1), q(1, 1))));
        assert_eq!(pieces[0].translate, LatticeVector(vec![0]));
        assert_eq!(pieces[1].shape, Shape::Box(interval(q(0, 1), q(1, 1))));
        assert_eq!(pieces[1].translate, LatticeVector(vec![1]));
    }

    #[test]
    fn reduce_interval_straddling_one() {
        let r = Region::Boxes(normalize_box_union(vec![interval(q(1, 2), q(3, 2))]).unwrap());
        let pieces = r.reduce_mod_unit_lattice();
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].shape, Shape::Box(interval(q(1, 2), q(1, 1))));
        assert_eq!(pieces[0].translate, LatticeVector(vec![0]));
        assert_eq!(pieces[1].shape, Shape::Box(interval(q(0, 1), q(1, 2))));
        assert_eq!(pieces[1].translate, LatticeVector(vec![1]));
    }

    #[test]
    fn reduce_triangle_into_three_unit_squares() {
        let tri = Polygon2D::<Rational>::from_integer_vertices(&[(0, 0), (2, 0), (0, 2)]).unwrap();
        let region = Region::Polygon(tri);
        let pieces = region.reduce_mod_unit_lattice();
        let mut translates: Vec<_> = pieces.iter().map(|p| p.translate.clone()).collect();
        translates.sort();
        assert_eq!(
            translates,
            vec![LatticeVector(vec![0, 0]), LatticeVector(vec![0, 1]), LatticeVector(vec![1, 0])]
        );
        let total: Rational = pieces.iter().map(|p| p.shape.measure()).sum();
        assert_eq!(total, q(2, 1));
        // the (0,0) piece is the whole unit square, the other two are half squares
        for p in &pieces {
            let expected = if p.translate.0 == vec![0, 0] { q(1, 1) } else { q(1, 2) };
            assert_eq!(p.shape.measure(), expected);
        }
    }

    #[test]
    fn box_and_polygon_conventions_agree_on_rectangles() {
        let rect = HalfOpenBox::new(vec![q(0, 1), q(0, 1)], vec![q(3, 2), q(1, 1)]).unwrap();
        let poly = Polygon2D::new(vec![
            [q(0, 1), q(0, 1)],
            [q(3, 2), q(0, 1)],
            [q(3, 2), q(1, 1)],
            [q(0, 1), q(1, 1)],
        ])
        .unwrap();
        for i in -2..8 {
            for j in -2..6 {
                let p = vec![q(i, 4), q(j, 4)];
                assert_eq!(rect.contains(&p), poly.contains(&p), "at {:?}", p);
            }
        }
    }

    #[test]
    fn lattice_vectors_order_lexicographically() {
        let mut v = vec![LatticeVector(vec![1, 0]), LatticeVector(vec![0, 5]), LatticeVector(vec![0, -1])];
        v.sort();
        assert_eq!(v, vec![LatticeVector(vec![0, -1]), LatticeVector(vec![0, 5]), LatticeVector(vec![1, 0])]);
        assert_eq!(v[2].to_string(), "(1,0)");
    }
}
