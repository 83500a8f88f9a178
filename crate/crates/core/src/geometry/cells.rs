use crate::scalar::ExactScalar;

use super::polygon::crossing_x;
use super::{HalfOpenBox, LatticeVector, Piece, Polygon2D, Shape};

/// Part of `[0,1)^d` on which the set of translates into `Ω` is constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell<S> {
    pub shape: Shape<S>,
    /// `{t : cell + t ⊆ Ω}`, strictly increasing.
    pub translates: Vec<LatticeVector>,
    /// A point strictly inside the cell.
    pub witness: Vec<S>,
}

impl<S: ExactScalar> Cell<S> {
    pub fn multiplicity(&self) -> usize {
        self.translates.len()
    }

    pub fn measure(&self) -> S {
        self.shape.measure()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Layout<S> {
    /// Product grid; cell index is row-major in the per-axis interval index.
    Grid(Vec<Vec<S>>),
    Faces,
}

/// Exact partition of `[0,1)^d` into cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex<S> {
    dim: usize,
    cells: Vec<Cell<S>>,
    layout: Layout<S>,
}

impl<S: ExactScalar> CellComplex<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Cell<S>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Per-axis breakpoints when the cells form a product grid.
    pub fn breakpoints(&self) -> Option<&[Vec<S>]> {
        match &self.layout {
            Layout::Grid(b) => Some(b),
            Layout::Faces => None,
        }
    }

    pub fn total_measure(&self) -> S {
        self.cells.iter().fold(S::zero(), |a, c| a + c.measure())
    }

    /// Index of the cell containing `x ∈ [0,1)^d`.
    pub fn locate(&self, x: &[S]) -> Option<usize> {
        if x.len() != self.dim || !x.iter().all(|v| *v >= S::zero() && *v < S::one()) {
            return None;
        }
        match &self.layout {
            Layout::Grid(bps) => {
                let mut idx = 0usize;
                for (axis, b) in bps.iter().enumerate() {
                    // number of breakpoints <= x, minus one
                    let pos = b.partition_point(|v| v <= &x[axis]) - 1;
                    idx = idx * (b.len() - 1) + pos;
                }
                Some(idx)
            }
            Layout::Faces => self.cells.iter().position(|c| c.shape.contains(x)),
        }
    }
}

fn translates_at<S: ExactScalar>(pieces: &[Piece<S>], witness: &[S]) -> Vec<LatticeVector> {
    let mut t: Vec<LatticeVector> =
        pieces.iter().filter(|p| p.shape.contains(witness)).map(|p| p.translate.clone()).collect();
    t.sort();
    t.dedup();
    t
}

/// Build the cell complex of the pieces of a reduced region.
///
/// Box pieces induce a product grid from the per-axis breakpoints; polygon
/// pieces induce a vertical trapezoidal subdivision of the unit square, which
/// refines the arrangement of all piece edges.
pub fn cell_decompose<S: ExactScalar>(pieces: &[Piece<S>], dim: usize) -> CellComplex<S> {
    if pieces.iter().any(|p| matches!(p.shape, Shape::Polygon(_))) {
        assert_eq!(dim, 2, "polygon pieces live in the plane");
        trapezoid_complex(pieces)
    } else {
        grid_complex(pieces, dim)
    }
}

fn grid_complex<S: ExactScalar>(pieces: &[Piece<S>], dim: usize) -> CellComplex<S> {
    let mut bps: Vec<Vec<S>> = vec![vec![S::zero(), S::one()]; dim];
    for p in pieces {
        if let Shape::Box(b) = &p.shape {
            for axis in 0..dim {
                bps[axis].push(b.lo()[axis].clone());
                bps[axis].push(b.hi()[axis].clone());
            }
        }
    }
    for b in &mut bps {
        b.sort();
        b.dedup();
    }

    let counts: Vec<usize> = bps.iter().map(|b| b.len() - 1).collect();
    let total: usize = counts.iter().product();
    let mut cells = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        let lo: Vec<S> = (0..dim).map(|a| bps[a][idx[a]].clone()).collect();
        let hi: Vec<S> = (0..dim).map(|a| bps[a][idx[a] + 1].clone()).collect();
        let cell_box = HalfOpenBox::new(lo, hi).expect("breakpoints are strictly increasing");
        let witness = cell_box.center();
        let translates = translates_at(pieces, &witness);
        cells.push(Cell { shape: Shape::Box(cell_box), translates, witness });
        for a in (0..dim).rev() {
            idx[a] += 1;
            if idx[a] < counts[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    CellComplex { dim, cells, layout: Layout::Grid(bps) }
}

fn trapezoid_complex<S: ExactScalar>(pieces: &[Piece<S>]) -> CellComplex<S> {
    let mut segments: Vec<([S; 2], [S; 2])> = Vec::new();
    let mut xs: Vec<S> = vec![S::zero(), S::one()];
    for p in pieces {
        let Shape::Polygon(poly) = &p.shape else { continue };
        for (a, b) in poly.edges() {
            if a == b {
                continue;
            }
            xs.push(a[0].clone());
            xs.push(b[0].clone());
            if a[0] != b[0] {
                let (l, r) = if a[0] < b[0] { (a, b) } else { (b, a) };
                segments.push((l.clone(), r.clone()));
            }
        }
    }
    segments.sort();
    segments.dedup();
    for i in 0..segments.len() {
        for j in i + 1..segments.len() {
            let (a, b) = &segments[i];
            let (c, d) = &segments[j];
            if let Some(x) = crossing_x(a, b, c, d) {
                xs.push(x);
            }
        }
    }
    xs.retain(|x| *x >= S::zero() && *x <= S::one());
    xs.sort();
    xs.dedup();

    let y_at = |seg: &([S; 2], [S; 2]), x: &S| -> S {
        let (a, b) = seg;
        a[1].clone() + (x.clone() - a[0].clone()) * (b[1].clone() - a[1].clone()) / (b[0].clone() - a[0].clone())
    };

    let mut cells = Vec::new();
    for w in xs.windows(2) {
        let (xa, xb) = (&w[0], &w[1]);
        // lines crossing the slab, as (y at xa, y at xb)
        let mut lines: Vec<(S, S)> = vec![(S::zero(), S::zero()), (S::one(), S::one())];
        for seg in &segments {
            if seg.0[0] <= *xa && seg.1[0] >= *xb {
                lines.push((y_at(seg, xa), y_at(seg, xb)));
            }
        }
        lines.sort_by(|l, m| (l.0.clone() + l.1.clone()).cmp(&(m.0.clone() + m.1.clone())));
        lines.dedup();
        for pair in lines.windows(2) {
            let (lower, upper) = (&pair[0], &pair[1]);
            let mut verts = vec![
                [xa.clone(), lower.0.clone()],
                [xb.clone(), lower.1.clone()],
                [xb.clone(), upper.1.clone()],
                [xa.clone(), upper.0.clone()],
            ];
            verts.dedup();
            if verts.first() == verts.last() {
                verts.pop();
            }
            if verts.len() < 3 {
                continue;
            }
            let poly = Polygon2D::from_vertices_unchecked(verts);
            if poly.area() <= S::zero() {
                continue;
            }
            let witness = poly.vertex_centroid();
            let translates = translates_at(pieces, &witness);
            cells.push(Cell { shape: Shape::Polygon(poly), translates, witness });
        }
    }
    CellComplex { dim: 2, cells, layout: Layout::Faces }
}
