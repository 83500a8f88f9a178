use std::cmp::Ordering;


use crate::scalar::ExactScalar;

use super::{GeometryError, LatticeVector, Piece, Shape};

/// Simple polygon with rational vertices, stored counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polygon2D<S> {
    vertices: Vec<[S; 2]>,
}

fn cross<S: ExactScalar>(o: &[S; 2], a: &[S; 2], b: &[S; 2]) -> S {
    (a[0].clone() - o[0].clone()) * (b[1].clone() - o[1].clone())
        - (a[1].clone() - o[1].clone()) * (b[0].clone() - o[0].clone())
}

fn signed_double_area<S: ExactScalar>(vertices: &[[S; 2]]) -> S {
    let n = vertices.len();
    (0..n).fold(S::zero(), |acc, i| {
        let (p, q) = (&vertices[i], &vertices[(i + 1) % n]);
        acc + p[0].clone() * q[1].clone() - q[0].clone() * p[1].clone()
    })
}

fn on_segment<S: ExactScalar>(a: &[S; 2], b: &[S; 2], p: &[S; 2]) -> bool {
    a[0].clone().min(b[0].clone()) <= p[0]
        && p[0] <= a[0].clone().max(b[0].clone())
        && a[1].clone().min(b[1].clone()) <= p[1]
        && p[1] <= a[1].clone().max(b[1].clone())
}

/// Closed segments `ab` and `cd` share at least one point.
pub(crate) fn segments_intersect<S: ExactScalar>(a: &[S; 2], b: &[S; 2], c: &[S; 2], d: &[S; 2]) -> bool {
    let d1 = cross(c, d, a).signum();
    let d2 = cross(c, d, b).signum();
    let d3 = cross(a, b, c).signum();
    let d4 = cross(a, b, d).signum();
    if d1.clone() * d2.clone() < S::zero() && d3.clone() * d4.clone() < S::zero() {
        return true;
    }
    (d1.is_zero() && on_segment(c, d, a))
        || (d2.is_zero() && on_segment(c, d, b))
        || (d3.is_zero() && on_segment(a, b, c))
        || (d4.is_zero() && on_segment(a, b, d))
}

/// `x`-coordinate where the non-vertical segments `ab` and `cd` meet, when
/// they meet in exactly one point.
pub(crate) fn crossing_x<S: ExactScalar>(a: &[S; 2], b: &[S; 2], c: &[S; 2], d: &[S; 2]) -> Option<S> {
    let r = [b[0].clone() - a[0].clone(), b[1].clone() - a[1].clone()];
    let s = [d[0].clone() - c[0].clone(), d[1].clone() - c[1].clone()];
    let denom = r[0].clone() * s[1].clone() - r[1].clone() * s[0].clone();
    if denom.is_zero() {
        return None;
    }
    let qp = [c[0].clone() - a[0].clone(), c[1].clone() - a[1].clone()];
    let t = (qp[0].clone() * s[1].clone() - qp[1].clone() * s[0].clone()) / denom.clone();
    let u = (qp[0].clone() * r[1].clone() - qp[1].clone() * r[0].clone()) / denom;
    let unit = S::zero()..=S::one();
    (unit.contains(&t) && unit.contains(&u)).then(|| a[0].clone() + t * r[0].clone())
}

impl<S: ExactScalar> Polygon2D<S> {
    /// Validate a simple polygon; clockwise input is reoriented.
    pub fn new(vertices: Vec<[S; 2]>) -> Result<Self, GeometryError> {
        let mut vertices = vertices;
        vertices.dedup();
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        let n = vertices.len();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
                let (c, d) = (&vertices[j], &vertices[(j + 1) % n]);
                if adjacent {
                    // consecutive edges may only share their common vertex
                    let (shared, far_prev, far_next) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    let folds_back = cross(far_prev, shared, far_next).is_zero()
                        && (on_segment(shared, far_prev, far_next) || on_segment(shared, far_next, far_prev));
                    if folds_back {
                        return Err(GeometryError::SelfIntersecting { first: i, second: j });
                    }
                } else if segments_intersect(a, b, c, d) {
                    return Err(GeometryError::SelfIntersecting { first: i, second: j });
                }
            }
        }
        let area2 = signed_double_area(&vertices);
        match area2.cmp(&S::zero()) {
            Ordering::Equal => Err(GeometryError::ZeroArea),
            Ordering::Less => {
                vertices.reverse();
                Ok(Self { vertices })
            }
            Ordering::Greater => Ok(Self { vertices }),
        }
    }

    pub fn from_integer_vertices(vertices: &[(i64, i64)]) -> Result<Self, GeometryError> {
        Self::new(vertices.iter().map(|&(x, y)| [S::from_i64(x), S::from_i64(y)]).collect())
    }

    /// Skips validation; used for clipped pieces and cells, which may carry
    /// degenerate bridge edges along the clipping window.
    pub(crate) fn from_vertices_unchecked(vertices: Vec<[S; 2]>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[[S; 2]] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&[S; 2], &[S; 2])> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    /// Shoelace area.
    pub fn area(&self) -> S {
        signed_double_area(&self.vertices).abs() * S::half()
    }

    /// Membership under the `(ε, ε²)` displacement rule.
    ///
    /// A horizontal ray from the displaced point crosses edge `ab` exactly
    /// when `a_y ≤ p_y < b_y` (or the reverse) and the edge meets the line
    /// `y = p_y` strictly to the right of `p`.
    pub fn contains(&self, point: &[S]) -> bool {
        debug_assert_eq!(point.len(), 2);
        let (px, py) = (&point[0], &point[1]);
        let mut inside = false;
        for (a, b) in self.edges() {
            let a_below = a[1] <= *py;
            let b_below = b[1] <= *py;
            if a_below == b_below {
                continue;
            }
            // x of the edge at height py, compared with px without dividing
            let dy = b[1].clone() - a[1].clone();
            let lhs = (a[0].clone() - px.clone()) * dy.clone()
                + (py.clone() - a[1].clone()) * (b[0].clone() - a[0].clone());
            if (lhs > S::zero()) == (dy > S::zero()) && !lhs.is_zero() {
                inside = !inside;
            }
        }
        inside
    }

    pub fn bounding_box(&self) -> (Vec<S>, Vec<S>) {
        let mut lo = self.vertices[0].to_vec();
        let mut hi = self.vertices[0].to_vec();
        for v in &self.vertices[1..] {
            for i in 0..2 {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
        (lo, hi)
    }

    pub fn translated(&self, t: &[i64]) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| [v[0].clone() + S::from_i64(t[0]), v[1].clone() + S::from_i64(t[1])])
                .collect(),
        }
    }

    /// Average of the vertices; interior for a nondegenerate convex polygon.
    pub fn vertex_centroid(&self) -> Vec<S> {
        let n = S::from_i64(self.vertices.len() as i64);
        let sx = self.vertices.iter().fold(S::zero(), |a, v| a + v[0].clone());
        let sy = self.vertices.iter().fold(S::zero(), |a, v| a + v[1].clone());
        vec![sx / n.clone(), sy / n]
    }

    /// Apply `x ↦ M x` with a rational 2×2 matrix given row-major; the result
    /// is reoriented counterclockwise.
    pub fn transformed(&self, m: &[[S; 2]; 2]) -> Result<Self, GeometryError> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                [
                    m[0][0].clone() * v[0].clone() + m[0][1].clone() * v[1].clone(),
                    m[1][0].clone() * v[0].clone() + m[1][1].clone() * v[1].clone(),
                ]
            })
            .collect();
        Self::new(vertices)
    }

    /// Sutherland–Hodgman against the closed half-plane `coord[axis] ≥ bound`
    /// (or `≤` when `keep_below`).
    fn clip_half_plane(vertices: &[[S; 2]], axis: usize, bound: &S, keep_below: bool) -> Vec<[S; 2]> {
        let inside = |p: &[S; 2]| if keep_below { p[axis] <= *bound } else { p[axis] >= *bound };
        let mut out = Vec::with_capacity(vertices.len() + 2);
        let n = vertices.len();
        for i in 0..n {
            let cur = &vertices[i];
            let prev = &vertices[(i + n - 1) % n];
            let (cin, pin) = (inside(cur), inside(prev));
            if cin != pin {
                let t = (bound.clone() - prev[axis].clone()) / (cur[axis].clone() - prev[axis].clone());
                let other = 1 - axis;
                let mut p = [bound.clone(), bound.clone()];
                p[other] = prev[other].clone() + t * (cur[other].clone() - prev[other].clone());
                out.push(p);
            }
            if cin {
                out.push(cur.clone());
            }
        }
        out.dedup();
        if out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        out
    }

    pub(super) fn reduce_mod_unit_lattice(&self) -> Vec<Piece<S>> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::new();
        for i in lo[0].floor_i64()..hi[0].ceil_i64() {
            for j in lo[1].floor_i64()..hi[1].ceil_i64() {
                let (x0, y0) = (S::from_i64(i), S::from_i64(j));
                let (x1, y1) = (x0.clone() + S::one(), y0.clone() + S::one());
                let mut v = Self::clip_half_plane(&self.vertices, 0, &x0, false);
                v = Self::clip_half_plane(&v, 0, &x1, true);
                v = Self::clip_half_plane(&v, 1, &y0, false);
                v = Self::clip_half_plane(&v, 1, &y1, true);
                if v.len() < 3 {
                    continue;
                }
                let clipped = Self::from_vertices_unchecked(v);
                if clipped.area().is_zero() {
                    continue;
                }
                out.push(Piece {
                    shape: Shape::Polygon(clipped.translated(&[-i, -j])),
                    translate: LatticeVector(vec![i, j]),
                });
            }
        }
        out
    }
}
