//! Full-rank rational lattices `Λ = A ℤ^d`, their duals `A^{-⊤} ℤ^d`, and the
//! change of variables `y = A^{-1} x` that turns every instance into one over
//! `ℤ^d`.

use thiserror::Error;

use crate::geometry::{normalize_box_union, BoxUnion, GeometryError, HalfOpenBox, Region};
use crate::scalar::{ExactScalar, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice basis must be square and nonempty, got {rows} generators of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("lattice basis is singular")]
    Singular,
    #[error("dimension mismatch: lattice has dimension {lattice}, region has dimension {region}")]
    DimensionMismatch { lattice: usize, region: usize },
    #[error("box union does not stay axis-aligned under A^-1; give a polygon or pre-normalized input")]
    NonAxisAligned,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Dense square matrix with exact entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactMatrix<S> {
    rows: Vec<Vec<S>>,
}

impl<S: ExactScalar> ExactMatrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, LatticeError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(LatticeError::NotSquare { rows: n, cols: rows.first().map_or(0, Vec::len) });
        }
        Ok(Self { rows })
    }

    pub fn from_columns(cols: Vec<Vec<S>>) -> Result<Self, LatticeError> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
        Self { rows }
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let n = entries.len();
        let mut m = Self::identity(n);
        for (i, e) in entries.iter().enumerate() {
            m.rows[i][i] = e.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.rows[r][c]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        self.transpose().rows
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        Self { rows: (0..n).map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect()).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(S::zero(), |acc, k| acc + self.rows[i][k].clone() * other.rows[k][j].clone()))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        self.rows.iter().map(|r| r.iter().zip(v).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())).collect()
    }

    pub fn determinant(&self) -> S {
        let n = self.dim();
        let mut m = self.rows.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return S::zero();
            };
            if pivot != col {
                m.swap(pivot, col);
                det = -det;
            }
            let p = m[col][col].clone();
            det = det * p.clone();
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].clone() / p.clone();
                for c in col..n {
                    let sub = factor.clone() * m[col][c].clone();
                    m[r][c] = m[r][c].clone() - sub;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim();
        let mut a = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(pivot, col);
            inv.swap(pivot, col);
            let p = a[col][col].clone();
            for c in 0..n {
                a[col][c] = a[col][c].clone() / p.clone();
                inv[col][c] = inv[col][c].clone() / p.clone();
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for c in 0..n {
                    let s1 = factor.clone() * a[col][c].clone();
                    a[r][c] = a[r][c].clone() - s1;
                    let s2 = factor.clone() * inv[col][c].clone();
                    inv[r][c] = inv[r][c].clone() - s2;
                }
            }
        }
        Some(Self { rows: inv })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim())
    }

    pub fn to_real<T: Real>(&self) -> Vec<Vec<T>> {
        self.rows.iter().map(|r| r.iter().map(T::from_exact).collect()).collect()
    }
}

/// `Λ = A ℤ^d`; the columns of `A` are the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice<S> {
    basis: ExactMatrix<S>,
}

impl<S: ExactScalar> Lattice<S> {
    pub fn new(basis: ExactMatrix<S>) -> Result<Self, LatticeError> {
        if basis.determinant().is_zero() {
            return Err(LatticeError::Singular);
        }
        Ok(Self { basis })
    }

    pub fn from_columns(cols: Vec<Vec<S>>) -> Result<Self, LatticeError> {
        Self::new(ExactMatrix::from_columns(cols)?)
    }

    /// `ℤ^d`
    pub fn integer(dim: usize) -> Self {
        Self { basis: ExactMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &ExactMatrix<S> {
        &self.basis
    }

    /// `|det A|`
    pub fn covolume(&self) -> S {
        self.basis.determinant().abs()
    }

    pub fn density(&self) -> S {
        S::one() / self.covolume()
    }

    /// `Λ* = A^{-⊤} ℤ^d`
    pub fn dual(&self) -> Lattice<S> {
        let inv = self.basis.inverse().expect("lattice basis is nonsingular");
        Lattice { basis: inv.transpose() }
    }
}

/// The change of variables `y = A^{-1} x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationMap<S> {
    /// `A^{-1}`: original to normalized coordinates.
    pub forward: ExactMatrix<S>,
    /// `A`
    pub inverse: ExactMatrix<S>,
    /// `A^⊤`: original frequencies to normalized frequencies.
    pub dual_forward: ExactMatrix<S>,
    /// `A^{-⊤}`: normalized frequency `u` is the original frequency `A^{-⊤} u`.
    pub dual_inverse: ExactMatrix<S>,
}

impl<S: ExactScalar> NormalizationMap<S> {
    pub fn for_lattice(lattice: &Lattice<S>) -> Self {
        let a = lattice.basis().clone();
        let a_inv = a.inverse().expect("lattice basis is nonsingular");
        Self { dual_forward: a.transpose(), dual_inverse: a_inv.transpose(), forward: a_inv, inverse: a }
    }

    pub fn is_identity(&self) -> bool {
        self.inverse.is_identity()
    }

    pub fn normalize_point(&self, x: &[S]) -> Vec<S> {
        self.forward.mul_vec(x)
    }

    pub fn denormalize_point(&self, y: &[S]) -> Vec<S> {
        self.inverse.mul_vec(y)
    }

    pub fn frequency_to_original(&self, u: &[S]) -> Vec<S> {
        self.dual_inverse.mul_vec(u)
    }

    pub fn frequency_to_original_real<T: Real>(&self, u: &[T]) -> Vec<T> {
        self.dual_inverse
            .to_real::<T>()
            .iter()
            .map(|row| row.iter().zip(u).fold(T::zero(), |acc, (a, b)| acc + *a * *b))
            .collect()
    }
}

/// If `m` has exactly one nonzero entry per row and column and all of them are
/// positive, returns `(column, entry)` for each row.
fn positive_monomial<S: ExactScalar>(m: &ExactMatrix<S>) -> Option<Vec<(usize, S)>> {
    let n = m.dim();
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for row in m.rows() {
        let nz: Vec<usize> = (0..n).filter(|&c| !row[c].is_zero()).collect();
        if nz.len() != 1 || row[nz[0]] <= S::zero() || used[nz[0]] {
            return None;
        }
        used[nz[0]] = true;
        out.push((nz[0], row[nz[0]].clone()));
    }
    Some(out)
}

/// Rewrite `(Ω, Λ)` as `(A^{-1} Ω, ℤ^d)`.
pub fn normalize_instance<S: ExactScalar>(
    region: &Region<S>,
    lattice: &Lattice<S>,
) -> Result<(Region<S>, NormalizationMap<S>), LatticeError> {
    if region.dim() != lattice.dim() {
        return Err(LatticeError::DimensionMismatch { lattice: lattice.dim(), region: region.dim() });
    }
    let map = NormalizationMap::for_lattice(lattice);
    if map.is_identity() {
        return Ok((region.clone(), map));
    }
    let normalized = match region {
        Region::Boxes(union) => Region::Boxes(map_boxes(union, &map.forward)?),
        Region::Polygon(poly) => {
            let f = &map.forward;
            let m = [[f.get(0, 0).clone(), f.get(0, 1).clone()], [f.get(1, 0).clone(), f.get(1, 1).clone()]];
            Region::Polygon(poly.transformed(&m)?)
        }
    };
    Ok((normalized, map))
}

fn map_boxes<S: ExactScalar>(union: &BoxUnion<S>, forward: &ExactMatrix<S>) -> Result<BoxUnion<S>, LatticeError> {
    let mono = positive_monomial(forward).ok_or(LatticeError::NonAxisAligned)?;
    let boxes = union
        .boxes()
        .iter()
        .map(|b| {
            let lo = mono.iter().map(|(c, s)| s.clone() * b.lo()[*c].clone()).collect();
            let hi = mono.iter().map(|(c, s)| s.clone() * b.hi()[*c].clone()).collect();
            HalfOpenBox::new(lo, hi)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(normalize_box_union(boxes)?)
}

/// Outcome of the identity `|Ω| = k · covol(Λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityVerdict<S> {
    pub measure: S,
    pub covolume: S,
    /// `|Ω| / covol(Λ)`: the only level at which `Ω` can tile.
    pub ratio: S,
    pub requested: Option<u64>,
    pub pass: bool,
}

impl<S: ExactScalar> DensityVerdict<S> {
    /// The ratio as a positive integer, if it is one.
    pub fn implied_level(&self) -> Option<u64> {
        if self.ratio.is_integer_valued() && self.ratio > S::zero() {
            u64::try_from(self.ratio.floor_i64()).ok()
        } else {
            None
        }
    }
}

/// Check `|Ω| = k · |det A|` exactly. Without `k`, passes iff the ratio is a
/// positive integer.
pub fn density_check<S: ExactScalar>(measure: &S, lattice: &Lattice<S>, k: Option<u64>) -> DensityVerdict<S> {
    let covolume = lattice.covolume();
    let ratio = measure.clone() / covolume.clone();
    let mut verdict = DensityVerdict { measure: measure.clone(), covolume, ratio, requested: k, pass: false };
    verdict.pass = match (k, verdict.implied_level()) {
        (Some(k), Some(level)) => k == level,
        (None, Some(_)) => true,
        _ => false,
    };
    verdict
}
