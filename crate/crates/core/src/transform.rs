//! Discrete analysis and synthesis with the exponential system
//! `e((a_j + m)·x)` on a sample grid.
//!
//! Base points are `(g + ½)/M`, `g ∈ {0,…,M−1}^d`, so no sample touches a
//! cell boundary. Every base point `x` carries the `k` samples `x + t_r` of
//! `Ω`. A function on `Ω` is split into `k` periodic pieces by one `k × k`
//! solve per base point, and each piece is expanded with a unitary DFT over the
//! centered window of `M` frequencies per axis. Both steps are square and
//! invertible, so synthesis inverts analysis exactly up to rounding.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};
use thiserror::Error;

use crate::geometry::{CellComplex, LatticeVector};
use crate::riesz::{build_profile_matrix, unit_phase, ProfileMatrix, RieszError, ShiftVectors};
use crate::scalar::{lcm_of_denominators, ExactScalar, Real};
use crate::tiling::ProfileSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("resolution {resolution} must be a positive multiple of {required_multiple}")]
    Resolution { resolution: usize, required_multiple: u64 },
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("grid and profile data disagree: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Riesz(#[from] RieszError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePoint<S> {
    /// Grid index `g`.
    pub index: Vec<usize>,
    /// `(2g + 1) / (2M)`, exactly.
    pub coords: Vec<S>,
    pub cell: usize,
}

/// `M^d` base points in `[0,1)^d`, each assigned to its cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleGrid<S> {
    dim: usize,
    resolution: usize,
    points: Vec<BasePoint<S>>,
    /// Cells that contain no base point.
    pub uncovered_cells: Vec<usize>,
}

impl<S: ExactScalar> SampleGrid<S> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn points(&self) -> &[BasePoint<S>] {
        &self.points
    }

    /// `(base point, translate)` for every sample of `Ω`, base-major.
    pub fn omega_points<'a>(&'a self, complex: &'a CellComplex<S>) -> Vec<(usize, &'a LatticeVector)> {
        self.points
            .iter()
            .enumerate()
            .flat_map(|(b, p)| complex.cells()[p.cell].translates.iter().map(move |t| (b, t)))
            .collect()
    }

    /// Exact coordinates of the sample `x + t`.
    pub fn omega_coords(&self, base: usize, t: &LatticeVector) -> Vec<S> {
        crate::geometry::shift_point(&self.points[base].coords, t.as_slice())
    }
}

/// Smallest resolution accepted for box-grid complexes: the least common
/// multiple of the breakpoint denominators. Polygon complexes accept any `M`.
pub fn required_multiple<S: ExactScalar>(complex: &CellComplex<S>) -> u64 {
    complex
        .breakpoints()
        .and_then(|bps| lcm_of_denominators(bps.iter().flatten()))
        .unwrap_or(1)
}

pub fn build_grid<S: ExactScalar>(complex: &CellComplex<S>, resolution: usize) -> Result<SampleGrid<S>, TransformError> {
    let required = required_multiple(complex);
    if resolution == 0 || (resolution as u64) % required != 0 {
        return Err(TransformError::Resolution { resolution, required_multiple: required });
    }
    let dim = complex.dim();
    let total = resolution.pow(dim as u32);
    let two_m = S::from_i64(2 * resolution as i64);
    let mut hit = vec![false; complex.len()];
    let mut points = Vec::with_capacity(total);
    for flat in 0..total {
        let index = unflatten(flat, resolution, dim);
        let coords: Vec<S> = index.iter().map(|&g| S::from_i64(2 * g as i64 + 1) / two_m.clone()).collect();
        let cell = complex
            .locate(&coords)
            .ok_or_else(|| TransformError::Inconsistent("base point outside every cell".into()))?;
        hit[cell] = true;
        points.push(BasePoint { index, coords, cell });
    }
    let uncovered_cells = hit.iter().enumerate().filter(|(_, h)| !**h).map(|(i, _)| i).collect();
    Ok(SampleGrid { dim, resolution, points, uncovered_cells })
}

fn unflatten(mut flat: usize, m: usize, dim: usize) -> Vec<usize> {
    let mut index = vec![0; dim];
    for axis in (0..dim).rev() {
        index[axis] = flat % m;
        flat /= m;
    }
    index
}

/// Values on the samples of `Ω` (`k` per base point, base-major) or on the
/// base points.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T: Real> {
    pub values: Vec<Complex<T>>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(values: Vec<Complex<T>>) -> Self {
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![Complex::new(T::zero(), T::zero()); len] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn linear_combination(alpha: Complex<T>, f: &Self, beta: Complex<T>, g: &Self) -> Self {
        Self { values: f.values.iter().zip(&g.values).map(|(a, b)| alpha * a + beta * b).collect() }
    }

    /// `max |f − g| / max |f|`
    pub fn max_relative_error(&self, other: &Self) -> T {
        let scale = self.values.iter().fold(T::zero(), |m, v| m.max(v.modulus()));
        let diff = self.values.iter().zip(&other.values).fold(T::zero(), |m, (a, b)| m.max((a - b).modulus()));
        if scale == T::zero() {
            diff
        } else {
            diff / scale
        }
    }
}

/// `c[j][m]`, `j`-major; `m` runs over the centered window of `M` integers
/// per axis in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientArray<T: Real> {
    pub k: usize,
    pub dim: usize,
    pub resolution: usize,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> CoefficientArray<T> {
    pub fn zeros(k: usize, dim: usize, resolution: usize) -> Self {
        let len = k * resolution.pow(dim as u32);
        Self { k, dim, resolution, values: vec![Complex::new(T::zero(), T::zero()); len] }
    }

    pub fn per_piece(&self) -> usize {
        self.resolution.pow(self.dim as u32)
    }

    /// Lowest window frequency, `−⌊M/2⌋`.
    pub fn window_start(&self) -> i64 {
        -((self.resolution / 2) as i64)
    }

    pub fn frequency(&self, flat: usize) -> Vec<i64> {
        let start = self.window_start();
        unflatten(flat % self.per_piece(), self.resolution, self.dim).iter().map(|&i| i as i64 + start).collect()
    }

    pub fn index_of(&self, j: usize, m: &[i64]) -> Option<usize> {
        let start = self.window_start();
        let mut flat = 0usize;
        for &mi in m {
            let i = mi - start;
            if i < 0 || i >= self.resolution as i64 {
                return None;
            }
            flat = flat * self.resolution + i as usize;
        }
        (j < self.k && m.len() == self.dim).then_some(j * self.per_piece() + flat)
    }

    pub fn get(&self, j: usize, m: &[i64]) -> Option<Complex<T>> {
        self.index_of(j, m).map(|i| self.values[i])
    }

    pub fn norm_sq(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a + v.modulus_squared())
    }

    pub fn max_abs_difference(&self, other: &Self) -> T {
        self.values.iter().zip(&other.values).fold(T::zero(), |m, (a, b)| m.max((a - b).modulus()))
    }
}

/// Separable DFT over the base grid with the half-sample phase applied exactly.
#[derive(Clone, Debug)]
struct HalfSampleDft<T: Real> {
    m: usize,
    dim: usize,
    /// `twiddle[i][g] = e(−(i − ⌊M/2⌋)(2g + 1)/(2M))`
    twiddle: Vec<Vec<Complex<T>>>,
}

impl<T: Real> HalfSampleDft<T> {
    fn new(m: usize, dim: usize) -> Self {
        let two_m = 2 * m as i64;
        let start = -((m / 2) as i64);
        let twiddle = (0..m)
            .map(|i| {
                let freq = i as i64 + start;
                (0..m)
                    .map(|g| {
                        let num = (-freq * (2 * g as i64 + 1)).rem_euclid(two_m);
                        unit_phase(T::cast(num as f64 / two_m as f64))
                    })
                    .collect()
            })
            .collect();
        Self { m, dim, twiddle }
    }

    fn apply(&self, data: &mut [Complex<T>], inverse: bool) {
        let m = self.m;
        let scale = T::one() / T::cast(m as f64);
        let mut line = vec![Complex::new(T::zero(), T::zero()); m];
        for axis in 0..self.dim {
            let stride = m.pow((self.dim - 1 - axis) as u32);
            let block = stride * m;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (i, out) in line.iter_mut().enumerate() {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for g in 0..m {
                            if inverse {
                                // sum over frequencies i → sample g
                                acc += data[base + g * stride] * self.twiddle[g][i].conj();
                            } else {
                                acc += data[base + g * stride] * self.twiddle[i][g];
                            }
                        }
                        *out = if inverse { acc } else { acc * scale };
                    }
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Analysis/synthesis operator for a tiling, a grid and a choice of shifts.
#[derive(Clone, Debug)]
pub struct Transform<T: Real> {
    k: usize,
    dim: usize,
    resolution: usize,
    shifts: ShiftVectors<T>,
    base_coords: Vec<Vec<T>>,
    point_profile: Vec<usize>,
    matrices: Vec<ProfileMatrix<T>>,
    inverses: Vec<DMatrix<Complex<T>>>,
    dft: HalfSampleDft<T>,
}

impl<T: Real> Transform<T> {
    pub fn new<S: ExactScalar>(
        grid: &SampleGrid<S>,
        profiles: &ProfileSet<S>,
        shifts: &ShiftVectors<T>,
        tolerance: f64,
    ) -> Result<Self, TransformError> {
        let k = profiles.k();
        if shifts.k() != k || shifts.dim() != grid.dim() {
            return Err(RieszError::ShapeMismatch { expected: k, dim: grid.dim(), found: shifts.k() }.into());
        }
        let mut point_profile = Vec::with_capacity(grid.points().len());
        for p in grid.points() {
            let idx = *profiles
                .cell_profile
                .get(p.cell)
                .ok_or_else(|| TransformError::Inconsistent(format!("cell {} has no profile", p.cell)))?;
            point_profile.push(idx);
        }
        let mut matrices = Vec::with_capacity(profiles.profiles.len());
        let mut inverses = Vec::with_capacity(profiles.profiles.len());
        for (i, p) in profiles.profiles.iter().enumerate() {
            let pm = build_profile_matrix(p, shifts.shifts());
            if pm.sigma_min().into() <= tolerance {
                return Err(RieszError::SingularProfile { profile: i, sigma_min: pm.sigma_min().into() }.into());
            }
            let inv = pm
                .matrix
                .clone()
                .try_inverse()
                .ok_or(RieszError::SingularProfile { profile: i, sigma_min: pm.sigma_min().into() })?;
            matrices.push(pm);
            inverses.push(inv);
        }
        let base_coords = grid.points().iter().map(|p| p.coords.iter().map(T::from_exact).collect()).collect();
        Ok(Self {
            k,
            dim: grid.dim(),
            resolution: grid.resolution(),
            shifts: shifts.clone(),
            base_coords,
            point_profile,
            matrices,
            inverses,
            dft: HalfSampleDft::new(grid.resolution(), grid.dim()),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn base_len(&self) -> usize {
        self.base_coords.len()
    }

    /// Number of samples of `Ω`: `k · M^d`.
    pub fn omega_len(&self) -> usize {
        self.k * self.base_len()
    }

    pub fn shifts(&self) -> &ShiftVectors<T> {
        &self.shifts
    }

    /// Coordinates of sample `b·k + r`, i.e. `x_b + t_r`.
    pub fn omega_point(&self, index: usize) -> Vec<T> {
        let (b, r) = (index / self.k, index % self.k);
        let t = &self.matrices[self.point_profile[b]].translates[r];
        self.base_coords[b].iter().zip(t.as_slice()).map(|(&x, &ti)| x + T::cast(ti as f64)).collect()
    }

    pub fn base_point(&self, b: usize) -> &[T] {
        &self.base_coords[b]
    }

    fn phase_at(&self, j: usize, x: &[T]) -> Complex<T> {
        let dot = self.shifts.shifts()[j].iter().zip(x).fold(T::zero(), |acc, (&a, &xi)| acc + a * xi);
        unit_phase(dot)
    }

    /// `(1/M^d) Σ |f|²`, the discrete `L²(Ω)` norm squared.
    pub fn norm_sq(&self, f: &GridFunction<T>) -> T {
        let s = f.values.iter().fold(T::zero(), |a, v| a + v.modulus_squared());
        s / T::cast(self.base_len() as f64)
    }

    fn check_len(&self, expected: usize, found: usize) -> Result<(), TransformError> {
        if expected != found {
            return Err(TransformError::LengthMismatch { expected, found });
        }
        Ok(())
    }

    /// The periodic pieces `f_1 … f_k` on the base points:
    /// `F̃(x) = diag(e(−a_j·x)) N^{-1} F(x)`.
    pub fn decompose(&self, f: &GridFunction<T>) -> Result<Vec<GridFunction<T>>, TransformError> {
        self.check_len(self.omega_len(), f.len())?;
        let mut parts = vec![GridFunction::zeros(self.base_len()); self.k];
        for b in 0..self.base_len() {
            let rhs = DVector::from_iterator(self.k, f.values[b * self.k..(b + 1) * self.k].iter().copied());
            let sol = &self.inverses[self.point_profile[b]] * rhs;
            for (j, part) in parts.iter_mut().enumerate() {
                part.values[b] = self.phase_at(j, &self.base_coords[b]).conj() * sol[j];
            }
        }
        Ok(parts)
    }

    /// `f(x + t_r) = Σ_j e(a_j·(x + t_r)) f_j(x)`.
    pub fn compose(&self, parts: &[GridFunction<T>]) -> Result<GridFunction<T>, TransformError> {
        self.check_len(self.k, parts.len())?;
        for p in parts {
            self.check_len(self.base_len(), p.len())?;
        }
        let mut out = GridFunction::zeros(self.omega_len());
        for b in 0..self.base_len() {
            let n = &self.matrices[self.point_profile[b]].matrix;
            let x = &self.base_coords[b];
            let weighted: Vec<Complex<T>> = (0..self.k).map(|j| self.phase_at(j, x) * parts[j].values[b]).collect();
            for r in 0..self.k {
                out.values[b * self.k + r] = (0..self.k).fold(Complex::new(T::zero(), T::zero()), |acc, j| {
                    acc + n[(r, j)] * weighted[j]
                });
            }
        }
        Ok(out)
    }

    pub fn analyze(&self, f: &GridFunction<T>) -> Result<CoefficientArray<T>, TransformError> {
        let parts = self.decompose(f)?;
        let mut c = CoefficientArray::zeros(self.k, self.dim, self.resolution);
        let n = c.per_piece();
        for (j, mut part) in parts.into_iter().enumerate() {
            self.dft.apply(&mut part.values, false);
            c.values[j * n..(j + 1) * n].copy_from_slice(&part.values);
        }
        Ok(c)
    }

    pub fn synthesize(&self, c: &CoefficientArray<T>) -> Result<GridFunction<T>, TransformError> {
        if c.k != self.k || c.dim != self.dim || c.resolution != self.resolution {
            return Err(TransformError::LengthMismatch { expected: self.omega_len(), found: c.values.len() });
        }
        let n = c.per_piece();
        let parts: Vec<GridFunction<T>> = (0..self.k)
            .map(|j| {
                let mut v = c.values[j * n..(j + 1) * n].to_vec();
                self.dft.apply(&mut v, true);
                GridFunction::new(v)
            })
            .collect();
        self.compose(&parts)
    }

    /// Extremes of `Σ|c|² / ‖f‖²` over the discrete model: the per-cell
    /// bounds `1/σ_max²` and `1/σ_min²` over the profiles present in the grid.
    pub fn empirical_frame_bounds(&self) -> (T, T) {
        let mut present = vec![false; self.matrices.len()];
        for &p in &self.point_profile {
            present[p] = true;
        }
        let extremes = self
            .matrices
            .iter()
            .zip(&present)
            .filter(|(_, &p)| p)
            .map(|(m, _)| (m.sigma_min(), m.sigma_max()));
        crate::riesz::bounds_from_extremes(extremes).expect("grid has points")
    }
}
