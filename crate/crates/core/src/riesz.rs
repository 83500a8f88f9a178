//! Profile matrices `N[r][j] = e(a_j · t_r)`, selection of the shift vectors
//! `a_1 … a_k`, and the Riesz constants they produce.
//!
//! On a cell with translate profile `(t_1 < … < t_k)` the unknown values
//! `f_j(x)` solve `diag(e(a_j·x)) · N · F̃ = F` with `F_r = f(x + t_r)`. The
//! diagonal factor is unitary, so `‖F̃‖² / ‖F‖²` ranges over
//! `[1/σ_max(N)², 1/σ_min(N)²]`, and the Riesz constants are the extremes of
//! those ranges over the finitely many profiles.

use std::ops::RangeInclusive;

use nalgebra::{Complex, ComplexField, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::LatticeVector;
use crate::lattice::NormalizationMap;
use crate::scalar::{ExactScalar, Real};
use crate::tiling::TranslateProfile;

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RieszError {
    #[error("no candidate reached tolerance {tolerance:e}: best quality {quality:e} with shifts {best:?}")]
    SelectionFailure { best: Vec<Vec<f64>>, quality: f64, tolerance: f64 },
    #[error("profile {profile} is singular: sigma_min = {sigma_min:e}")]
    SingularProfile { profile: usize, sigma_min: f64 },
    #[error("expected {expected} shift vectors of dimension {dim}, got {found}")]
    ShapeMismatch { expected: usize, dim: usize, found: usize },
    #[error("no translate profiles given")]
    NoProfiles,
}

/// `e(θ) = exp(2πiθ)`, with `θ` reduced modulo 1 first.
pub fn unit_phase<T: Real>(theta: T) -> Complex<T> {
    let frac = theta - theta.floor();
    let angle = T::two_pi() * frac;
    Complex::new(angle.clone().cos(), angle.sin())
}

fn dot_int<T: Real>(a: &[T], t: &LatticeVector) -> T {
    a.iter().zip(t.as_slice()).fold(T::zero(), |acc, (&ai, &ti)| acc + ai * T::cast(ti as f64))
}

/// The chosen shifts `a_1 … a_k ∈ [0,1)^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftVectors<T> {
    shifts: Vec<Vec<T>>,
    pub seed: u64,
    /// `min_p σ_min(N_p)` over the profiles the shifts were chosen for.
    pub quality: T,
}

impl<T: Real> ShiftVectors<T> {
    /// Shifts are reduced into `[0,1)^d`; `quality` is left at zero until
    /// evaluated against a profile set.
    pub fn new(shifts: Vec<Vec<T>>, seed: u64) -> Self {
        let shifts = shifts.into_iter().map(|a| a.into_iter().map(|v| v - v.floor()).collect()).collect();
        Self { shifts, seed, quality: T::zero() }
    }

    pub fn from_exact<S: ExactScalar>(shifts: &[Vec<S>], seed: u64) -> Self {
        Self::new(shifts.iter().map(|a| a.iter().map(T::from_exact).collect()).collect(), seed)
    }

    pub fn with_quality<S>(mut self, profiles: &[TranslateProfile<S>]) -> Self {
        self.quality = shift_quality(profiles, &self.shifts);
        self
    }

    pub fn k(&self) -> usize {
        self.shifts.len()
    }

    pub fn dim(&self) -> usize {
        self.shifts.first().map_or(0, Vec::len)
    }

    pub fn shifts(&self) -> &[Vec<T>] {
        &self.shifts
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileMatrix<T: Real> {
    pub translates: Vec<LatticeVector>,
    pub matrix: DMatrix<Complex<T>>,
    /// Descending.
    pub singular_values: Vec<T>,
    pub abs_det: T,
}

impl<T: Real> ProfileMatrix<T> {
    pub fn sigma_min(&self) -> T {
        *self.singular_values.last().expect("nonempty profile")
    }

    pub fn sigma_max(&self) -> T {
        self.singular_values[0]
    }
}

/// `N[r][j] = e(a_j · t_r)`
pub fn profile_entries<T: Real>(translates: &[LatticeVector], shifts: &[Vec<T>]) -> DMatrix<Complex<T>> {
    let k = translates.len();
    DMatrix::from_fn(k, shifts.len(), |r, j| unit_phase(dot_int(&shifts[j], &translates[r])))
}

fn sorted_singular_values<T: Real>(m: &DMatrix<Complex<T>>) -> Vec<T> {
    let mut sv: Vec<T> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    sv
}

pub fn build_profile_matrix<T: Real, S>(profile: &TranslateProfile<S>, shifts: &[Vec<T>]) -> ProfileMatrix<T> {
    let matrix = profile_entries(profile.translates(), shifts);
    let singular_values = sorted_singular_values(&matrix);
    let abs_det = matrix.clone().determinant().modulus();
    ProfileMatrix { translates: profile.translates().to_vec(), matrix, singular_values, abs_det }
}

/// `det N` as a trigonometric polynomial in the shifts.
pub fn det_as_function_of_shifts<T: Real, S>(profile: &TranslateProfile<S>, shifts: &[Vec<T>]) -> Complex<T> {
    profile_entries(profile.translates(), shifts).determinant()
}

fn min_singular_value<T: Real>(translates: &[LatticeVector], shifts: &[Vec<T>]) -> T {
    let sv = sorted_singular_values(&profile_entries(translates, shifts));
    *sv.last().expect("nonempty profile")
}

/// `min_p σ_min(N_p)`.
pub fn shift_quality<T: Real, S>(profiles: &[TranslateProfile<S>], shifts: &[Vec<T>]) -> T {
    profiles
        .iter()
        .map(|p| min_singular_value(p.translates(), shifts))
        .fold(None, |acc: Option<T>, s| Some(acc.map_or(s, |a| a.min(s))))
        .unwrap_or_else(T::zero)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionConfig {
    pub restarts: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self { restarts: DEFAULT_RESTARTS, seed: 0, tolerance: DEFAULT_TOLERANCE }
    }
}

/// Deterministic candidate tuples for `seed`: `restarts` draws of `k` vectors
/// in `[0,1)^d`.
pub fn candidate_shifts(seed: u64, restarts: usize, k: usize, dim: usize) -> Vec<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..restarts)
        .map(|_| (0..k).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect())
        .collect()
}

/// Best-of-`restarts` random search for shifts maximizing `min_p σ_min(N_p)`.
///
/// Candidates are drawn sequentially from a seeded ChaCha stream and scored in
/// parallel; ties go to the lowest candidate index, so the result does not
/// depend on the thread schedule.
pub fn select_shifts<T: Real, S: Sync>(
    profiles: &[TranslateProfile<S>],
    config: &SelectionConfig,
) -> Result<ShiftVectors<T>, RieszError> {
    let first = profiles.first().ok_or(RieszError::NoProfiles)?;
    let (k, dim) = (first.k(), first.dim());
    let candidates = candidate_shifts(config.seed, config.restarts.max(1), k, dim);
    let scored: Vec<(usize, T)> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let shifts: Vec<Vec<T>> = c.iter().map(|a| a.iter().map(|&v| T::cast(v)).collect()).collect();
            (i, shift_quality(profiles, &shifts))
        })
        .collect();
    let (best, quality) = scored
        .into_iter()
        .fold(None, |acc: Option<(usize, T)>, (i, q)| match acc {
            Some((_, bq)) if bq >= q => acc,
            _ => Some((i, q)),
        })
        .expect("at least one candidate");
    log::debug!("shift selection: best candidate {best} of {} with quality {}", candidates.len(), quality.into());
    if quality.into() < config.tolerance {
        return Err(RieszError::SelectionFailure {
            best: candidates[best].clone(),
            quality: quality.into(),
            tolerance: config.tolerance,
        });
    }
    let shifts = candidates[best].iter().map(|a| a.iter().map(|&v| T::cast(v)).collect()).collect();
    Ok(ShiftVectors { shifts, seed: config.seed, quality })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileBound<T> {
    pub translates: Vec<LatticeVector>,
    pub sigma_min: T,
    pub sigma_max: T,
    pub abs_det: T,
}

/// Riesz constants of the exponential system `e((a_j + m)·x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RieszReport<T> {
    /// `min_p 1/σ_max(N_p)²`
    pub a1: T,
    /// `max_p 1/σ_min(N_p)²`
    pub a2: T,
    /// `k · A1`
    pub c1: T,
    /// `k · A2`
    pub c2: T,
    pub k: usize,
    pub seed: u64,
    pub quality: T,
    pub worst_profile: usize,
    pub min_abs_det: T,
    pub profiles: Vec<ProfileBound<T>>,
}

impl<T: Real> RieszReport<T> {
    /// `(A1, A2)` with `A1 ‖f‖² ≤ Σ |c_{j,m}|² ≤ A2 ‖f‖²`.
    pub fn coefficient_bounds(&self) -> (T, T) {
        (self.a1, self.a2)
    }
}

/// `(A1, A2)` from the extreme singular values `(σ_min, σ_max)` of each profile.
pub fn bounds_from_extremes<T: Real>(extremes: impl IntoIterator<Item = (T, T)>) -> Option<(T, T)> {
    extremes.into_iter().fold(None, |acc, (smin, smax)| {
        let lo = T::one() / (smax * smax);
        let hi = T::one() / (smin * smin);
        Some(match acc {
            None => (lo, hi),
            Some((a1, a2)) => (a1.min(lo), a2.max(hi)),
        })
    })
}

pub fn riesz_bounds<T: Real, S>(
    profiles: &[TranslateProfile<S>],
    shifts: &ShiftVectors<T>,
    tolerance: f64,
) -> Result<RieszReport<T>, RieszError> {
    let first = profiles.first().ok_or(RieszError::NoProfiles)?;
    if shifts.k() != first.k() || shifts.dim() != first.dim() {
        return Err(RieszError::ShapeMismatch { expected: first.k(), dim: first.dim(), found: shifts.k() });
    }
    let matrices: Vec<ProfileMatrix<T>> = profiles.iter().map(|p| build_profile_matrix(p, shifts.shifts())).collect();
    let (worst_profile, worst) = matrices
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.sigma_min().partial_cmp(&b.1.sigma_min()).expect("finite"))
        .expect("nonempty");
    let quality = worst.sigma_min();
    if quality.into() <= tolerance {
        return Err(RieszError::SingularProfile { profile: worst_profile, sigma_min: quality.into() });
    }
    let (a1, a2) = bounds_from_extremes(matrices.iter().map(|m| (m.sigma_min(), m.sigma_max()))).expect("nonempty");
    let k = first.k();
    let kk = T::cast(k as f64);
    let min_abs_det = matrices.iter().map(|m| m.abs_det).fold(T::max_value().expect("bounded"), |a, b| a.min(b));
    Ok(RieszReport {
        a1,
        a2,
        c1: kk * a1,
        c2: kk * a2,
        k,
        seed: shifts.seed,
        quality,
        worst_profile,
        min_abs_det,
        profiles: matrices
            .into_iter()
            .map(|m| ProfileBound {
                sigma_min: m.sigma_min(),
                sigma_max: m.sigma_max(),
                abs_det: m.abs_det,
                translates: m.translates,
            })
            .collect(),
    })
}

/// One exported frequency `A^{-⊤}(a_j + m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frequency<T> {
    pub j: usize,
    pub m: Vec<i64>,
    /// `a_j + m`, normalized coordinates.
    pub normalized: Vec<T>,
    /// Original coordinates.
    pub original: Vec<T>,
}

/// The basis frequencies with `m` restricted to the box `window^d`.
pub fn spectrum<T: Real, S: ExactScalar>(
    shifts: &ShiftVectors<T>,
    map: &NormalizationMap<S>,
    window: RangeInclusive<i64>,
) -> Vec<Frequency<T>> {
    let dim = shifts.dim();
    let side: Vec<i64> = window.collect();
    let count = side.len().pow(dim as u32);
    let mut out = Vec::with_capacity(count * shifts.k());
    for (j, a) in shifts.shifts().iter().enumerate() {
        for idx in 0..count {
            let mut rem = idx;
            let mut m = vec![0i64; dim];
            for axis in (0..dim).rev() {
                m[axis] = side[rem % side.len()];
                rem /= side.len();
            }
            let normalized: Vec<T> = a.iter().zip(&m).map(|(&ai, &mi)| ai + T::cast(mi as f64)).collect();
            let original = map.frequency_to_original_real(&normalized);
            out.push(Frequency { j, m, normalized, original });
        }
    }
    out
}
