//! Exact level-`k` tiling verification, the lexicographic splitting of a
//! multi-tile into `k` fundamental domains, and the finite set of translate
//! profiles.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geometry::{CellComplex, LatticeVector, Shape};
use crate::scalar::ExactScalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TilingError {
    #[error("region does not tile at level {expected}: cell {cell} is covered {found} times")]
    NotATiling { expected: usize, cell: usize, found: usize },
    #[error("translate profile must be strictly increasing and nonempty")]
    UnsortedProfile,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMultiplicity<S> {
    pub cell: usize,
    pub multiplicity: usize,
    pub witness: Vec<S>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityReport<S> {
    /// Present iff every cell is covered the same (requested) number of times.
    pub level: Option<usize>,
    /// On a negative verdict: the full multiplicity function, one entry per cell.
    pub violations: Vec<CellMultiplicity<S>>,
    /// `Σ measure(cell) · multiplicity(cell)`, always equal to `|Ω|`.
    pub total_mass: S,
}

impl<S> MultiplicityReport<S> {
    pub fn is_tiling(&self) -> bool {
        self.level.is_some()
    }
}

/// Decide whether the translates of `Ω` cover `[0,1)^d` exactly `k` times.
///
/// With `k = None` the level is inferred as the common multiplicity, if any.
pub fn verify_tiling<S: ExactScalar>(complex: &CellComplex<S>, k: Option<usize>) -> MultiplicityReport<S> {
    let cells = complex.cells();
    let total_mass = cells
        .iter()
        .fold(S::zero(), |acc, c| acc + c.measure() * S::from_i64(c.multiplicity() as i64));
    let expected = k.or_else(|| cells.first().map(|c| c.multiplicity()));
    let uniform = expected.filter(|&e| e > 0 && cells.iter().all(|c| c.multiplicity() == e));
    let violations = if uniform.is_some() {
        Vec::new()
    } else {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| CellMultiplicity { cell: i, multiplicity: c.multiplicity(), witness: c.witness.clone() })
            .collect()
    };
    MultiplicityReport { level: uniform, violations, total_mass }
}

fn require_level<S: ExactScalar>(complex: &CellComplex<S>, k: usize) -> Result<(), TilingError> {
    match complex.cells().iter().position(|c| c.multiplicity() != k) {
        Some(cell) if k > 0 => {
            Err(TilingError::NotATiling { expected: k, cell, found: complex.cells()[cell].multiplicity() })
        }
        Some(cell) => Err(TilingError::NotATiling { expected: k, cell, found: 0 }),
        None if k == 0 => Err(TilingError::NotATiling { expected: 0, cell: 0, found: 0 }),
        None => Ok(()),
    }
}

/// `cell + translate`, one piece of a split part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartPiece {
    pub cell: usize,
    pub translate: LatticeVector,
}

/// `Ω = Ω_1 ∪ … ∪ Ω_k`, each `Ω_j` a fundamental domain of `ℤ^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub parts: Vec<Vec<PartPiece>>,
}

impl Splitting {
    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// The pieces of `Ω_j` as shapes in normalized coordinates.
    pub fn part_shapes<S: ExactScalar>(&self, complex: &CellComplex<S>, j: usize) -> Vec<Shape<S>> {
        self.parts[j].iter().map(|p| complex.cells()[p.cell].shape.translated(p.translate.as_slice())).collect()
    }

    pub fn part_measure<S: ExactScalar>(&self, complex: &CellComplex<S>, j: usize) -> S {
        self.parts[j].iter().fold(S::zero(), |acc, p| acc + complex.cells()[p.cell].measure())
    }
}

/// Assign the `j`-th smallest translate of every cell to `Ω_j`.
///
/// For a fixed base point `x`, the points `x + t` are ordered exactly like
/// the translates `t`, so this is the lexicographic ordering of the points of
/// `Ω ∩ (x + ℤ^d)`.
pub fn split<S: ExactScalar>(complex: &CellComplex<S>, k: usize) -> Result<Splitting, TilingError> {
    require_level(complex, k)?;
    let mut parts = vec![Vec::with_capacity(complex.len()); k];
    for (i, cell) in complex.cells().iter().enumerate() {
        for (j, t) in cell.translates.iter().enumerate() {
            parts[j].push(PartPiece { cell: i, translate: t.clone() });
        }
    }
    Ok(Splitting { parts })
}

/// Strictly increasing `k`-tuple of integer vectors with the total measure of
/// the cells carrying it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslateProfile<S> {
    translates: Vec<LatticeVector>,
    pub support_measure: S,
}

impl<S> TranslateProfile<S> {
    pub fn new(translates: Vec<LatticeVector>, support_measure: S) -> Result<Self, TilingError> {
        if translates.is_empty() || translates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TilingError::UnsortedProfile);
        }
        Ok(Self { translates, support_measure })
    }

    pub fn translates(&self) -> &[LatticeVector] {
        &self.translates
    }

    pub fn k(&self) -> usize {
        self.translates.len()
    }

    pub fn dim(&self) -> usize {
        self.translates[0].dim()
    }

    /// Every translate shifted by the same lattice vector.
    pub fn shifted(&self, by: &LatticeVector) -> Self
    where
        S: Clone,
    {
        Self {
            translates: self.translates.iter().map(|t| t.add(by)).collect(),
            support_measure: self.support_measure.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileSet<S> {
    /// Sorted by tuple.
    pub profiles: Vec<TranslateProfile<S>>,
    /// Index into `profiles` for every cell.
    pub cell_profile: Vec<usize>,
}

impl<S: ExactScalar> ProfileSet<S> {
    pub fn k(&self) -> usize {
        self.profiles[0].k()
    }
}

/// The distinct translate tuples over all cells.
pub fn profiles<S: ExactScalar>(complex: &CellComplex<S>, k: usize) -> Result<ProfileSet<S>, TilingError> {
    require_level(complex, k)?;
    let mut support: BTreeMap<&[LatticeVector], S> = BTreeMap::new();
    for cell in complex.cells() {
        let entry = support.entry(cell.translates.as_slice()).or_insert_with(S::zero);
        *entry = entry.clone() + cell.measure();
    }
    let index: BTreeMap<&[LatticeVector], usize> = support.keys().enumerate().map(|(i, t)| (*t, i)).collect();
    let cell_profile = complex.cells().iter().map(|c| index[c.translates.as_slice()]).collect();
    let profiles = support
        .into_iter()
        .map(|(t, m)| TranslateProfile::new(t.to_vec(), m))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProfileSet { profiles, cell_profile })
}
