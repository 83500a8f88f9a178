//! Problem instances as JSON. Rationals travel as strings (`"3/2"`).

use serde::{Deserialize, Serialize};

use crate::geometry::{normalize_box_union, HalfOpenBox, Polygon2D};
use crate::riesz::{DEFAULT_RESTARTS, DEFAULT_TOLERANCE};
use crate::scalar::parse_exact;
use crate::{Lattice, Rational, Region};

use super::PipelineError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    /// Generators, one inner array per column of `A`.
    pub basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<String>,
    pub hi: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    BoxUnion { boxes: Vec<BoxSpec> },
    Polygon2d { vertices: Vec<[String; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub dimension: usize,
    /// Defaults to `ℤ^d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    pub region: RegionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Fixed shift vectors in normalized coordinates; bypasses the random search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<Vec<String>>>,
}

/// A validated instance with defaults filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub dimension: usize,
    pub lattice: Lattice,
    pub region: Region,
    pub level: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub tolerance: f64,
    pub resolution: Option<usize>,
    pub shifts: Option<Vec<Vec<Rational>>>,
}

fn invalid(msg: impl Into<String>) -> PipelineError {
    PipelineError::Invalid(msg.into())
}

fn rational(text: &str, what: &str) -> Result<Rational, PipelineError> {
    parse_exact(text).ok_or_else(|| invalid(format!("{what}: cannot parse {text:?} as a rational")))
}

fn rationals(texts: &[String], what: &str) -> Result<Vec<Rational>, PipelineError> {
    texts.iter().map(|t| rational(t, what)).collect()
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| invalid(format!("instance JSON: {e}")))
    }

    pub fn validate(&self) -> Result<Instance, PipelineError> {
        let d = self.dimension;
        if d == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let lattice = match &self.lattice {
            None => Lattice::integer(d),
            Some(spec) => {
                if spec.basis.len() != d || spec.basis.iter().any(|c| c.len() != d) {
                    return Err(invalid(format!("lattice basis must be {d}x{d}")));
                }
                let cols = spec.basis.iter().map(|c| rationals(c, "lattice")).collect::<Result<Vec<_>, _>>()?;
                Lattice::from_columns(cols).map_err(|e| invalid(format!("lattice: {e}")))?
            }
        };
        let region = match &self.region {
            RegionSpec::BoxUnion { boxes } => {
                let parsed = boxes
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        if b.lo.len() != d || b.hi.len() != d {
                            return Err(invalid(format!("box {i} must have {d} coordinates")));
                        }
                        HalfOpenBox::new(rationals(&b.lo, "box")?, rationals(&b.hi, "box")?)
                            .map_err(|e| invalid(format!("box {i}: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Region::Boxes(normalize_box_union(parsed).map_err(|e| invalid(format!("region: {e}")))?)
            }
            RegionSpec::Polygon2d { vertices } => {
                if d != 2 {
                    return Err(invalid("polygon2d regions require dimension 2"));
                }
                let verts = vertices
                    .iter()
                    .map(|[x, y]| Ok([rational(x, "vertex")?, rational(y, "vertex")?]))
                    .collect::<Result<Vec<_>, PipelineError>>()?;
                Region::Polygon(Polygon2D::new(verts).map_err(|e| invalid(format!("polygon: {e}")))?)
            }
        };
        if let Some(0) = self.level {
            return Err(invalid("level must be positive"));
        }
        if let Some(0) = self.resolution {
            return Err(invalid("resolution must be positive"));
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return Err(invalid("tolerance must be finite and nonnegative"));
            }
        }
        let shifts = match &self.shifts {
            None => None,
            Some(rows) => {
                if rows.iter().any(|r| r.len() != d) || rows.is_empty() {
                    return Err(invalid(format!("shift vectors must be nonempty with {d} coordinates")));
                }
                Some(rows.iter().map(|r| rationals(r, "shift")).collect::<Result<Vec<_>, _>>()?)
            }
        };
        Ok(Instance {
            dimension: d,
            lattice,
            region,
            level: self.level,
            seed: self.seed.unwrap_or(0),
            restarts: self.restarts.unwrap_or(DEFAULT_RESTARTS).max(1),
            tolerance: self.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            resolution: self.resolution,
            shifts,
        })
    }
}
