//! End-to-end pipeline, machine-readable reports and figures.
//!
//! Stages run in order (verify, split, profiles, select, bounds, round trip)
//! and every failure stops the run, carrying the report of the stages that
//! did complete.

mod io;
mod json;
mod spec;
mod svg;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{cell_decompose, format_point};
use crate::lattice::{density_check, normalize_instance, DensityVerdict};
use crate::riesz::{riesz_bounds, select_shifts, RieszError, SelectionConfig};
use crate::tiling::{profiles, split, Splitting};
use crate::transform::{build_grid, required_multiple, GridFunction, TransformError};
use crate::{CellComplex, MultiplicityReport, NormalizationMap, ProfileSet, Rational, Region, RieszReport, ShiftVectors, Transform};

pub use io::{
    coefficient_records, coefficients_to_json, grid_function_from_str, grid_function_to_string, grid_samples,
    read_grid_function, write_grid_function, CoefficientRecord, GridFormat, GridSample,
};
pub use json::{format_f64, to_canonical_string, CanonicalFormatter};
pub use spec::{BoxSpec, Instance, InstanceSpec, LatticeSpec, RegionSpec};
pub use svg::render_svg;

/// Smallest default resolution; rounded up to a valid multiple.
pub const DEFAULT_RESOLUTION: usize = 8;
pub const DEFAULT_TRIALS: usize = 8;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("{message}")]
    NotATiling { message: String, partial: Box<PipelineReport> },
    #[error("shift selection failed: {source}")]
    Selection { source: RieszError, partial: Box<PipelineReport> },
    #[error("{source}")]
    Resolution { source: TransformError, partial: Box<PipelineReport> },
    #[error("figures need dimension 2, instance has dimension {0}")]
    Dimension(usize),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl PipelineError {
    /// 1 parse/validation, 2 non-tiling, 3 selection failure, 4 resolution.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Invalid(_) | PipelineError::Dimension(_) | PipelineError::Io { .. } => 1,
            PipelineError::NotATiling { .. } => 2,
            PipelineError::Selection { .. } => 3,
            PipelineError::Resolution { .. } => 4,
        }
    }

    /// Report of the stages completed before the failure.
    pub fn partial_report(&self) -> Option<&PipelineReport> {
        match self {
            PipelineError::NotATiling { partial, .. }
            | PipelineError::Selection { partial, .. }
            | PipelineError::Resolution { partial, .. } => Some(partial),
            _ => None,
        }
    }

    pub(crate) fn io(path: &Path, err: impl fmt::Display) -> Self {
        PipelineError::Io { path: path.to_path_buf(), message: err.to_string() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Verify,
    Split,
    Profiles,
    Select,
    Bounds,
    RoundTrip,
}

impl Stage {
    fn name(self) -> &'static str {
        match self {
            Stage::Verify => "verify",
            Stage::Split => "split",
            Stage::Profiles => "profiles",
            Stage::Select => "select",
            Stage::Bounds => "bounds",
            Stage::RoundTrip => "roundtrip",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Random test functions in the round-trip stage.
    pub trials: usize,
    /// Record wall-clock time per stage (makes the report nondeterministic).
    pub timings: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { trials: DEFAULT_TRIALS, timings: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub dimension: usize,
    /// Columns of `A`.
    pub lattice_basis: Vec<Vec<String>>,
    /// Columns of `A^{-⊤}`.
    pub dual_basis: Vec<Vec<String>>,
    pub covolume: String,
    pub measure: String,
    /// `|Ω| / covol(Λ)`
    pub density_ratio: String,
    pub density_pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requested_level: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub tolerance: f64,
    pub resolution: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellEntry {
    pub cell: usize,
    pub multiplicity: usize,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    pub cells: usize,
    pub total_mass: String,
    /// Multiplicity of every cell when the verdict is negative.
    pub violations: Vec<CellEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartSummary {
    pub part: usize,
    pub measure: String,
    pub pieces: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSection {
    pub k: usize,
    pub parts: Vec<PartSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub index: usize,
    pub translates: Vec<Vec<i64>>,
    pub support_measure: String,
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftSection {
    pub seed: u64,
    /// True when the shifts come from the instance instead of the search.
    pub forced: bool,
    /// `min_p σ_min(N_p)`
    pub quality: f64,
    /// `a_j` in normalized coordinates, in `[0,1)^d`.
    pub normalized: Vec<Vec<f64>>,
    /// `A^{-⊤} a_j`; the basis frequencies are these plus the dual lattice.
    pub original: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSingularValues {
    pub index: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub abs_det: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszSection {
    pub a1: f64,
    pub a2: f64,
    pub c1: f64,
    pub c2: f64,
    pub k: usize,
    pub worst_profile: usize,
    pub min_abs_det: f64,
    pub profiles: Vec<ProfileSingularValues>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTripSection {
    pub resolution: usize,
    pub base_points: usize,
    pub omega_points: usize,
    pub uncovered_cells: Vec<usize>,
    pub trials: usize,
    pub max_relative_error: f64,
    /// `analyze ∘ synthesize` on the coefficients of the test functions.
    pub coefficient_error: f64,
    pub empirical_low: f64,
    pub empirical_high: f64,
    /// Range of `Σ|c|² / ‖f‖²` over the test functions.
    pub observed_low: f64,
    pub observed_high: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiling: Option<TilingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<SplitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<Vec<ProfileRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<ShiftSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub riesz: Option<RieszSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roundtrip: Option<RoundTripSection>,
    /// Seconds per stage, only when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        to_canonical_string(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::Invalid(format!("report JSON: {e}")))
    }
}

/// Rows of strings ready for CSV output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8")
    }
}

fn join_translates(ts: &[Vec<i64>]) -> String {
    ts.iter()
        .map(|t| format!("({})", t.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(";")
}

/// One row per distinct translate profile, with singular values when known.
pub fn profile_table(report: &PipelineReport) -> Table {
    let mut t = Table::new(&["index", "translates", "support_measure", "cells", "sigma_min", "sigma_max", "abs_det"]);
    let sv: BTreeMap<usize, &ProfileSingularValues> = report
        .riesz
        .iter()
        .flat_map(|r| r.profiles.iter().map(|p| (p.index, p)))
        .collect();
    for p in report.profiles.iter().flatten() {
        let (smin, smax, det) = match sv.get(&p.index) {
            Some(s) => (format_f64(s.sigma_min), format_f64(s.sigma_max), format_f64(s.abs_det)),
            None => Default::default(),
        };
        t.rows.push(vec![
            p.index.to_string(),
            join_translates(&p.translates),
            p.support_measure.clone(),
            p.cells.to_string(),
            smin,
            smax,
            det,
        ]);
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
}

/// JSON: the full canonical report. CSV: the profile table.
pub fn export_report(report: &PipelineReport, format: ExportFormat, path: &Path) -> Result<(), PipelineError> {
    let text = match format {
        ExportFormat::Json => report.to_json(),
        ExportFormat::Csv => profile_table(report).to_csv(),
    };
    std::fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

/// Pipeline state: the prepared instance and the outputs of completed stages.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub instance: Instance,
    pub normalized: Region,
    pub map: NormalizationMap,
    pub complex: CellComplex,
    pub density: DensityVerdict<Rational>,
    pub resolution: usize,
    pub verdict: Option<MultiplicityReport>,
    pub splitting: Option<Splitting>,
    pub profile_set: Option<ProfileSet>,
    pub shifts: Option<ShiftVectors>,
    pub bounds: Option<RieszReport>,
    pub transform: Option<Transform>,
    report: PipelineReport,
    options: PipelineOptions,
    done: Option<Stage>,
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

impl Pipeline {
    pub fn prepare(spec: &InstanceSpec, options: PipelineOptions) -> Result<Self, PipelineError> {
        let instance = spec.validate()?;
        let (normalized, map) = normalize_instance(&instance.region, &instance.lattice)
            .map_err(|e| PipelineError::Invalid(e.to_string()))?;
        let pieces = normalized.reduce_mod_unit_lattice();
        let complex = cell_decompose(&pieces, instance.dimension);
        let density = density_check(&instance.region.measure(), &instance.lattice, instance.level.map(|k| k as u64));
        let required = required_multiple(&complex) as usize;
        let resolution = instance.resolution.unwrap_or_else(|| DEFAULT_RESOLUTION.div_ceil(required) * required);
        let summary = InstanceSummary {
            dimension: instance.dimension,
            lattice_basis: instance.lattice.basis().columns().iter().map(|c| strings(c)).collect(),
            dual_basis: instance.lattice.dual().basis().columns().iter().map(|c| strings(c)).collect(),
            covolume: density.covolume.to_string(),
            measure: density.measure.to_string(),
            density_ratio: density.ratio.to_string(),
            density_pass: density.pass,
            requested_level: instance.level,
            seed: instance.seed,
            restarts: instance.restarts,
            tolerance: instance.tolerance,
            resolution,
        };
        log::info!("prepared instance: {} cells, density ratio {}", complex.len(), density.ratio);
        Ok(Self {
            instance,
            normalized,
            map,
            complex,
            density,
            resolution,
            verdict: None,
            splitting: None,
            profile_set: None,
            shifts: None,
            bounds: None,
            transform: None,
            report: PipelineReport {
                instance: Some(summary),
                timings: options.timings.then(BTreeMap::new),
                ..Default::default()
            },
            options,
            done: None,
        })
    }

    pub fn report(&self) -> &PipelineReport {
        &self.report
    }

    pub fn into_report(self) -> PipelineReport {
        self.report
    }

    /// The level established by the verify stage.
    pub fn level(&self) -> Option<usize> {
        self.verdict.as_ref().and_then(|v| v.level)
    }

    /// Run every stage up to and including `target`.
    pub fn run_until(&mut self, target: Stage) -> Result<(), PipelineError> {
        let all = [Stage::Verify, Stage::Split, Stage::Profiles, Stage::Select, Stage::Bounds, Stage::RoundTrip];
        let done = self.done;
        for stage in all.into_iter().filter(|&s| s <= target && Some(s) > done) {
            let started = Instant::now();
            self.run_stage(stage)?;
            if let Some(t) = self.report.timings.as_mut() {
                t.insert(stage.name().to_string(), started.elapsed().as_secs_f64());
            }
            log::debug!("stage {} done", stage.name());
            self.done = Some(stage);
        }
        Ok(())
    }

    fn partial(&self) -> Box<PipelineReport> {
        Box::new(self.report.clone())
    }

    fn run_stage(&mut self, stage: Stage) -> Result<(), PipelineError> {
        match stage {
            Stage::Verify => self.verify(),
            Stage::Split => {
                let k = self.level().expect("verified");
                let s = split(&self.complex, k).expect("verified tiling splits");
                self.report.splitting = Some(SplitSection {
                    k,
                    parts: (0..k)
                        .map(|j| PartSummary {
                            part: j,
                            measure: s.part_measure(&self.complex, j).to_string(),
                            pieces: s.parts[j].len(),
                        })
                        .collect(),
                });
                self.splitting = Some(s);
                Ok(())
            }
            Stage::Profiles => {
                let k = self.level().expect("verified");
                let set = profiles(&self.complex, k).expect("verified tiling has profiles");
                let mut counts = vec![0usize; set.profiles.len()];
                for &p in &set.cell_profile {
                    counts[p] += 1;
                }
                self.report.profiles = Some(
                    set.profiles
                        .iter()
                        .enumerate()
                        .map(|(i, p)| ProfileRow {
                            index: i,
                            translates: p.translates().iter().map(|t| t.0.clone()).collect(),
                            support_measure: p.support_measure.to_string(),
                            cells: counts[i],
                        })
                        .collect(),
                );
                self.profile_set = Some(set);
                Ok(())
            }
            Stage::Select => self.select(),
            Stage::Bounds => {
                let set = self.profile_set.as_ref().expect("profiles stage ran");
                let shifts = self.shifts.as_ref().expect("select stage ran");
                let r = riesz_bounds(&set.profiles, shifts, self.instance.tolerance)
                    .map_err(|source| PipelineError::Selection { source, partial: self.partial() })?;
                self.report.riesz = Some(RieszSection {
                    a1: r.a1,
                    a2: r.a2,
                    c1: r.c1,
                    c2: r.c2,
                    k: r.k,
                    worst_profile: r.worst_profile,
                    min_abs_det: r.min_abs_det,
                    profiles: r
                        .profiles
                        .iter()
                        .enumerate()
                        .map(|(i, p)| ProfileSingularValues {
                            index: i,
                            sigma_min: p.sigma_min,
                            sigma_max: p.sigma_max,
                            abs_det: p.abs_det,
                        })
                        .collect(),
                });
                self.bounds = Some(r);
                Ok(())
            }
            Stage::RoundTrip => self.round_trip(),
        }
    }

    fn verify(&mut self) -> Result<(), PipelineError> {
        let verdict = crate::tiling::verify_tiling(&self.complex, self.instance.level);
        let section = TilingSection {
            level: verdict.level,
            cells: self.complex.len(),
            total_mass: verdict.total_mass.to_string(),
            violations: verdict
                .violations
                .iter()
                .map(|v| CellEntry { cell: v.cell, multiplicity: v.multiplicity, witness: strings(&v.witness) })
                .collect(),
        };
        self.report.tiling = Some(section);
        let level = verdict.level;
        self.verdict = Some(verdict);
        if level.is_none() {
            let listing: Vec<String> = self
                .report
                .tiling
                .iter()
                .flat_map(|t| &t.violations)
                .map(|v| {
                    let w: Vec<Rational> = self.complex.cells()[v.cell].witness.clone();
                    format!("cell {} near {} covered {} times", v.cell, format_point(&w), v.multiplicity)
                })
                .collect();
            let wanted = match self.instance.level {
                Some(k) => format!("at level {k}"),
                None => "at any level".to_string(),
            };
            return Err(PipelineError::NotATiling {
                message: format!("region does not tile {wanted}: {}", listing.join("; ")),
                partial: self.partial(),
            });
        }
        Ok(())
    }

    fn select(&mut self) -> Result<(), PipelineError> {
        let set = self.profile_set.as_ref().expect("profiles stage ran");
        let k = set.k();
        let (shifts, forced) = match &self.instance.shifts {
            Some(fixed) => {
                if fixed.len() != k {
                    return Err(PipelineError::Invalid(format!("{} shift vectors given, level is {k}", fixed.len())));
                }
                (ShiftVectors::from_exact(fixed, self.instance.seed).with_quality(&set.profiles), true)
            }
            None => {
                let config = SelectionConfig {
                    restarts: self.instance.restarts,
                    seed: self.instance.seed,
                    tolerance: self.instance.tolerance,
                };
                let s = select_shifts(&set.profiles, &config)
                    .map_err(|source| PipelineError::Selection { source, partial: self.partial() })?;
                (s, false)
            }
        };
        self.report.shifts = Some(ShiftSection {
            seed: shifts.seed,
            forced,
            quality: shifts.quality,
            normalized: shifts.shifts().to_vec(),
            original: shifts.shifts().iter().map(|a| self.map.frequency_to_original_real(a)).collect(),
        });
        self.shifts = Some(shifts);
        Ok(())
    }

    fn round_trip(&mut self) -> Result<(), PipelineError> {
        let grid = build_grid(&self.complex, self.resolution)
            .map_err(|source| PipelineError::Resolution { source, partial: self.partial() })?;
        let set = self.profile_set.as_ref().expect("profiles stage ran");
        let shifts = self.shifts.as_ref().expect("select stage ran");
        let t = Transform::new(&grid, set, shifts, self.instance.tolerance).map_err(|source| match source {
            TransformError::Riesz(source) => PipelineError::Selection { source, partial: self.partial() },
            source => PipelineError::Resolution { source, partial: self.partial() },
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.instance.seed);
        let (mut worst, mut coeff_worst) = (0.0f64, 0.0f64);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..self.options.trials {
            let f = random_function(&mut rng, t.omega_len());
            let c = t.analyze(&f).expect("sizes match");
            let back = t.synthesize(&c).expect("sizes match");
            worst = worst.max(f.max_relative_error(&back));
            let c2 = t.analyze(&back).expect("sizes match");
            let scale = c.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            coeff_worst = coeff_worst.max(c.max_abs_difference(&c2) / scale);
            let ratio = c.norm_sq() / t.norm_sq(&f);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let (empirical_low, empirical_high) = t.empirical_frame_bounds();
        if !grid.uncovered_cells.is_empty() {
            log::warn!("{} cells contain no sample point at resolution {}", grid.uncovered_cells.len(), self.resolution);
        }
        self.report.roundtrip = Some(RoundTripSection {
            resolution: self.resolution,
            base_points: t.base_len(),
            omega_points: t.omega_len(),
            uncovered_cells: grid.uncovered_cells.clone(),
            trials: self.options.trials,
            max_relative_error: worst,
            coefficient_error: coeff_worst,
            empirical_low,
            empirical_high,
            observed_low: if self.options.trials == 0 { empirical_low } else { lo },
            observed_high: if self.options.trials == 0 { empirical_high } else { hi },
        });
        self.transform = Some(t);
        Ok(())
    }

    /// CSV view of a stage's output.
    pub fn table(&self, stage: Stage) -> Table {
        match stage {
            Stage::Verify => {
                let mut t = Table::new(&["cell", "multiplicity", "measure", "witness", "translates"]);
                for (i, c) in self.complex.cells().iter().enumerate() {
                    t.rows.push(vec![
                        i.to_string(),
                        c.multiplicity().to_string(),
                        c.measure().to_string(),
                        format_point(&c.witness),
                        join_translates(&c.translates.iter().map(|v| v.0.clone()).collect::<Vec<_>>()),
                    ]);
                }
                t
            }
            Stage::Split => {
                let mut t = Table::new(&["part", "cell", "translate", "measure"]);
                for (j, part) in self.splitting.iter().flat_map(|s| s.parts.iter().enumerate()) {
                    for p in part {
                        t.rows.push(vec![
                            j.to_string(),
                            p.cell.to_string(),
                            p.translate.to_string(),
                            self.complex.cells()[p.cell].measure().to_string(),
                        ]);
                    }
                }
                t
            }
            Stage::Select => {
                let mut t = Table::new(&["j", "normalized", "original"]);
                for (j, (a, b)) in self
                    .report
                    .shifts
                    .iter()
                    .flat_map(|s| s.normalized.iter().zip(&s.original))
                    .enumerate()
                {
                    let fmt = |v: &Vec<f64>| v.iter().map(|x| format_f64(*x)).collect::<Vec<_>>().join(";");
                    t.rows.push(vec![j.to_string(), fmt(a), fmt(b)]);
                }
                t
            }
            Stage::RoundTrip => {
                let mut t = Table::new(&["resolution", "trials", "max_relative_error", "empirical_low", "empirical_high"]);
                if let Some(r) = &self.report.roundtrip {
                    t.rows.push(vec![
                        r.resolution.to_string(),
                        r.trials.to_string(),
                        format_f64(r.max_relative_error),
                        format_f64(r.empirical_low),
                        format_f64(r.empirical_high),
                    ]);
                }
                t
            }
            Stage::Profiles | Stage::Bounds => profile_table(&self.report),
        }
    }
}

fn random_function(rng: &mut ChaCha8Rng, len: usize) -> GridFunction<f64> {
    GridFunction::new(
        (0..len)
            .map(|_| nalgebra::Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
}

/// Run every stage and return the full report.
pub fn run_pipeline(spec: &InstanceSpec, options: PipelineOptions) -> Result<PipelineReport, PipelineError> {
    let mut p = Pipeline::prepare(spec, options)?;
    p.run_until(Stage::RoundTrip)?;
    Ok(p.into_report())
}
