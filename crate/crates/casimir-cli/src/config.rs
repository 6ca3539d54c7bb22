//! Run configuration: a single JSON document, validated before anything is computed.

use std::path::Path;

use casimir::boundary::{BoundaryState, ImageSeriesConfig};
use casimir::fields::{make_bump, Geometry, Point4, TestFunction};
use casimir::kernels::{SmearOptions, StateSpec};
use casimir::observables::Normalization;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Twopoint,
    WickSquare,
    Stress,
    KmsCheck,
    Positivity,
    Convergence,
    AlgebraCheck,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Twopoint,
        Command::WickSquare,
        Command::Stress,
        Command::KmsCheck,
        Command::Positivity,
        Command::Convergence,
        Command::AlgebraCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Twopoint => "twopoint",
            Command::WickSquare => "wick-square",
            Command::Stress => "stress",
            Command::KmsCheck => "kms-check",
            Command::Positivity => "positivity",
            Command::Convergence => "convergence",
            Command::AlgebraCheck => "algebra-check",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    HalfSpace,
    #[default]
    Slab,
}

/// `{"type": "half_space" | "slab", "d": ...}`; `d` is ignored for the half-space.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(rename = "type", default)]
    pub kind: GeometryKind,
    #[serde(default = "one")]
    pub d: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            kind: GeometryKind::Slab,
            d: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    #[default]
    Vacuum,
    Kms,
}

/// `{"type": "vacuum" | "kms", "beta": ...}`; `beta` is required for "kms".
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    #[serde(rename = "type", default)]
    pub kind: StateKind,
    #[serde(default)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            n_max: default_n_max(),
            tail_tol: default_tail_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationConfig {
    #[default]
    ClosedForm,
    PointSplitting,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZGrid {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointPair {
    pub x: [f64; 4],
    pub xp: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: [f64; 4],
    pub radii: [f64; 4],
    #[serde(default = "one")]
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositivityConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// How many of the samples also get the position-space value for comparison.
    #[serde(default)]
    pub duality: usize,
}

impl Default for PositivityConfig {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            seed: default_seed(),
            duality: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmearConfig {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

impl Default for SmearConfig {
    fn default() -> Self {
        Self {
            rel_tol: default_rel_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingName {
    MinkowskiE,
    HalfSpaceE,
    SlabE,
    DeformedH,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<String>,
    pub svg: Option<String>,
}

/// Everything a run needs. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub state: StateConfig,
    #[serde(default)]
    pub series: SeriesConfig,
    #[serde(default)]
    pub normalization: NormalizationConfig,
    #[serde(default = "default_xi")]
    pub xi: f64,
    #[serde(default)]
    pub z_grid: Option<ZGrid>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub points: Vec<PointPair>,
    #[serde(default)]
    pub functions: Vec<BumpSpec>,
    #[serde(default)]
    pub pairs: Vec<[usize; 2]>,
    #[serde(default)]
    pub components: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub positivity: PositivityConfig,
    #[serde(default)]
    pub smear: SmearConfig,
    #[serde(default)]
    pub pairings: Option<Vec<PairingName>>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn one() -> f64 {
    1.0
}
fn default_n_max() -> usize {
    200
}
fn default_tail_tol() -> f64 {
    1e-8
}
fn default_xi() -> f64 {
    1.0 / 6.0
}
fn default_eps() -> f64 {
    1e-3
}
fn default_samples() -> usize {
    100
}
fn default_seed() -> u64 {
    20_240_601
}
fn default_rel_tol() -> f64 {
    1e-8
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(
            key,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn finite(key: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::config(key, "must be finite"))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." {
                "<root>".to_string()
            } else {
                path
            };
            CliError::config(key, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Schema-level checks; each failure names its key.
    pub fn validate(&self) -> Result<()> {
        if self.geometry.kind == GeometryKind::Slab {
            positive("geometry.d", self.geometry.d)?;
        }
        match (self.state.kind, self.state.beta) {
            (StateKind::Kms, Some(beta)) => positive("state.beta", beta)?,
            (StateKind::Kms, None) => {
                return Err(CliError::config("state.beta", "required for a kms state"))
            }
            (StateKind::Vacuum, Some(_)) => {
                return Err(CliError::config(
                    "state.beta",
                    "only allowed for a kms state",
                ))
            }
            (StateKind::Vacuum, None) => {}
        }
        if self.series.n_max == 0 {
            return Err(CliError::config("series.n_max", "must be at least 1"));
        }
        positive("series.tail_tol", self.series.tail_tol)?;
        finite("xi", &[self.xi])?;
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(CliError::config("eps", "must be nonnegative and finite"));
        }
        if let Some(g) = self.z_grid {
            finite("z_grid.from", &[g.from])?;
            finite("z_grid.to", &[g.to])?;
            if g.count == 0 {
                return Err(CliError::config("z_grid.count", "must be at least 1"));
            }
            if g.to < g.from {
                return Err(CliError::config(
                    "z_grid.to",
                    "must not be below z_grid.from",
                ));
            }
        }
        for (k, p) in self.points.iter().enumerate() {
            finite(&format!("points[{k}].x"), &p.x)?;
            finite(&format!("points[{k}].xp"), &p.xp)?;
        }
        for (k, f) in self.functions.iter().enumerate() {
            finite(&format!("functions[{k}].center"), &f.center)?;
            for r in f.radii {
                positive(&format!("functions[{k}].radii"), r)?;
            }
            finite(&format!("functions[{k}].amplitude"), &[f.amplitude])?;
        }
        for (k, p) in self.pairs.iter().enumerate() {
            if p.iter().any(|i| *i >= self.functions.len()) {
                return Err(CliError::config(
                    format!("pairs[{k}]"),
                    format!(
                        "index out of range: there are {} functions",
                        self.functions.len()
                    ),
                ));
            }
        }
        if let Some(c) = &self.components {
            for (k, mn) in c.iter().enumerate() {
                if mn[0] > 3 || mn[1] > 3 {
                    return Err(CliError::config(
                        format!("components[{k}]"),
                        "indices must be in 0..=3",
                    ));
                }
            }
        }
        positive("smear.rel_tol", self.smear.rel_tol)?;
        if self.positivity.duality > self.positivity.samples {
            return Err(CliError::config(
                "positivity.duality",
                "must not exceed positivity.samples",
            ));
        }
        if let Some(p) = &self.pairings {
            if p.contains(&PairingName::SlabE) && self.geometry.kind != GeometryKind::Slab {
                return Err(CliError::config("pairings", "slab_e needs a slab geometry"));
            }
        }
        Ok(())
    }

    pub fn geometry(&self) -> Geometry {
        match self.geometry.kind {
            GeometryKind::HalfSpace => Geometry::HalfSpace,
            GeometryKind::Slab => Geometry::Slab { d: self.geometry.d },
        }
    }

    pub fn state_spec(&self) -> StateSpec {
        match (self.state.kind, self.state.beta) {
            (StateKind::Kms, Some(beta)) => StateSpec::Kms { beta },
            _ => StateSpec::Vacuum,
        }
    }

    pub fn series(&self) -> ImageSeriesConfig {
        ImageSeriesConfig {
            n_max: self.series.n_max,
            tail_tol: self.series.tail_tol,
        }
    }

    pub fn boundary_state(&self) -> Result<BoundaryState> {
        Ok(BoundaryState::new(
            self.geometry(),
            self.state_spec(),
            self.series(),
        )?)
    }

    pub fn normalization(&self) -> Normalization {
        match self.normalization {
            NormalizationConfig::ClosedForm => Normalization::ClosedForm,
            NormalizationConfig::PointSplitting => Normalization::PointSplitting,
        }
    }

    pub fn smear_options(&self) -> SmearOptions {
        SmearOptions {
            rel_tol: self.smear.rel_tol,
            ..SmearOptions::default()
        }
    }

    /// The z samples: the configured grid, else nine interior points of the geometry.
    pub fn z_samples(&self) -> Vec<f64> {
        let g = self.z_grid.unwrap_or(match self.geometry.kind {
            GeometryKind::Slab => ZGrid {
                from: 0.1 * self.geometry.d,
                to: 0.9 * self.geometry.d,
                count: 9,
            },
            GeometryKind::HalfSpace => ZGrid {
                from: 0.1,
                to: 0.9,
                count: 9,
            },
        });
        if g.count == 1 {
            return vec![g.from];
        }
        (0..g.count)
            .map(|k| g.from + (g.to - g.from) * k as f64 / (g.count - 1) as f64)
            .collect()
    }

    pub fn test_functions(&self) -> Result<Vec<TestFunction>> {
        self.functions
            .iter()
            .enumerate()
            .map(|(k, b)| {
                make_bump(Point4::from_array(b.center), b.radii, b.amplitude)
                    .map_err(|e| CliError::config(format!("functions[{k}]"), e.to_string()))
            })
            .collect()
    }

    pub fn function_pairs(&self) -> Result<Vec<(TestFunction, TestFunction)>> {
        let fs = self.test_functions()?;
        Ok(self.pairs.iter().map(|[a, b]| (fs[*a], fs[*b])).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(
            c.geometry,
            GeometryConfig {
                kind: GeometryKind::Slab,
                d: 1.0
            }
        );
        assert_eq!(c.state, StateConfig::default());
        assert_eq!(c.xi, 1.0 / 6.0);
        assert_eq!(c.series.n_max, 200);
        assert_eq!(c.series.tail_tol, 1e-8);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = RunConfig::from_json(r#"{"geometry": {"type": "slab", "width": 2}}"#).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("geometry") && msg.contains("width"), "{msg}");
        let e = RunConfig::from_json(r#"{"zgrid": 1}"#).unwrap_err();
        assert!(e.to_string().contains("zgrid"), "{e}");
    }

    #[test]
    fn bad_value_is_named() {
        let e = RunConfig::from_json(r#"{"state": {"type": "kms", "beta": -1}}"#).unwrap_err();
        assert!(e.to_string().contains("state.beta"), "{e}");
        let e = RunConfig::from_json(r#"{"series": {"n_max": "many"}}"#).unwrap_err();
        assert!(e.to_string().contains("series.n_max"), "{e}");
        assert_eq!(e.exit_code(), 1);
        let e = RunConfig::from_json(r#"{"geometry": {"type": "slab", "d": "x"}}"#).unwrap_err();
        assert!(e.to_string().contains("geometry.d"), "{e}");
        let e = RunConfig::from_json(r#"{"state": {"type": "kms"}}"#).unwrap_err();
        assert!(e.to_string().contains("state.beta"), "{e}");
    }
}
