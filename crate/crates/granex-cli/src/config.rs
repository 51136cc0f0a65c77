//! Scenario configuration: a versioned JSON document with strict key
//! checking, so typos in scenario files fail loudly at parse time.

use granex::dynamics::ForceModel;
use granex::pointsys::{sample_cloud, Particle, ParticleCloud, SamplerParams};
use granex::smallalg::{Ten3, Vec3};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

/// What went wrong while loading a scenario; always maps to exit code 2.
#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Parse(String),
    Validation(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse(m) => write!(f, "config parse error: {m}"),
            ConfigError::Validation(m) => write!(f, "invalid config: {m}"),
        }
    }
}

pub type ConfigResult<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Fit,
    Simulate,
    Closure,
    Dist,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Fit => "fit",
            Mode::Simulate => "simulate",
            Mode::Closure => "closure",
            Mode::Dist => "dist",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "fit" => Some(Mode::Fit),
            "simulate" => Some(Mode::Simulate),
            "closure" => Some(Mode::Closure),
            "dist" => Some(Mode::Dist),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub mode: Mode,
    #[serde(default)]
    pub cloud: Option<CloudSource>,
    #[serde(default)]
    pub forces: Vec<ForceModel>,
    #[serde(default)]
    pub integration: Integration,
    #[serde(default)]
    pub closure: Option<ClosureConfig>,
    #[serde(default)]
    pub dist: Option<DistConfig>,
    #[serde(default = "default_delta")]
    pub histogram_delta: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

fn default_delta() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integration {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_steps() -> usize {
    1000
}

impl Default for Integration {
    fn default() -> Self {
        Integration {
            dt: default_dt(),
            steps: default_steps(),
        }
    }
}

/// Exactly one of the three source kinds must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudSource {
    #[serde(default)]
    pub inline: Option<Vec<Particle>>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub sampler: Option<SamplerConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub count: usize,
    pub seed: u64,
    #[serde(default = "default_mass_range")]
    pub mass_range: [f64; 2],
    #[serde(default = "default_unit")]
    pub position_scale: f64,
    #[serde(default = "default_unit")]
    pub velocity_scale: f64,
}

fn default_mass_range() -> [f64; 2] {
    [0.5, 2.0]
}

fn default_unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureKind {
    Zero,
    IsotropicAgitation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureConfig {
    pub kind: ClosureKind,
    pub mass: f64,
    #[serde(default)]
    pub pseudo_rigid: bool,
    #[serde(default)]
    pub init: ClosureInitConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureInitConfig {
    #[serde(default)]
    pub center: Vec3,
    #[serde(default)]
    pub velocity: Vec3,
    #[serde(default = "identity")]
    pub shape: Ten3,
    #[serde(default)]
    pub velocity_gradient: Ten3,
    #[serde(default = "identity")]
    pub euler_inertia: Ten3,
    #[serde(default)]
    pub reynolds: Ten3,
}

fn identity() -> Ten3 {
    Ten3::identity()
}

impl Default for ClosureInitConfig {
    fn default() -> Self {
        ClosureInitConfig {
            center: Vec3::ZERO,
            velocity: Vec3::ZERO,
            shape: Ten3::identity(),
            velocity_gradient: Ten3::ZERO,
            euler_inertia: Ten3::identity(),
            reynolds: Ten3::ZERO,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistConfig {
    #[serde(default)]
    pub families: Vec<FamilySpec>,
    #[serde(default)]
    pub include_roots: bool,
    #[serde(default = "default_points")]
    pub table_points: usize,
}

fn default_points() -> usize {
    201
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Canonical,
    PowerLaw,
    PiecewiseConstant { edge: f64 },
    PiecewiseLinear { endpoint: f64 },
    PiecewiseExponential { cutoff: f64 },
    Sinusoidal { amplitude: f64 },
    BoseLike,
    FermiLike,
}

/// Parse and validate a scenario file.
pub fn parse_config(path: &Path) -> ConfigResult<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
    let config: ScenarioConfig =
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    validate(&config, path.parent().unwrap_or_else(|| Path::new(".")))?;
    Ok(config)
}

fn validate(config: &ScenarioConfig, base: &Path) -> ConfigResult<()> {
    if config.schema != 1 {
        return Err(ConfigError::Validation(format!(
            "unsupported schema version {} (expected 1)",
            config.schema
        )));
    }
    if !(config.integration.dt.is_finite() && config.integration.dt > 0.0) {
        return Err(ConfigError::Validation("dt must be positive".into()));
    }
    if config.integration.steps == 0 {
        return Err(ConfigError::Validation("steps must be at least 1".into()));
    }
    if !(config.histogram_delta.is_finite() && config.histogram_delta > 0.0) {
        return Err(ConfigError::Validation(
            "histogram_delta must be positive".into(),
        ));
    }
    if let Some(cloud) = &config.cloud {
        let sources = cloud.inline.is_some() as u8
            + cloud.csv.is_some() as u8
            + cloud.sampler.is_some() as u8;
        if sources != 1 {
            return Err(ConfigError::Validation(
                "cloud needs exactly one of: inline, csv, sampler".into(),
            ));
        }
        if let Some(path) = &cloud.csv {
            if !base.join(path).exists() {
                return Err(ConfigError::Validation(format!(
                    "cloud csv file {} does not exist",
                    path.display()
                )));
            }
        }
    }
    match config.mode {
        Mode::Fit | Mode::Simulate => {
            if config.cloud.is_none() {
                return Err(ConfigError::Validation(format!(
                    "mode {} needs a cloud",
                    config.mode.as_str()
                )));
            }
        }
        Mode::Closure => {
            if config.closure.is_none() {
                return Err(ConfigError::Validation(
                    "mode closure needs a closure block".into(),
                ));
            }
        }
        Mode::Dist => {
            if config.dist.is_none() && config.cloud.is_none() {
                return Err(ConfigError::Validation(
                    "mode dist needs a dist block or a cloud to bin".into(),
                ));
            }
        }
    }
    if let Some(closure) = &config.closure {
        if !(closure.mass.is_finite() && closure.mass > 0.0) {
            return Err(ConfigError::Validation(
                "closure mass must be positive".into(),
            ));
        }
    }
    Ok(())
}

/// Materialize the configured cloud (inline list, CSV file, or sampler).
pub fn build_cloud(
    source: &CloudSource,
    base: &Path,
    seed_override: Option<u64>,
) -> ConfigResult<ParticleCloud> {
    if let Some(particles) = &source.inline {
        return ParticleCloud::new(particles.clone())
            .map_err(|e| ConfigError::Validation(e.to_string()));
    }
    if let Some(path) = &source.csv {
        return read_cloud_csv(&base.join(path));
    }
    let sampler = source.sampler.as_ref().expect("validated");
    let params = SamplerParams {
        count: sampler.count,
        mass_range: sampler.mass_range,
        position_scale: sampler.position_scale,
        velocity_scale: sampler.velocity_scale,
    };
    sample_cloud(&params, seed_override.unwrap_or(sampler.seed))
        .map_err(|e| ConfigError::Validation(e.to_string()))
}

/// Cloud CSV format: header `mass,x,y,z,vx,vy,vz`, one particle per row.
fn read_cloud_csv(path: &Path) -> ConfigResult<ParticleCloud> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(e.to_string()))?;
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .ok_or_else(|| ConfigError::Parse("cloud csv is empty".into()))?
        .1;
    if header.trim() != "mass,x,y,z,vx,vy,vz" {
        return Err(ConfigError::Parse(format!(
            "cloud csv header must be mass,x,y,z,vx,vy,vz (got {header:?})"
        )));
    }
    let mut particles = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(ConfigError::Parse(format!(
                "cloud csv line {}: expected 7 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let mut values = [0.0_f64; 7];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field
                .trim()
                .parse()
                .map_err(|e| ConfigError::Parse(format!("cloud csv line {}: {e}", lineno + 1)))?;
        }
        particles.push(Particle {
            mass: values[0],
            position: Vec3::new(values[1], values[2], values[3]),
            velocity: Vec3::new(values[4], values[5], values[6]),
        });
    }
    ParticleCloud::new(particles).map_err(|e| ConfigError::Validation(e.to_string()))
}
