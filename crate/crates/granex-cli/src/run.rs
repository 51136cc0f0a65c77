//! Scenario dispatch: build the inputs, run the requested mode, evaluate its
//! checks, and emit the produced files plus a JSON run report.

use crate::config::{build_cloud, ClosureKind, ConfigError, FamilySpec, Mode, ScenarioConfig};
use granex::distrib::{
    bose_fermi_defect, moments, solve_bose_fermi, table_csv, theta_w, Density, DistributionSpec,
    Histogram,
};
use granex::dynamics::{closure_integrate, simulate_nbody, ClosureInit, ClosureSpec};
use granex::error::Error;
use granex::pointsys::{affine_fit, rigid_fit, Entrainment};
use granex::smallalg::sym_eigen;
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub mode: String,
    pub checks: Vec<CheckResult>,
    pub files: Vec<String>,
    pub duration_seconds: f64,
}

/// Command-line overrides applied on top of the config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
}

pub enum RunError {
    Config(ConfigError),
    Divergence(String),
    Runtime(String),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Divergence { .. } => RunError::Divergence(e.to_string()),
            other => RunError::Runtime(other.to_string()),
        }
    }
}

struct Emitter {
    dir: PathBuf,
    files: Vec<String>,
}

impl Emitter {
    fn new(dir: PathBuf) -> Result<Self, RunError> {
        std::fs::create_dir_all(&dir)
            .map_err(|e| RunError::Config(ConfigError::Io(e.to_string())))?;
        Ok(Emitter {
            dir,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| RunError::Config(ConfigError::Io(e.to_string())))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn below(&mut self, name: &str, value: f64, threshold: f64) {
        self.0.push(CheckResult {
            name: name.to_string(),
            passed: value.is_finite() && value < threshold,
            value,
            threshold,
        });
    }

    fn flag(&mut self, name: &str, passed: bool, value: f64) {
        self.0.push(CheckResult {
            name: name.to_string(),
            passed,
            value,
            threshold: 0.0,
        });
    }
}

/// Run a parsed scenario. Returns the report; every requested check appears
/// exactly once and the caller derives the exit status from `passed` flags.
pub fn run_scenario(
    config: &ScenarioConfig,
    base: &Path,
    overrides: &Overrides,
) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let out_dir = std::env::var_os("GRANEX_OUT")
        .map(PathBuf::from)
        .or_else(|| overrides.out.clone())
        .or_else(|| config.output.as_ref().map(|o| o.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut emitter = Emitter::new(out_dir)?;
    let mut checks = Checks::new();

    let dt = overrides.dt.unwrap_or(config.integration.dt);
    let steps = overrides.steps.unwrap_or(config.integration.steps);
    let seed = overrides.seed.unwrap_or(config.seed);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(RunError::Config(ConfigError::Validation(
            "dt must be positive".into(),
        )));
    }

    match config.mode {
        Mode::Fit => {
            let cloud = build_cloud(
                config.cloud.as_ref().expect("validated"),
                base,
                overrides.seed,
            )?;
            let rigid = rigid_fit(&cloud);
            let affine = affine_fit(&cloud, None)?;
            let Entrainment::Rigid { spin } = rigid.entrainment else {
                unreachable!()
            };
            let Entrainment::Affine { velocity_gradient } = affine.entrainment else {
                unreachable!()
            };
            let agg = &affine.aggregates;
            let kappa = agg.specific_kinetic_energy;

            let summary = json!({
                "schema": 1,
                "mass": agg.mass,
                "center": agg.center,
                "velocity": agg.velocity,
                "kinetic_energy_specific": kappa,
                "rigid": {
                    "spin": spin,
                    "energy": rigid.energy,
                    "reynolds": rigid.reynolds,
                },
                "affine": {
                    "velocity_gradient": velocity_gradient,
                    "energy": affine.energy,
                    "reynolds": affine.reynolds,
                    "mixed_rel": affine.mixed_rel,
                },
            });
            emitter.write("fit.json", &format!("{:#}\n", summary))?;

            checks.below("mixed_tensor_rel", affine.mixed_rel, 1e-12);
            let cross = affine.energy.cross.abs() / kappa.max(1e-300);
            checks.below("cross_term_rel", cross, 1e-12);
            let w = agg.velocity.outer(agg.velocity) * 0.5
                + velocity_gradient * agg.euler_inertia * velocity_gradient.transpose() * 0.5
                + affine.reynolds * 0.5;
            let closure_defect =
                (w - agg.energy_tensor).norm() / agg.energy_tensor.norm().max(1e-300);
            checks.below("energy_tensor_closure", closure_defect, 1e-12);
        }

        Mode::Simulate => {
            let cloud = build_cloud(
                config.cloud.as_ref().expect("validated"),
                base,
                overrides.seed,
            )?;
            let traj = simulate_nbody(&cloud, &config.forces, dt, steps, seed)?;
            emitter.write("trajectory.csv", &traj.to_csv())?;

            checks.below("balance_residual_max", traj.max_balance_residual(), 1e-10);
            let dissipative = config.forces.iter().any(|m| m.is_dissipative());
            if dissipative {
                let series = traj.energy_series();
                let slack = 1e-12 * series[0].abs().max(1.0);
                let rises = series.windows(2).filter(|w| w[1] > w[0] + slack).count();
                checks.flag("energy_nonincreasing", rises == 0, rises as f64);
            } else {
                checks.below("conservation_drift", traj.energy_drift(), 1e-6);
            }
        }

        Mode::Closure => {
            let closure = config.closure.as_ref().expect("validated");
            let spec = match closure.kind {
                ClosureKind::Zero => ClosureSpec::zero(closure.mass),
                ClosureKind::IsotropicAgitation => ClosureSpec::isotropic_agitation(closure.mass),
            }
            .with_pseudo_rigid(closure.pseudo_rigid);
            let init = ClosureInit {
                center: closure.init.center,
                velocity: closure.init.velocity,
                shape: closure.init.shape,
                velocity_gradient: closure.init.velocity_gradient,
                euler_inertia: closure.init.euler_inertia,
                reynolds: closure.init.reynolds,
            };
            let traj = closure_integrate(&spec, &init, dt, steps)?;
            emitter.write("closure.csv", &traj.to_csv())?;

            let mut min_eig: f64 = 0.0;
            let mut max_scale: f64 = 1.0;
            for step in &traj.steps {
                let (vals, _) = sym_eigen(&step.reynolds);
                for v in vals {
                    min_eig = min_eig.min(v);
                    max_scale = max_scale.max(v.abs());
                }
            }
            checks.flag("reynolds_psd", min_eig >= -1e-10 * max_scale, min_eig);
        }

        Mode::Dist => {
            let mut summaries = Vec::new();
            if let Some(dist) = &config.dist {
                for (index, family) in dist.families.iter().enumerate() {
                    let spec = build_spec(family)?;
                    let (m0, m1) = moments(&spec)?;
                    let label = format!("{}_{index}", spec.name());
                    checks.below(&format!("{label}_mass"), (m0 - 1.0).abs(), 1e-8);
                    checks.below(&format!("{label}_mean"), (m1 - 1.0).abs(), 1e-8);
                    emitter.write(
                        &format!("table_{label}.csv"),
                        &table_csv(&spec, dist.table_points),
                    )?;
                    summaries.push(json!({
                        "family": spec.name(),
                        "params": spec.params(),
                        "support": spec.support(),
                        "moments": [m0, m1],
                        "theta_w": theta_w(&spec).ok().map(|r| json_number(r.value)),
                    }));
                }
                let mut doc = json!({ "schema": 1, "distributions": summaries });
                if dist.include_roots {
                    let (bose, fermi) = solve_bose_fermi();
                    doc["roots"] = json!({ "bose": bose, "fermi": fermi });
                    let defect = bose_fermi_defect(bose)?
                        .abs()
                        .max(bose_fermi_defect(fermi)?.abs());
                    checks.below("roots_defect", defect, 1e-9);
                }
                emitter.write("dist.json", &format!("{:#}\n", doc))?;
            }
            if let Some(source) = &config.cloud {
                let cloud = build_cloud(source, base, overrides.seed)?;
                let hist = Histogram::from_cloud(&cloud, config.histogram_delta)?;
                emitter.write("histogram.csv", &hist.to_csv())?;
                checks.below("histogram_mass", (hist.mass_integral() - 1.0).abs(), 1e-12);
                let first = hist.first_moment();
                let half = config.histogram_delta / 2.0;
                checks.flag(
                    "histogram_first_moment",
                    (1.0 - half..=1.0 + half).contains(&first),
                    first,
                );
            }
        }
    }

    let mut report = RunReport {
        schema: 1,
        mode: config.mode.as_str().to_string(),
        checks: checks.0,
        files: emitter.files.clone(),
        duration_seconds: start.elapsed().as_secs_f64(),
    };
    report.files.push("report.json".to_string());
    let rendered = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(emitter.dir.join("report.json"), format!("{rendered}\n"))
        .map_err(|e| RunError::Config(ConfigError::Io(e.to_string())))?;
    Ok(report)
}

/// JSON has no infinities; encode them as tagged strings so an unbounded
/// temperature stays distinguishable from a missing one.
fn json_number(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn build_spec(family: &FamilySpec) -> Result<DistributionSpec, RunError> {
    let spec = match *family {
        FamilySpec::Canonical => DistributionSpec::canonical(),
        FamilySpec::PowerLaw => DistributionSpec::power_law(),
        FamilySpec::PiecewiseConstant { edge } => DistributionSpec::piecewise_constant(edge)?,
        FamilySpec::PiecewiseLinear { endpoint } => DistributionSpec::piecewise_linear(endpoint)?,
        FamilySpec::PiecewiseExponential { cutoff } => {
            DistributionSpec::piecewise_exponential(cutoff)?
        }
        FamilySpec::Sinusoidal { amplitude } => DistributionSpec::sinusoidal(amplitude)?,
        FamilySpec::BoseLike => DistributionSpec::bose_like(),
        FamilySpec::FermiLike => DistributionSpec::fermi_like(),
    };
    Ok(spec)
}
