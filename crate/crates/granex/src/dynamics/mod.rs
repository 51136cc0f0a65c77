//! Force models, a direct N-body oracle, balance/energy residual evaluation
//! and closure-mode integration of the aggregate evolution system.

mod balance;
mod closure;
mod nbody;

pub use balance::{potential_consistency, verify_balances, BalanceReport, PotentialReport};
pub use closure::{
    closure_integrate, evolve_rotation, evolve_shape, ClosureInit, ClosureSpec, ClosureState,
    ClosureStep, ClosureTrajectory,
};
pub use nbody::{simulate_nbody, NbodyStep, NbodyTrajectory, StepDiagnostics};

use crate::error::{Error, Result};
use crate::pointsys::{BackgroundFit, ParticleCloud};
use crate::smallalg::{sym_eigen, Ten3, Vec3};
use serde::{Deserialize, Serialize};

/// A force acting on the cloud. Uniform fields and traps are external;
/// pair springs are internal, central, and equal-and-opposite, so the vector
/// moment of internal forces vanishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ForceModel {
    /// Constant acceleration applied to every particle.
    UniformField { acceleration: Vec3 },
    /// Linear restoring force `−S (x − c)` towards a fixed centre.
    QuadraticTrap { stiffness: Ten3, center: Vec3 },
    /// Linear springs with optional line-of-centres dampers over a pair list.
    PairSpring {
        pairs: Vec<[usize; 2]>,
        stiffness: f64,
        rest_length: f64,
        #[serde(default)]
        damping: f64,
    },
}

impl ForceModel {
    /// Check the model parameters against a cloud of `n` particles.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            ForceModel::UniformField { acceleration } => {
                if !acceleration.is_finite() {
                    return Err(Error::InvalidInput(
                        "field acceleration must be finite".into(),
                    ));
                }
            }
            ForceModel::QuadraticTrap { stiffness, center } => {
                if !stiffness.is_finite() || !center.is_finite() {
                    return Err(Error::InvalidInput("trap parameters must be finite".into()));
                }
                if !stiffness.is_symmetric(1e-12) {
                    return Err(Error::InvalidInput(
                        "trap stiffness must be symmetric".into(),
                    ));
                }
                let (vals, _) = sym_eigen(stiffness);
                let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                if vals.iter().any(|&v| v < -1e-12 * scale.max(1.0)) {
                    return Err(Error::InvalidInput(
                        "trap stiffness must be positive semi-definite".into(),
                    ));
                }
            }
            ForceModel::PairSpring {
                pairs,
                stiffness,
                rest_length,
                damping,
            } => {
                if !(stiffness.is_finite() && *stiffness >= 0.0) {
                    return Err(Error::InvalidInput("spring stiffness must be >= 0".into()));
                }
                if !(rest_length.is_finite() && *rest_length >= 0.0) {
                    return Err(Error::InvalidInput(
                        "spring rest length must be >= 0".into(),
                    ));
                }
                if !(damping.is_finite() && *damping >= 0.0) {
                    return Err(Error::InvalidInput("spring damping must be >= 0".into()));
                }
                for &[i, j] in pairs {
                    if i >= n || j >= n || i == j {
                        return Err(Error::InvalidInput(format!(
                            "spring pair ({i}, {j}) is out of range for {n} particles"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// True when the model dissipates energy.
    pub fn is_dissipative(&self) -> bool {
        matches!(self, ForceModel::PairSpring { damping, .. } if *damping > 0.0)
    }
}

pub fn validate_models(models: &[ForceModel], n: usize) -> Result<()> {
    for m in models {
        m.validate(n)?;
    }
    Ok(())
}

/// Per-particle forces split into external and internal parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Forces {
    pub external: Vec<Vec3>,
    pub internal: Vec<Vec3>,
    pub accelerations: Vec<Vec3>,
}

/// Evaluate all force models at the cloud's current state.
pub fn evaluate_forces(cloud: &ParticleCloud, models: &[ForceModel]) -> Result<Forces> {
    validate_models(models, cloud.len())?;
    let positions: Vec<Vec3> = cloud.particles().iter().map(|p| p.position).collect();
    let velocities: Vec<Vec3> = cloud.particles().iter().map(|p| p.velocity).collect();
    let masses: Vec<f64> = cloud.particles().iter().map(|p| p.mass).collect();
    let (external, internal) = forces_at(&positions, &velocities, &masses, models)?;
    let accelerations = external
        .iter()
        .zip(&internal)
        .zip(&masses)
        .map(|((e, i), m)| (*e + *i) * (1.0 / m))
        .collect();
    Ok(Forces {
        external,
        internal,
        accelerations,
    })
}

/// Raw force evaluation on state slices; shared with the integrator so the
/// cloud does not need to be revalidated at every stage.
pub(crate) fn forces_at(
    positions: &[Vec3],
    velocities: &[Vec3],
    masses: &[f64],
    models: &[ForceModel],
) -> Result<(Vec<Vec3>, Vec<Vec3>)> {
    let n = positions.len();
    let mut external = vec![Vec3::ZERO; n];
    let mut internal = vec![Vec3::ZERO; n];
    for model in models {
        match model {
            ForceModel::UniformField { acceleration } => {
                for (f, &m) in external.iter_mut().zip(masses) {
                    *f += *acceleration * m;
                }
            }
            ForceModel::QuadraticTrap { stiffness, center } => {
                for (f, &x) in external.iter_mut().zip(positions) {
                    *f -= *stiffness * (x - *center);
                }
            }
            ForceModel::PairSpring {
                pairs,
                stiffness,
                rest_length,
                damping,
            } => {
                for &[i, j] in pairs {
                    let d = positions[j] - positions[i];
                    let r = d.norm();
                    if r == 0.0 {
                        if *rest_length > 0.0 {
                            return Err(Error::Degenerate(format!(
                                "spring ({i}, {j}) endpoints coincide with non-zero rest length"
                            )));
                        }
                        continue;
                    }
                    let axis = d * (1.0 / r);
                    let r_rate = (velocities[j] - velocities[i]).dot(axis);
                    let magnitude = stiffness * (r - rest_length) + damping * r_rate;
                    let f = axis * magnitude;
                    internal[i] += f;
                    internal[j] -= f;
                }
            }
        }
    }
    Ok((external, internal))
}

/// Potential energy of the conservative parts, `(external, internal)`.
/// Forces are recovered as minus the position gradient of each part.
pub fn potential_energy(cloud: &ParticleCloud, models: &[ForceModel]) -> Result<(f64, f64)> {
    validate_models(models, cloud.len())?;
    let positions: Vec<Vec3> = cloud.particles().iter().map(|p| p.position).collect();
    let masses: Vec<f64> = cloud.particles().iter().map(|p| p.mass).collect();
    Ok(potential_at(&positions, &masses, models))
}

pub(crate) fn potential_at(
    positions: &[Vec3],
    masses: &[f64],
    models: &[ForceModel],
) -> (f64, f64) {
    let mut ext = 0.0;
    let mut int = 0.0;
    for model in models {
        match model {
            ForceModel::UniformField { acceleration } => {
                for (&x, &m) in positions.iter().zip(masses) {
                    ext -= m * acceleration.dot(x);
                }
            }
            ForceModel::QuadraticTrap { stiffness, center } => {
                for &x in positions {
                    let d = x - *center;
                    ext += 0.5 * d.dot(*stiffness * d);
                }
            }
            ForceModel::PairSpring {
                pairs,
                stiffness,
                rest_length,
                ..
            } => {
                for &[i, j] in pairs {
                    let r = (positions[j] - positions[i]).norm();
                    let stretch = r - rest_length;
                    int += 0.5 * stiffness * stretch * stretch;
                }
            }
        }
    }
    (ext, int)
}

/// Analytic time derivatives of the two potential parts at the current state.
pub(crate) fn potential_rates(
    positions: &[Vec3],
    velocities: &[Vec3],
    masses: &[f64],
    models: &[ForceModel],
) -> (f64, f64) {
    let mut ext = 0.0;
    let mut int = 0.0;
    for model in models {
        match model {
            ForceModel::UniformField { acceleration } => {
                for (&v, &m) in velocities.iter().zip(masses) {
                    ext -= m * acceleration.dot(v);
                }
            }
            ForceModel::QuadraticTrap { stiffness, center } => {
                for (&x, &v) in positions.iter().zip(velocities) {
                    ext += (*stiffness * (x - *center)).dot(v);
                }
            }
            ForceModel::PairSpring {
                pairs,
                stiffness,
                rest_length,
                ..
            } => {
                for &[i, j] in pairs {
                    let d = positions[j] - positions[i];
                    let r = d.norm();
                    if r == 0.0 {
                        continue;
                    }
                    let axis = d * (1.0 / r);
                    let r_rate = (velocities[j] - velocities[i]).dot(axis);
                    int += stiffness * (r - rest_length) * r_rate;
                }
            }
        }
    }
    (ext, int)
}

/// Resultants and stirring tensors of the current force system, measured
/// against the shuffle rates of a background fit of the same cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSet {
    /// Resultant external force.
    pub force: Vec3,
    /// Resultant external moment about the centre.
    pub torque: Vec3,
    /// Tensor moment of external forces.
    pub moment_external: Ten3,
    /// Tensor moment of internal forces (sign-flipped; symmetric for central forces).
    pub moment_internal: Ten3,
    /// Stirring tensor of external forces.
    pub stir_external: Ten3,
    /// Stirring tensor of internal forces (sign-flipped).
    pub stir_internal: Ten3,
}

/// Assemble the source tensors from per-particle forces and a background fit.
pub fn assemble_sources(cloud: &ParticleCloud, fit: &BackgroundFit, forces: &Forces) -> SourceSet {
    let center = fit.aggregates.center;
    let shape = fit.gross_shape;
    let mut force = Vec3::ZERO;
    let mut torque = Vec3::ZERO;
    let mut moment_external = Ten3::ZERO;
    let mut moment_internal = Ten3::ZERO;
    let mut stir_external = Ten3::ZERO;
    let mut stir_internal = Ten3::ZERO;

    for ((p, rate), (f_ext, f_int)) in cloud
        .particles()
        .iter()
        .zip(&fit.shuffle_rates)
        .zip(forces.external.iter().zip(&forces.internal))
    {
        let y = p.position - center;
        let transported = shape * *rate;
        force += *f_ext;
        torque += y.cross(*f_ext);
        moment_external += y.outer(*f_ext);
        moment_internal -= y.outer(*f_int);
        stir_external += transported.outer(*f_ext);
        stir_internal -= transported.outer(*f_int);
    }

    SourceSet {
        force,
        torque,
        moment_external,
        moment_internal,
        stir_external: stir_external.sym() * 2.0,
        stir_internal: stir_internal.sym() * 2.0,
    }
}
