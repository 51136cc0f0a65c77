//! Aggregate quantities of a mass-point system and the best-fit rigid and
//! affine backgrounds against which agitation is measured objectively.
//!
//! The fits are snapshot operations: the paragon placement is the current one,
//! so the gross shape defaults to the identity and the transformed Reynolds
//! tensor coincides with the intrinsic one unless a shape is supplied.

use crate::error::{Error, Result};
use crate::smallalg::{solve_min_norm, solve_min_norm_ten, Ten3, Vec3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

/// One mass point: mass, position, velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub mass: f64,
    pub position: Vec3,
    pub velocity: Vec3,
}

/// An immutable collection of at least one mass point with positive masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Particle>", into = "Vec<Particle>")]
pub struct ParticleCloud {
    particles: Vec<Particle>,
}

impl ParticleCloud {
    pub fn new(particles: Vec<Particle>) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::InvalidInput(
                "a cloud needs at least one particle".into(),
            ));
        }
        for (i, p) in particles.iter().enumerate() {
            if !(p.mass.is_finite() && p.mass > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "particle {i}: mass must be finite and positive"
                )));
            }
            if !p.position.is_finite() || !p.velocity.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "particle {i}: position and velocity must be finite"
                )));
            }
        }
        Ok(ParticleCloud { particles })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn total_mass(&self) -> f64 {
        self.particles.iter().map(|p| p.mass).sum()
    }

    /// Rebuild the cloud with new positions and velocities, keeping masses.
    pub fn with_state(&self, positions: &[Vec3], velocities: &[Vec3]) -> Result<Self> {
        if positions.len() != self.len() || velocities.len() != self.len() {
            return Err(Error::InvalidInput("state length mismatch".into()));
        }
        let particles = self
            .particles
            .iter()
            .zip(positions.iter().zip(velocities))
            .map(|(p, (&position, &velocity))| Particle {
                mass: p.mass,
                position,
                velocity,
            })
            .collect();
        ParticleCloud::new(particles)
    }
}

impl TryFrom<Vec<Particle>> for ParticleCloud {
    type Error = Error;
    fn try_from(v: Vec<Particle>) -> Result<Self> {
        ParticleCloud::new(v)
    }
}

impl From<ParticleCloud> for Vec<Particle> {
    fn from(c: ParticleCloud) -> Self {
        c.particles
    }
}

/// Global quantities of a cloud, relative to its centre of gravity.
///
/// All tensorial fields are per unit mass; multiply by `mass` to recover the
/// extensive versions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateState {
    /// Total mass.
    pub mass: f64,
    /// Centre of gravity.
    pub center: Vec3,
    /// Velocity of the centre of gravity.
    pub velocity: Vec3,
    /// Second moment of the mass distribution about the centre.
    pub euler_inertia: Ten3,
    /// Classical inertia tensor `(tr Y) I − Y`.
    pub inertia: Ten3,
    /// Moment of momentum about the centre, per unit mass.
    pub moment_of_momentum: Vec3,
    /// Tensor moment of momentum, per unit mass.
    pub tensor_moment: Ten3,
    /// Kinetic energy per unit mass.
    pub specific_kinetic_energy: f64,
    /// Kinetic energy tensor per unit mass; its trace is the specific energy.
    pub energy_tensor: Ten3,
}

/// Compute the aggregate state of a cloud.
pub fn aggregates(cloud: &ParticleCloud) -> AggregateState {
    let mass = cloud.total_mass();
    let mut center = Vec3::ZERO;
    let mut velocity = Vec3::ZERO;
    for p in cloud.particles() {
        center += p.position * p.mass;
        velocity += p.velocity * p.mass;
    }
    center = center / mass;
    velocity = velocity / mass;

    let mut euler_inertia = Ten3::ZERO;
    let mut moment = Vec3::ZERO;
    let mut tensor_moment = Ten3::ZERO;
    let mut energy_tensor = Ten3::ZERO;
    for p in cloud.particles() {
        let y = p.position - center;
        let ydot = p.velocity - velocity;
        euler_inertia += y.outer(y) * p.mass;
        moment += y.cross(ydot) * p.mass;
        tensor_moment += y.outer(ydot) * p.mass;
        energy_tensor += p.velocity.outer(p.velocity) * (0.5 * p.mass);
    }
    euler_inertia = euler_inertia * (1.0 / mass);
    moment = moment / mass;
    tensor_moment = tensor_moment * (1.0 / mass);
    energy_tensor = energy_tensor * (1.0 / mass);

    AggregateState {
        mass,
        center,
        velocity,
        euler_inertia,
        inertia: Ten3::identity() * euler_inertia.trace() - euler_inertia,
        moment_of_momentum: moment,
        tensor_moment,
        specific_kinetic_energy: energy_tensor.trace(),
        energy_tensor,
    }
}

/// The entrainment field subtracted by a background fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entrainment {
    /// Rigid rotation about the centre with the given spin vector.
    Rigid { spin: Vec3 },
    /// Homogeneous velocity gradient about the centre.
    Affine { velocity_gradient: Ten3 },
}

/// Kinetic energy split per unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySplit {
    pub translational: f64,
    pub entrainment: f64,
    pub agitation: f64,
    /// Mixed entrainment–shuffle term; vanishes at the fitted background.
    pub cross: f64,
}

/// A best-fit background plus everything measured against it.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundFit {
    pub entrainment: Entrainment,
    /// Gross shape used to pull shuffle rates back to the reference.
    pub gross_shape: Ten3,
    /// Reference shuffles at fit time (shape inverse applied to the offsets).
    pub shuffles: Vec<Vec3>,
    /// Per-point shuffle rates in the reference.
    pub shuffle_rates: Vec<Vec3>,
    /// Intrinsic Reynolds tensor of agitation, per unit mass.
    pub reynolds_star: Ten3,
    /// Reynolds tensor transported by the gross shape, per unit mass.
    pub reynolds: Ten3,
    pub energy: EnergySplit,
    /// Relative Frobenius norm of the mixed shuffle–entrainment tensor.
    pub mixed_rel: f64,
    pub aggregates: AggregateState,
}

impl BackgroundFit {
    /// Spin axis for a rigid fit with non-zero spin.
    pub fn spin_axis(&self) -> Option<Vec3> {
        match self.entrainment {
            Entrainment::Rigid { spin } if spin.norm() > 0.0 => Some(spin / spin.norm()),
            _ => None,
        }
    }
}

/// Best rigid background: the spin solves `J q = k` in the minimum-norm sense.
///
/// The moment of momentum always lies in the range of the inertia tensor, so
/// the solve cannot be inconsistent; a failure here indicates a bug.
pub fn rigid_fit(cloud: &ParticleCloud) -> BackgroundFit {
    let agg = aggregates(cloud);
    let spin = solve_min_norm(&agg.inertia, agg.moment_of_momentum)
        .expect("moment of momentum lies in the range of the inertia tensor");

    let mut shuffles = Vec::with_capacity(cloud.len());
    let mut rates = Vec::with_capacity(cloud.len());
    let mut agitation = 0.0;
    let mut cross = 0.0;
    let mut reynolds = Ten3::ZERO;
    for p in cloud.particles() {
        let y = p.position - agg.center;
        let ydot = p.velocity - agg.velocity;
        let entrained = spin.cross(y);
        let rate = ydot - entrained;
        agitation += 0.5 * p.mass * rate.norm_sq();
        cross += p.mass * rate.dot(entrained);
        reynolds += rate.outer(rate) * p.mass;
        shuffles.push(y);
        rates.push(rate);
    }
    let inv_mass = 1.0 / agg.mass;
    reynolds = reynolds * inv_mass;

    let energy = EnergySplit {
        translational: 0.5 * agg.velocity.norm_sq(),
        entrainment: 0.5 * spin.dot(agg.inertia * spin),
        agitation: agitation * inv_mass,
        cross: cross * inv_mass,
    };

    BackgroundFit {
        entrainment: Entrainment::Rigid { spin },
        gross_shape: Ten3::identity(),
        shuffles,
        shuffle_rates: rates,
        reynolds_star: reynolds,
        reynolds,
        energy,
        mixed_rel: mixed_tensor_rel(
            cloud,
            &agg,
            &rates_to_entrained(cloud, &agg, |y| spin.cross(y)),
        ),
        aggregates: agg,
    }
}

fn rates_to_entrained(
    cloud: &ParticleCloud,
    agg: &AggregateState,
    entrain: impl Fn(Vec3) -> Vec3,
) -> Vec<(Vec3, Vec3)> {
    cloud
        .particles()
        .iter()
        .map(|p| {
            let y = p.position - agg.center;
            let ydot = p.velocity - agg.velocity;
            let e = entrain(y);
            (ydot - e, e)
        })
        .collect()
}

fn mixed_tensor_rel(cloud: &ParticleCloud, agg: &AggregateState, pairs: &[(Vec3, Vec3)]) -> f64 {
    let mut mixed = Ten3::ZERO;
    let mut scale = 0.0;
    for (p, (rate, entrained)) in cloud.particles().iter().zip(pairs) {
        mixed += rate.outer(*entrained) * p.mass;
        scale += p.mass * rate.norm() * entrained.norm();
    }
    // measure against the kinetic content as well, so that machine-noise
    // shuffle rates of an exactly entrained cloud do not read as a defect
    let scale = scale.max(2.0 * agg.mass * agg.specific_kinetic_energy);
    if scale == 0.0 {
        0.0
    } else {
        mixed.norm() / scale
    }
}

/// Best affine background: the velocity gradient solves `B Y = Kᵀ` in the
/// minimum-norm sense, acting as zero on any null directions of the inertia.
///
/// `gross_shape` must have positive determinant; pass `None` for the identity.
pub fn affine_fit(cloud: &ParticleCloud, gross_shape: Option<Ten3>) -> Result<BackgroundFit> {
    let shape = gross_shape.unwrap_or_else(Ten3::identity);
    let det = shape.det();
    if !(det.is_finite() && det > 0.0) {
        return Err(Error::InvalidInput(format!(
            "gross shape must have positive determinant (got {det})"
        )));
    }
    let shape_inv = shape
        .inverse()
        .ok_or_else(|| Error::InvalidInput("gross shape is not invertible".into()))?;

    let agg = aggregates(cloud);
    // B Y = Kᵀ  ⇔  Y Bᵀ = K, solved columnwise.
    let b_t = solve_min_norm_ten(&agg.euler_inertia, &agg.tensor_moment)?;
    let grad = b_t.transpose();

    let mut shuffles = Vec::with_capacity(cloud.len());
    let mut rates = Vec::with_capacity(cloud.len());
    let mut reynolds_star = Ten3::ZERO;
    let mut agitation = 0.0;
    let mut cross = 0.0;
    for p in cloud.particles() {
        let y = p.position - agg.center;
        let ydot = p.velocity - agg.velocity;
        let entrained = grad * y;
        let residual = ydot - entrained;
        let rate = shape_inv * residual;
        reynolds_star += rate.outer(rate) * p.mass;
        agitation += 0.5 * p.mass * residual.norm_sq();
        cross += p.mass * residual.dot(entrained);
        shuffles.push(shape_inv * y);
        rates.push(rate);
    }
    let inv_mass = 1.0 / agg.mass;
    reynolds_star = reynolds_star * inv_mass;
    let reynolds = shape * reynolds_star * shape.transpose();

    let pairs = rates_to_entrained(cloud, &agg, |y| grad * y);
    let mixed_rel = mixed_tensor_rel(cloud, &agg, &pairs);
    debug_assert!(
        !mixed_rel.is_finite() || mixed_rel < 1e-10,
        "mixed tensor should vanish at the fit (got {mixed_rel})"
    );

    let energy = EnergySplit {
        translational: 0.5 * agg.velocity.norm_sq(),
        entrainment: 0.5 * (grad * agg.euler_inertia * grad.transpose()).trace(),
        agitation: agitation * inv_mass,
        cross: cross * inv_mass,
    };

    Ok(BackgroundFit {
        entrainment: Entrainment::Affine {
            velocity_gradient: grad,
        },
        gross_shape: shape,
        shuffles,
        shuffle_rates: rates,
        reynolds_star,
        reynolds,
        energy,
        mixed_rel,
        aggregates: agg,
    })
}

/// Mass-averaged squared residual of the velocities against an affine field.
pub fn discrepancy(cloud: &ParticleCloud, velocity_gradient: &Ten3) -> f64 {
    let agg = aggregates(cloud);
    let mut total = 0.0;
    for p in cloud.particles() {
        let y = p.position - agg.center;
        let ydot = p.velocity - agg.velocity;
        total += p.mass * (ydot - *velocity_gradient * y).norm_sq();
    }
    total / agg.mass
}

/// Parameters for deterministic random cloud generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerParams {
    pub count: usize,
    #[serde(default = "default_mass_range")]
    pub mass_range: [f64; 2],
    #[serde(default = "default_scale")]
    pub position_scale: f64,
    #[serde(default = "default_scale")]
    pub velocity_scale: f64,
}

fn default_mass_range() -> [f64; 2] {
    [0.5, 2.0]
}

fn default_scale() -> f64 {
    1.0
}

impl SamplerParams {
    pub fn new(count: usize) -> Self {
        SamplerParams {
            count,
            mass_range: default_mass_range(),
            position_scale: default_scale(),
            velocity_scale: default_scale(),
        }
    }
}

/// Draw a reproducible random cloud.
pub fn sample_cloud(params: &SamplerParams, seed: u64) -> Result<ParticleCloud> {
    if params.count == 0 {
        return Err(Error::InvalidInput(
            "sampler count must be at least 1".into(),
        ));
    }
    let [m_lo, m_hi] = params.mass_range;
    if !(m_lo.is_finite() && m_hi.is_finite() && 0.0 < m_lo && m_lo <= m_hi) {
        return Err(Error::InvalidInput(
            "mass range must be positive and ordered".into(),
        ));
    }
    if !(params.position_scale > 0.0 && params.velocity_scale > 0.0) {
        return Err(Error::InvalidInput(
            "sampler scales must be positive".into(),
        ));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut particles = Vec::with_capacity(params.count);
    for _ in 0..params.count {
        let mass = if m_lo == m_hi {
            m_lo
        } else {
            rng.random_range(m_lo..m_hi)
        };
        let position = gauss_vec(&mut rng) * params.position_scale;
        let velocity = gauss_vec(&mut rng) * params.velocity_scale;
        particles.push(Particle {
            mass,
            position,
            velocity,
        });
    }
    ParticleCloud::new(particles)
}

/// Standard normal triple via Box–Muller.
pub(crate) fn gauss_vec(rng: &mut StdRng) -> Vec3 {
    let (a, b) = gauss_pair(rng);
    let (c, _) = gauss_pair(rng);
    Vec3::new(a, b, c)
}

pub(crate) fn gauss_pair(rng: &mut StdRng) -> (f64, f64) {
    let u1: f64 = rng.random::<f64>().max(1e-16);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    (r * th.cos(), r * th.sin())
}
