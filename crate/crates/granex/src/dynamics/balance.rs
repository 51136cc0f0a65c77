//! Residuals of the global balance laws and energy theorems at a single
//! state. Every time derivative here is assembled analytically from
//! positions, velocities and accelerations; there is no finite differencing,
//! so each residual vanishes to roundoff when the implementation is correct.

use super::{
    assemble_sources, evaluate_forces, potential_at, potential_rates, validate_models, ForceModel,
    Forces, SourceSet,
};
use crate::error::{Error, Result};
use crate::pointsys::{affine_fit, Entrainment, ParticleCloud};
use crate::smallalg::{solve_min_norm_ten, Ten3, Vec3};

/// Relative residual norms of the balance system and its energy corollaries.
///
/// Each entry is the Frobenius (or Euclidean) norm of the defect divided by
/// the largest norm among the participating terms, so a value near machine
/// epsilon means the corresponding identity holds at that state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BalanceReport {
    /// Resultant force law for the centre of gravity.
    pub linear_momentum: f64,
    /// Moment-of-momentum law about the centre.
    pub moment_of_momentum: f64,
    /// Symmetric part of the tensor-moment balance (with the agitation source).
    pub tensor_moment_sym: f64,
    /// Skew part of the tensor-moment balance, checked jointly with the
    /// moment-of-momentum row.
    pub tensor_moment_skw: f64,
    /// Full convected tensor-moment balance as one block.
    pub tensor_moment_full: f64,
    /// Evolution of the second mass moment against the fitted gradient.
    pub inertia_evolution: f64,
    /// Convected evolution of the Reynolds tensor driven by the stir tensors.
    pub reynolds_evolution: f64,
    /// External power identity (moment and stir against shuffle power).
    pub power_external: f64,
    /// Internal power identity.
    pub power_internal: f64,
    /// Scalar kinetic energy theorem.
    pub energy_scalar: f64,
    /// Tensor kinetic energy theorem.
    pub energy_tensor: f64,
    /// Reduced theorem for the gross kinetic energy tensor.
    pub energy_reduced: f64,
    /// Convected evolution of the energy tensor with the adjusted internal stir.
    pub energy_with_potential: f64,
}

impl BalanceReport {
    pub fn max(&self) -> f64 {
        [
            self.linear_momentum,
            self.moment_of_momentum,
            self.tensor_moment_sym,
            self.tensor_moment_skw,
            self.tensor_moment_full,
            self.inertia_evolution,
            self.reynolds_evolution,
            self.power_external,
            self.power_internal,
            self.energy_scalar,
            self.energy_tensor,
            self.energy_reduced,
            self.energy_with_potential,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn entries(&self) -> [(&'static str, f64); 13] {
        [
            ("linear_momentum", self.linear_momentum),
            ("moment_of_momentum", self.moment_of_momentum),
            ("tensor_moment_sym", self.tensor_moment_sym),
            ("tensor_moment_skw", self.tensor_moment_skw),
            ("tensor_moment_full", self.tensor_moment_full),
            ("inertia_evolution", self.inertia_evolution),
            ("reynolds_evolution", self.reynolds_evolution),
            ("power_external", self.power_external),
            ("power_internal", self.power_internal),
            ("energy_scalar", self.energy_scalar),
            ("energy_tensor", self.energy_tensor),
            ("energy_reduced", self.energy_reduced),
            ("energy_with_potential", self.energy_with_potential),
        ]
    }
}

fn rel_t(defect: Ten3, terms: &[Ten3]) -> f64 {
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        defect.norm()
    } else {
        defect.norm() / scale
    }
}

fn rel_v(defect: Vec3, terms: &[Vec3]) -> f64 {
    let scale = terms.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        defect.norm()
    } else {
        defect.norm() / scale
    }
}

fn rel_s(defect: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        defect.abs()
    } else {
        defect.abs() / scale
    }
}

/// Evaluate every balance and energy residual at the cloud's current state.
pub fn verify_balances(cloud: &ParticleCloud, models: &[ForceModel]) -> Result<BalanceReport> {
    let forces = evaluate_forces(cloud, models)?;
    balance_report(cloud, models, &forces)
}

pub(crate) fn balance_report(
    cloud: &ParticleCloud,
    models: &[ForceModel],
    forces: &Forces,
) -> Result<BalanceReport> {
    let fit = affine_fit(cloud, None)?;
    let agg = &fit.aggregates;
    let mass = agg.mass;
    let Entrainment::Affine {
        velocity_gradient: grad,
    } = fit.entrainment
    else {
        unreachable!("affine fit always carries a gradient")
    };

    let positions: Vec<Vec3> = cloud.particles().iter().map(|p| p.position).collect();
    let velocities: Vec<Vec3> = cloud.particles().iter().map(|p| p.velocity).collect();
    let masses: Vec<f64> = cloud.particles().iter().map(|p| p.mass).collect();

    let mut accel_center = Vec3::ZERO;
    for (a, &m) in forces.accelerations.iter().zip(&masses) {
        accel_center += *a * m;
    }
    accel_center = accel_center / mass;

    // analytic rates of the aggregate fields, together with the gross
    // magnitude of the sums they come from (the honest roundoff scale when
    // resultants cancel exactly)
    let mut moment_rate = Vec3::ZERO; // k̇
    let mut tensor_moment_rate = Ten3::ZERO; // K̇
    let mut inertia_rate = Ten3::ZERO; // Ẏ
    let mut energy_rate_total = Ten3::ZERO; // μ Ẇ
    let mut kinetic_rate_total = 0.0; // μ κ̇
    let mut force_scale = 0.0;
    let mut moment_scale = 0.0;
    let mut shuffle_power_scale = 0.0;
    let mut full_power_scale = 0.0;
    let mut kdot_scale = 0.0;
    let mut ydot_scale = 0.0;
    for i in 0..cloud.len() {
        let m = masses[i];
        let y = positions[i] - agg.center;
        let ydot = velocities[i] - agg.velocity;
        let yddot = forces.accelerations[i] - accel_center;
        moment_rate += y.cross(yddot) * m;
        tensor_moment_rate += (ydot.outer(ydot) + y.outer(yddot)) * m;
        inertia_rate += (ydot.outer(y) + y.outer(ydot)) * m;
        let f_total = forces.external[i] + forces.internal[i];
        energy_rate_total += f_total.outer(velocities[i]);
        kinetic_rate_total += velocities[i].dot(f_total);

        let f_mag = forces.external[i].norm() + forces.internal[i].norm();
        force_scale += f_mag;
        moment_scale += y.norm() * f_mag;
        shuffle_power_scale += ydot.norm() * f_mag;
        full_power_scale += velocities[i].norm() * f_mag;
        kdot_scale += m * (ydot.norm_sq() + y.norm() * yddot.norm());
        ydot_scale += 2.0 * m * y.norm() * ydot.norm();
    }
    moment_rate = moment_rate / mass;
    tensor_moment_rate = tensor_moment_rate * (1.0 / mass);
    inertia_rate = inertia_rate * (1.0 / mass);
    ydot_scale /= mass;
    let energy_rate_total = energy_rate_total.sym();

    // rate of the fitted gradient, from differentiating B Y = Kᵀ
    let grad_rate_t = solve_min_norm_ten(
        &agg.euler_inertia,
        &(tensor_moment_rate - inertia_rate * grad.transpose()),
    )?;
    let grad_rate = grad_rate_t.transpose();

    // rate of the Reynolds tensor via the shuffle residuals; the scales use
    // the gross magnitudes entering each residual product, because the
    // residuals themselves can cancel to machine noise on exactly affine
    // states (any cloud of four or fewer points)
    let mut reynolds_rate = Ten3::ZERO;
    let mut hdot_scale = 0.0;
    let mut stir_scale = 0.0;
    let grad_norm = grad.norm();
    let grad_rate_norm = grad_rate.norm();
    for i in 0..cloud.len() {
        let y = positions[i] - agg.center;
        let ydot = velocities[i] - agg.velocity;
        let yddot = forces.accelerations[i] - accel_center;
        let residual = ydot - grad * y;
        let residual_rate = yddot - grad_rate * y - grad * ydot;
        reynolds_rate += residual_rate.outer(residual) * masses[i];
        let u_floor = ydot.norm() + grad_norm * y.norm();
        let udot_floor = yddot.norm() + grad_rate_norm * y.norm() + grad_norm * ydot.norm();
        hdot_scale += 2.0 * masses[i] * udot_floor * u_floor;
        stir_scale += 2.0 * u_floor * (forces.external[i].norm() + forces.internal[i].norm());
    }
    reynolds_rate = reynolds_rate.sym() * (2.0 / mass);

    let src: SourceSet = assemble_sources(cloud, &fit, forces);
    let reynolds = fit.reynolds;

    // shuffle power sums for the power identities
    let mut power_ext = 0.0;
    let mut power_int = 0.0;
    for i in 0..cloud.len() {
        let ydot = velocities[i] - agg.velocity;
        power_ext += ydot.dot(forces.external[i]);
        power_int += ydot.dot(forces.internal[i]);
    }

    // row 1: resultant force
    let linear_momentum = rel_s(
        (accel_center * mass - src.force).norm(),
        &[(accel_center * mass).norm(), src.force.norm(), force_scale],
    );

    // moment of momentum about the centre
    let moment_of_momentum = rel_s(
        (moment_rate * mass - src.torque).norm(),
        &[(moment_rate * mass).norm(), src.torque.norm(), moment_scale],
    );

    // tensor-moment balance, convected by the fitted gradient
    let convected_moment = (tensor_moment_rate - grad * agg.tensor_moment) * mass;
    let rhs_full = src.moment_external - src.moment_internal + reynolds * mass;
    let row_scale = [
        kdot_scale,
        moment_scale,
        (grad * agg.tensor_moment).norm() * mass,
        reynolds.norm() * mass,
    ];
    let tensor_moment_full = rel_s((convected_moment - rhs_full).norm(), &row_scale);
    let tensor_moment_sym = rel_s((convected_moment.sym() - rhs_full.sym()).norm(), &row_scale);
    let tensor_moment_skw = rel_s(
        (convected_moment.skw() - src.moment_external.skw()).norm(),
        &row_scale,
    );

    // second mass moment evolution
    let shaped = agg.euler_inertia * grad.transpose() + grad * agg.euler_inertia;
    let inertia_evolution = rel_s((inertia_rate - shaped).norm(), &[ydot_scale, shaped.norm()]);

    // Reynolds tensor evolution
    let convected_reynolds = (reynolds_rate + grad * reynolds + reynolds * grad.transpose()) * mass;
    let stir = src.stir_external - src.stir_internal;
    let reynolds_evolution = rel_s(
        (convected_reynolds - stir).norm(),
        &[
            hdot_scale,
            stir_scale,
            (grad * reynolds).norm() * 2.0 * mass,
            stir.norm(),
        ],
    );

    // power identities
    let ext_lhs = src.moment_external.ddot(&grad.transpose()) + 0.5 * src.stir_external.trace();
    let power_external = rel_s(
        ext_lhs - power_ext,
        &[ext_lhs, power_ext, shuffle_power_scale],
    );
    let int_lhs = -(src.moment_internal.ddot(&grad.transpose()) + 0.5 * src.stir_internal.trace());
    let power_internal = rel_s(
        int_lhs - power_int,
        &[int_lhs, power_int, shuffle_power_scale],
    );

    // scalar kinetic energy theorem
    let scalar_rhs = agg.velocity.dot(src.force)
        + (src.moment_external - src.moment_internal).ddot(&grad.transpose())
        + 0.5 * (src.stir_external - src.stir_internal).trace();
    let energy_scalar = rel_s(
        kinetic_rate_total - scalar_rhs,
        &[kinetic_rate_total, scalar_rhs, full_power_scale],
    );

    // tensor kinetic energy theorem
    let tensor_rhs =
        (agg.velocity.outer(src.force) + grad * (src.moment_external - src.moment_internal)).sym()
            + stir * 0.5;
    let energy_tensor = rel_s(
        (energy_rate_total - tensor_rhs).norm(),
        &[
            energy_rate_total.norm(),
            tensor_rhs.norm(),
            full_power_scale,
        ],
    );

    // reduced theorem for the gross energy tensor:
    // μ (d/dt)(½v⊗v + ½BYBᵀ) = sym[v⊗f + B(M − A + μH)]
    let gross_rate =
        (accel_center.outer(agg.velocity) + grad_rate * agg.euler_inertia * grad.transpose()).sym()
            + grad * inertia_rate * grad.transpose() * 0.5;
    let reduced_rhs = (agg.velocity.outer(src.force)
        + grad * (src.moment_external - src.moment_internal + reynolds * mass))
        .sym();
    let energy_reduced = rel_s(
        (gross_rate * mass - reduced_rhs).norm(),
        &[
            mass * accel_center.norm() * agg.velocity.norm(),
            mass * (grad_rate * agg.euler_inertia * grad.transpose()).norm(),
            mass * (grad * inertia_rate * grad.transpose()).norm(),
            reduced_rhs.norm(),
            moment_scale * grad.norm(),
            mass * reynolds.norm() * grad.norm(),
        ],
    );

    // energy-tensor evolution with the conservative internal potential folded in
    let (_, u_int) = potential_at(&positions, &masses, models);
    let (_, u_int_rate) = potential_rates(&positions, &velocities, &masses, models);
    let phi = -u_int / mass;
    let phi_rate = -u_int_rate / mass;
    let energy = reynolds * 0.5 + Ten3::identity() * (phi / 3.0);
    let energy_rate = reynolds_rate * 0.5 + Ten3::identity() * (phi_rate / 3.0);
    let adjusted_stir = src.stir_internal
        - Ten3::identity() * (2.0 / 3.0 * mass * phi_rate)
        - grad.sym() * (4.0 / 3.0 * mass * phi);
    let lhs_e = (energy_rate + grad * energy + energy * grad.transpose()) * mass;
    let rhs_e = (src.stir_external - adjusted_stir) * 0.5;
    let energy_with_potential = rel_s(
        (lhs_e - rhs_e).norm(),
        &[
            0.5 * hdot_scale,
            stir_scale,
            mass * (phi_rate.abs() + phi.abs() * grad.norm()),
            mass * (grad * energy).norm() * 2.0,
            rhs_e.norm(),
        ],
    );

    Ok(BalanceReport {
        linear_momentum,
        moment_of_momentum,
        tensor_moment_sym,
        tensor_moment_skw,
        tensor_moment_full,
        inertia_evolution,
        reynolds_evolution,
        power_external,
        power_internal,
        energy_scalar,
        energy_tensor,
        energy_reduced,
        energy_with_potential,
    })
}

/// Relative deviations between the assembled source tensors and their
/// potential-gradient expressions, evaluated by central finite differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialReport {
    /// Internal tensor moment against the shape gradient of the internal potential.
    pub internal_moment_shape: f64,
    /// Internal tensor moment against the metric (right Cauchy–Green) gradient.
    pub internal_moment_metric: f64,
    /// External tensor moment against the shape gradient of the external potential.
    pub external_moment_shape: f64,
    /// Resultant force against the position gradient of the external potential.
    pub force_gradient: f64,
    /// External stir against the shuffle gradient of the external potential.
    pub stir_external: f64,
    /// Internal stir against the shuffle gradient of the internal potential.
    pub stir_internal: f64,
}

impl PotentialReport {
    pub fn max(&self) -> f64 {
        [
            self.internal_moment_shape,
            self.internal_moment_metric,
            self.external_moment_shape,
            self.force_gradient,
            self.stir_external,
            self.stir_internal,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

const FD_STEP: f64 = 1e-6;

/// Compare the definitional source tensors against the potential-derived
/// expressions. Rejects dissipative models: the comparison only makes sense
/// when every force descends from a potential.
pub fn potential_consistency(
    cloud: &ParticleCloud,
    models: &[ForceModel],
) -> Result<PotentialReport> {
    validate_models(models, cloud.len())?;
    if models.iter().any(|m| m.is_dissipative()) {
        return Err(Error::InvalidInput(
            "potential comparison requires conservative models (no damping)".into(),
        ));
    }

    let forces = evaluate_forces(cloud, models)?;
    let fit = affine_fit(cloud, None)?;
    let src = assemble_sources(cloud, &fit, &forces);
    let agg = &fit.aggregates;
    let masses: Vec<f64> = cloud.particles().iter().map(|p| p.mass).collect();
    let offsets: Vec<Vec3> = cloud
        .particles()
        .iter()
        .map(|p| p.position - agg.center)
        .collect();

    // positions as a function of the shape applied to the frozen offsets
    let positions_for =
        |shape: &Ten3| -> Vec<Vec3> { offsets.iter().map(|&s| agg.center + *shape * s).collect() };
    let u_int_of_shape =
        |shape: &Ten3| -> f64 { potential_at(&positions_for(shape), &masses, models).1 };
    let u_ext_of_shape =
        |shape: &Ten3| -> f64 { potential_at(&positions_for(shape), &masses, models).0 };

    // gradient with respect to the shape entries, by central differences
    let shape_gradient = |u: &dyn Fn(&Ten3) -> f64| -> Ten3 {
        let mut g = Ten3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let mut hi = Ten3::identity();
                let mut lo = Ten3::identity();
                hi.set(i, j, hi.get(i, j) + FD_STEP);
                lo.set(i, j, lo.get(i, j) - FD_STEP);
                g.set(i, j, (u(&hi) - u(&lo)) / (2.0 * FD_STEP));
            }
        }
        g
    };

    // With forces written as minus the potential gradient, the internal tensor
    // moment equals (∂U_int/∂G) Gᵀ at G = I, and likewise 2 G (∂U_int/∂C) Gᵀ
    // through the metric C = GᵀG.
    let grad_int = shape_gradient(&|s| u_int_of_shape(s));
    let moment_from_shape = grad_int; // Gᵀ = I at the evaluation point
    let internal_moment_shape = rel_t(
        src.moment_internal - moment_from_shape,
        &[src.moment_internal, moment_from_shape],
    );

    let u_int_of_metric = |metric: &Ten3| -> f64 {
        // springs see only pair distances |G Δs| = sqrt(Δs · C Δs)
        let mut u = 0.0;
        for model in models {
            if let ForceModel::PairSpring {
                pairs,
                stiffness,
                rest_length,
                ..
            } = model
            {
                for &[i, j] in pairs {
                    let ds = offsets[j] - offsets[i];
                    let r = ds.dot(*metric * ds).max(0.0).sqrt();
                    let stretch = r - rest_length;
                    u += 0.5 * stiffness * stretch * stretch;
                }
            }
        }
        u
    };
    let mut metric_gradient = Ten3::ZERO;
    for i in 0..3 {
        for j in 0..3 {
            let mut hi = Ten3::identity();
            let mut lo = Ten3::identity();
            hi.set(i, j, hi.get(i, j) + FD_STEP);
            lo.set(i, j, lo.get(i, j) - FD_STEP);
            metric_gradient.set(
                i,
                j,
                (u_int_of_metric(&hi) - u_int_of_metric(&lo)) / (2.0 * FD_STEP),
            );
        }
    }
    let moment_from_metric = metric_gradient * 2.0;
    let internal_moment_metric = rel_t(
        src.moment_internal - moment_from_metric,
        &[src.moment_internal, moment_from_metric],
    );

    // external moment: the shape gradient of −U_ext reproduces the transpose
    let grad_ext = shape_gradient(&|s| u_ext_of_shape(s));
    let external_from_shape = -grad_ext.transpose();
    let external_moment_shape = rel_t(
        src.moment_external - external_from_shape,
        &[src.moment_external, external_from_shape],
    );

    // resultant force against the centre gradient of −U_ext
    let u_ext_of_center = |d: Vec3| -> f64 {
        let moved: Vec<Vec3> = cloud.particles().iter().map(|p| p.position + d).collect();
        potential_at(&moved, &masses, models).0
    };
    let mut force_fd = Vec3::ZERO;
    for axis in 0..3 {
        let mut e = [0.0; 3];
        e[axis] = FD_STEP;
        let d: Vec3 = e.into();
        let val = -(u_ext_of_center(d) - u_ext_of_center(-d)) / (2.0 * FD_STEP);
        match axis {
            0 => force_fd.x = val,
            1 => force_fd.y = val,
            _ => force_fd.z = val,
        }
    }
    let force_gradient = rel_v(src.force - force_fd, &[src.force, force_fd]);

    // stir tensors: gradients with respect to the shuffles, contracted with
    // the shuffle rates
    let u_of_shuffles = |which_int: bool, sh: &[Vec3]| -> f64 {
        let pos: Vec<Vec3> = sh.iter().map(|&s| agg.center + s).collect();
        let (e, i) = potential_at(&pos, &masses, models);
        if which_int {
            i
        } else {
            e
        }
    };
    let stir_from_potential = |which_int: bool| -> Ten3 {
        let mut total = Ten3::ZERO;
        let mut sh: Vec<Vec3> = offsets.clone();
        for i in 0..sh.len() {
            let mut grad_i = Vec3::ZERO;
            for axis in 0..3 {
                let mut e = [0.0; 3];
                e[axis] = FD_STEP;
                let d: Vec3 = e.into();
                let orig = sh[i];
                sh[i] = orig + d;
                let up = u_of_shuffles(which_int, &sh);
                sh[i] = orig - d;
                let dn = u_of_shuffles(which_int, &sh);
                sh[i] = orig;
                let val = (up - dn) / (2.0 * FD_STEP);
                match axis {
                    0 => grad_i.x = val,
                    1 => grad_i.y = val,
                    _ => grad_i.z = val,
                }
            }
            total += fit.shuffle_rates[i].outer(grad_i);
        }
        total.sym() * 2.0
    };
    // external: S = 2 sym Σ ṡ ⊗ (−∂U_ext/∂s); internal sign flips once more
    let stir_ext_fd = -stir_from_potential(false);
    let stir_external = rel_t(
        src.stir_external - stir_ext_fd,
        &[src.stir_external, stir_ext_fd],
    );
    let stir_int_fd = stir_from_potential(true);
    let stir_internal = rel_t(
        src.stir_internal - stir_int_fd,
        &[src.stir_internal, stir_int_fd],
    );

    Ok(PotentialReport {
        internal_moment_shape,
        internal_moment_metric,
        external_moment_shape,
        force_gradient,
        stir_external,
        stir_internal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsys::{sample_cloud, Particle, ParticleCloud, SamplerParams};

    fn unit(m: f64, p: [f64; 3], v: [f64; 3]) -> Particle {
        Particle {
            mass: m,
            position: p.into(),
            velocity: v.into(),
        }
    }

    fn spring_gravity_models() -> Vec<ForceModel> {
        vec![
            ForceModel::UniformField {
                acceleration: Vec3::new(0.0, 0.0, -1.5),
            },
            ForceModel::PairSpring {
                pairs: vec![[0, 1], [1, 2], [2, 3], [0, 2], [1, 3]],
                stiffness: 2.0,
                rest_length: 0.8,
                damping: 0.0,
            },
        ]
    }

    #[test]
    fn all_residuals_vanish_at_random_states() {
        for seed in 0..100u64 {
            let cloud = sample_cloud(&SamplerParams::new(4 + (seed % 5) as usize), seed).unwrap();
            let report = verify_balances(&cloud, &spring_gravity_models()).unwrap();
            assert!(
                report.max() < 1e-10,
                "seed {seed}: {:?}",
                report.entries().iter().max_by(|a, b| a.1.total_cmp(&b.1))
            );
        }
    }

    #[test]
    fn residuals_with_damping_still_vanish() {
        let models = vec![ForceModel::PairSpring {
            pairs: vec![[0, 1], [1, 2], [0, 2]],
            stiffness: 1.5,
            rest_length: 0.5,
            damping: 0.7,
        }];
        for seed in 100..120u64 {
            let cloud = sample_cloud(&SamplerParams::new(5), seed).unwrap();
            let report = verify_balances(&cloud, &models).unwrap();
            assert!(report.max() < 1e-10, "seed {seed}: {report:?}");
        }
    }

    #[test]
    fn residuals_with_a_trap_exercise_the_external_rows() {
        // an anisotropic off-centre trap gives non-trivial external moment
        // and stir, unlike the uniform field whose sources vanish
        let models = vec![
            ForceModel::QuadraticTrap {
                stiffness: Ten3::new([[1.0, 0.2, 0.0], [0.2, 2.0, 0.1], [0.0, 0.1, 0.5]]),
                center: Vec3::new(0.3, -0.4, 0.1),
            },
            ForceModel::PairSpring {
                pairs: vec![[0, 1], [2, 3], [4, 5]],
                stiffness: 1.0,
                rest_length: 0.4,
                damping: 0.2,
            },
        ];
        for seed in 200..230u64 {
            let cloud = sample_cloud(&SamplerParams::new(6), seed).unwrap();
            let forces = evaluate_forces(&cloud, &models).unwrap();
            let fit = affine_fit(&cloud, None).unwrap();
            let src = assemble_sources(&cloud, &fit, &forces);
            assert!(
                src.moment_external.norm() > 1e-3,
                "seed {seed}: trivial moment"
            );
            assert!(src.stir_external.norm() > 1e-3, "seed {seed}: trivial stir");
            let report = verify_balances(&cloud, &models).unwrap();
            assert!(report.max() < 1e-10, "seed {seed}: {report:?}");
        }
    }

    #[test]
    fn resting_cloud_reports_exact_zeros() {
        let cloud = ParticleCloud::new(vec![
            unit(1.0, [1.0, 0.0, 0.0], [0.0; 3]),
            unit(1.0, [-1.0, 0.5, 0.0], [0.0; 3]),
            unit(2.0, [0.0, -0.5, 1.0], [0.0; 3]),
        ])
        .unwrap();
        let report = verify_balances(&cloud, &[]).unwrap();
        assert_eq!(report.max(), 0.0);
    }

    #[test]
    fn rigid_rotation_without_forces_balances() {
        let spin = Vec3::new(0.0, 0.0, 2.0);
        let mut particles = Vec::new();
        for &p in &[
            [1.0, 0.0, 0.2],
            [-1.0, 0.0, -0.2],
            [0.0, 1.5, 0.0],
            [0.0, -1.5, 0.0],
        ] {
            let pos: Vec3 = p.into();
            particles.push(Particle {
                mass: 1.0,
                position: pos,
                velocity: spin.cross(pos),
            });
        }
        let cloud = ParticleCloud::new(particles).unwrap();
        let report = verify_balances(&cloud, &[]).unwrap();
        assert!(report.max() < 1e-12, "{report:?}");
        // the agitation row degenerates to 0 = 0
        assert!(report.reynolds_evolution < 1e-12);
    }

    #[test]
    fn potential_comparisons_for_a_spring_pair() {
        let cloud = ParticleCloud::new(vec![
            unit(1.0, [1.0, 0.0, 0.0], [0.1, 0.4, 0.0]),
            unit(1.0, [-1.0, 0.0, 0.0], [-0.3, 0.2, 0.1]),
        ])
        .unwrap();
        let models = vec![ForceModel::PairSpring {
            pairs: vec![[0, 1]],
            stiffness: 1.0,
            rest_length: 1.0,
            damping: 0.0,
        }];
        let report = potential_consistency(&cloud, &models).unwrap();
        assert!(report.internal_moment_shape < 1e-6, "{report:?}");
        assert!(report.internal_moment_metric < 1e-6, "{report:?}");
        assert!(report.stir_internal < 1e-6, "{report:?}");
    }

    #[test]
    fn zero_stiffness_comparands_are_exactly_zero() {
        let cloud = sample_cloud(&SamplerParams::new(4), 7).unwrap();
        let models = vec![ForceModel::PairSpring {
            pairs: vec![[0, 1], [2, 3]],
            stiffness: 0.0,
            rest_length: 1.0,
            damping: 0.0,
        }];
        let report = potential_consistency(&cloud, &models).unwrap();
        assert_eq!(report.internal_moment_shape, 0.0);
        assert_eq!(report.internal_moment_metric, 0.0);
        assert_eq!(report.stir_internal, 0.0);
    }

    #[test]
    fn trap_only_has_no_internal_sources() {
        let cloud = sample_cloud(&SamplerParams::new(6), 3).unwrap();
        let models = vec![ForceModel::QuadraticTrap {
            stiffness: Ten3::diag(1.0, 2.0, 0.5),
            center: Vec3::new(0.1, 0.0, -0.2),
        }];
        let forces = evaluate_forces(&cloud, &models).unwrap();
        let fit = crate::pointsys::affine_fit(&cloud, None).unwrap();
        let src = assemble_sources(&cloud, &fit, &forces);
        assert_eq!(src.moment_internal, Ten3::ZERO);
        assert_eq!(src.stir_internal, Ten3::ZERO);
        let report = potential_consistency(&cloud, &models).unwrap();
        assert!(report.stir_external < 1e-6, "{report:?}");
        assert!(report.external_moment_shape < 1e-6, "{report:?}");
        assert!(report.force_gradient < 1e-6, "{report:?}");
    }

    #[test]
    fn damped_models_are_rejected() {
        let cloud = sample_cloud(&SamplerParams::new(3), 1).unwrap();
        let models = vec![ForceModel::PairSpring {
            pairs: vec![[0, 1]],
            stiffness: 1.0,
            rest_length: 0.0,
            damping: 0.1,
        }];
        assert!(matches!(
            potential_consistency(&cloud, &models),
            Err(Error::InvalidInput(_))
        ));
    }
}
