//! Direct integration of the per-particle Newton equations with a classical
//! fixed-step fourth-order scheme. The trajectory doubles as the ground-truth
//! oracle for the aggregate balance laws, so every recorded step carries the
//! full diagnostic block.

use super::{
    balance::balance_report, forces_at, potential_at, validate_models, ForceModel, Forces,
};
use crate::csvfmt;
use crate::error::{Error, Result};
use crate::pointsys::{affine_fit, AggregateState, Entrainment, ParticleCloud};
use crate::smallalg::{Ten3, Vec3};

use super::BalanceReport;

/// Everything worth knowing about one recorded state.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub aggregates: AggregateState,
    /// Fitted affine velocity gradient.
    pub velocity_gradient: Ten3,
    /// Reynolds tensor of agitation, per unit mass.
    pub reynolds: Ten3,
    pub balance: BalanceReport,
    /// Total kinetic energy.
    pub kinetic: f64,
    /// Total potential energy of the conservative parts.
    pub potential: f64,
    /// Relative defect of the second-moment rate against twice the symmetric
    /// tensor moment.
    pub inertia_rate_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbodyStep {
    pub time: f64,
    pub cloud: ParticleCloud,
    pub diag: StepDiagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbodyTrajectory {
    pub dt: f64,
    pub seed: u64,
    pub steps: Vec<NbodyStep>,
}

impl NbodyTrajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.time)
    }

    /// Total energy series (kinetic plus conservative potential).
    pub fn energy_series(&self) -> Vec<f64> {
        self.steps
            .iter()
            .map(|s| s.diag.kinetic + s.diag.potential)
            .collect()
    }

    /// Largest relative drift of the total energy against the initial value.
    pub fn energy_drift(&self) -> f64 {
        let series = self.energy_series();
        let e0 = series[0];
        let scale = e0.abs().max(1e-30);
        series
            .iter()
            .map(|e| (e - e0).abs() / scale)
            .fold(0.0, f64::max)
    }

    /// Worst balance residual over the whole run.
    pub fn max_balance_residual(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.diag.balance.max())
            .fold(0.0, f64::max)
    }

    /// One row per recorded step: time, aggregate fields, residual norms.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = vec!["t".into()];
        for name in ["x", "v", "k"] {
            for axis in 1..=3 {
                header.push(format!("{name}{axis}"));
            }
        }
        for name in ["y", "kt", "b", "h"] {
            for i in 1..=3 {
                for j in 1..=3 {
                    header.push(format!("{name}{i}{j}"));
                }
            }
        }
        header.push("kappa".into());
        header.push("energy_kinetic".into());
        header.push("energy_potential".into());
        for (name, _) in BalanceReport::default().entries() {
            header.push(format!("res_{name}"));
        }
        header.push("res_inertia_rate".into());

        let mut out = csvfmt::record(header.iter().map(|s| s.as_str()));
        out.push('\n');
        for step in &self.steps {
            let d = &step.diag;
            let mut row: Vec<String> = vec![csvfmt::num(step.time)];
            for v in [
                d.aggregates.center,
                d.aggregates.velocity,
                d.aggregates.moment_of_momentum,
            ] {
                row.extend(v.as_array().iter().map(|&c| csvfmt::num(c)));
            }
            for t in [
                d.aggregates.euler_inertia,
                d.aggregates.tensor_moment,
                d.velocity_gradient,
                d.reynolds,
            ] {
                for r in t.as_rows() {
                    row.extend(r.iter().map(|&c| csvfmt::num(c)));
                }
            }
            row.push(csvfmt::num(d.aggregates.specific_kinetic_energy));
            row.push(csvfmt::num(d.kinetic));
            row.push(csvfmt::num(d.potential));
            for (_, value) in d.balance.entries() {
                row.push(csvfmt::num(value));
            }
            row.push(csvfmt::num(d.inertia_rate_defect));
            out.push_str(&csvfmt::record(row.iter().map(|s| s.as_str())));
            out.push('\n');
        }
        out
    }
}

fn diagnostics(
    cloud: &ParticleCloud,
    models: &[ForceModel],
    forces: &Forces,
) -> Result<StepDiagnostics> {
    let fit = affine_fit(cloud, None)?;
    let Entrainment::Affine { velocity_gradient } = fit.entrainment else {
        unreachable!()
    };
    let agg = fit.aggregates;
    let balance = balance_report(cloud, models, forces)?;

    // independent assembly of the second-moment rate
    let mut rate = Ten3::ZERO;
    for p in cloud.particles() {
        let y = p.position - agg.center;
        let ydot = p.velocity - agg.velocity;
        rate += (ydot.outer(y) + y.outer(ydot)) * p.mass;
    }
    rate = rate * (1.0 / agg.mass);
    let twice_sym = agg.tensor_moment.sym() * 2.0;
    let scale = rate.norm().max(twice_sym.norm());
    let inertia_rate_defect = if scale == 0.0 {
        0.0
    } else {
        (rate - twice_sym).norm() / scale
    };

    let positions: Vec<Vec3> = cloud.particles().iter().map(|p| p.position).collect();
    let masses: Vec<f64> = cloud.particles().iter().map(|p| p.mass).collect();
    let (u_ext, u_int) = potential_at(&positions, &masses, models);

    Ok(StepDiagnostics {
        aggregates: agg,
        velocity_gradient,
        reynolds: fit.reynolds,
        balance,
        kinetic: agg.mass * agg.specific_kinetic_energy,
        potential: u_ext + u_int,
        inertia_rate_defect,
    })
}

/// Integrate the cloud under the given models with the classical four-stage
/// fixed-step scheme, recording every step. Deterministic; the seed is kept
/// only as provenance for samplers upstream.
pub fn simulate_nbody(
    cloud: &ParticleCloud,
    models: &[ForceModel],
    dt: f64,
    steps: usize,
    seed: u64,
) -> Result<NbodyTrajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be at least 1".into()));
    }
    validate_models(models, cloud.len())?;

    let masses: Vec<f64> = cloud.particles().iter().map(|p| p.mass).collect();
    let mut positions: Vec<Vec3> = cloud.particles().iter().map(|p| p.position).collect();
    let mut velocities: Vec<Vec3> = cloud.particles().iter().map(|p| p.velocity).collect();
    let n = masses.len();

    let accel = |pos: &[Vec3], vel: &[Vec3]| -> Result<Vec<Vec3>> {
        let (ext, int) = forces_at(pos, vel, &masses, models)?;
        Ok((0..n)
            .map(|i| (ext[i] + int[i]) * (1.0 / masses[i]))
            .collect())
    };

    let forces_of = |c: &ParticleCloud| -> Result<Forces> {
        let pos: Vec<Vec3> = c.particles().iter().map(|p| p.position).collect();
        let vel: Vec<Vec3> = c.particles().iter().map(|p| p.velocity).collect();
        let (external, internal) = forces_at(&pos, &vel, &masses, models)?;
        let accelerations = (0..n)
            .map(|i| (external[i] + internal[i]) * (1.0 / masses[i]))
            .collect();
        Ok(Forces {
            external,
            internal,
            accelerations,
        })
    };

    let mut record = Vec::with_capacity(steps + 1);
    let f0 = forces_of(cloud)?;
    record.push(NbodyStep {
        time: 0.0,
        cloud: cloud.clone(),
        diag: diagnostics(cloud, models, &f0)?,
    });

    let mut scratch_p = vec![Vec3::ZERO; n];
    let mut scratch_v = vec![Vec3::ZERO; n];
    for step in 1..=steps {
        let a1 = accel(&positions, &velocities)?;
        let (k1_p, k1_v) = (velocities.clone(), a1);

        for i in 0..n {
            scratch_p[i] = positions[i] + k1_p[i] * (dt / 2.0);
            scratch_v[i] = velocities[i] + k1_v[i] * (dt / 2.0);
        }
        let a2 = accel(&scratch_p, &scratch_v)?;
        let (k2_p, k2_v) = (scratch_v.clone(), a2);

        for i in 0..n {
            scratch_p[i] = positions[i] + k2_p[i] * (dt / 2.0);
            scratch_v[i] = velocities[i] + k2_v[i] * (dt / 2.0);
        }
        let a3 = accel(&scratch_p, &scratch_v)?;
        let (k3_p, k3_v) = (scratch_v.clone(), a3);

        for i in 0..n {
            scratch_p[i] = positions[i] + k3_p[i] * dt;
            scratch_v[i] = velocities[i] + k3_v[i] * dt;
        }
        let a4 = accel(&scratch_p, &scratch_v)?;
        let (k4_p, k4_v) = (scratch_v.clone(), a4);

        for i in 0..n {
            positions[i] += (k1_p[i] + (k2_p[i] + k3_p[i]) * 2.0 + k4_p[i]) * (dt / 6.0);
            velocities[i] += (k1_v[i] + (k2_v[i] + k3_v[i]) * 2.0 + k4_v[i]) * (dt / 6.0);
        }

        if positions.iter().any(|p| !p.is_finite()) || velocities.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step });
        }

        let current = cloud.with_state(&positions, &velocities)?;
        let forces = forces_of(&current)?;
        record.push(NbodyStep {
            time: step as f64 * dt,
            diag: diagnostics(&current, models, &forces)?,
            cloud: current,
        });
    }

    Ok(NbodyTrajectory {
        dt,
        seed,
        steps: record,
    })
}
