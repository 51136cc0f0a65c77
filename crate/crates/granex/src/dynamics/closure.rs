//! First-order evolution of the aggregate state under user-supplied
//! constitutive closures, and reconstruction of the background placement
//! (rotation or gross shape) from a fitted rate series.

use crate::csvfmt;
use crate::error::{Error, Result};
use crate::smallalg::{polar_orthonormalize, ricci, solve_min_norm_ten, sym_eigen, Ten3, Vec3};

/// Arguments handed to the constitutive maps: the kinetic circumstances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureState {
    pub velocity: Vec3,
    pub velocity_gradient: Ten3,
    pub euler_inertia: Ten3,
    pub reynolds: Ten3,
}

pub type VecClosure = Box<dyn Fn(&ClosureState) -> Vec3>;
pub type TenClosure = Box<dyn Fn(&ClosureState) -> Ten3>;

/// Constitutive maps closing the aggregate evolution system.
///
/// The internal moment and both stir maps must return symmetric tensors;
/// the integrator checks this at every evaluation. With `pseudo_rigid` set
/// the agitation is pinned to zero and its evolution row is dropped.
pub struct ClosureSpec {
    /// Total mass of the body.
    pub mass: f64,
    pub pseudo_rigid: bool,
    pub force: VecClosure,
    pub moment: TenClosure,
    pub internal_moment: TenClosure,
    pub stir_external: TenClosure,
    pub stir_internal: TenClosure,
}

impl ClosureSpec {
    /// All sources zero.
    pub fn zero(mass: f64) -> Self {
        ClosureSpec {
            mass,
            pseudo_rigid: false,
            force: Box::new(|_| Vec3::ZERO),
            moment: Box::new(|_| Ten3::ZERO),
            internal_moment: Box::new(|_| Ten3::ZERO),
            stir_external: Box::new(|_| Ten3::ZERO),
            stir_internal: Box::new(|_| Ten3::ZERO),
        }
    }

    /// Internal moment balancing the agitation source exactly, everything
    /// else zero. Decouples the first three rows from the agitation row.
    pub fn isotropic_agitation(mass: f64) -> Self {
        ClosureSpec {
            mass,
            pseudo_rigid: false,
            force: Box::new(|_| Vec3::ZERO),
            moment: Box::new(|_| Ten3::ZERO),
            internal_moment: Box::new(move |s| s.reynolds * mass),
            stir_external: Box::new(|_| Ten3::ZERO),
            stir_internal: Box::new(|_| Ten3::ZERO),
        }
    }

    pub fn with_pseudo_rigid(mut self, flag: bool) -> Self {
        self.pseudo_rigid = flag;
        self
    }
}

/// Initial aggregate state for a closure run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureInit {
    pub center: Vec3,
    pub velocity: Vec3,
    pub shape: Ten3,
    pub velocity_gradient: Ten3,
    pub euler_inertia: Ten3,
    pub reynolds: Ten3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureStep {
    pub time: f64,
    pub center: Vec3,
    pub velocity: Vec3,
    pub shape: Ten3,
    pub velocity_gradient: Ten3,
    pub euler_inertia: Ten3,
    pub reynolds: Ten3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureTrajectory {
    pub dt: f64,
    pub steps: Vec<ClosureStep>,
}

impl ClosureTrajectory {
    /// One row per step: time, then the flattened aggregate fields.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = vec!["t".into()];
        for name in ["x", "v"] {
            for axis in 1..=3 {
                header.push(format!("{name}{axis}"));
            }
        }
        for name in ["g", "b", "y", "h"] {
            for i in 1..=3 {
                for j in 1..=3 {
                    header.push(format!("{name}{i}{j}"));
                }
            }
        }
        let mut out = csvfmt::record(header.iter().map(|s| s.as_str()));
        out.push('\n');
        for s in &self.steps {
            let mut row: Vec<String> = vec![csvfmt::num(s.time)];
            for v in [s.center, s.velocity] {
                row.extend(v.as_array().iter().map(|&c| csvfmt::num(c)));
            }
            for t in [s.shape, s.velocity_gradient, s.euler_inertia, s.reynolds] {
                for r in t.as_rows() {
                    row.extend(r.iter().map(|&c| csvfmt::num(c)));
                }
            }
            out.push_str(&csvfmt::record(row.iter().map(|s| s.as_str())));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Vars {
    x: Vec3,
    v: Vec3,
    g: Ten3,
    b: Ten3,
    y: Ten3,
    h: Ten3,
}

impl Vars {
    fn axpy(&self, scale: f64, d: &Vars) -> Vars {
        Vars {
            x: self.x + d.x * scale,
            v: self.v + d.v * scale,
            g: self.g + d.g * scale,
            b: self.b + d.b * scale,
            y: self.y + d.y * scale,
            h: self.h + d.h * scale,
        }
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.v.is_finite()
            && self.g.is_finite()
            && self.b.is_finite()
            && self.y.is_finite()
            && self.h.is_finite()
    }
}

fn check_symmetric(name: &str, t: &Ten3) -> Result<()> {
    if !t.is_symmetric(1e-9) {
        return Err(Error::ContractViolation(format!(
            "{name} closure returned a non-symmetric tensor"
        )));
    }
    Ok(())
}

fn check_psd(name: &str, t: &Ten3) -> Result<()> {
    if !t.is_symmetric(1e-9) {
        return Err(Error::InvalidInput(format!("{name} must be symmetric")));
    }
    let (vals, _) = sym_eigen(t);
    let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    if vals.iter().any(|&v| v < -1e-10 * scale) {
        return Err(Error::InvalidInput(format!(
            "{name} must be positive semi-definite"
        )));
    }
    Ok(())
}

fn rhs(spec: &ClosureSpec, vars: &Vars) -> Result<Vars> {
    let state = ClosureState {
        velocity: vars.v,
        velocity_gradient: vars.b,
        euler_inertia: vars.y,
        reynolds: vars.h,
    };
    let force = (spec.force)(&state);
    let moment = (spec.moment)(&state);
    let internal = (spec.internal_moment)(&state);
    let stir_ext = (spec.stir_external)(&state);
    let stir_int = (spec.stir_internal)(&state);
    check_symmetric("internal moment", &internal)?;
    check_symmetric("external stir", &stir_ext)?;
    check_symmetric("internal stir", &stir_int)?;

    let b = vars.b;
    let y = vars.y;
    let h = vars.h;
    let inv_mass = 1.0 / spec.mass;

    // tensor-moment row with K = Y Bᵀ reduces to Y Ḃᵀ = (M − A)/μ + H − Y (Bᵀ)²
    let bt = b.transpose();
    let target = (moment - internal) * inv_mass + h - y * (bt * bt);
    let b_rate = solve_min_norm_ten(&y, &target)?.transpose();

    let h_rate = if spec.pseudo_rigid {
        Ten3::ZERO
    } else {
        (stir_ext - stir_int) * inv_mass - b * h - h * bt
    };

    Ok(Vars {
        x: vars.v,
        v: force * inv_mass,
        g: b * vars.g,
        b: b_rate,
        y: y * bt + b * y,
        h: h_rate,
    })
}

/// Integrate the closed aggregate system with the fixed-step fourth-order
/// scheme. In pseudo-rigid mode the agitation tensor is pinned to zero and
/// only the reduced system evolves.
pub fn closure_integrate(
    spec: &ClosureSpec,
    init: &ClosureInit,
    dt: f64,
    steps: usize,
) -> Result<ClosureTrajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    if !(spec.mass.is_finite() && spec.mass > 0.0) {
        return Err(Error::InvalidInput("closure mass must be positive".into()));
    }
    check_psd("initial second moment", &init.euler_inertia)?;
    check_psd("initial Reynolds tensor", &init.reynolds)?;
    let det = init.shape.det();
    if !(det.is_finite() && det > 0.0) {
        return Err(Error::InvalidInput(
            "initial shape must have positive determinant".into(),
        ));
    }

    let mut vars = Vars {
        x: init.center,
        v: init.velocity,
        g: init.shape,
        b: init.velocity_gradient,
        y: init.euler_inertia.sym(),
        h: if spec.pseudo_rigid {
            Ten3::ZERO
        } else {
            init.reynolds.sym()
        },
    };

    let snapshot = |time: f64, v: &Vars| ClosureStep {
        time,
        center: v.x,
        velocity: v.v,
        shape: v.g,
        velocity_gradient: v.b,
        euler_inertia: v.y,
        reynolds: v.h,
    };

    let mut record = Vec::with_capacity(steps + 1);
    record.push(snapshot(0.0, &vars));

    for step in 1..=steps {
        let k1 = rhs(spec, &vars)?;
        let k2 = rhs(spec, &vars.axpy(dt / 2.0, &k1))?;
        let k3 = rhs(spec, &vars.axpy(dt / 2.0, &k2))?;
        let k4 = rhs(spec, &vars.axpy(dt, &k3))?;

        let inc = k1.axpy(2.0, &k2).axpy(2.0, &k3).axpy(1.0, &k4);
        vars = vars.axpy(dt / 6.0, &inc);
        vars.y = vars.y.sym();
        vars.h = vars.h.sym();

        if !vars.is_finite() {
            return Err(Error::Divergence { step });
        }
        if vars.g.det() <= 0.0 {
            return Err(Error::Degenerate(format!(
                "shape determinant became non-positive at step {step}"
            )));
        }
        record.push(snapshot(step as f64 * dt, &vars));
    }

    Ok(ClosureTrajectory { dt, steps: record })
}

/// Linear interpolation of a sampled series at stage offset `c` in `[0, 1]`.
fn lerp_vec(series: &[Vec3], k: usize, c: f64) -> Vec3 {
    if c == 0.0 || k + 1 >= series.len() {
        series[k]
    } else {
        series[k] * (1.0 - c) + series[k + 1] * c
    }
}

fn lerp_ten(series: &[Ten3], k: usize, c: f64) -> Ten3 {
    if c == 0.0 || k + 1 >= series.len() {
        series[k]
    } else {
        series[k] * (1.0 - c) + series[k + 1] * c
    }
}

/// Reconstruct the rotation history from a spin series sampled on the grid.
/// Fourth-order steps with a polar re-orthonormalization after each one.
pub fn evolve_rotation(spins: &[Vec3], dt: f64) -> Result<Vec<Ten3>> {
    if spins.is_empty() {
        return Err(Error::InvalidInput("spin series must not be empty".into()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    let mut out = Vec::with_capacity(spins.len());
    let mut r = Ten3::identity();
    out.push(r);
    for k in 0..spins.len() - 1 {
        let f = |c: f64, m: &Ten3| -> Ten3 { ricci(lerp_vec(spins, k, c)) * *m };
        let k1 = f(0.0, &r);
        let k2 = f(0.5, &(r + k1 * (dt / 2.0)));
        let k3 = f(0.5, &(r + k2 * (dt / 2.0)));
        let k4 = f(1.0, &(r + k3 * dt));
        r += (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
        if !r.is_finite() {
            return Err(Error::Divergence { step: k + 1 });
        }
        r = polar_orthonormalize(&r);
        out.push(r);
    }
    Ok(out)
}

/// Reconstruct the gross shape history from a gradient series sampled on the
/// grid, monitoring the determinant.
pub fn evolve_shape(gradients: &[Ten3], dt: f64, shape0: Ten3) -> Result<Vec<Ten3>> {
    if gradients.is_empty() {
        return Err(Error::InvalidInput(
            "gradient series must not be empty".into(),
        ));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    if shape0.det() <= 0.0 {
        return Err(Error::InvalidInput(
            "initial shape must have positive determinant".into(),
        ));
    }
    let mut out = Vec::with_capacity(gradients.len());
    let mut g = shape0;
    out.push(g);
    for k in 0..gradients.len() - 1 {
        let f = |c: f64, m: &Ten3| -> Ten3 { lerp_ten(gradients, k, c) * *m };
        let k1 = f(0.0, &g);
        let k2 = f(0.5, &(g + k1 * (dt / 2.0)));
        let k3 = f(0.5, &(g + k2 * (dt / 2.0)));
        let k4 = f(1.0, &(g + k3 * dt));
        g += (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
        if !g.is_finite() {
            return Err(Error::Divergence { step: k + 1 });
        }
        if g.det() <= 0.0 {
            return Err(Error::Degenerate(format!(
                "shape determinant became non-positive at step {}",
                k + 1
            )));
        }
        out.push(g);
    }
    Ok(out)
}
