//! The agitation-energy distribution toolkit: a catalog of density families
//! on the non-dimensional energy axis (every member integrates to one with
//! unit first moment), generic re-normalization of arbitrary densities,
//! granular temperatures, histograms of particle data and the extended
//! canonical ensemble over rank-1 tensors.

mod dilog;
mod ensemble;
mod histogram;
mod quad;
mod roots;
mod temperature;

pub use dilog::dilog;
pub use ensemble::{EnsembleReport, ExtendedCanonical};
pub use histogram::Histogram;
pub use quad::{integrate, integrate_semi_alg, integrate_semi_exp};
pub use roots::{bose_fermi_defect, exponential_scale, solve_alpha, solve_bose_fermi};
pub use temperature::{theta, theta_w, theta_w_quadrature, TemperatureKind, TemperatureReport};

use crate::csvfmt;
use crate::error::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Absolute tolerance used for the moment integrals.
pub const QUAD_TOL: f64 = 1e-10;

/// How a density with unbounded support decays; picks the tail substitution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Exponential,
    Algebraic,
}

/// A density on the non-negative energy axis.
pub trait Density {
    /// Density value; zero outside the support.
    fn eval(&self, xi: f64) -> f64;

    /// Support interval; the upper end may be infinite.
    fn support(&self) -> (f64, f64);

    /// Tail class, consulted only for unbounded supports.
    fn tail(&self) -> Tail {
        Tail::Exponential
    }

    /// Derivative of the density. The default is a central difference;
    /// catalog members override it with the closed form.
    fn deriv(&self, xi: f64) -> f64 {
        let h = 1e-6 * xi.abs().max(1.0);
        (self.eval(xi + h) - self.eval(xi - h)) / (2.0 * h)
    }
}

/// Both moment integrals of a density over its support.
pub fn moments<D: Density + ?Sized>(density: &D) -> Result<(f64, f64)> {
    let (lo, hi) = density.support();
    let f0 = |x: f64| density.eval(x);
    let f1 = |x: f64| x * density.eval(x);
    if hi.is_finite() {
        Ok((
            quad::integrate(&f0, lo, hi, QUAD_TOL)?,
            quad::integrate(&f1, lo, hi, QUAD_TOL)?,
        ))
    } else {
        match density.tail() {
            Tail::Exponential => Ok((
                quad::integrate_semi_exp(&f0, lo, QUAD_TOL)?,
                quad::integrate_semi_exp(&f1, lo, QUAD_TOL)?,
            )),
            Tail::Algebraic => Ok((
                quad::integrate_semi_alg(&f0, lo, QUAD_TOL)?,
                quad::integrate_semi_alg(&f1, lo, QUAD_TOL)?,
            )),
        }
    }
}

/// The distribution catalog. Every variant satisfies both normalization
/// integrals on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    /// `e^{-ξ}` on the whole axis.
    Canonical,
    /// `24 (2+ξ)^{-4}` on the whole axis.
    PowerLaw,
    /// Constant plateau on `[edge, 2-edge]`, `edge ∈ [0, 1)`.
    PiecewiseConstant { edge: f64 },
    /// Linear ramp supported on `[0, endpoint]`, `endpoint ∈ [3/2, 3]`.
    PiecewiseLinear { endpoint: f64 },
    /// `scale · e^{-rate ξ}` on `[0, cutoff]` with the rate solved from the
    /// unit-mean condition; `cutoff > 1`.
    PiecewiseExponential { cutoff: f64, rate: f64, scale: f64 },
    /// Half-cosine modulation, `amplitude < π²/4`.
    Sinusoidal { amplitude: f64 },
    /// `[(1-e^{-rate})^{-1} e^{rate ξ} - 1]^{-1}` with the rate solved from
    /// the dilogarithm condition (negative-root family).
    BoseLike { rate: f64 },
    /// `[(e^{rate}-1)^{-1} e^{rate ξ} + 1]^{-1}` with the rate solved from
    /// the dilogarithm condition (positive-root family).
    FermiLike { rate: f64 },
}

impl DistributionSpec {
    pub fn canonical() -> Self {
        DistributionSpec::Canonical
    }

    pub fn power_law() -> Self {
        DistributionSpec::PowerLaw
    }

    pub fn piecewise_constant(edge: f64) -> Result<Self> {
        if !(edge.is_finite() && (0.0..1.0).contains(&edge)) {
            return Err(Error::InvalidInput(format!(
                "plateau edge must lie in [0, 1) (got {edge})"
            )));
        }
        Ok(DistributionSpec::PiecewiseConstant { edge })
    }

    pub fn piecewise_linear(endpoint: f64) -> Result<Self> {
        if !(endpoint.is_finite() && (1.5..=3.0).contains(&endpoint)) {
            return Err(Error::InvalidInput(format!(
                "ramp endpoint must lie in [3/2, 3] (got {endpoint})"
            )));
        }
        Ok(DistributionSpec::PiecewiseLinear { endpoint })
    }

    pub fn piecewise_exponential(cutoff: f64) -> Result<Self> {
        let rate = roots::solve_alpha(cutoff)?;
        let scale = roots::exponential_scale(rate, cutoff);
        Ok(DistributionSpec::PiecewiseExponential {
            cutoff,
            rate,
            scale,
        })
    }

    pub fn sinusoidal(amplitude: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude < PI * PI / 4.0) {
            return Err(Error::InvalidInput(format!(
                "sinusoidal amplitude must be below π²/4 (got {amplitude})"
            )));
        }
        Ok(DistributionSpec::Sinusoidal { amplitude })
    }

    pub fn bose_like() -> Self {
        let (bose, _) = roots::solve_bose_fermi();
        DistributionSpec::BoseLike { rate: -bose }
    }

    pub fn fermi_like() -> Self {
        let (_, fermi) = roots::solve_bose_fermi();
        DistributionSpec::FermiLike { rate: fermi }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistributionSpec::Canonical => "canonical",
            DistributionSpec::PowerLaw => "power_law",
            DistributionSpec::PiecewiseConstant { .. } => "piecewise_constant",
            DistributionSpec::PiecewiseLinear { .. } => "piecewise_linear",
            DistributionSpec::PiecewiseExponential { .. } => "piecewise_exponential",
            DistributionSpec::Sinusoidal { .. } => "sinusoidal",
            DistributionSpec::BoseLike { .. } => "bose_like",
            DistributionSpec::FermiLike { .. } => "fermi_like",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            DistributionSpec::Canonical | DistributionSpec::PowerLaw => vec![],
            DistributionSpec::PiecewiseConstant { edge } => vec![("edge", edge)],
            DistributionSpec::PiecewiseLinear { endpoint } => vec![("endpoint", endpoint)],
            DistributionSpec::PiecewiseExponential {
                cutoff,
                rate,
                scale,
            } => {
                vec![("cutoff", cutoff), ("rate", rate), ("scale", scale)]
            }
            DistributionSpec::Sinusoidal { amplitude } => vec![("amplitude", amplitude)],
            DistributionSpec::BoseLike { rate } | DistributionSpec::FermiLike { rate } => {
                vec![("rate", rate)]
            }
        }
    }

    fn sinusoidal_shape(amplitude: f64) -> (f64, f64) {
        let c = 1.0 - 4.0 * amplitude / (PI * PI);
        (c, 2.0 / c)
    }
}

impl Density for DistributionSpec {
    fn eval(&self, xi: f64) -> f64 {
        if xi < 0.0 {
            return 0.0;
        }
        match *self {
            DistributionSpec::Canonical => (-xi).exp(),
            DistributionSpec::PowerLaw => 24.0 * (2.0 + xi).powi(-4),
            DistributionSpec::PiecewiseConstant { edge } => {
                if xi >= edge && xi <= 2.0 - edge {
                    0.5 / (1.0 - edge)
                } else {
                    0.0
                }
            }
            DistributionSpec::PiecewiseLinear { endpoint } => {
                if xi > endpoint {
                    0.0
                } else {
                    2.0 * endpoint.powi(-3)
                        * (3.0 * (2.0 - endpoint) * xi + (2.0 * endpoint - 3.0) * endpoint)
                }
            }
            DistributionSpec::PiecewiseExponential {
                cutoff,
                rate,
                scale,
            } => {
                if xi > cutoff {
                    0.0
                } else {
                    scale * (-rate * xi).exp()
                }
            }
            DistributionSpec::Sinusoidal { amplitude } => {
                let (c, hi) = Self::sinusoidal_shape(amplitude);
                if xi > hi {
                    0.0
                } else {
                    0.5 * c * (1.0 + amplitude * (0.5 * PI * c * xi).cos())
                }
            }
            DistributionSpec::BoseLike { rate } => {
                let z = -(-rate).exp_m1();
                let denom = (rate * xi).exp() / z - 1.0;
                if denom.is_finite() {
                    1.0 / denom
                } else {
                    0.0
                }
            }
            DistributionSpec::FermiLike { rate } => {
                let w = rate.exp_m1();
                let denom = (rate * xi).exp() / w + 1.0;
                if denom.is_finite() {
                    1.0 / denom
                } else {
                    0.0
                }
            }
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            DistributionSpec::Canonical
            | DistributionSpec::PowerLaw
            | DistributionSpec::BoseLike { .. }
            | DistributionSpec::FermiLike { .. } => (0.0, f64::INFINITY),
            DistributionSpec::PiecewiseConstant { edge } => (edge, 2.0 - edge),
            DistributionSpec::PiecewiseLinear { endpoint } => (0.0, endpoint),
            DistributionSpec::PiecewiseExponential { cutoff, .. } => (0.0, cutoff),
            DistributionSpec::Sinusoidal { amplitude } => {
                (0.0, Self::sinusoidal_shape(amplitude).1)
            }
        }
    }

    fn tail(&self) -> Tail {
        match self {
            DistributionSpec::PowerLaw => Tail::Algebraic,
            _ => Tail::Exponential,
        }
    }

    fn deriv(&self, xi: f64) -> f64 {
        if xi < 0.0 {
            return 0.0;
        }
        match *self {
            DistributionSpec::Canonical => -(-xi).exp(),
            DistributionSpec::PowerLaw => -96.0 * (2.0 + xi).powi(-5),
            DistributionSpec::PiecewiseConstant { .. } => 0.0,
            DistributionSpec::PiecewiseLinear { endpoint } => {
                if xi > endpoint {
                    0.0
                } else {
                    6.0 * (2.0 - endpoint) * endpoint.powi(-3)
                }
            }
            DistributionSpec::PiecewiseExponential { rate, .. } => -rate * self.eval(xi),
            DistributionSpec::Sinusoidal { amplitude } => {
                let (c, hi) = Self::sinusoidal_shape(amplitude);
                if xi > hi {
                    0.0
                } else {
                    -0.25 * PI * c * c * amplitude * (0.5 * PI * c * xi).sin()
                }
            }
            DistributionSpec::BoseLike { rate } => {
                let g = self.eval(xi);
                -rate * g * (1.0 + g)
            }
            DistributionSpec::FermiLike { rate } => {
                let g = self.eval(xi);
                -rate * g * (1.0 - g)
            }
        }
    }
}

/// A closure with a declared support, usable wherever a density is expected.
pub struct FnDensity<F: Fn(f64) -> f64> {
    f: F,
    support: (f64, f64),
    tail: Tail,
}

impl<F: Fn(f64) -> f64> FnDensity<F> {
    pub fn new(f: F, support: (f64, f64)) -> Self {
        FnDensity {
            f,
            support,
            tail: Tail::Exponential,
        }
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }
}

impl<F: Fn(f64) -> f64> Density for FnDensity<F> {
    fn eval(&self, xi: f64) -> f64 {
        if xi < self.support.0 || xi > self.support.1 {
            0.0
        } else {
            (self.f)(xi)
        }
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn tail(&self) -> Tail {
        self.tail
    }
}

/// A density tabulated on a grid, evaluated by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidInput(
                "need at least two matching table points".into(),
            ));
        }
        if !xs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        if ys.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "table values must be finite and non-negative".into(),
            ));
        }
        Ok(TabulatedDensity { xs, ys })
    }
}

impl Density for TabulatedDensity {
    fn eval(&self, xi: f64) -> f64 {
        let n = self.xs.len();
        if xi < self.xs[0] || xi > self.xs[n - 1] {
            return 0.0;
        }
        let idx = match self.xs.binary_search_by(|x| x.total_cmp(&xi)) {
            Ok(i) => return self.ys[i],
            Err(i) => i,
        };
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        let t = (xi - x0) / (x1 - x0);
        self.ys[idx - 1] * (1.0 - t) + self.ys[idx] * t
    }

    fn support(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }
}

/// The generic re-normalization: a density with mass `rho` and first moment
/// `sigma` is rescaled to `(σ/ρ²) λ(σξ/ρ)`, which has both moments equal to
/// one.
pub struct ScaledDensity<D: Density> {
    base: D,
    rho: f64,
    sigma: f64,
}

impl<D: Density> ScaledDensity<D> {
    pub fn factors(&self) -> (f64, f64) {
        (self.rho, self.sigma)
    }
}

impl<D: Density> Density for ScaledDensity<D> {
    fn eval(&self, xi: f64) -> f64 {
        self.sigma / (self.rho * self.rho) * self.base.eval(self.sigma * xi / self.rho)
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support();
        (lo * self.rho / self.sigma, hi * self.rho / self.sigma)
    }

    fn tail(&self) -> Tail {
        self.base.tail()
    }
}

/// Normalize an arbitrary density to unit mass and unit mean. The moments may
/// be supplied when known; otherwise they are computed by quadrature.
pub fn normalize_generic<D: Density>(
    base: D,
    rho: Option<f64>,
    sigma: Option<f64>,
) -> Result<ScaledDensity<D>> {
    let (rho, sigma) = match (rho, sigma) {
        (Some(r), Some(s)) => (r, s),
        _ => {
            let (m0, m1) = moments(&base)?;
            (rho.unwrap_or(m0), sigma.unwrap_or(m1))
        }
    };
    if !(rho.is_finite() && rho > 0.0 && sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidInput(format!(
            "normalization needs positive finite moments (got mass {rho}, mean {sigma})"
        )));
    }
    Ok(ScaledDensity { base, rho, sigma })
}

/// Plot-ready table of a density: `xi, gamma, theta` rows.
pub fn table_csv<D: Density + ?Sized>(density: &D, points: usize) -> String {
    let (lo, hi) = density.support();
    let hi = if hi.is_finite() { hi } else { lo + 10.0 };
    let n = points.max(2);
    let mut out = csvfmt::record(["xi", "gamma", "theta"]);
    out.push('\n');
    for i in 0..n {
        let xi = lo + (hi - lo) * (i as f64) / ((n - 1) as f64);
        let g = density.eval(xi);
        let dg = density.deriv(xi);
        let th = if dg == 0.0 { f64::INFINITY } else { -g / dg };
        out.push_str(&csvfmt::record([
            csvfmt::num(xi),
            csvfmt::num(g),
            csvfmt::num(th),
        ]));
        out.push('\n');
    }
    out
}

/// JSON-ready summary of one catalog member.
#[derive(Debug, Clone, Serialize)]
pub struct DistSummary {
    pub family: String,
    pub params: Vec<(String, f64)>,
    pub support: (f64, f64),
    pub moments: (f64, f64),
    pub theta_w: Option<f64>,
}

/// Assemble the summary for a catalog member (weak temperature included when
/// the density is monotone).
pub fn summarize(spec: &DistributionSpec) -> Result<DistSummary> {
    let m = moments(spec)?;
    let tw = theta_w(spec).ok().map(|r| r.value);
    Ok(DistSummary {
        family: spec.name().to_string(),
        params: spec
            .params()
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
        support: spec.support(),
        moments: m,
        theta_w: tw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_point_values() {
        assert_eq!(DistributionSpec::canonical().eval(0.0), 1.0);
        assert!((DistributionSpec::power_law().eval(0.0) - 1.5).abs() < 1e-15);
        let pc = DistributionSpec::piecewise_constant(0.0).unwrap();
        assert_eq!(pc.eval(1.0), 0.5);
        assert_eq!(pc.eval(3.0), 0.0);
    }

    #[test]
    fn canonical_moments_are_exact() {
        let (m0, m1) = moments(&DistributionSpec::canonical()).unwrap();
        assert!((m0 - 1.0).abs() < 1e-9);
        assert!((m1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sinusoidal_moments_at_unit_amplitude() {
        let (m0, m1) = moments(&DistributionSpec::sinusoidal(1.0).unwrap()).unwrap();
        assert!((m0 - 1.0).abs() < 1e-8, "{m0}");
        assert!((m1 - 1.0).abs() < 1e-8, "{m1}");
    }

    #[test]
    fn piecewise_linear_moments_at_endpoint_three() {
        let (m0, m1) = moments(&DistributionSpec::piecewise_linear(3.0).unwrap()).unwrap();
        assert!((m0 - 1.0).abs() < 1e-10, "{m0}");
        assert!((m1 - 1.0).abs() < 1e-10, "{m1}");
    }

    #[test]
    fn every_family_normalizes_over_the_parameter_grids() {
        let mut specs = vec![
            DistributionSpec::canonical(),
            DistributionSpec::power_law(),
            DistributionSpec::bose_like(),
            DistributionSpec::fermi_like(),
        ];
        for edge in [0.0, 0.25, 0.5, 0.9] {
            specs.push(DistributionSpec::piecewise_constant(edge).unwrap());
        }
        for endpoint in [1.5, 2.0, 2.5, 3.0] {
            specs.push(DistributionSpec::piecewise_linear(endpoint).unwrap());
        }
        for cutoff in [1.2, 1.5, 2.0, 3.0, 10.0] {
            specs.push(DistributionSpec::piecewise_exponential(cutoff).unwrap());
        }
        for amplitude in [-2.0, -0.5, 0.5, 1.0, 2.0] {
            specs.push(DistributionSpec::sinusoidal(amplitude).unwrap());
        }
        for spec in specs {
            let (m0, m1) = moments(&spec).unwrap();
            assert!(
                (m0 - 1.0).abs() < 1e-8,
                "{} {:?}: m0 {m0}",
                spec.name(),
                spec.params()
            );
            assert!(
                (m1 - 1.0).abs() < 1e-8,
                "{} {:?}: m1 {m1}",
                spec.name(),
                spec.params()
            );
        }
    }

    #[test]
    fn truncated_exponential_limits() {
        // near cutoff 2 the density approaches the flat plateau
        let flat = DistributionSpec::piecewise_constant(0.0).unwrap();
        for cutoff in [2.0 - 1e-4, 2.0 + 1e-4] {
            let pe = DistributionSpec::piecewise_exponential(cutoff).unwrap();
            let top = (2.0_f64).min(cutoff) * (1.0 - 1e-9);
            let sup = (0..1000)
                .map(|i| top * i as f64 / 999.0)
                .map(|x| (pe.eval(x) - flat.eval(x)).abs())
                .fold(0.0, f64::max);
            assert!(sup < 1e-3, "cutoff {cutoff}: sup {sup}");
        }
        // for large cutoffs it approaches the canonical law on compacts
        let pe = DistributionSpec::piecewise_exponential(50.0).unwrap();
        let can = DistributionSpec::canonical();
        let sup = (0..1000)
            .map(|i| 10.0 * i as f64 / 999.0)
            .map(|x| (pe.eval(x) - can.eval(x)).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-8, "sup {sup}");
    }

    #[test]
    fn construction_rejects_out_of_range_parameters() {
        assert!(DistributionSpec::piecewise_constant(1.0).is_err());
        assert!(DistributionSpec::piecewise_constant(-0.1).is_err());
        assert!(DistributionSpec::piecewise_linear(1.0).is_err());
        assert!(DistributionSpec::piecewise_linear(3.5).is_err());
        assert!(DistributionSpec::piecewise_exponential(0.9).is_err());
        assert!(DistributionSpec::sinusoidal(2.5).is_err());
    }

    #[test]
    fn normalize_generic_scaling() {
        // already normalized: unchanged
        let exp = FnDensity::new(|x: f64| (-x).exp(), (0.0, f64::INFINITY));
        let scaled = normalize_generic(exp, Some(1.0), Some(1.0)).unwrap();
        for x in [0.0, 0.5, 2.0] {
            assert!((scaled.eval(x) - (-x).exp()).abs() < 1e-15);
        }

        // flat on [0,2] with mass 2 and mean 2 collapses to the plateau case
        let flat = FnDensity::new(|_| 1.0, (0.0, 2.0));
        let scaled = normalize_generic(flat, Some(2.0), Some(2.0)).unwrap();
        assert!((scaled.eval(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(scaled.support(), (0.0, 2.0));
        let (m0, m1) = moments(&scaled).unwrap();
        assert!((m0 - 1.0).abs() < 1e-9 && (m1 - 1.0).abs() < 1e-9);

        // doubled flat on [0,1]: mass 2, mean 1, lands on [0,2] at height 1/2
        let tall = FnDensity::new(|_| 2.0, (0.0, 1.0));
        let scaled = normalize_generic(tall, None, None).unwrap();
        assert!((scaled.eval(0.5) - 0.5).abs() < 1e-9);
        assert!((scaled.support().1 - 2.0).abs() < 1e-9);
        let (m0, m1) = moments(&scaled).unwrap();
        assert!((m0 - 1.0).abs() < 1e-8 && (m1 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn normalize_generic_rejects_bad_moments() {
        let flat = FnDensity::new(|_| 1.0, (0.0, 2.0));
        assert!(normalize_generic(flat, Some(0.0), Some(1.0)).is_err());
        let flat = FnDensity::new(|_| 1.0, (0.0, 2.0));
        assert!(normalize_generic(flat, Some(1.0), Some(f64::NAN)).is_err());
    }

    #[test]
    fn tabulated_density_interpolates() {
        let t = TabulatedDensity::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(t.eval(0.5), 0.5);
        assert_eq!(t.eval(1.0), 1.0);
        assert_eq!(t.eval(2.5), 0.0);
        assert!(TabulatedDensity::new(vec![0.0], vec![1.0]).is_err());
        assert!(TabulatedDensity::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn table_csv_shape() {
        let csv = table_csv(&DistributionSpec::canonical(), 11);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "xi,gamma,theta");
        assert_eq!(lines.len(), 12);
        // canonical temperature column is identically one
        for line in &lines[1..] {
            let theta: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
            assert_eq!(theta, 1.0);
        }
    }

    #[test]
    fn summary_serializes_with_stable_keys() {
        let s = summarize(&DistributionSpec::piecewise_exponential(3.0).unwrap()).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.starts_with("{\"family\":\"piecewise_exponential\""));
        assert!(json.contains("\"moments\""));
        assert!(json.contains("\"theta_w\""));
        assert!((s.moments.0 - 1.0).abs() < 1e-8);
    }
}
