//! Granular temperature: the pointwise logarithmic-derivative form and the
//! weak (support-averaged) form for strictly monotone densities.

use super::{moments, Density};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemperatureKind {
    Pointwise,
    Weak,
}

/// A temperature value with its provenance. The value is an extended real:
/// a vanishing density slope reads as an infinite temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureReport {
    pub kind: TemperatureKind,
    pub value: f64,
    pub support: (f64, f64),
}

/// Pointwise temperature `−γ/γ'` at the given abscissa.
pub fn theta<D: Density + ?Sized>(density: &D, xi: f64) -> Result<TemperatureReport> {
    let support = density.support();
    if xi < support.0 || xi > support.1 {
        return Err(Error::InvalidInput(format!(
            "abscissa {xi} lies outside the support [{}, {}]",
            support.0, support.1
        )));
    }
    let g = density.eval(xi);
    let dg = density.deriv(xi);
    let value = if dg == 0.0 { f64::INFINITY } else { -g / dg };
    Ok(TemperatureReport {
        kind: TemperatureKind::Pointwise,
        value,
        support,
    })
}

const SCAN_POINTS: usize = 513;

fn monotone_endpoint_values<D: Density + ?Sized>(density: &D) -> Result<(f64, f64, (f64, f64))> {
    let (lo, hi) = density.support();
    // scan a finite window; far tails of unbounded densities are monotone by
    // decay and contribute nothing to the endpoint values
    let hi_scan = if hi.is_finite() { hi } else { lo + 80.0 };
    let mut prev = density.eval(lo);
    let mut rising = false;
    let mut falling = false;
    for i in 1..SCAN_POINTS {
        let x = lo + (hi_scan - lo) * (i as f64) / ((SCAN_POINTS - 1) as f64);
        let v = density.eval(x);
        if v > prev {
            rising = true;
        } else if v < prev {
            falling = true;
        }
        if rising && falling {
            return Err(Error::NonMonotone);
        }
        prev = v;
    }
    let g_lo = density.eval(lo);
    let g_hi = if hi.is_finite() {
        density.eval(hi)
    } else {
        0.0
    };
    Ok((g_lo, g_hi, (lo, hi)))
}

/// Weak temperature: the reciprocal of the density drop across the support.
/// Requires the density to be monotone; a constant density reads as an
/// infinite temperature.
pub fn theta_w<D: Density + ?Sized>(density: &D) -> Result<TemperatureReport> {
    let (g_lo, g_hi, support) = monotone_endpoint_values(density)?;
    Ok(TemperatureReport {
        kind: TemperatureKind::Weak,
        value: 1.0 / (g_lo - g_hi),
        support,
    })
}

/// The defining integral route to the weak temperature: the support integral
/// of the density divided by the endpoint drop. Agrees with [`theta_w`]
/// whenever the density is normalized; kept as an independent cross-check.
pub fn theta_w_quadrature<D: Density + ?Sized>(density: &D) -> Result<f64> {
    let (g_lo, g_hi, _) = monotone_endpoint_values(density)?;
    let (m0, _) = moments(density)?;
    Ok(m0 / (g_lo - g_hi))
}
