//! Mass-weighted histograms of specific agitation energy on the
//! non-dimensional axis where the mass-averaged energy sits at one.

use super::{Density, Tail};
use crate::csvfmt;
use crate::error::{Error, Result};
use crate::pointsys::{affine_fit, ParticleCloud};

/// A piecewise-constant density built from particle data. Bin `j` covers
/// `[(j-1)δ, jδ)`; the stored values integrate to one by construction and the
/// first moment sits within half a bin of one.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    delta: f64,
    densities: Vec<f64>,
    counts: Vec<u64>,
    total_count: usize,
    top_bin: usize,
}

impl Histogram {
    /// Build from the affine-fit agitation energies of a cloud.
    pub fn from_cloud(cloud: &ParticleCloud, delta: f64) -> Result<Self> {
        let fit = affine_fit(cloud, None)?;
        let pairs: Vec<(f64, f64)> = cloud
            .particles()
            .iter()
            .zip(&fit.shuffle_rates)
            .map(|(p, rate)| {
                let transported = fit.gross_shape * *rate;
                (p.mass, 0.5 * transported.norm_sq())
            })
            .collect();
        let kappa = fit.aggregates.specific_kinetic_energy;
        Self::from_weighted_guarded(&pairs, delta, kappa)
    }

    /// Build from per-particle specific energies with equal masses.
    pub fn from_specific_energies(energies: &[f64], delta: f64) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = energies.iter().map(|&e| (1.0, e)).collect();
        Self::from_weighted(&pairs, delta)
    }

    /// Build from `(mass, specific energy)` pairs.
    pub fn from_weighted(pairs: &[(f64, f64)], delta: f64) -> Result<Self> {
        Self::from_weighted_guarded(pairs, delta, f64::INFINITY)
    }

    fn from_weighted_guarded(pairs: &[(f64, f64)], delta: f64, kappa: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidInput("bin width must be positive".into()));
        }
        if pairs.is_empty() {
            return Err(Error::InvalidInput(
                "histogram needs at least one particle".into(),
            ));
        }
        for &(m, e) in pairs {
            if !(m.is_finite() && m > 0.0 && e.is_finite() && e >= 0.0) {
                return Err(Error::InvalidInput(
                    "histogram weights must be positive with non-negative energies".into(),
                ));
            }
        }
        let total_mass: f64 = pairs.iter().map(|p| p.0).sum();
        let mean: f64 = pairs.iter().map(|&(m, e)| m * e).sum::<f64>() / total_mass;
        if mean <= 0.0 || (kappa.is_finite() && mean < 1e-13 * kappa) {
            return Err(Error::Degenerate(
                "total agitation energy vanishes; nothing to bin".into(),
            ));
        }

        let mut masses: Vec<f64> = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for &(m, e) in pairs {
            let xi = e / mean;
            let bin = (xi / delta).floor() as usize;
            if bin >= masses.len() {
                masses.resize(bin + 1, 0.0);
                counts.resize(bin + 1, 0);
            }
            masses[bin] += m;
            counts[bin] += 1;
        }
        let densities: Vec<f64> = masses.iter().map(|m| m / (total_mass * delta)).collect();
        let top_bin = counts
            .iter()
            .rposition(|&c| c > 0)
            .map(|i| i + 1)
            .unwrap_or(0);

        let hist = Histogram {
            delta,
            densities,
            counts,
            total_count: pairs.len(),
            top_bin,
        };

        let mass_defect = (hist.mass_integral() - 1.0).abs();
        if mass_defect > 1e-12 {
            return Err(Error::Accuracy(format!(
                "histogram mass defect {mass_defect:.3e}"
            )));
        }
        let first = hist.first_moment();
        if !(1.0 - delta / 2.0 - 1e-12..=1.0 + delta / 2.0 + 1e-12).contains(&first) {
            return Err(Error::Accuracy(format!(
                "histogram first moment {first} escaped its half-bin window"
            )));
        }
        Ok(hist)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Density values per bin, lowest bin first.
    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    /// Particle counts per bin.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_count(&self) -> usize {
        self.total_count
    }

    /// One-based index of the highest occupied bin.
    pub fn top_bin(&self) -> usize {
        self.top_bin
    }

    /// `δ Σ γ_j`; one up to roundoff.
    pub fn mass_integral(&self) -> f64 {
        self.densities.iter().sum::<f64>() * self.delta
    }

    /// Exact first moment of the binned density.
    pub fn first_moment(&self) -> f64 {
        self.densities
            .iter()
            .enumerate()
            .map(|(j, g)| g * self.delta * (j as f64 + 0.5) * self.delta)
            .sum()
    }

    /// Rows of `bin_low, bin_high, gamma, count`.
    pub fn to_csv(&self) -> String {
        let mut out = csvfmt::record(["bin_low", "bin_high", "gamma", "count"]);
        out.push('\n');
        for (j, (g, c)) in self.densities.iter().zip(&self.counts).enumerate() {
            out.push_str(&csvfmt::record([
                csvfmt::num(j as f64 * self.delta),
                csvfmt::num((j + 1) as f64 * self.delta),
                csvfmt::num(*g),
                c.to_string(),
            ]));
            out.push('\n');
        }
        out
    }
}

impl Density for Histogram {
    fn eval(&self, xi: f64) -> f64 {
        if xi < 0.0 {
            return 0.0;
        }
        let bin = (xi / self.delta).floor() as usize;
        self.densities.get(bin).copied().unwrap_or(0.0)
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.top_bin as f64 * self.delta)
    }

    fn tail(&self) -> Tail {
        Tail::Exponential
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsys::{sample_cloud, SamplerParams};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn two_particle_hand_binning() {
        let h = Histogram::from_specific_energies(&[0.5, 1.5], 1.0).unwrap();
        assert_eq!(h.densities(), &[0.5, 0.5]);
        assert!((h.mass_integral() - 1.0).abs() < 1e-15);
        assert!((h.first_moment() - 1.0).abs() < 1e-15);
        assert_eq!(h.top_bin(), 2);
    }

    #[test]
    fn identical_energies_land_in_one_bin() {
        let h = Histogram::from_specific_energies(&[0.5; 12], 0.5).unwrap();
        let occupied: Vec<usize> = h
            .counts()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(j, _)| j)
            .collect();
        assert_eq!(occupied.len(), 1);
        // everything normalizes onto the bin containing one
        assert_eq!(occupied[0], (1.0 / 0.5) as usize);
        assert!(h.top_bin() as f64 - 1.0 <= 1.0 / 0.5);
    }

    #[test]
    fn canonical_sample_reproduces_the_exponential_law() {
        let mut rng = StdRng::seed_from_u64(42);
        let energies: Vec<f64> = (0..100_000)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let h = Histogram::from_specific_energies(&energies, 0.1).unwrap();
        let mut sup: f64 = 0.0;
        for (j, g) in h.densities().iter().enumerate() {
            let mid = (j as f64 + 0.5) * 0.1;
            sup = sup.max((g - (-mid).exp()).abs());
        }
        assert!(sup < 0.02, "sup distance {sup}");
    }

    #[test]
    fn cloud_histogram_normalizes() {
        let cloud = sample_cloud(&SamplerParams::new(40), 5).unwrap();
        let h = Histogram::from_cloud(&cloud, 0.1).unwrap();
        assert!((h.mass_integral() - 1.0).abs() < 1e-12);
        let first = h.first_moment();
        assert!((0.95..=1.05).contains(&first), "{first}");
        assert!(h.total_count() == 40);
    }

    #[test]
    fn exactly_affine_cloud_has_nothing_to_bin() {
        // four points or fewer always carry an exact affine fit
        let cloud = sample_cloud(&SamplerParams::new(4), 9).unwrap();
        assert!(matches!(
            Histogram::from_cloud(&cloud, 0.1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn zero_energies_are_degenerate() {
        assert!(matches!(
            Histogram::from_specific_energies(&[0.0, 0.0], 0.1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn histogram_is_a_density() {
        let h = Histogram::from_specific_energies(&[0.5, 1.5], 1.0).unwrap();
        assert_eq!(h.eval(0.2), 0.5);
        assert_eq!(h.eval(1.9), 0.5);
        assert_eq!(h.eval(2.5), 0.0);
        assert_eq!(h.support(), (0.0, 2.0));
    }

    #[test]
    fn csv_rows_match_bins() {
        let h = Histogram::from_specific_energies(&[0.5, 1.5], 1.0).unwrap();
        let csv = h.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("bin_low,bin_high,gamma,count\n"));
    }
}
