//! The extended canonical distribution over rank-1 tensors `v ⊗ v`: density
//! proportional to `exp(−v·H⁻¹v)`, realized by sampling agitation velocities
//! from the zero-mean normal law with second moment `H/2`.

use crate::error::{Error, Result};
use crate::pointsys::gauss_vec;
use crate::smallalg::{cholesky, Ten3, Vec3};
use rand::rngs::StdRng;
use rand::SeedableRng;

/// The distribution, pinned to a symmetric positive definite Reynolds tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedCanonical {
    reynolds: Ten3,
    inverse: Ten3,
    factor: Ten3,
}

/// A sampled ensemble with its empirical second moment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub seed: u64,
    pub samples: Vec<Vec3>,
    /// `Σ v ⊗ v / n`.
    pub empirical: Ten3,
    /// `H/2`, the second moment the density implies.
    pub target: Ten3,
    /// Relative Frobenius deviation of the empirical moment from the target.
    pub deviation: f64,
}

impl ExtendedCanonical {
    pub fn new(reynolds: Ten3) -> Result<Self> {
        if !reynolds.is_symmetric(1e-10) {
            return Err(Error::InvalidInput(
                "the Reynolds tensor must be symmetric".into(),
            ));
        }
        let inverse = reynolds
            .inverse()
            .ok_or_else(|| Error::InvalidInput("the Reynolds tensor must be invertible".into()))?;
        // positive definiteness surfaces through the Cholesky factor of H/2
        let factor = cholesky(&(reynolds * 0.5)).map_err(|_| {
            Error::InvalidInput("the Reynolds tensor must be positive definite".into())
        })?;
        Ok(ExtendedCanonical {
            reynolds,
            inverse,
            factor,
        })
    }

    pub fn reynolds(&self) -> Ten3 {
        self.reynolds
    }

    /// Unnormalized density at an agitation velocity.
    pub fn density(&self, v: Vec3) -> f64 {
        (-v.dot(self.inverse * v)).exp()
    }

    /// Deterministic sample of `n` agitation velocities.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Vec3> {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..n).map(|_| self.factor * gauss_vec(&mut rng)).collect()
    }

    /// Sample and compare the empirical second moment against `H/2`.
    pub fn ensemble(&self, n: usize, seed: u64) -> Result<EnsembleReport> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "ensemble size must be at least 1".into(),
            ));
        }
        let samples = self.sample(n, seed);
        let mut second = Ten3::ZERO;
        for v in &samples {
            second += v.outer(*v);
        }
        let empirical = second * (1.0 / n as f64);
        let target = self.reynolds * 0.5;
        let deviation = (empirical - target).norm() / target.norm();
        Ok(EnsembleReport {
            seed,
            samples,
            empirical,
            target,
            deviation,
        })
    }
}
