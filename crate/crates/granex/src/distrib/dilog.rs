//! Real dilogarithm on `(-∞, 1]`: power series on the small disc, extended by
//! the Euler reflection, the Landen transform and the inversion formula.

use crate::error::{Error, Result};

const PI2_6: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// `Σ_{k≥1} y^k / k²` for real `y ≤ 1`; arguments above 1 leave the real
/// branch and are rejected.
pub fn dilog(y: f64) -> Result<f64> {
    if y.is_nan() || y > 1.0 {
        return Err(Error::InvalidInput(format!(
            "dilogarithm argument {y} is outside the real branch (y <= 1)"
        )));
    }
    Ok(dilog_unchecked(y))
}

fn dilog_unchecked(y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else if y == 1.0 {
        PI2_6
    } else if y < -1.0 {
        // inversion onto (-1, 0)
        -PI2_6 - 0.5 * (-y).ln().powi(2) - dilog_unchecked(1.0 / y)
    } else if y > 0.5 {
        // reflection onto [0, 0.5)
        PI2_6 - y.ln() * (1.0 - y).ln() - dilog_unchecked(1.0 - y)
    } else if y < -0.5 {
        // Landen transform onto (1/3, 1/2]
        -dilog_unchecked(y / (y - 1.0)) - 0.5 * (1.0 - y).ln().powi(2)
    } else {
        series(y)
    }
}

fn series(y: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in 1..200u32 {
        power *= y;
        let term = power / (k as f64 * k as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain partial sums, valid on |y| < 1; the independent check for the
    /// transformed branches.
    fn series_oracle(y: f64) -> f64 {
        let mut sum = 0.0;
        for k in 1..=4000u32 {
            sum += y.powi(k as i32) / (k as f64 * k as f64);
        }
        sum
    }

    #[test]
    fn known_values() {
        assert!((dilog(1.0).unwrap() - 1.6449340668482264).abs() < 1e-12);
        assert_eq!(dilog(0.0).unwrap(), 0.0);
        assert!((dilog(-1.0).unwrap() + PI2_6 / 2.0).abs() < 1e-12);
        let half = PI2_6 / 2.0 - 0.5 * (2.0_f64).ln().powi(2);
        assert!((dilog(0.5).unwrap() - half).abs() < 1e-12);
    }

    #[test]
    fn matches_series_oracle_across_branches() {
        for &y in &[0.9, 0.7, 0.557227, 0.3, -0.3, -0.6, -0.9, -0.99] {
            let got = dilog(y).unwrap();
            let want = series_oracle(y);
            assert!((got - want).abs() < 1e-11, "y={y}: {got} vs {want}");
        }
        // value at the abscissa fixed by the negative dilogarithm root
        let y = 1.0 - (-0.814651_f64).exp();
        assert!((dilog(y).unwrap() - 0.663657).abs() < 1e-6);
    }

    #[test]
    fn inversion_branch_against_transformed_oracle() {
        // for y < -1 use the inversion identity with the oracle on 1/y
        for &y in &[-1.5, -3.0755, -10.0, -50.0] {
            let direct = dilog(y).unwrap();
            let via = -PI2_6 - 0.5 * (-y).ln().powi(2) - series_oracle(1.0 / y);
            assert!((direct - via).abs() < 1e-11, "y={y}");
        }
    }

    #[test]
    fn square_identity() {
        for i in 0..=20 {
            let y = -1.0 + 0.1 * i as f64;
            if y.abs() > 1.0 {
                continue;
            }
            let lhs = dilog(y).unwrap() + dilog(-y).unwrap();
            let rhs = 0.5 * dilog(y * y).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "y={y}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn rejects_arguments_beyond_one() {
        assert!(dilog(1.0 + 1e-12).is_err());
        assert!(dilog(2.0).is_err());
        assert!(dilog(f64::NAN).is_err());
    }
}
