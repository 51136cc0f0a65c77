//! Root solvers for the two transcendental normalization conditions of the
//! distribution catalog: the decay-rate equation of the truncated exponential
//! family and the dilogarithm condition shared by the Bose- and Fermi-like
//! densities.

use super::dilog::dilog;
use crate::error::{Error, Result};

/// Second-moment condition for the truncated exponential density on
/// `[0, cutoff]`, written with the removable singularity at zero rate taken
/// out. Strictly decreasing in the rate.
fn rate_defect(rate: f64, cutoff: f64) -> f64 {
    let u = rate * cutoff;
    if u.abs() < 1e-4 {
        // series through u³; the truncation error is far below 1e-12 here
        cutoff / 2.0 - 1.0 - rate * cutoff * cutoff / 12.0 + rate.powi(3) * cutoff.powi(4) / 720.0
    } else {
        (1.0 - rate) / rate - cutoff / u.exp_m1()
    }
}

fn rate_defect_slope(rate: f64, cutoff: f64) -> f64 {
    let u = rate * cutoff;
    if u.abs() < 1e-4 {
        -cutoff * cutoff / 12.0 + rate * rate * cutoff.powi(4) / 240.0
    } else if u > 500.0 {
        -1.0 / (rate * rate)
    } else {
        let em = u.exp_m1();
        -1.0 / (rate * rate) + cutoff * cutoff * u.exp() / (em * em)
    }
}

/// Decay rate of the truncated exponential density with unit mean, for a
/// cutoff above 1. Bracketing bisection followed by a Newton polish; the root
/// is unique, strictly increasing in the cutoff, and approaches 1 from below.
pub fn solve_alpha(cutoff: f64) -> Result<f64> {
    if !(cutoff.is_finite() && cutoff > 1.0) {
        return Err(Error::InvalidInput(format!(
            "truncated exponential needs a cutoff above 1 (got {cutoff})"
        )));
    }

    // the defect tends to cutoff − 1 > 0 far left and is negative at 1
    let mut lo = (2.0 / (1.0 - cutoff)).min(-1.0);
    let mut expand = 0;
    while rate_defect(lo, cutoff) <= 0.0 {
        lo *= 2.0;
        expand += 1;
        if expand > 60 {
            return Err(Error::Accuracy("failed to bracket the decay rate".into()));
        }
    }
    let mut hi = 1.0;
    debug_assert!(rate_defect(hi, cutoff) < 0.0);

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rate_defect(mid, cutoff) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
    }

    let mut root = 0.5 * (lo + hi);
    for _ in 0..8 {
        let f = rate_defect(root, cutoff);
        let df = rate_defect_slope(root, cutoff);
        if df == 0.0 {
            break;
        }
        let step = f / df;
        root -= step;
        if !root.is_finite() {
            return Err(Error::Accuracy("decay-rate Newton polish diverged".into()));
        }
        if step.abs() < 1e-13 * root.abs().max(1.0) {
            break;
        }
    }
    Ok(root)
}

/// Normalization constant paired with [`solve_alpha`]: the density is
/// `scale · e^{-rate ξ}` on `[0, cutoff]`.
pub fn exponential_scale(rate: f64, cutoff: f64) -> f64 {
    if rate == 0.0 {
        1.0 / cutoff
    } else {
        rate / (-(-rate * cutoff).exp_m1())
    }
}

/// Defect of the dilogarithm condition `β² = |Li₂(1 − e^β)|` shared by the
/// Bose-like (negative root) and Fermi-like (positive root) densities.
pub fn bose_fermi_defect(beta: f64) -> Result<f64> {
    let li = dilog(1.0 - beta.exp())?;
    Ok(beta * beta - li.abs())
}

/// The two non-trivial roots of the dilogarithm condition, negative first.
pub fn solve_bose_fermi() -> (f64, f64) {
    let defect = |b: f64| bose_fermi_defect(b).expect("argument stays on the real branch");
    (bisect(&defect, -2.0, -0.1), bisect(&defect, 0.5, 3.0))
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    debug_assert!(flo * f(hi) < 0.0, "root must be bracketed");
    let lo_positive = flo > 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_vanishes_at_cutoff_two() {
        let a = solve_alpha(2.0).unwrap();
        assert!(a.abs() < 1e-10, "{a}");
    }

    #[test]
    fn rate_slope_at_two_is_three_halves() {
        let h = 1e-5;
        let slope = (solve_alpha(2.0 + h).unwrap() - solve_alpha(2.0 - h).unwrap()) / (2.0 * h);
        assert!((slope - 1.5).abs() < 1e-3, "{slope}");
    }

    #[test]
    fn rate_is_strictly_increasing_to_one() {
        let grid = [1.05, 1.1, 1.2, 1.5, 2.0, 2.5, 3.0, 5.0, 10.0, 20.0, 50.0];
        let mut prev = f64::NEG_INFINITY;
        for &c in &grid {
            let a = solve_alpha(c).unwrap();
            assert!(a > prev, "cutoff {c}: {a} <= {prev}");
            // the limit 1 is reached only asymptotically, but the gap at the
            // largest cutoffs sits far below f64 resolution around 1
            assert!(a <= 1.0);
            prev = a;
        }
        assert!((solve_alpha(50.0).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rate_solves_the_moment_condition() {
        // independent check: the bracketing oracle from scratch, no Newton
        for &c in &[1.2, 1.5, 3.0, 10.0] {
            let a = solve_alpha(c).unwrap();
            assert!(rate_defect(a, c).abs() < 1e-10, "cutoff {c}");
        }
    }

    #[test]
    fn rejects_cutoffs_at_or_below_one() {
        assert!(solve_alpha(1.0).is_err());
        assert!(solve_alpha(0.5).is_err());
        assert!(solve_alpha(f64::NAN).is_err());
    }

    #[test]
    fn bose_and_fermi_roots() {
        let (bose, fermi) = solve_bose_fermi();
        assert!((bose - (-0.814651)).abs() < 1e-5, "{bose}");
        assert!((fermi - 1.405050).abs() < 1e-5, "{fermi}");
        assert!(bose_fermi_defect(bose).unwrap().abs() < 1e-12);
        assert!(bose_fermi_defect(fermi).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bose_root_satisfies_dilog_condition_directly() {
        let (bose, _) = solve_bose_fermi();
        let li = dilog(1.0 - bose.exp()).unwrap();
        assert!((li - bose * bose).abs() < 1e-9);
    }
}
