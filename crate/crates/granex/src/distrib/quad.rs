//! Adaptive composite quadrature: interval bisection with Richardson
//! acceptance. Semi-infinite integrals are mapped to a finite interval, by
//! `u = e^{-x}` for exponentially decaying integrands and by an algebraic
//! stretch for heavy tails, and the mapped endpoint singularity is handled by
//! deep bisection with a bounded error tally.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

fn eval_guard(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let v = f(x);
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

struct Adapt<'a> {
    f: &'a dyn Fn(f64) -> f64,
    capped_error: f64,
}

impl<'a> Adapt<'a> {
    fn simpson(&self, a: f64, fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        let _ = a;
        h / 6.0 * (fa + 4.0 * fm + fb)
    }

    fn run(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = eval_guard(self.f, lm);
        let frm = eval_guard(self.f, rm);
        let left = self.simpson(a, fa, flm, fm, m - a);
        let right = self.simpson(m, fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth >= MAX_DEPTH {
            self.capped_error += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        if delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        self.run(a, m, fa, flm, fm, left, tol / 2.0, depth + 1)
            + self.run(m, b, fm, frm, fb, right, tol / 2.0, depth + 1)
    }
}

/// Integrate over a finite interval to the given absolute tolerance.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(
            "integration bounds must be finite".into(),
        ));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = eval_guard(f, a);
    let fb = eval_guard(f, b);
    let fm = eval_guard(f, 0.5 * (a + b));
    let mut adapt = Adapt {
        f,
        capped_error: 0.0,
    };
    let whole = adapt.simpson(a, fa, fm, fb, b - a);
    let value = adapt.run(a, b, fa, fm, fb, whole, tol, 0);
    if adapt.capped_error > 100.0 * tol {
        return Err(Error::Accuracy(format!(
            "quadrature did not converge (residual error estimate {:.3e})",
            adapt.capped_error
        )));
    }
    Ok(value)
}

/// Integrate `f` over `[a, ∞)` for integrands with an exponentially decaying
/// tail, via the substitution `u = e^{-x}`.
pub fn integrate_semi_exp(f: &dyn Fn(f64) -> f64, a: f64, tol: f64) -> Result<f64> {
    let upper = (-a).exp();
    if upper == 0.0 {
        return Ok(0.0);
    }
    let g = move |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            f(-u.ln()) / u
        }
    };
    integrate(&g, 0.0, upper, tol)
}

/// Integrate `f` over `[a, ∞)` for integrands with an algebraic tail, via the
/// substitution `x = a + t/(1-t)`.
pub fn integrate_semi_alg(f: &dyn Fn(f64) -> f64, a: f64, tol: f64) -> Result<f64> {
    let g = move |t: f64| {
        if t >= 1.0 {
            0.0
        } else {
            let w = 1.0 - t;
            f(a + t / w) / (w * w)
        }
    };
    integrate(&g, 0.0, 1.0, tol)
}
