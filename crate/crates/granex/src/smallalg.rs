//! Minimal 3D vector/tensor algebra with exact, explicit semantics.
//!
//! Everything here is a pure function on `Copy` value types; there is no
//! dynamic dimension and no allocation. The one nontrivial routine is the
//! minimum-norm solve for symmetric positive semi-definite systems, which the
//! fitting code needs because inertia tensors of collinear or coplanar point
//! sets are legitimately singular.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Relative eigenvalue cutoff below which a spectral component is treated as null.
pub const RANK_RTOL: f64 = 1e-12;

/// Relative tolerance for declaring a right-hand side inside the range of a
/// singular operator.
const CONSISTENCY_RTOL: f64 = 1e-8;

/// A real 3-vector. Unit-free; callers attach units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Outer product `self ⊗ other`.
    pub fn outer(self, other: Vec3) -> Ten3 {
        Ten3::new([
            [self.x * other.x, self.x * other.y, self.x * other.z],
            [self.y * other.x, self.y * other.y, self.y * other.z],
            [self.z * other.x, self.z * other.y, self.z * other.z],
        ])
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.as_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// A real 3×3 tensor, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct Ten3 {
    m: [[f64; 3]; 3],
}

impl Ten3 {
    pub const ZERO: Ten3 = Ten3 { m: [[0.0; 3]; 3] };

    pub fn new(m: [[f64; 3]; 3]) -> Self {
        Ten3 { m }
    }

    pub fn identity() -> Self {
        Ten3::diag(1.0, 1.0, 1.0)
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Ten3::new([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.m[i][j] = v;
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3::new(self.m[i][0], self.m[i][1], self.m[i][2])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        Ten3::new([[c0.x, c1.x, c2.x], [c0.y, c1.y, c2.y], [c0.z, c1.z, c2.z]])
    }

    pub fn transpose(&self) -> Ten3 {
        let m = &self.m;
        Ten3::new([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn sym(&self) -> Ten3 {
        (*self + self.transpose()) * 0.5
    }

    pub fn skw(&self) -> Ten3 {
        (*self - self.transpose()) * 0.5
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse by adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Ten3> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.m;
        let adj = Ten3::new([
            [
                m[1][1] * m[2][2] - m[1][2] * m[2][1],
                m[0][2] * m[2][1] - m[0][1] * m[2][2],
                m[0][1] * m[1][2] - m[0][2] * m[1][1],
            ],
            [
                m[1][2] * m[2][0] - m[1][0] * m[2][2],
                m[0][0] * m[2][2] - m[0][2] * m[2][0],
                m[0][2] * m[1][0] - m[0][0] * m[1][2],
            ],
            [
                m[1][0] * m[2][1] - m[1][1] * m[2][0],
                m[0][1] * m[2][0] - m[0][0] * m[2][1],
                m[0][0] * m[1][1] - m[0][1] * m[1][0],
            ],
        ]);
        Some(adj * (1.0 / d))
    }

    /// Frobenius inner product `self : other`.
    pub fn ddot(&self, other: &Ten3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.m[i][j] * other.m[i][j];
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, &v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    /// True when `‖T − Tᵀ‖ ≤ tol·max(‖T‖, 1)` in the max-abs norm.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        self.skw().max_abs() <= tol * scale
    }

    pub fn is_skew(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        self.sym().max_abs() <= tol * scale
    }

    pub fn as_rows(&self) -> [[f64; 3]; 3] {
        self.m
    }
}

impl From<[[f64; 3]; 3]> for Ten3 {
    fn from(m: [[f64; 3]; 3]) -> Self {
        Ten3::new(m)
    }
}

impl From<Ten3> for [[f64; 3]; 3] {
    fn from(t: Ten3) -> Self {
        t.m
    }
}

impl Add for Ten3 {
    type Output = Ten3;
    fn add(self, o: Ten3) -> Ten3 {
        let mut r = Ten3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = self.m[i][j] + o.m[i][j];
            }
        }
        r
    }
}

impl AddAssign for Ten3 {
    fn add_assign(&mut self, o: Ten3) {
        *self = *self + o;
    }
}

impl Sub for Ten3 {
    type Output = Ten3;
    fn sub(self, o: Ten3) -> Ten3 {
        let mut r = Ten3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = self.m[i][j] - o.m[i][j];
            }
        }
        r
    }
}

impl SubAssign for Ten3 {
    fn sub_assign(&mut self, o: Ten3) {
        *self = *self - o;
    }
}

impl Neg for Ten3 {
    type Output = Ten3;
    fn neg(self) -> Ten3 {
        self * -1.0
    }
}

impl Mul<f64> for Ten3 {
    type Output = Ten3;
    fn mul(self, s: f64) -> Ten3 {
        let mut r = self;
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] *= s;
            }
        }
        r
    }
}

impl Mul<Ten3> for f64 {
    type Output = Ten3;
    fn mul(self, t: Ten3) -> Ten3 {
        t * self
    }
}

impl Mul<Vec3> for Ten3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }
}

impl Mul<Ten3> for Ten3 {
    type Output = Ten3;
    fn mul(self, o: Ten3) -> Ten3 {
        let mut r = Ten3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += self.m[i][k] * o.m[k][j];
                }
                r.m[i][j] = s;
            }
        }
        r
    }
}

/// Ricci map: the skew tensor whose action is `ricci(q)·a = q × a`.
pub fn ricci(q: Vec3) -> Ten3 {
    Ten3::new([[0.0, -q.z, q.y], [q.z, 0.0, -q.x], [-q.y, q.x, 0.0]])
}

/// Axial vector of a skew tensor: the inverse of [`ricci`].
///
/// Rejects inputs whose symmetric part exceeds `1e-12` relative to the
/// tensor's magnitude.
pub fn axial(w: &Ten3) -> Result<Vec3> {
    let scale = w.max_abs().max(1.0);
    let asym = w.sym().max_abs();
    if asym > 1e-12 * scale {
        return Err(Error::InvalidInput(format!(
            "axial part requested of a non-skew tensor (symmetric residue {asym:.3e})"
        )));
    }
    Ok(Vec3::new(w.get(2, 1), w.get(0, 2), w.get(1, 0)))
}

/// Split a tensor into symmetric part, skew part and trace.
pub fn decompose(t: &Ten3) -> (Ten3, Ten3, f64) {
    (t.sym(), t.skw(), t.trace())
}

/// Eigen-decomposition of a symmetric tensor by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, basis)` with `basis` orthogonal and the i-th column
/// the eigenvector of `eigenvalues[i]`. Eigenvalues are unsorted.
pub fn sym_eigen(a: &Ten3) -> ([f64; 3], Ten3) {
    let mut m = a.sym().as_rows();
    let mut q = Ten3::identity().as_rows();

    for _sweep in 0..64 {
        let off = (m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2]).sqrt();
        let scale = m[0][0].abs().max(m[1][1].abs()).max(m[2][2].abs()).max(off);
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for &(p, r) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apr = m[p][r];
            if apr == 0.0 {
                continue;
            }
            let theta = (m[r][r] - m[p][p]) / (2.0 * apr);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;

            for k in 0..3 {
                let mkp = m[k][p];
                let mkr = m[k][r];
                m[k][p] = c * mkp - s * mkr;
                m[k][r] = s * mkp + c * mkr;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mrk = m[r][k];
                m[p][k] = c * mpk - s * mrk;
                m[r][k] = s * mpk + c * mrk;
            }
            for k in 0..3 {
                let qkp = q[k][p];
                let qkr = q[k][r];
                q[k][p] = c * qkp - s * qkr;
                q[k][r] = s * qkp + c * qkr;
            }
        }
    }

    ([m[0][0], m[1][1], m[2][2]], Ten3::new(q))
}

/// Minimum-norm solution of `A·x = b` for symmetric PSD `A`.
///
/// Spectral components of `A` below `RANK_RTOL` times the largest eigenvalue
/// are treated as null; the solution has no component along them. If `b` has
/// a component along a null direction larger than a small multiple of `‖b‖`
/// the system is inconsistent and an error is returned.
pub fn solve_min_norm(a: &Ten3, b: Vec3) -> Result<Vec3> {
    let (vals, basis) = sym_eigen(a);
    let lam_max = vals.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let cutoff = RANK_RTOL * lam_max;
    let b_norm = b.norm();

    let mut x = Vec3::ZERO;
    for i in 0..3 {
        let e = basis.col(i);
        let coeff = e.dot(b);
        if vals[i].abs() <= cutoff {
            if coeff.abs() > CONSISTENCY_RTOL * b_norm.max(f64::MIN_POSITIVE) {
                return Err(Error::InconsistentSystem {
                    residual: coeff.abs() / b_norm.max(f64::MIN_POSITIVE),
                });
            }
        } else {
            x += e * (coeff / vals[i]);
        }
    }
    Ok(x)
}

/// Columnwise minimum-norm solution of `A·X = RHS` for symmetric PSD `A`.
pub fn solve_min_norm_ten(a: &Ten3, rhs: &Ten3) -> Result<Ten3> {
    let c0 = solve_min_norm(a, rhs.col(0))?;
    let c1 = solve_min_norm(a, rhs.col(1))?;
    let c2 = solve_min_norm(a, rhs.col(2))?;
    Ok(Ten3::from_cols(c0, c1, c2))
}

/// Orthogonal projector onto the range of a symmetric PSD tensor.
pub fn range_projector(a: &Ten3) -> Ten3 {
    let (vals, basis) = sym_eigen(a);
    let lam_max = vals.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let cutoff = RANK_RTOL * lam_max;
    let mut p = Ten3::ZERO;
    for i in 0..3 {
        if vals[i].abs() > cutoff {
            let e = basis.col(i);
            p += e.outer(e);
        }
    }
    p
}

/// Nearest orthogonal tensor in the polar sense: `R ↦ R (RᵀR)^{-1/2}`.
pub fn polar_orthonormalize(r: &Ten3) -> Ten3 {
    let (vals, basis) = sym_eigen(&(r.transpose() * *r));
    let mut inv_sqrt = Ten3::ZERO;
    for i in 0..3 {
        let e = basis.col(i);
        let lam = vals[i].max(f64::MIN_POSITIVE);
        inv_sqrt += e.outer(e) * (1.0 / lam.sqrt());
    }
    *r * inv_sqrt
}

/// Lower-triangular Cholesky factor of a symmetric positive definite tensor.
pub fn cholesky(a: &Ten3) -> Result<Ten3> {
    if !a.is_symmetric(1e-10) {
        return Err(Error::InvalidInput(
            "cholesky factor requested of a non-symmetric tensor".into(),
        ));
    }
    let m = a.sym().as_rows();
    let mut l = [[0.0_f64; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::InvalidInput(
                        "tensor is not positive definite".into(),
                    ));
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(Ten3::new(l))
}
