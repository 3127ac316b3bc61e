//! Unipotent one-parameter subgroups of `SO(1,2)` acting on the disk, and their horocycles.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::disk::DiskModel;
use crate::error::{Error, Result};
use crate::field::{FieldVector, QuadScalar};
use crate::linalg::{self, Matrix};

/// `t -> g(t) = I + tN + t^2 N^2 / 2` in frame coordinates of `W`, where
/// `N x = q(x, xi) eta - q(x, eta) xi` and `eta = xi3 p2 - xi2 p3` is q-orthogonal to `xi`.
#[derive(Clone, Debug)]
pub struct UnipotentFamily {
    xi: [QuadScalar; 3],
    /// Coefficient matrices of `t^0, t^1, t^2`.
    coefficients: [Matrix; 3],
}

/// `diag(1, -1, -1)`.
fn j_matrix() -> Matrix {
    (0..3)
        .map(|i| {
            (0..3)
                .map(|k| match (i, k) {
                    (0, 0) => QuadScalar::one(),
                    (a, b) if a == b => QuadScalar::from_int(-1),
                    _ => QuadScalar::zero(),
                })
                .collect()
        })
        .collect()
}

fn identity() -> Matrix {
    (0..3)
        .map(|i| {
            (0..3)
                .map(|k| if i == k { QuadScalar::one() } else { QuadScalar::zero() })
                .collect()
        })
        .collect()
}

fn scale(m: &Matrix, k: &QuadScalar) -> Matrix {
    m.iter().map(|r| r.iter().map(|x| x * k).collect()).collect()
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

fn zero() -> Matrix {
    vec![vec![QuadScalar::zero(); 3]; 3]
}

/// Coefficients of a product of matrix polynomials.
fn poly_mul(a: &[Matrix], b: &[Matrix]) -> Vec<Matrix> {
    let mut out = vec![zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            out[i + k] = add(&out[i + k], &linalg::mat_mul(x, y));
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

pub fn unipotent_subgroup(disk: &DiskModel, xi: &FieldVector) -> Result<UnipotentFamily> {
    let c = disk.frame_coords(xi)?;
    if c.iter().all(QuadScalar::is_zero) {
        return Err(Error::ZeroVector);
    }
    let norm = &(&c[0] * &c[0]) - &(&(&c[1] * &c[1]) + &(&c[2] * &c[2]));
    if !norm.is_zero() {
        return Err(Error::NotIsotropic);
    }
    if !c[0].is_positive() {
        return Err(Error::OutsideCone);
    }
    Ok(UnipotentFamily::from_frame_coords(c))
}

impl UnipotentFamily {
    /// Frame coordinates of an isotropic `xi` with `xi1 > 0`.
    pub fn from_frame_coords(xi: [QuadScalar; 3]) -> Self {
        let eta = [QuadScalar::zero(), xi[2].clone(), -&xi[1]];
        let j = j_matrix();
        let col = |v: &[QuadScalar; 3]| -> Matrix { v.iter().map(|x| vec![x.clone()]).collect() };
        let row = |v: &[QuadScalar; 3]| -> Matrix { vec![v.to_vec()] };
        // N = eta xi^T J - xi eta^T J
        let a = linalg::mat_mul(&linalg::mat_mul(&col(&eta), &row(&xi)), &j);
        let b = linalg::mat_mul(&linalg::mat_mul(&col(&xi), &row(&eta)), &j);
        let n = add(&a, &scale(&b, &QuadScalar::from_int(-1)));
        let n2 = linalg::mat_mul(&n, &n);
        let half = QuadScalar::rational(num::BigRational::new(1.into(), 2.into()));
        UnipotentFamily {
            xi,
            coefficients: [identity(), n, scale(&n2, &half)],
        }
    }

    pub fn xi(&self) -> &[QuadScalar; 3] {
        &self.xi
    }

    pub fn nilpotent(&self) -> &Matrix {
        &self.coefficients[1]
    }

    pub fn coefficients(&self) -> &[Matrix; 3] {
        &self.coefficients
    }

    /// `g(t)`, exact.
    pub fn at(&self, t: &QuadScalar) -> Matrix {
        let t2 = t * t;
        add(
            &add(&self.coefficients[0], &scale(&self.coefficients[1], t)),
            &scale(&self.coefficients[2], &t2),
        )
    }

    pub fn at_f64(&self, t: f64) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (k, x) in row.iter_mut().enumerate() {
                *x = self.coefficients[0][i][k].to_f64()
                    + t * self.coefficients[1][i][k].to_f64()
                    + t * t * self.coefficients[2][i][k].to_f64();
            }
        }
        out
    }

    /// `N^3 = 0` and `N xi = 0`.
    pub fn is_nilpotent_annihilator(&self) -> bool {
        let n = self.nilpotent();
        let n3 = linalg::mat_mul(&linalg::mat_mul(n, n), n);
        let xi: Matrix = self.xi.iter().map(|x| vec![x.clone()]).collect();
        n3.iter().flatten().all(QuadScalar::is_zero)
            && linalg::mat_mul(n, &xi).iter().flatten().all(QuadScalar::is_zero)
    }

    /// `g(s) g(t) = g(s + t)` as matrix polynomials in `s, t`: the `s^a t^b` coefficient of
    /// the left side is `C_a C_b` and of the right side `binom(a + b, a) C_{a+b}`.
    pub fn group_law_holds(&self) -> bool {
        let c = &self.coefficients;
        for a in 0..3 {
            for b in 0..3 {
                let lhs = linalg::mat_mul(&c[a], &c[b]);
                let rhs = if a + b < 3 {
                    scale(&c[a + b], &QuadScalar::from_int(binomial(a + b, a)))
                } else {
                    zero()
                };
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Coefficients of `t^0 .. t^4` in `g(t)^T J g(t) - J`, which must all vanish.
    pub fn isometry_defect(&self) -> Vec<Matrix> {
        let j = j_matrix();
        let gt: Vec<Matrix> = self.coefficients.iter().map(linalg::transpose).collect();
        let jg: Vec<Matrix> = self.coefficients.iter().map(|m| linalg::mat_mul(&j, m)).collect();
        let mut out = poly_mul(&gt, &jg);
        out[0] = add(&out[0], &scale(&j, &QuadScalar::from_int(-1)));
        out
    }

    pub fn is_isometry(&self) -> bool {
        self.isometry_defect().iter().flatten().flatten().all(QuadScalar::is_zero)
    }

    /// Boundary point `(xi2 / xi1, xi3 / xi1)` fixed by the family.
    pub fn boundary_point(&self) -> (f64, f64) {
        let x = self.xi[1].checked_div(&self.xi[0]).expect("xi1 > 0");
        let y = self.xi[2].checked_div(&self.xi[0]).expect("xi1 > 0");
        (x.to_f64(), y.to_f64())
    }

    fn lift_image(&self, base: (f64, f64), t: f64) -> [f64; 3] {
        let g = self.at_f64(t);
        let v = [1.0, base.0, base.1];
        g.map(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum())
    }

    /// Image of the disk point `base` under `g(t)`.
    pub fn act(&self, base: (f64, f64), t: f64) -> (f64, f64) {
        let w = self.lift_image(base, t);
        (w[1] / w[0], w[2] / w[0])
    }
}

/// Orbit of an interior disk point: `disk_coords(g(t) . (1, x, y))` for each sample.
///
/// Disk coordinates are the projective chart, where geodesics are straight chords and
/// horocycles are ellipses; see [`horocycle_orbit_conformal`] for the conformal picture.
pub fn horocycle_orbit(family: &UnipotentFamily, base: (f64, f64), t_samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_interior(base)?;
    Ok(t_samples.iter().map(|&t| family.act(base, t)).collect())
}

/// The same orbit in the conformal (Poincare) disk, where horocycles are Euclidean circles
/// internally tangent to the unit circle.
///
/// A lift `w` with `q(w, w) = m` maps to `(w2, w3) / (w1 + sqrt(m))`; `m = 1 - |base|^2` is
/// preserved by the flow, which avoids cancellation near the boundary.
pub fn horocycle_orbit_conformal(family: &UnipotentFamily, base: (f64, f64), t_samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_interior(base)?;
    let m = (1.0 - base.0 * base.0 - base.1 * base.1).sqrt();
    Ok(t_samples
        .iter()
        .map(|&t| {
            let w = family.lift_image(base, t);
            (w[1] / (w[0] + m), w[2] / (w[0] + m))
        })
        .collect())
}

/// Projective chart to conformal disk: `k -> k / (1 + sqrt(1 - |k|^2))`.
pub fn projective_to_conformal(k: (f64, f64)) -> (f64, f64) {
    let s = 1.0 + (1.0 - k.0 * k.0 - k.1 * k.1).max(0.0).sqrt();
    (k.0 / s, k.1 / s)
}

fn check_interior(base: (f64, f64)) -> Result<()> {
    if base.0 * base.0 + base.1 * base.1 >= 1.0 {
        return Err(Error::OnBoundary);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleFit {
    pub center: (f64, f64),
    pub radius: f64,
    /// Largest distance from a sample to the fitted circle.
    pub residual: f64,
}

/// Algebraic least-squares circle `x^2 + y^2 + D x + E y + F = 0` through the points.
pub fn fit_circle(points: &[(f64, f64)]) -> Option<CircleFit> {
    if points.len() < 3 {
        return None;
    }
    let a = DMatrix::from_fn(points.len(), 3, |i, k| match k {
        0 => points[i].0,
        1 => points[i].1,
        _ => 1.0,
    });
    let b = DVector::from_fn(points.len(), |i, _| -(points[i].0.powi(2) + points[i].1.powi(2)));
    let sol = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let center = (-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = center.0.powi(2) + center.1.powi(2) - sol[2];
    if !(r2 > 0.0) {
        return None;
    }
    let radius = r2.sqrt();
    let residual = points
        .iter()
        .map(|p| ((p.0 - center.0).hypot(p.1 - center.1) - radius).abs())
        .fold(0.0, f64::max);
    Some(CircleFit {
        center,
        radius,
        residual,
    })
}

/// How far the fitted circle is from being internally tangent to the unit circle at `touch`:
/// the larger of `| |c| + r - 1 |` and the distance from `touch` to the fitted circle.
pub fn tangency_residual(fit: &CircleFit, touch: (f64, f64)) -> f64 {
    let internal = (fit.center.0.hypot(fit.center.1) + fit.radius - 1.0).abs();
    let through = ((touch.0 - fit.center.0).hypot(touch.1 - fit.center.1) - fit.radius).abs();
    internal.max(through)
}
