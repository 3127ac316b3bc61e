//! Floating-point distance between oriented planes.
//!
//! Coordinates are taken in the lattice's exact q-orthogonal frame `p_i` with
//! `q(p_i, p_i) = D_i`. The auxiliary inner product `<x, y> = sum |D_i| c_i(x) c_i(y)`
//! (with `c_i` the frame coordinates) is positive definite and exact over `Q(sqrt d)`,
//! so planes are orthonormalized exactly before the conversion to `f64`.

use crate::error::{Error, Result};
use crate::field::{FieldVector, QuadScalar};
use crate::lattice::QuadraticLattice;
use crate::period::{same_lattice, PositivePlane};
use crate::zvec::{quad_to_scaled, Scaled, ZVec};
use num::ToPrimitive;

/// Aux-orthonormal oriented basis of a plane, in aux coordinates `y_i = sqrt|D_i| c_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPlane {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Frame coordinates `c_i(x) = q(x, p_i) / D_i`, exact.
pub fn frame_coords(lattice: &QuadraticLattice, x: &FieldVector) -> Result<Vec<QuadScalar>> {
    let frame = lattice.frame();
    let gx = lattice.gram_apply(x)?;
    Ok(frame
        .columns
        .iter()
        .zip(&frame.diagonal)
        .map(|(p, d)| {
            let qxp = p
                .iter()
                .zip(gx.coords())
                .fold(QuadScalar::zero(), |acc, (a, b)| &acc + &(a * b));
            qxp.checked_div(d).expect("non-degenerate frame")
        })
        .collect())
}

/// Absolute values `|D_i|` of the frame diagonal.
fn aux_weights(lattice: &QuadraticLattice) -> Vec<QuadScalar> {
    lattice
        .frame()
        .diagonal
        .iter()
        .map(|d| if d.is_negative() { -d } else { d.clone() })
        .collect()
}

/// Indices of positive and negative frame directions.
pub fn frame_signs(lattice: &QuadraticLattice) -> Vec<i8> {
    lattice.frame().diagonal.iter().map(QuadScalar::signum).collect()
}

impl FloatPlane {
    pub fn from_plane(plane: &PositivePlane) -> Self {
        let [w1, w2] = plane.basis();
        Self::from_zvecs(plane.lattice(), &ZVec::from_field_vector(w1), &ZVec::from_field_vector(w2))
    }

    /// Gram-Schmidt in integer arithmetic: with `C_k = T w_k` and `n_kl` their weighted
    /// products, the second vector is `n_11 C_2 - n_12 C_1`, a positive multiple of the exact
    /// orthogonal complement. Only the final coordinates are rounded.
    pub(crate) fn from_zvecs(lattice: &QuadraticLattice, w1: &ZVec, w2: &ZVec) -> Self {
        let aux = lattice.aux();
        let c1 = w1.transform(&aux.t);
        let c2 = w2.transform(&aux.t);
        let n11 = c1.weighted_dot(&c1, &aux.weights);
        let n12 = c1.weighted_dot(&c2, &aux.weights);
        let c2 = c2.combine(&n11, &c1, &n12);
        let scale: Vec<f64> = aux.weights.iter().map(|w| w.to_f64().unwrap_or(f64::NAN).sqrt()).collect();
        FloatPlane {
            u: scaled_unit(&c1, &scale),
            v: scaled_unit(&c2, &scale),
        }
    }

    /// Orthonormalizes two vectors given in aux coordinates (orientation kept).
    pub fn from_aux_vectors(a: &[f64], b: &[f64]) -> Self {
        let u = normalized(a.to_vec());
        let p = dot(&u, b);
        let v: Vec<f64> = b.iter().zip(&u).map(|(x, y)| x - p * y).collect();
        FloatPlane { u, v: normalized(v) }
    }

    /// Oriented principal-angle distance `sqrt(theta_1^2 + theta_2^2)`.
    ///
    /// Cosines are the singular values of `A B^T`, sines those of `B (I - A^T A)`; when
    /// `det(A B^T) < 0` the orientations disagree and the second angle becomes `pi - theta_2`.
    pub fn distance(&self, other: &FloatPlane) -> f64 {
        let m = [
            [dot(&self.u, &other.u), dot(&self.u, &other.v)],
            [dot(&self.v, &other.u), dot(&self.v, &other.v)],
        ];
        let (c1, c2) = singular_values_2x2(&m);
        // Gram matrix of the residuals of other.u, other.v after projecting onto self,
        // accumulated term by term so that small sines keep full precision
        let mut g = [[0.0; 2]; 2];
        for i in 0..self.u.len() {
            let r1 = other.u[i] - m[0][0] * self.u[i] - m[1][0] * self.v[i];
            let r2 = other.v[i] - m[0][1] * self.u[i] - m[1][1] * self.v[i];
            g[0][0] += r1 * r1;
            g[0][1] += r1 * r2;
            g[1][1] += r2 * r2;
        }
        g[1][0] = g[0][1];
        let (s_big, s_small) = sym_eigen_2x2(&g);
        let s_big = s_big.max(0.0).sqrt();
        let s_small = s_small.max(0.0).sqrt();
        // largest cosine pairs with smallest sine
        let t1 = s_small.atan2(c1);
        let mut t2 = s_big.atan2(c2);
        if m[0][0] * m[1][1] - m[0][1] * m[1][0] < 0.0 {
            t2 = std::f64::consts::PI - t2;
        }
        (t1 * t1 + t2 * t2).sqrt()
    }

    /// Angle between a vector (aux coordinates) and this plane.
    pub fn angle_to_vector(&self, x: &[f64]) -> f64 {
        let a = dot(&self.u, x);
        let b = dot(&self.v, x);
        let along = (a * a + b * b).sqrt();
        let r: Vec<f64> = x
            .iter()
            .zip(self.u.iter().zip(&self.v))
            .map(|(xi, (ui, vi))| xi - a * ui - b * vi)
            .collect();
        dot(&r, &r).sqrt().atan2(along)
    }
}

/// Aux coordinates of an exact vector.
pub fn aux_coords(lattice: &QuadraticLattice, x: &FieldVector) -> Result<Vec<f64>> {
    let weights = aux_weights(lattice);
    Ok(frame_coords(lattice, x)?
        .iter()
        .zip(&weights)
        .map(|(c, w)| c.to_f64() * w.to_f64().sqrt())
        .collect())
}

/// Principal-angle distance between two oriented planes of the same lattice.
pub fn plane_distance(a: &PositivePlane, b: &PositivePlane) -> Result<f64> {
    if !same_lattice(a.lattice(), b.lattice()) {
        return Err(Error::LatticeMismatch);
    }
    Ok(FloatPlane::from_plane(a).distance(&FloatPlane::from_plane(b)))
}

fn scaled_unit(c: &ZVec, scale: &[f64]) -> Vec<f64> {
    let parts: Vec<Scaled> = c.a.iter().zip(&c.b).map(|(x, y)| quad_to_scaled(x, y, c.d)).collect();
    let exp = parts
        .iter()
        .filter(|p| p.mantissa != 0.0)
        .map(|p| p.exp + p.mantissa.abs().log2().ceil() as i64)
        .max()
        .unwrap_or(0);
    normalized(parts.iter().zip(scale).map(|(p, s)| p.to_exp(exp) * s).collect())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let n = dot(&v, &v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

/// Singular values (descending) of a 2x2 matrix.
fn singular_values_2x2(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let ata = [
        [m[0][0] * m[0][0] + m[1][0] * m[1][0], m[0][0] * m[0][1] + m[1][0] * m[1][1]],
        [m[0][1] * m[0][0] + m[1][1] * m[1][0], m[0][1] * m[0][1] + m[1][1] * m[1][1]],
    ];
    let (l1, _) = sym_eigen_2x2(&ata);
    let s1 = l1.max(0.0).sqrt();
    // the product of singular values is |det|, which is more accurate for the small one
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
    let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
    (s1.min(1.0), s2.min(1.0))
}

/// Eigenvalues (descending) of a symmetric 2x2 matrix.
fn sym_eigen_2x2(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let tr = m[0][0] + m[1][1];
    let half_gap = (((m[0][0] - m[1][1]) * 0.5).powi(2) + m[0][1] * m[1][0]).max(0.0).sqrt();
    let l1 = tr * 0.5 + half_gap;
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let l2 = if l1.abs() > 0.0 { det / l1 } else { tr * 0.5 - half_gap };
    (l1, l2)
}
