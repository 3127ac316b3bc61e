//! Positive oriented 2-planes, their quadric model, and the orbit trichotomy.

use std::sync::Arc;

use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{join_fields, FieldVector, QuadScalar};
use crate::lattice::QuadraticLattice;
use crate::linalg;
use crate::zvec::{echelon_key, ZVec};

/// Oriented 2-plane in `V_R` on which `q` is positive definite.
#[derive(Clone, Debug)]
pub struct PositivePlane {
    lattice: Arc<QuadraticLattice>,
    basis: [FieldVector; 2],
}

/// Exact canonical key of an oriented plane: pivot columns and reduced row-echelon rows
/// (as integers over a common denominator in lowest terms), plus the sign of the basis
/// change from the echelon basis to the given basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlaneKey {
    pivots: [usize; 2],
    rows: Vec<BigInt>,
    orientation: i8,
}

impl PlaneKey {
    pub(crate) fn from_zvecs(w1: &ZVec, w2: &ZVec) -> Self {
        let (pivots, orientation, rows) = echelon_key(w1, w2).expect("independent basis");
        PlaneKey {
            pivots,
            rows,
            orientation,
        }
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn pivots(&self) -> [usize; 2] {
        self.pivots
    }

    /// Key of the same span with the opposite orientation.
    pub fn reversed(&self) -> Self {
        PlaneKey {
            orientation: -self.orientation,
            ..self.clone()
        }
    }

    fn same_span(&self, other: &Self) -> bool {
        self.pivots == other.pivots && self.rows == other.rows
    }
}

impl PositivePlane {
    pub fn new(lattice: Arc<QuadraticLattice>, w1: FieldVector, w2: FieldVector) -> Result<Self> {
        let d = join_fields(w1.field(), w2.field())?;
        let w1 = w1.lift(d)?;
        let w2 = w2.lift(d)?;
        let g11 = lattice.norm(&w1)?;
        let g12 = lattice.eval_form(&w1, &w2)?;
        let g22 = lattice.norm(&w2)?;
        if linalg::rank(&[w1.coords().to_vec(), w2.coords().to_vec()]) < 2 {
            return Err(Error::DependentSpan);
        }
        let det = &(&g11 * &g22) - &(&g12 * &g12);
        if !g11.is_positive() || !det.is_positive() {
            return Err(Error::NotPositive);
        }
        Ok(PositivePlane {
            lattice,
            basis: [w1, w2],
        })
    }

    pub fn lattice(&self) -> &Arc<QuadraticLattice> {
        &self.lattice
    }

    pub fn basis(&self) -> &[FieldVector; 2] {
        &self.basis
    }

    pub fn field(&self) -> u64 {
        self.basis[0].field()
    }

    /// Same span, opposite orientation.
    pub fn reversed(&self) -> Self {
        PositivePlane {
            lattice: Arc::clone(&self.lattice),
            basis: [self.basis[1].clone(), self.basis[0].clone()],
        }
    }

    /// Plane spanned by images of the basis; positivity is inherited from isometries.
    pub(crate) fn from_basis_unchecked(lattice: Arc<QuadraticLattice>, basis: [FieldVector; 2]) -> Self {
        PositivePlane { lattice, basis }
    }

    pub fn key(&self) -> PlaneKey {
        let w1 = ZVec::from_field_vector(&self.basis[0]);
        let w2 = ZVec::from_field_vector(&self.basis[1]);
        PlaneKey::from_zvecs(&w1, &w2)
    }

    /// Equality of oriented planes in the same lattice.
    pub fn same_oriented(&self, other: &Self) -> bool {
        same_lattice(&self.lattice, &other.lattice) && self.key() == other.key()
    }

    pub fn same_span(&self, other: &Self) -> bool {
        same_lattice(&self.lattice, &other.lattice) && self.key().same_span(&other.key())
    }

    /// Exact membership of `v` in the real span of the plane.
    ///
    /// A vector over a different quadratic field `Q(sqrt e)` lies in the span iff both of
    /// its components `u + sqrt(e) w` do, because the span is defined over `Q(sqrt d)`.
    pub fn contains(&self, v: &FieldVector) -> Result<bool> {
        if v.len() != self.lattice.rank() {
            return Err(Error::RankMismatch {
                expected: self.lattice.rank(),
                found: v.len(),
            });
        }
        if join_fields(self.field(), v.field()).is_ok() {
            return Ok(self.contains_same_field(v));
        }
        let (u, w) = v.split();
        Ok(self.contains_same_field(&FieldVector::from_rationals(u))
            && self.contains_same_field(&FieldVector::from_rationals(w)))
    }

    fn contains_same_field(&self, v: &FieldVector) -> bool {
        let rows = vec![
            self.basis[0].coords().to_vec(),
            self.basis[1].coords().to_vec(),
            v.coords().to_vec(),
        ];
        linalg::rank(&rows) == 2
    }

    /// Exact `q` on the plane basis: `(q11, q12, q22)`.
    pub fn gram(&self) -> [QuadScalar; 3] {
        let l = &self.lattice;
        let [w1, w2] = &self.basis;
        [
            l.norm(w1).expect("validated plane"),
            l.eval_form(w1, w2).expect("validated plane"),
            l.norm(w2).expect("validated plane"),
        ]
    }
}

pub(crate) fn same_lattice(a: &Arc<QuadraticLattice>, b: &Arc<QuadraticLattice>) -> bool {
    Arc::ptr_eq(a, b) || a.gram() == b.gram()
}

/// Exact membership test, see [`PositivePlane::contains`].
pub fn plane_contains(plane: &PositivePlane, v: &FieldVector) -> Result<bool> {
    plane.contains(v)
}

/// Complex line `l = x + i sqrt(r) y` with `q(l, l) = 0` and `q(l, conj l) > 0`.
///
/// The ratio `r` keeps the representation exact: normalizing `y` would need a square root.
#[derive(Clone, Debug)]
pub struct PeriodPoint {
    lattice: Arc<QuadraticLattice>,
    x: FieldVector,
    y: FieldVector,
    r: QuadScalar,
}

impl PeriodPoint {
    pub fn new(lattice: Arc<QuadraticLattice>, x: FieldVector, y: FieldVector, r: QuadScalar) -> Result<Self> {
        let d = join_fields(join_fields(x.field(), y.field())?, r.field())?;
        let x = x.lift(d)?;
        let y = y.lift(d)?;
        let p = PeriodPoint { lattice, x, y, r };
        if !p.r.is_positive() || !p.quadric_holds()? {
            return Err(Error::NotPeriod);
        }
        Ok(p)
    }

    /// `l = x + i y` with `r = 1`.
    pub fn from_xy(lattice: Arc<QuadraticLattice>, x: FieldVector, y: FieldVector) -> Result<Self> {
        Self::new(lattice, x, y, QuadScalar::one())
    }

    pub fn lattice(&self) -> &Arc<QuadraticLattice> {
        &self.lattice
    }

    pub fn real_part(&self) -> &FieldVector {
        &self.x
    }

    /// `y` with `Im l = sqrt(r) y`.
    pub fn imaginary_direction(&self) -> &FieldVector {
        &self.y
    }

    pub fn ratio(&self) -> &QuadScalar {
        &self.r
    }

    /// `q(l, l) = q(x,x) - r q(y,y) + 2i sqrt(r) q(x,y)`; both parts must vanish, and
    /// `q(l, conj l) = q(x,x) + r q(y,y)` must be positive.
    pub fn quadric_holds(&self) -> Result<bool> {
        let xx = self.lattice.norm(&self.x)?;
        let yy = self.lattice.norm(&self.y)?;
        let xy = self.lattice.eval_form(&self.x, &self.y)?;
        let ryy = &self.r * &yy;
        Ok((&xx - &ryy).is_zero() && xy.is_zero() && (&xx + &ryy).is_positive())
    }

    /// `q(l, conj l)`.
    pub fn hermitian_norm(&self) -> QuadScalar {
        let xx = self.lattice.norm(&self.x).expect("validated period");
        let yy = self.lattice.norm(&self.y).expect("validated period");
        &xx + &(&self.r * &yy)
    }

    pub fn conj(&self) -> Self {
        PeriodPoint {
            lattice: Arc::clone(&self.lattice),
            x: self.x.clone(),
            y: self.y.neg(),
            r: self.r.clone(),
        }
    }

    /// Projective equality, decided through the oriented planes.
    pub fn same_point(&self, other: &Self) -> bool {
        period_to_plane(self).same_oriented(&period_to_plane(other))
    }

    /// Floating export `x + i sqrt(r) y`.
    pub fn to_complex(&self) -> Vec<(f64, f64)> {
        let s = self.r.to_f64().sqrt();
        self.x
            .to_f64()
            .into_iter()
            .zip(self.y.to_f64())
            .map(|(a, b)| (a, s * b))
            .collect()
    }
}

/// Gram–Schmidt inside the plane: `x = w1`, `y = w2 - q(w1,w2)/q(w1,w1) w1`, `r = q(x,x)/q(y,y)`.
pub fn plane_to_period(plane: &PositivePlane) -> PeriodPoint {
    let [w1, w2] = plane.basis();
    let [g11, g12, _] = plane.gram();
    let c = -g12.checked_div(&g11).expect("positive plane");
    let y = w1.scale(&c).checked_add(w2).expect("same field");
    let yy = plane.lattice.norm(&y).expect("same rank");
    let r = g11.checked_div(&yy).expect("positive plane");
    PeriodPoint {
        lattice: Arc::clone(&plane.lattice),
        x: w1.clone(),
        y,
        r,
    }
}

/// Oriented plane `span{x, y}` of a period point.
pub fn period_to_plane(p: &PeriodPoint) -> PositivePlane {
    PositivePlane::from_basis_unchecked(Arc::clone(&p.lattice), [p.x.clone(), p.y.clone()])
}

/// Closure type of the orbit of a plane under an arithmetic subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase")]
pub enum OrbitType {
    /// The plane is rational; the witness is a primitive rational basis.
    Closed { witness: [Vec<BigInt>; 2] },
    /// No rational vectors in the plane.
    Dense,
    /// Exactly one rational line, spanned by the primitive witness.
    Intermediate { witness: Vec<BigInt> },
}

impl OrbitType {
    pub fn tag(&self) -> &'static str {
        match self {
            OrbitType::Closed { .. } => "closed",
            OrbitType::Dense => "dense",
            OrbitType::Intermediate { .. } => "intermediate",
        }
    }
}

/// Checks the classification hypotheses: signature `(3, b)` with `b >= 2`.
pub fn check_trichotomy_hypotheses(lattice: &QuadraticLattice) -> Result<()> {
    let s = lattice.signature();
    if s.pos != 3 || s.neg < 2 {
        return Err(Error::SignatureHypothesis {
            pos: s.pos,
            neg: s.neg,
        });
    }
    Ok(())
}

/// Classifies the orbit closure of `plane` by the dimension of its rational part.
pub fn orbit_type(plane: &PositivePlane) -> Result<OrbitType> {
    check_trichotomy_hypotheses(plane.lattice())?;
    let part = plane.lattice().rational_intersection_dim(plane.basis())?;
    let mut basis = part.basis.into_iter();
    Ok(match part.dim {
        2 => OrbitType::Closed {
            witness: [basis.next().unwrap(), basis.next().unwrap()],
        },
        1 => OrbitType::Intermediate {
            witness: basis.next().unwrap(),
        },
        _ => OrbitType::Dense,
    })
}

/// `gamma_v`: the reflection in `v` followed by orientation reversal.
///
/// Requires `q(v, v) > 0`. The fixed points on planes are exactly the planes containing `v`.
pub trait AntiHolomorphicInvolution: Sized {
    fn involution_gamma(&self, v: &FieldVector) -> Result<Self>;
}

fn positive_axis(lattice: &QuadraticLattice, v: &FieldVector) -> Result<()> {
    if !lattice.norm(v)?.is_positive() {
        return Err(Error::NonPositiveAxis);
    }
    Ok(())
}

impl AntiHolomorphicInvolution for PositivePlane {
    fn involution_gamma(&self, v: &FieldVector) -> Result<Self> {
        positive_axis(&self.lattice, v)?;
        let [w1, w2] = &self.basis;
        let a = self.lattice.reflect(v, w2)?;
        let b = self.lattice.reflect(v, w1)?;
        let d = join_fields(a.field(), b.field())?;
        Ok(PositivePlane::from_basis_unchecked(
            Arc::clone(&self.lattice),
            [a.lift(d)?, b.lift(d)?],
        ))
    }
}

impl AntiHolomorphicInvolution for PeriodPoint {
    /// `l -> conj(iota_v l)`.
    fn involution_gamma(&self, v: &FieldVector) -> Result<Self> {
        positive_axis(&self.lattice, v)?;
        let x = self.lattice.reflect(v, &self.x)?;
        let y = self.lattice.reflect(v, &self.y)?.neg();
        let d = join_fields(x.field(), y.field())?;
        Ok(PeriodPoint {
            lattice: Arc::clone(&self.lattice),
            x: x.lift(d)?,
            y: y.lift(d)?,
            r: self.r.clone(),
        })
    }
}

/// Numerical anti-holomorphy check of `gamma_v` at a period point.
///
/// In the affine chart `l -> l / l_k` (with `k` the largest coordinate of the image) the
/// differential of an anti-holomorphic map satisfies `D(i delta) = -i D(delta)`. Returns the
/// relative defect `|D(i delta) + i D(delta)| / |D(delta)|` for a tangent direction `delta`
/// with `q(l, delta) = 0` (finite differences, step `eps`).
pub fn antiholomorphy_defect(p: &PeriodPoint, v: &FieldVector, delta: &[(f64, f64)], eps: f64) -> Result<f64> {
    use num::complex::Complex64;
    positive_axis(&p.lattice, v)?;
    let gram: Vec<Vec<f64>> = p.lattice.gram().iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let vf = v.to_f64();
    let vv: f64 = quad_f64(&gram, &vf, &vf);
    let map = |l: &[Complex64]| -> Vec<Complex64> {
        let lv: Complex64 = (0..l.len())
            .map(|i| (0..l.len()).map(|j| l[i] * gram[i][j] * vf[j]).sum::<Complex64>())
            .sum();
        l.iter()
            .zip(&vf)
            .map(|(x, vi)| (x - lv * (2.0 * vi / vv)).conj())
            .collect()
    };
    let l: Vec<Complex64> = p.to_complex().into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
    let dl: Vec<Complex64> = delta.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
    let base = map(&l);
    let k = (0..base.len())
        .max_by(|&a, &b| base[a].norm().total_cmp(&base[b].norm()))
        .unwrap_or(0);
    let chart = |w: Vec<Complex64>| -> Vec<Complex64> {
        let s = w[k];
        w.into_iter().map(|z| z / s).collect()
    };
    let c0 = chart(base);
    let step = |dir: &[Complex64]| -> Vec<Complex64> {
        let moved: Vec<Complex64> = l.iter().zip(dir).map(|(a, b)| a + b * eps).collect();
        chart(map(&moved))
            .into_iter()
            .zip(&c0)
            .map(|(a, b)| (a - b) / eps)
            .collect()
    };
    let i = Complex64::new(0.0, 1.0);
    let d1 = step(&dl);
    let idl: Vec<Complex64> = dl.iter().map(|z| z * i).collect();
    let d2 = step(&idl);
    let num: f64 = d2.iter().zip(&d1).map(|(a, b)| (a + b * i).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = d1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

fn quad_f64(gram: &[Vec<f64>], x: &[f64], y: &[f64]) -> f64 {
    gram.iter()
        .enumerate()
        .map(|(i, row)| row.iter().zip(y).map(|(g, b)| x[i] * g * b).sum::<f64>())
        .sum()
}
